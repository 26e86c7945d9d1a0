#include "cdklab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace cdklab {

namespace {

// Kronrod-15 abscissae (positive half; even entries are Kronrod-only, odd
// entries are the embedded Gauss-7 nodes) and the two weight sets.
constexpr double kXgk[8] = {
    0.99145537112081264, 0.94910791234275852, 0.86486442335976907,
    0.74153118559939444, 0.58608723546769113, 0.40584515137739717,
    0.20778495500789847, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529225, 0.063092092629978553, 0.10479001032225018,
    0.14065325971552592,  0.1690047266392679,   0.19035057806478541,
    0.20443294007529889,  0.20948214108472783};
constexpr double kWg[4] = {0.12948496616886969, 0.27970539148927667,
                           0.38183005050511894, 0.41795918367346939};

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  Complex value;
  double err = 0.0;
};

Panel gk15(const std::function<Complex(double)>& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const Complex fc = f(centre);
  Complex gauss = kWg[3] * fc;
  Complex kronrod = kWgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const Complex f1 = f(centre - half * kXgk[j]);
    const Complex f2 = f(centre + half * kXgk[j]);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  Panel out;
  out.lo = lo;
  out.hi = hi;
  out.value = kronrod * half;
  out.err = std::abs(kronrod - gauss) * std::abs(half);
  return out;
}

}  // namespace

QuadResult adaptive_integrate(const std::function<Complex(double)>& f, double lo,
                              double hi, double tol, std::size_t max_panels) {
  if (!(lo < hi)) throw std::invalid_argument("adaptive_integrate: need lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_integrate: tol must be positive");

  const auto worse = [](const Panel& a, const Panel& b) { return a.err < b.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);

  QuadResult out;
  Panel root = gk15(f, lo, hi);
  out.evaluations = 15;
  Complex total = root.value;
  double total_err = root.err;
  queue.push(root);

  const double min_width = 1e-14 * (1.0 + std::abs(lo) + std::abs(hi));
  while (total_err > tol && queue.size() < max_panels) {
    const Panel worst = queue.top();
    if (worst.hi - worst.lo <= min_width) break;  // refinement exhausted
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = gk15(f, worst.lo, mid);
    const Panel right = gk15(f, mid, worst.hi);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
  }
  out.value = total;
  out.err_estimate = total_err;
  out.converged = total_err <= tol;
  return out;
}

QuadResult oscillatory_line_integral(const std::function<Complex(double)>& f,
                                     double core_lo, double core_hi, double half_period,
                                     double tol, std::size_t max_panels) {
  if (!(half_period > 0.0)) {
    throw std::invalid_argument("oscillatory_line_integral: half_period must be positive");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("oscillatory_line_integral: tol must be positive");
  }

  QuadResult core = adaptive_integrate(f, core_lo, core_hi, 0.25 * tol);
  std::size_t evals = core.evaluations;
  bool all_tails_done = true;
  double remainder = 0.0;

  std::vector<Panel> panels;
  const double stop = tol / 16.0;
  for (const double direction : {1.0, -1.0}) {
    const double edge = direction > 0.0 ? core_hi : core_lo;
    std::size_t below = 0;
    bool done = false;
    for (std::size_t m = 0; m < max_panels; ++m) {
      const double p0 = edge + direction * static_cast<double>(m) * half_period;
      const double p1 = p0 + direction * half_period;
      panels.push_back(gk15(f, std::min(p0, p1), std::max(p0, p1)));
      evals += 15;
      below = std::abs(panels.back().value) < stop ? below + 1 : 0;
      if (below >= 2) {
        remainder += std::abs(panels.back().value);  // alternating-series remainder bound
        done = true;
        break;
      }
    }
    all_tails_done = all_tails_done && done;
  }

  double panel_err = 0.0;
  for (const Panel& panel : panels) panel_err += panel.err;

  // Single-rule estimates are individually sound but collectively loose: the
  // sum over hundreds of half-period panels can dwarf the true error. When the
  // budget fails on the first pass, re-integrate the worst panels adaptively
  // against an equal share of the budget until the total closes.
  if (core.converged && all_tails_done && !panels.empty() &&
      core.err_estimate + panel_err + remainder > tol) {
    std::vector<std::size_t> order(panels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return panels[a].err > panels[b].err;
    });
    const double budget = 0.25 * tol / static_cast<double>(panels.size());
    for (const std::size_t idx : order) {
      if (core.err_estimate + panel_err + remainder <= 0.5 * tol) break;
      Panel& panel = panels[idx];
      if (panel.err <= budget) break;  // sorted: all remaining panels are finer already
      const QuadResult refined = adaptive_integrate(f, panel.lo, panel.hi, budget, 64);
      evals += refined.evaluations;
      if (refined.err_estimate < panel.err) {
        panel_err += refined.err_estimate - panel.err;
        panel.value = refined.value;
        panel.err = refined.err_estimate;
      }
    }
  }

  Complex total = core.value;
  for (const Panel& panel : panels) total += panel.value;

  QuadResult out;
  out.value = total;
  out.err_estimate = core.err_estimate + panel_err + remainder;
  out.evaluations = evals;
  out.converged = core.converged && all_tails_done && out.err_estimate <= tol;
  return out;
}

}  // namespace cdklab
