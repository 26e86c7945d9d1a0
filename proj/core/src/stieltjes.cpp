#include "cdklab/stieltjes.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdklab {

namespace {

constexpr double kRescaleAt = 1e150;
constexpr double kRescaleFloor = 1e-150;  // deep heads contract (num, den) geometrically

// Herglotz fixed point m of m = 1/(tail_b - z - tail_a^2 m), i.e. the root of
// tail_a^2 m^2 + (z - tail_b) m + 1 = 0 with Im m * Im z > 0. On the real axis
// the branch continues from above: inside the band take Im m > 0, outside take
// the root of smaller modulus (the Weyl/decaying one, product of roots is
// 1/tail_a^2).
Complex tail_fixed_point(double tail_a, double tail_b, Complex z) {
  const double alpha = tail_a * tail_a;
  const Complex beta = z - tail_b;
  const Complex disc = beta * beta - 4.0 * alpha;
  const Complex root = std::sqrt(disc);
  // qq = -(beta + s*root)/2 with the sign that avoids cancellation; the two
  // solutions are qq/alpha and 1/qq (Citardauq pairing).
  const double s = (std::real(std::conj(beta) * root) >= 0.0) ? 1.0 : -1.0;
  const Complex qq = -0.5 * (beta + s * root);
  Complex m1 = qq / alpha;
  Complex m2 = 1.0 / qq;
  if (std::imag(z) != 0.0) {
    const bool want_upper = std::imag(z) > 0.0;
    if ((std::imag(m1) > 0.0) == want_upper) return m1;
    return m2;
  }
  const double x = std::real(z);
  if (std::abs(x - tail_b) < 2.0 * tail_a) {
    return (std::imag(m1) > 0.0) ? m1 : m2;
  }
  return (std::abs(m1) <= std::abs(m2)) ? m1 : m2;
}

// Continued-fraction descent F = 1/(b_1 - z - a_1^2 F_1) unrolled over the
// head in homogeneous coordinates (num, den) so intermediate poles cost
// nothing; closed with the tail fixed point.
Complex descend_head(const JacobiParameters& params, Complex z, Complex tail_m) {
  Complex num = tail_m;
  Complex den = Complex(1.0);
  const std::size_t depth = params.head_depth();
  for (std::size_t j = depth; j >= 1; --j) {
    const double a2 = params.a(j) * params.a(j);
    const Complex next_num = den;
    const Complex next_den = (params.b(j) - z) * den - a2 * num;
    num = next_num;
    den = next_den;
    const double scale = std::max(std::abs(num), std::abs(den));
    if (scale > kRescaleAt || (scale != 0.0 && scale < kRescaleFloor)) {
      num /= scale;
      den /= scale;
    }
    if (!detail::finite(num) || !detail::finite(den)) {
      throw NumericError("stieltjes_F: continued fraction lost finiteness");
    }
  }
  if (den == Complex(0.0)) {
    throw NumericError("stieltjes_F: evaluation point is a pole of the continued fraction");
  }
  return num / den;
}

Complex evaluate_F(const JacobiParameters& params, Complex z) {
  const Complex m = tail_fixed_point(params.tail_a(), params.tail_b(), z);
  return descend_head(params, z, m);
}

}  // namespace

Complex stieltjes_F(const JacobiParameters& params, Complex z) {
  if (std::imag(z) == 0.0) {
    throw std::domain_error("stieltjes_F: z must be off the real axis; use boundary_F or stieltjes_F_limit");
  }
  return evaluate_F(params, z);
}

Complex stieltjes_F_limit(const JacobiParameters& params, double x) {
  return evaluate_F(params, Complex(x, 0.0));
}

BoundaryValue boundary_F(const JacobiParameters& params, double x, const BoundaryOptions& opts) {
  if (opts.k_min >= opts.k_max) {
    throw std::invalid_argument("boundary_F: k_min must be below k_max");
  }
  BoundaryValue out;
  out.x = x;
  Complex prev;
  Complex cur;
  for (int k = opts.k_min; k <= opts.k_max; ++k) {
    const double eps = std::ldexp(1.0, -k);
    out.eps_path.push_back(eps);
    prev = cur;
    cur = evaluate_F(params, Complex(x, eps));
  }
  out.err_estimate = std::abs(cur - prev);
  out.converged = out.err_estimate <= opts.cauchy_tol;
  // Halving epsilon roughly halves the linear error term, so the two-point
  // extrapolant 2F(eps) - F(2 eps) cancels it.
  out.F = opts.richardson ? (2.0 * cur - prev) : cur;
  return out;
}

std::optional<Complex> rank_one_F(Complex F, double beta1) {
  const Complex den = 1.0 + beta1 * F;
  const double scale = 1.0 + std::abs(beta1 * F);
  if (std::abs(den) <= 8.0 * std::numeric_limits<double>::epsilon() * scale) {
    return std::nullopt;
  }
  return F / den;
}

WeightBundle weights_from_boundary(const BoundaryValue& bv, std::optional<double> beta1) {
  WeightBundle out;
  out.x = bv.x;
  out.F = bv.F;
  out.err_estimate = bv.err_estimate;
  const double pi = std::acos(-1.0);
  out.w = std::imag(bv.F) / pi;
  const double mod2 = std::norm(bv.F);
  if (mod2 > 0.0) {
    out.w_tilde = out.w / mod2;
  }
  if (beta1) {
    out.beta1 = beta1;
    const double den2 = std::norm(1.0 + *beta1 * bv.F);
    const double scale = 1.0 + std::abs(*beta1 * bv.F);
    const double floor2 = 64.0 * std::numeric_limits<double>::epsilon() *
                          std::numeric_limits<double>::epsilon() * scale * scale;
    if (den2 > floor2) {
      out.w_beta = out.w / den2;
    }
  }
  return out;
}

WeightBundle weights(const JacobiParameters& params, double x,
                     std::optional<double> beta1, const BoundaryOptions& opts) {
  const BoundaryValue bv = boundary_F(params, x, opts);
  if (!bv.converged) {
    throw NumericError("weights: boundary value did not stabilize; x may carry a point mass or band edge");
  }
  return weights_from_boundary(bv, beta1);
}

std::optional<Eigenpair> eigenvalue_and_mass(const JacobiParameters& params, double beta1,
                                             double lo, double hi) {
  if (!(lo < hi)) {
    throw std::invalid_argument("eigenvalue_and_mass: need lo < hi");
  }
  if (beta1 == 0.0) {
    throw std::invalid_argument("eigenvalue_and_mass: beta1 must be nonzero");
  }
  const auto [ess_lo, ess_hi] = params.essential_spectrum();
  if (lo <= ess_hi && hi >= ess_lo) {
    throw std::invalid_argument("eigenvalue_and_mass: bracket must avoid the essential spectrum");
  }
  const auto g = [&](double e) { return 1.0 + beta1 * std::real(stieltjes_F_limit(params, e)); };
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo * g_hi > 0.0) return std::nullopt;
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, tol, max_iter);
  const double energy = 0.5 * (bracket.first + bracket.second);

  Eigenpair out;
  out.energy = energy;
  out.residual = std::abs(1.0 + beta1 * stieltjes_F_limit(params, energy));
  // Centered difference for F'; the step must stay clear of the essential
  // spectrum where the limit loses smoothness.
  const double dist = std::min(std::abs(energy - ess_lo), std::abs(energy - ess_hi));
  double h = 6e-6 * (1.0 + std::abs(energy));
  h = std::min(h, 0.25 * dist);
  const double f_plus = std::real(stieltjes_F_limit(params, energy + h));
  const double f_minus = std::real(stieltjes_F_limit(params, energy - h));
  out.f_prime = (f_plus - f_minus) / (2.0 * h);
  if (!(out.f_prime > 0.0)) {
    throw NumericError("eigenvalue_and_mass: F' must be positive off the essential spectrum");
  }
  out.mass = 1.0 / (beta1 * beta1 * out.f_prime);
  return out;
}

}  // namespace cdklab
