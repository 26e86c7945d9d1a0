#include "cdklab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cdklab {

namespace {

// Finalizer of splitmix64; a bijection on 64-bit words with good avalanche.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// draw-th uniform of the (seed, k) substream, in [0, 1). Pure function of its
// arguments: mix64 applied at the counter position of a splitmix64 stream.
double uniform01(std::uint64_t seed, std::uint64_t k, std::uint64_t draw) {
  constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  const std::uint64_t ctr = seed + kGamma * (2 * k + draw);
  return static_cast<double>(mix64(ctr) >> 11) * 0x1.0p-53;
}

double sample(const RandomDiagonal& pert, std::size_t k) {
  const double sigma = pert.sigma(k);
  switch (pert.dist) {
    case Dist::Rademacher:
      return uniform01(pert.seed, k, 0) < 0.5 ? -sigma : sigma;
    case Dist::UniformSymmetric: {
      // +-sqrt(3) sigma endpoints give unit-variance scaling.
      const double u = uniform01(pert.seed, k, 0);
      return sigma * std::sqrt(3.0) * (2.0 * u - 1.0);
    }
    case Dist::Gaussian: {
      const double u1 = uniform01(pert.seed, k, 0);
      const double u2 = uniform01(pert.seed, k, 1);
      // 1 - u1 lies in (0, 1], keeping the log finite.
      const double r = std::sqrt(-2.0 * std::log1p(-u1));
      const double pi = std::acos(-1.0);
      return sigma * r * std::cos(2.0 * pi * u2);
    }
  }
  throw std::logic_error("sample: unhandled distribution");
}

}  // namespace

double RandomDiagonal::sigma(std::size_t k) const {
  if (k == 0) throw std::out_of_range("RandomDiagonal::sigma: index is 1-based");
  return amplitude * std::pow(static_cast<double>(k), -exponent);
}

double perturbation_beta(const Perturbation& pert, std::size_t k) {
  if (k == 0) throw std::out_of_range("perturbation_beta: index is 1-based");
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RankOne>) {
          return k == 1 ? p.beta1 : 0.0;
        } else if constexpr (std::is_same_v<T, Diagonal>) {
          return k <= p.betas.size() ? p.betas[k - 1] : 0.0;
        } else {
          if (k > p.horizon) {
            throw std::out_of_range("perturbation_beta: index " + std::to_string(k) +
                                    " is past the materialized horizon " +
                                    std::to_string(p.horizon));
          }
          return sample(p, k);
        }
      },
      pert);
}

JacobiParameters apply(const JacobiParameters& base, const Perturbation& pert) {
  const std::size_t reach = std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RankOne>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Diagonal>) {
          return p.betas.size();
        } else {
          return p.horizon;
        }
      },
      pert);

  std::vector<double> head_b(std::max(reach, base.head_b().size()));
  for (std::size_t k = 1; k <= head_b.size(); ++k) {
    const double beta = k <= reach ? perturbation_beta(pert, k) : 0.0;
    head_b[k - 1] = beta == 0.0 ? base.b(k) : base.b(k) + beta;
  }

  std::optional<std::size_t> horizon = base.horizon();
  if (std::holds_alternative<RandomDiagonal>(pert)) {
    const std::size_t h = std::get<RandomDiagonal>(pert).horizon;
    horizon = horizon ? std::min(*horizon, h) : h;
  }
  return JacobiParameters(base.head_a(), std::move(head_b), base.tail_a(), base.tail_b(),
                          horizon);
}

VarParTrace variation_of_parameters(const JacobiParameters& base,
                                    const JacobiParameters& perturbed, double x,
                                    std::size_t n) {
  if (n == 0) throw std::invalid_argument("variation_of_parameters: n must be positive");
  if (base.head_a() != perturbed.head_a() || base.tail_a() != perturbed.tail_a()) {
    throw std::invalid_argument("variation_of_parameters: a-sequences must coincide");
  }
  const PolyEvalReal ref = eval_pq(base, x, n + 1);
  const PolyEvalReal per = eval_pq(perturbed, x, n + 1);

  VarParTrace out;
  out.u1.reserve(n);
  out.u2.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double a_k = base.a(k);
    const double u1 = -a_k * (per.p[k] * ref.q[k - 1] - ref.q[k] * per.p[k - 1]);
    const double u2 = -a_k * (ref.p[k] * per.p[k - 1] - per.p[k] * ref.p[k - 1]);
    out.u1.push_back(u1);
    out.u2.push_back(u2);
  }
  out.u1_limit = out.u1.back();
  out.u2_limit = out.u2.back();

  const std::size_t window = (n + 9) / 10;
  const std::size_t first = n > window ? n - window + 1 : 2;
  bool ok = first <= n;
  for (std::size_t k = first; k <= n && ok; ++k) {
    const double d1 = std::abs(out.u1[k - 1] - out.u1[k - 2]);
    const double d2 = std::abs(out.u2[k - 1] - out.u2[k - 2]);
    ok = d1 < 1e-6 && d2 < 1e-6;
  }
  out.converged = ok && first <= n;
  return out;
}

L2Report l2_condition_partial(const JacobiParameters& base, const RandomDiagonal& pert,
                              double x, std::size_t n, double tol) {
  if (n == 0) throw std::invalid_argument("l2_condition_partial: n must be positive");
  const PolyEvalReal ev = eval_pq(base, x, 2 * n + 1);
  L2Report out;
  out.n = n;
  double sum = 0.0;
  for (std::size_t k = 1; k <= 2 * n; ++k) {
    const double sigma = pert.sigma(k);
    const double amp = std::abs(ev.p[k]) + std::abs(ev.p[k - 1]) + std::abs(ev.q[k]) +
                       std::abs(ev.q[k - 1]);
    const double amp2 = amp * amp;
    sum += sigma * sigma * amp2 * amp2;
    if (k == n) out.s_n = sum;
  }
  out.s_2n = sum;
  out.rel_increment = (out.s_2n - out.s_n) / out.s_n;
  out.converged = out.rel_increment < tol;
  return out;
}

}  // namespace cdklab
