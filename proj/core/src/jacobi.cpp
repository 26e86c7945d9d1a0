#include "cdklab/jacobi.hpp"

#include <algorithm>
#include <cmath>

namespace cdklab {

JacobiParameters::JacobiParameters(std::vector<double> head_a, std::vector<double> head_b,
                                   double tail_a, double tail_b,
                                   std::optional<std::size_t> horizon)
    : head_a_(std::move(head_a)),
      head_b_(std::move(head_b)),
      tail_a_(tail_a),
      tail_b_(tail_b),
      horizon_(horizon) {
  for (std::size_t i = 0; i < head_a_.size(); ++i) {
    if (!(head_a_[i] > 0.0) || !std::isfinite(head_a_[i]))
      throw std::invalid_argument("JacobiParameters: head_a[" + std::to_string(i) +
                                  "] must be positive and finite");
  }
  for (std::size_t i = 0; i < head_b_.size(); ++i) {
    if (!std::isfinite(head_b_[i]))
      throw std::invalid_argument("JacobiParameters: head_b[" + std::to_string(i) +
                                  "] must be finite");
  }
  if (!(tail_a_ > 0.0) || !std::isfinite(tail_a_))
    throw std::invalid_argument("JacobiParameters: tail_a must be positive and finite");
  if (!std::isfinite(tail_b_))
    throw std::invalid_argument("JacobiParameters: tail_b must be finite");
}

double JacobiParameters::a(std::size_t n) const {
  if (n == 0) throw std::out_of_range("JacobiParameters::a: index is 1-based");
  return n <= head_a_.size() ? head_a_[n - 1] : tail_a_;
}

double JacobiParameters::b(std::size_t n) const {
  if (n == 0) throw std::out_of_range("JacobiParameters::b: index is 1-based");
  if (horizon_ && n > *horizon_)
    throw std::out_of_range("JacobiParameters::b: index " + std::to_string(n) +
                            " is past the materialized horizon " + std::to_string(*horizon_));
  return n <= head_b_.size() ? head_b_[n - 1] : tail_b_;
}

std::size_t JacobiParameters::head_depth() const noexcept {
  return std::max(head_a_.size(), head_b_.size());
}

double JacobiParameters::min_a() const noexcept {
  double m = tail_a_;
  for (double v : head_a_) m = std::min(m, v);
  return m;
}

std::pair<double, double> JacobiParameters::essential_spectrum() const noexcept {
  return {tail_b_ - 2.0 * tail_a_, tail_b_ + 2.0 * tail_a_};
}

JacobiParameters catalog(Catalog which) {
  switch (which) {
    case Catalog::Free:
      return JacobiParameters({}, {}, 0.5, 0.0);
    case Catalog::Chebyshev1:
      return JacobiParameters({std::sqrt(0.5)}, {}, 0.5, 0.0);
  }
  throw std::invalid_argument("catalog: unknown entry");
}

JacobiParameters catalog(const std::string& name) {
  if (name == "free") return catalog(Catalog::Free);
  if (name == "chebyshev1") return catalog(Catalog::Chebyshev1);
  throw std::invalid_argument("catalog: unknown measure name '" + name +
                              "' (expected \"free\" or \"chebyshev1\")");
}

StripResult strip(const JacobiParameters& params) {
  const double a1 = params.a(1);
  std::vector<double> ha(params.head_a().begin() + (params.head_a().empty() ? 0 : 1),
                         params.head_a().end());
  std::vector<double> hb(params.head_b().begin() + (params.head_b().empty() ? 0 : 1),
                         params.head_b().end());
  std::optional<std::size_t> horizon = params.horizon();
  if (horizon) horizon = *horizon > 0 ? *horizon - 1 : 0;
  return {JacobiParameters(std::move(ha), std::move(hb), params.tail_a(), params.tail_b(),
                           horizon),
          a1 * a1};
}

PolyEval eval_pq(const JacobiParameters& params, Complex z, std::size_t n) {
  PolyEval out;
  out.z = z;
  out.p.reserve(n);
  out.q.reserve(n);
  recur_pq(params, z, n, [&](std::size_t, Complex p, Complex q) {
    out.p.push_back(p);
    out.q.push_back(q);
  });
  return out;
}

PolyEvalReal eval_pq(const JacobiParameters& params, double x, std::size_t n) {
  PolyEvalReal out;
  out.z = x;
  out.p.reserve(n);
  out.q.reserve(n);
  recur_pq(params, x, n, [&](std::size_t, double p, double q) {
    out.p.push_back(p);
    out.q.push_back(q);
  });
  return out;
}

double TransferMatrix::operator_norm() const {
  // Singular values from the 2x2 Gram spectrum: s^2 = (t +- sqrt(t^2 - 4 d)) / 2
  // with t = ||.||_F^2 and d = |det|^2.
  const double t = frobenius_sq();
  const double d = std::norm(det());
  const double disc = std::max(t * t - 4.0 * d, 0.0);
  return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

TransferMatrix TransferMatrix::inverse() const {
  const Complex d = det();
  return {m11 / d, -m01 / d, -m10 / d, m00 / d};
}

TransferMatrix operator*(const TransferMatrix& lhs, const TransferMatrix& rhs) {
  return {lhs.m00 * rhs.m00 + lhs.m01 * rhs.m10, lhs.m00 * rhs.m01 + lhs.m01 * rhs.m11,
          lhs.m10 * rhs.m00 + lhs.m11 * rhs.m10, lhs.m10 * rhs.m01 + lhs.m11 * rhs.m11};
}

TransferMatrix one_step(const JacobiParameters& params, Complex z, std::size_t j) {
  if (j == 0) throw std::out_of_range("one_step: index is 1-based");
  const double aj = params.a(j);
  const Complex top = (z - params.b(j)) / aj;
  return {top, Complex(-1.0 / aj), Complex(aj), Complex(0.0)};
}

TransferMatrix transfer(const JacobiParameters& params, Complex z, std::size_t n) {
  TransferMatrix phi;  // identity
  for (std::size_t j = 1; j <= n; ++j) {
    phi = one_step(params, z, j) * phi;
    if (!detail::finite(phi.m00) || !detail::finite(phi.m01) || !detail::finite(phi.m10) ||
        !detail::finite(phi.m11))
      throw OverflowError(j);
  }
  return phi;
}

}  // namespace cdklab
