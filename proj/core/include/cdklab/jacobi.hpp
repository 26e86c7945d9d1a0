#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdklab {

using Complex = std::complex<double>;

// Thrown when a recurrence iterate leaves the finite double range; `index` is
// the first polynomial degree at which it happened.
class OverflowError : public std::runtime_error {
 public:
  explicit OverflowError(std::size_t index)
      : std::runtime_error("recurrence iterate overflowed at index " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Thrown when an iterative numeric procedure cannot meet its contract
// (non-stabilizing boundary limit, vanishing derivative, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Jacobi parameter sequence {a_n > 0, b_n} with an explicit finite head and a
// constant tail: a(n) = head_a[n-1] for n <= |head_a| and tail_a beyond, b
// likewise. Indices are 1-based throughout.
//
// An optional horizon marks the largest index whose b(n) is meaningful; it is
// set by randomly perturbed sequences, which must never be silently
// zero-extended past their materialized range. Reading b(n) past the horizon
// throws std::out_of_range.
class JacobiParameters {
 public:
  JacobiParameters(std::vector<double> head_a, std::vector<double> head_b,
                   double tail_a, double tail_b,
                   std::optional<std::size_t> horizon = std::nullopt);

  double a(std::size_t n) const;
  double b(std::size_t n) const;

  double tail_a() const noexcept { return tail_a_; }
  double tail_b() const noexcept { return tail_b_; }
  const std::vector<double>& head_a() const noexcept { return head_a_; }
  const std::vector<double>& head_b() const noexcept { return head_b_; }
  std::optional<std::size_t> horizon() const noexcept { return horizon_; }

  // Largest index covered by either head; beyond it both sequences are constant.
  std::size_t head_depth() const noexcept;

  // inf_n a_n; strictly positive by construction.
  double min_a() const noexcept;

  // Essential spectrum [tail_b - 2 tail_a, tail_b + 2 tail_a]; the finite head
  // only adds discrete points outside it.
  std::pair<double, double> essential_spectrum() const noexcept;

 private:
  std::vector<double> head_a_;
  std::vector<double> head_b_;
  double tail_a_;
  double tail_b_;
  std::optional<std::size_t> horizon_;
};

enum class Catalog { Free, Chebyshev1 };

// Free: a = 1/2, b = 0 (semicircle weight 2/pi sqrt(1-x^2) on [-1,1]).
// Chebyshev1: a_1 = 1/sqrt(2), a_n = 1/2 beyond, b = 0 (arcsine weight
// 1/(pi sqrt(1-x^2))).
JacobiParameters catalog(Catalog which);
JacobiParameters catalog(const std::string& name);  // "free" | "chebyshev1"

struct StripResult {
  JacobiParameters params;  // coefficients shifted down one row: a'(n) = a(n+1), b'(n) = b(n+1)
  double mass_factor;       // a(1)^2; the stripped spectral measure carries this factor
};
StripResult strip(const JacobiParameters& params);

namespace detail {
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const Complex& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
}  // namespace detail

// Runs the three-term recurrence z p_n = a_{n+1} p_{n+1} + b_{n+1} p_n + a_n p_{n-1}
// for the orthonormal polynomials (p_0 = 1) and the second-kind solution
// (q_0 = 0, q_1 = 1/a_1), calling visit(j, p_j, q_j) for j = 0..n-1.
// Scalar is double or Complex; the sentinel pair (p_{-1}, q_{-1}) = (0, -1)
// with unit coupling makes the first step uniform.
template <class Scalar, class Visit>
void recur_pq(const JacobiParameters& params, Scalar z, std::size_t n, Visit&& visit) {
  if (n == 0) throw std::invalid_argument("recur_pq: n must be positive");
  Scalar p_prev = Scalar(0), p_cur = Scalar(1);
  Scalar q_prev = Scalar(-1), q_cur = Scalar(0);
  double coupling = 1.0;  // a_j of the link below the current index
  for (std::size_t j = 0;; ++j) {
    visit(j, p_cur, q_cur);
    if (j + 1 == n) break;
    const double a_next = params.a(j + 1);
    const Scalar zb = z - params.b(j + 1);
    const Scalar p_next = (zb * p_cur - coupling * p_prev) / a_next;
    const Scalar q_next = (zb * q_cur - coupling * q_prev) / a_next;
    if (!detail::finite(p_next) || !detail::finite(q_next)) throw OverflowError(j + 1);
    p_prev = p_cur;
    p_cur = p_next;
    q_prev = q_cur;
    q_cur = q_next;
    coupling = a_next;
  }
}

// p-only variant for kernel sums. The second-kind iterate grows exponentially
// at energies outside the band even where a perturbed p decays (point-mass
// energies), so consumers that never read q must not drag it along.
template <class Scalar, class Visit>
void recur_p(const JacobiParameters& params, Scalar z, std::size_t n, Visit&& visit) {
  if (n == 0) throw std::invalid_argument("recur_p: n must be positive");
  Scalar p_prev = Scalar(0), p_cur = Scalar(1);
  double coupling = 1.0;
  for (std::size_t j = 0;; ++j) {
    visit(j, p_cur);
    if (j + 1 == n) break;
    const double a_next = params.a(j + 1);
    const Scalar p_next = ((z - params.b(j + 1)) * p_cur - coupling * p_prev) / a_next;
    if (!detail::finite(p_next)) throw OverflowError(j + 1);
    p_prev = p_cur;
    p_cur = p_next;
    coupling = a_next;
  }
}

template <class Scalar>
struct PolyEvalT {
  Scalar z{};
  std::vector<Scalar> p;  // p_0 .. p_{n-1}
  std::vector<Scalar> q;  // q_0 .. q_{n-1}
};
using PolyEval = PolyEvalT<Complex>;
using PolyEvalReal = PolyEvalT<double>;

PolyEval eval_pq(const JacobiParameters& params, Complex z, std::size_t n);
PolyEvalReal eval_pq(const JacobiParameters& params, double x, std::size_t n);

// 2x2 complex matrix with unit determinant up to roundoff: the ordered product
// S_n(z)...S_1(z) of one-step matrices S_j = [[(z-b_j)/a_j, -1/a_j], [a_j, 0]].
// Its columns carry (p_n, a_n p_{n-1}) and (-q_n, -a_n q_{n-1}).
struct TransferMatrix {
  Complex m00{1.0}, m01{0.0}, m10{0.0}, m11{1.0};

  Complex det() const { return m00 * m11 - m01 * m10; }
  double frobenius_sq() const {
    return std::norm(m00) + std::norm(m01) + std::norm(m10) + std::norm(m11);
  }
  double operator_norm() const;  // largest singular value
  TransferMatrix inverse() const;
  friend TransferMatrix operator*(const TransferMatrix& lhs, const TransferMatrix& rhs);
};

TransferMatrix one_step(const JacobiParameters& params, Complex z, std::size_t j);
// n = 0 gives the identity.
TransferMatrix transfer(const JacobiParameters& params, Complex z, std::size_t n);

}  // namespace cdklab
