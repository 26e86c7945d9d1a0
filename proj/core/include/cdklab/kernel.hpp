#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdklab/jacobi.hpp"
#include "cdklab/quadrature.hpp"
#include "cdklab/stieltjes.hpp"

namespace cdklab {

enum class KernelMethod {
  Sum,        // sum_{j<n} p_j(x) p_j(y), the definition
  CdFormula,  // a_n (p_n(x)p_{n-1}(y) - p_{n-1}(x)p_n(y)) / (x - y)
};

enum class ScalingMode {
  ByN,    // points x0 + a/n, normalizer n, sine target with (rho_hat, w)
  ByDiag, // points x0 + a/(w K_n(x0,x0)), normalizer K_n(x0,x0), plain sinc target
};

// sin(pi rho (b-a)) / (pi w (b-a)); b = a is the removable singularity rho/w,
// and small arguments switch to a Taylor form to dodge the 0/0 cancellation.
Complex sine_target(double rho, double w, Complex a, Complex b);

// Kernels are bilinear (no conjugation): complex arguments enter by analytic
// continuation. CdFormula falls back to the sum when |x - y| <= 1e-13 (1+|x|).
Complex cd_kernel(const JacobiParameters& params, Complex x, Complex y, std::size_t n,
                  KernelMethod method = KernelMethod::Sum);

// Same kernel built from the second-kind solutions q_j; the two-sided boundary
// term in the Christoffel-Darboux telescope vanishes for this initial data
// too, so both methods remain valid.
Complex cd_kernel_second(const JacobiParameters& params, Complex x, Complex y,
                         std::size_t n, KernelMethod method = KernelMethod::Sum);

struct KernelSample {
  std::size_t n = 0;
  double x0 = 0.0;
  Complex a;
  Complex b;
  Complex value;
  Complex target;
  double abs_err = 0.0;
};

// Scaled kernel against its sine target. ByN: K_n(x0+a/n, x0+b/n)/n vs
// sine_target(rho_hat_n, w) with rho_hat_n = K_n(x0,x0) w(x0)/n. ByDiag: the
// self-normalized form with offsets a/(w K_n(x0,x0)) and target sinc(pi(b-a)).
KernelSample scaled_kernel(const JacobiParameters& params, double x0, Complex a,
                           Complex b, std::size_t n, ScalingMode mode = ScalingMode::ByN);

// Second-kind analogue in ByN scaling; the target swaps in the second-kind
// weight w_tilde = w/|F|^2 while keeping the first-kind rho_hat.
KernelSample second_kind_kernel(const JacobiParameters& params, double x0, Complex a,
                                Complex b, std::size_t n);

struct MixedKernelSample {
  std::size_t n = 0;
  double x0 = 0.0;
  Complex a;
  Complex b;
  Complex value;
  Complex predicted_limit;
  double abs_err = 0.0;
};

// (1/n) sum_j [p_j(x0+a/n) q_j(x0+b/n) + p_j(x0+b/n) q_j(x0+a/n)], whose limit
// is -2 Re F(x0+i0) sine_target(rho, w): expanding q_j = -p_j Re F + (second
// kind remainder) against the sine asymptotics of the p-kernel leaves the
// -2 Re F multiple of the universality target; the remainder dies by the same
// oscillation averaging. Purely imaginary F (even measures at 0) gives 0.
MixedKernelSample mixed_symmetrized_kernel(const JacobiParameters& params, double x0,
                                           Complex a, Complex b, std::size_t n);

struct KernelExpansion {
  Complex lhs;  // kernel of the rank-one-perturbed parameters
  Complex rhs;  // K_n + beta1^2 Kt_n - beta1 (sum q(x)p(y) + sum q(y)p(x))
};

// Finite-n algebraic identity: the perturbed solutions are exactly p - beta1 q,
// so both sides agree to rounding at every n. Outside the band the three rhs
// series overflow before their combination does; rhs is NaN past that depth.
KernelExpansion perturbed_kernel_expansion(const JacobiParameters& params, double beta1,
                                           Complex x, Complex y, std::size_t n);

// Cesaro average (1/n) sum_{j<n} ||Phi_j(x0 + a/n)||_F^2 of squared transfer
// matrix norms; bounded in n exactly on the set where universality can hold.
double transfer_average(const JacobiParameters& params, double x0, Complex a,
                        std::size_t n);

enum class PointMassVerdict { Diverges, Saturates, Inconclusive };

struct UniversalityReport {
  double x0 = 0.0;
  std::vector<std::size_t> n_list;
  std::vector<double> rho_hat;     // K_n(x0,x0) w(x0) / n per n (NaN without weights)
  std::vector<double> sup_err;     // sup over the grid of |scaled - target| per n
  std::vector<double> diag_trace;  // K_n(x0,x0) per n, plus the 2*max(n) probe
  PointMassVerdict verdict = PointMassVerdict::Inconclusive;
  std::optional<double> saturation_value;  // K at the doubling probe when saturating
  std::string status;                      // non-fatal notes (missing weights, short horizon)
};

// Universality sweep plus the point-mass diagnostic: mu({x0}) > 0 iff
// K_n(x0,x0) stays bounded, so the final doubling either saturates
// (relative growth < 1e-6), diverges (factor >= 1.5), or stays inconclusive.
UniversalityReport universality_report(const JacobiParameters& params, double x0,
                                       const std::vector<std::size_t>& n_list,
                                       const std::vector<std::pair<Complex, Complex>>& grid);

struct IdentityCheck {
  Complex lhs;      // integral of sin(pi rho (s-a)) / (pi (s-a)(s-b))
  Complex rhs_neg;  // minus the integral of sin(pi rho (s-b)) / (pi (s-a)(s-b))
  double max_dev = 0.0;  // |lhs - rhs_neg|
  double err_estimate = 0.0;
  bool converged = false;
};

// Both sides of the whole-line identity, each by its own quadrature; requires
// Im a > 0 > Im b so the integrands stay pole-free on the path with O(s^-2)
// envelopes.
IdentityCheck sinc_identity_check(double rho, Complex a, Complex b,
                                  double quad_tol = 1e-6);

// Contour-evaluated equivalent of the lhs: the integral of
// (e^{i pi rho (a-s)} - 1) / (2 pi i (s-b)(a-s)). The oscillatory part marches
// half-period panels; the rational part is integrated on a tan-compactified
// interval. Agreement with lhs is a three-way consistency check.
Complex sinc_identity_third_form(double rho, Complex a, Complex b,
                                 double quad_tol = 1e-6);

}  // namespace cdklab
