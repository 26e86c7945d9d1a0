#pragma once

#include <optional>
#include <vector>

#include "cdklab/jacobi.hpp"

namespace cdklab {

// Stieltjes transform F(z) = int dmu(t)/(t - z) of the spectral measure,
// evaluated by unrolling F = 1/(b_1 - z - a_1^2 F_1) over the head and closing
// with the constant-tail fixed point (the Herglotz root of
// tail_a^2 m^2 + (z - tail_b) m + 1 = 0). Requires Im z != 0.
Complex stieltjes_F(const JacobiParameters& params, Complex z);

// F(x + i0) by direct branch continuation from the upper half plane: inside
// the tail band the fixed point takes the root with positive imaginary part,
// outside it takes the decaying (Weyl) root. Valid off a discrete exceptional
// set; used for real energies outside the essential spectrum and as a
// cross-check of the epsilon-path boundary values.
Complex stieltjes_F_limit(const JacobiParameters& params, double x);

struct BoundaryOptions {
  int k_min = 10;            // epsilon ladder 2^-k, k = k_min..k_max
  int k_max = 40;
  double cauchy_tol = 1e-6;  // convergence flag threshold on the last increment
  bool richardson = false;   // extrapolate the final pair (off by default)
};

struct BoundaryValue {
  double x = 0.0;
  Complex F;                     // value at the smallest epsilon
  double err_estimate = 0.0;     // |F(x + i eps) - F(x + 2i eps)| at the final rung
  bool converged = false;        // err_estimate <= cauchy_tol
  std::vector<double> eps_path;  // the epsilons actually used
};

// Boundary value F(x + i0) along the dyadic ladder eps_k = 2^-k. A
// non-stabilizing path (err_estimate > cauchy_tol) marks x as not a strong
// Lebesgue point numerically; the value is still returned.
BoundaryValue boundary_F(const JacobiParameters& params, double x,
                         const BoundaryOptions& opts = {});

// Mobius image F / (1 + beta1 F) of a rank-one perturbation on b_1. Empty
// result: the denominator vanishes, i.e. z sits at the perturbed eigenvalue.
std::optional<Complex> rank_one_F(Complex F, double beta1);

struct WeightBundle {
  double x = 0.0;
  Complex F;                       // boundary value the weights derive from
  double w = 0.0;                  // Im F / pi
  std::optional<double> w_tilde;   // w / |F|^2; absent when F(x+i0) = 0
  std::optional<double> w_beta;    // w / |1 + beta1 F|^2; absent at the perturbed eigenvalue
  std::optional<double> beta1;
  double err_estimate = 0.0;
};

WeightBundle weights_from_boundary(const BoundaryValue& bv,
                                   std::optional<double> beta1 = std::nullopt);

// Convenience wrapper: boundary_F + weights_from_boundary. Throws NumericError
// when the boundary limit did not stabilize at x.
WeightBundle weights(const JacobiParameters& params, double x,
                     std::optional<double> beta1 = std::nullopt,
                     const BoundaryOptions& opts = {});

struct Eigenpair {
  double energy = 0.0;
  double mass = 0.0;      // mu^{beta1}({energy}) = 1 / (beta1^2 F'(energy)), in (0, 1]
  double residual = 0.0;  // |1 + beta1 F(energy)| after the root solve
  double f_prime = 0.0;   // F'(energy) by centered differencing
};

// Solves 1 + beta1 F(E) = 0 for E in (lo, hi), which must avoid the essential
// spectrum. Empty result: no sign change in the bracket (no eigenvalue there).
std::optional<Eigenpair> eigenvalue_and_mass(const JacobiParameters& params, double beta1,
                                             double lo, double hi);

}  // namespace cdklab
