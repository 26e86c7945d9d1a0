#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "cdklab/jacobi.hpp"

namespace cdklab {

// Diagonal perturbations b_k -> b_k + beta_k; the off-diagonal a's are never
// touched.

struct RankOne {
  double beta1 = 0.0;  // acts on b_1 only
};

struct Diagonal {
  std::vector<double> betas;  // betas[k-1] acts on b_k; zero beyond the list
};

enum class Dist { Rademacher, UniformSymmetric, Gaussian };

// beta_k = sigma_k * X_k with sigma_k = amplitude * k^-exponent and X_k i.i.d.
// of unit variance. Draws are counter-based (keyed on (seed, k)), so beta_k is
// a pure function of its index: evaluation order and subsetting cannot change
// the sequence. The horizon bounds the materialized range; beta_k past it is
// an error, never an implicit zero.
struct RandomDiagonal {
  double amplitude = 1.0;
  double exponent = 1.0;
  Dist dist = Dist::Rademacher;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;

  double sigma(std::size_t k) const;
};

using Perturbation = std::variant<RankOne, Diagonal, RandomDiagonal>;

// beta_k of the perturbation at index k >= 1. Throws std::out_of_range past a
// RandomDiagonal horizon.
double perturbation_beta(const Perturbation& pert, std::size_t k);

// Jacobi parameters of the perturbed operator. Entries with beta_k == 0 are
// copied through untouched (bit-exact), so a zero perturbation is the
// identity. A RandomDiagonal stamps its horizon onto the result.
JacobiParameters apply(const JacobiParameters& base, const Perturbation& pert);

struct VarParTrace {
  std::vector<double> u1;  // u1[k-1], u2[k-1] expand the perturbed solution at
  std::vector<double> u2;  // index k in the unperturbed basis {p, q}
  double u1_limit = 0.0;   // final coefficients (the asymptotic ones when converged)
  double u2_limit = 0.0;
  bool converged = false;  // every increment over the last ceil(n/10) steps < 1e-6
};

// Variation-of-parameters coefficients of the perturbed solution: with
// W(p,q) = 1 the pair (u1_k, u2_k) solving
//   pb_k     = u1 p_k     + u2 q_k
//   pb_{k-1} = u1 p_{k-1} + u2 q_{k-1}
// is u1 = -a_k (pb_k q_{k-1} - q_k pb_{k-1}), u2 = -a_k (p_k pb_{k-1} - pb_k p_{k-1}).
// Both parameter sets must share the same a-sequence.
VarParTrace variation_of_parameters(const JacobiParameters& base,
                                    const JacobiParameters& perturbed, double x,
                                    std::size_t n);

struct L2Report {
  std::size_t n = 0;
  double s_n = 0.0;            // partial sum to n
  double s_2n = 0.0;           // partial sum to 2n
  double rel_increment = 0.0;  // (s_2n - s_n) / s_n
  bool converged = false;      // rel_increment < tol
};

// Partial sums of sum_k sigma_k^2 (|p_k| + |p_{k-1}| + |q_k| + |q_{k-1}|)^4 at
// a fixed real energy, evaluated on the *unperturbed* solutions. Finiteness of
// the full series is the trace-class-type condition under which the perturbed
// asymptotics survive; the relative increment from n to 2n is the numerical
// proxy for it.
L2Report l2_condition_partial(const JacobiParameters& base, const RandomDiagonal& pert,
                              double x, std::size_t n, double tol = 0.01);

}  // namespace cdklab
