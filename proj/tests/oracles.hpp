#pragma once

// Closed-form reference values for the two catalog measures, derived
// independently of the code under test (semicircle / arcsine algebra, checked
// against high-precision quadrature before being frozen here).

#include <cmath>
#include <complex>

namespace oracles {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Free measure (a = 1/2, b = 0): semicircle weight (2/pi) sqrt(1-x^2) on [-1,1],
// Stieltjes transform F(z) = 2(sqrt(z^2-1) - z) with the branch sqrt -> z at
// infinity on the upper half-plane.
inline std::complex<double> free_F(std::complex<double> z) {
  const std::complex<double> root = std::sqrt(z * z - 1.0);
  // Herglotz branch: Im F > 0 for Im z > 0.
  const std::complex<double> plus = 2.0 * (root - z);
  const std::complex<double> minus = 2.0 * (-root - z);
  if (std::imag(z) > 0.0) return std::imag(plus) > 0.0 ? plus : minus;
  if (std::imag(z) < 0.0) return std::imag(plus) < 0.0 ? plus : minus;
  return std::abs(plus) < std::abs(minus) ? plus : minus;
}

// Boundary value from above for |x| < 1: F(x+i0) = -2x + 2i sqrt(1-x^2).
inline std::complex<double> free_F_boundary(double x) {
  return {-2.0 * x, 2.0 * std::sqrt(1.0 - x * x)};
}

inline double free_w(double x) { return (2.0 / kPi) * std::sqrt(1.0 - x * x); }

// Universality density of the free measure: the arcsine (equilibrium) density.
inline double free_rho(double x) { return 1.0 / (kPi * std::sqrt(1.0 - x * x)); }

// K_n(x,x)/n limit = rho/w = 1 / (2 (1 - x^2)).
inline double free_diag_limit(double x) { return 1.0 / (2.0 * (1.0 - x * x)); }

// Chebyshev-1 (a_1 = 1/sqrt(2), a_n = 1/2, b = 0): arcsine weight, for which
// rho = w = 1/pi, so the scaled kernel limit is sin(b-a)/(b-a).
inline double cheb1_w(double x) { return 1.0 / (kPi * std::sqrt(1.0 - x * x)); }

// Second-kind weight of the free measure: w / |F|^2; at 0 this is 1/(2 pi).
inline constexpr double kFreeWTilde0 = 0.15915494309189535;

// Rank-one beta1 = 1 on the free measure: w^(1)(0) = w(0)/|1+F(0+i0)|^2
// = (2/pi)/5 = 2/(5 pi).
inline constexpr double kFreeW1_0 = 0.12732395447351627;

// 1 + F(E) = 0 at E = 5/4 (sqrt(E^2-1) = E - 1/2); F'(5/4) = 4/3, so the
// point mass is 1/F' = 3/4 and sum_j p_j(5/4)^2 saturates at 4/3.
inline constexpr double kRankOneEnergy = 1.25;
inline constexpr double kRankOneMass = 0.75;
inline constexpr double kRankOneDiagSaturation = 4.0 / 3.0;

// Mixed symmetrized kernel limit at x0 = 0.3 on the diagonal:
// -2 Re F(0.3+i0) * rho/w = 1.2 / (2 * 0.91).
inline constexpr double kMixedLimit03 = 0.6593406593406593;

// Whole-line identity, closed form (e^{i pi rho (a-b)} - 1)/(b - a) for
// Im a > 0 > Im b; frozen for rho = 1/pi, a = i, b = -i.
inline constexpr std::complex<double> kIdentityUnit{0.0, -0.43233235838169365};

inline std::complex<double> identity_closed_form(double rho, std::complex<double> a,
                                                 std::complex<double> b) {
  const std::complex<double> I{0.0, 1.0};
  return (std::exp(I * kPi * rho * (a - b)) - 1.0) / (b - a);
}

// Deterministic l2-condition ratio at x0 = 0 on the free measure with
// sigma_k^2 ~ k^-1.2: the polynomial bracket is exactly 3 for every k, so the
// ratio reduces to partial sums of k^-1.2 (values below computed exactly).
inline constexpr double kL2SumN = 4.799143769254644;       // sum_{k<=1e4} k^-1.2
inline constexpr double kL2Increment = 0.10257729048213655;  // sum_{1e4<k<=2e4}
inline constexpr double kL2Ratio = 0.021374081589155613;

}  // namespace oracles
