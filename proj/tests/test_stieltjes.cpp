#include <doctest.h>

#include <cmath>
#include <random>

#include "cdklab/perturbation.hpp"
#include "cdklab/stieltjes.hpp"
#include "oracles.hpp"

using namespace cdklab;

TEST_CASE("free-measure transform matches the semicircle closed form") {
  const JacobiParameters free = catalog(Catalog::Free);
  const Complex points[] = {{0.0, 2.0}, {0.3, 0.01}, {-1.5, 0.5}, {2.0, -1.0}, {0.0, -0.25}};
  for (const Complex z : points) {
    const Complex got = stieltjes_F(free, z);
    const Complex want = oracles::free_F(z);
    CHECK(std::abs(got - want) < 1e-12 * (1.0 + std::abs(want)));
  }
  CHECK_THROWS_AS(stieltjes_F(free, Complex(0.5, 0.0)), std::domain_error);
}

TEST_CASE("a long head reduces to the same tail closure") {
  // A head that repeats the tail values is the free measure in disguise.
  const JacobiParameters padded(std::vector<double>(300, 0.5), std::vector<double>(300, 0.0),
                                0.5, 0.0);
  const Complex z(0.2, 0.7);
  CHECK(std::abs(stieltjes_F(padded, z) - oracles::free_F(z)) < 1e-13);
}

TEST_CASE("transform is Herglotz for random parameter sets") {
  std::mt19937_64 rng(911);
  std::uniform_real_distribution<double> a_dist(0.2, 2.0);
  std::uniform_real_distribution<double> b_dist(-1.0, 1.0);
  std::uniform_real_distribution<double> re(-3.0, 3.0);
  std::uniform_real_distribution<double> im(1e-4, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const JacobiParameters params({a_dist(rng), a_dist(rng)}, {b_dist(rng)}, a_dist(rng),
                                  b_dist(rng));
    const Complex z(re(rng), im(rng));
    const Complex F = stieltjes_F(params, z);
    CHECK(std::imag(F) > 0.0);                          // upper half-plane to itself
    CHECK(std::imag(stieltjes_F(params, std::conj(z))) < 0.0);  // mirror symmetry
  }
}

TEST_CASE("stripping one row satisfies the exact additive relation") {
  // F = 1/(b_1 - z - a_1^2 F_strip), i.e. (-1/F) - a_1^2 F_strip = z - b_1.
  std::mt19937_64 rng(912);
  std::uniform_real_distribution<double> re(-2.0, 2.0);
  std::uniform_real_distribution<double> im(0.05, 1.5);
  const JacobiParameters params({0.8, 0.6}, {0.25, -0.4}, 0.5, 0.1);
  const StripResult stripped = strip(params);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex z(re(rng), im(rng));
    const Complex lhs = -1.0 / stieltjes_F(params, z) -
                        stripped.mass_factor * stieltjes_F(stripped.params, z);
    CHECK(std::abs(lhs - (z - params.b(1))) < 1e-10);
  }
}

TEST_CASE("boundary values stabilize to the closed form inside the band") {
  const JacobiParameters free = catalog(Catalog::Free);
  for (const double x : {0.0, 0.3, -0.77}) {
    const BoundaryValue bv = boundary_F(free, x);
    CHECK(bv.converged);
    CHECK(bv.err_estimate < 1e-6);
    CHECK(std::abs(bv.F - oracles::free_F_boundary(x)) < 1e-7);
    CHECK_FALSE(bv.eps_path.empty());
  }
}

TEST_CASE("richardson extrapolation tightens the linear-in-eps error") {
  const JacobiParameters free = catalog(Catalog::Free);
  BoundaryOptions plain;
  plain.k_max = 18;  // truncate the ladder so the plain value keeps visible bias
  BoundaryOptions rich = plain;
  rich.richardson = true;
  const double x = 0.3;
  const Complex exact = oracles::free_F_boundary(x);
  const double plain_err = std::abs(boundary_F(free, x, plain).F - exact);
  const double rich_err = std::abs(boundary_F(free, x, rich).F - exact);
  CHECK(rich_err < 0.1 * plain_err);
}

TEST_CASE("direct boundary continuation agrees with the epsilon path") {
  const JacobiParameters params({0.9}, {0.2}, 0.5, 0.0);
  for (const double x : {0.1, -0.6}) {
    CHECK(std::abs(stieltjes_F_limit(params, x) - boundary_F(params, x).F) < 1e-6);
  }
  // Outside the essential spectrum the limit is the real decaying (Weyl) root.
  const double x = 1.7;
  const Complex outside = stieltjes_F_limit(catalog(Catalog::Free), x);
  CHECK(std::abs(std::imag(outside)) < 1e-14);
  CHECK(std::real(outside) ==
        doctest::Approx(2.0 * (std::sqrt(x * x - 1.0) - x)).epsilon(1e-12));
}

TEST_CASE("rank-one eigenvalue condition holds at the known energy") {
  // 1 + F(5/4) = 0 for the free measure: sqrt(E^2-1) = E - 1/2 at E = 5/4.
  const double F = std::real(stieltjes_F_limit(catalog(Catalog::Free), 1.25));
  CHECK(F == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("weight bundle reproduces the closed-form weights") {
  const JacobiParameters free = catalog(Catalog::Free);
  const WeightBundle at0 = weights(free, 0.0, 1.0);
  CHECK(at0.w == doctest::Approx(oracles::free_w(0.0)).epsilon(1e-9));
  REQUIRE(at0.w_tilde.has_value());
  CHECK(*at0.w_tilde == doctest::Approx(oracles::kFreeWTilde0).epsilon(1e-8));
  REQUIRE(at0.w_beta.has_value());
  CHECK(*at0.w_beta == doctest::Approx(oracles::kFreeW1_0).epsilon(1e-8));

  const WeightBundle at03 = weights(free, 0.3);
  CHECK(at03.w == doctest::Approx(oracles::free_w(0.3)).epsilon(1e-9));
  CHECK_FALSE(at03.w_beta.has_value());  // no beta1 requested
}

TEST_CASE("second-kind weight equals the stripped measure weight") {
  // w_tilde = w/|F|^2 must match a_1^2 times the weight of the stripped row.
  const JacobiParameters params({0.9, 0.7}, {0.1, -0.2}, 0.5, 0.0);
  const StripResult stripped = strip(params);
  for (const double x : {0.0, 0.25}) {
    const WeightBundle direct = weights(params, x);
    REQUIRE(direct.w_tilde.has_value());
    const double via_strip = stripped.mass_factor * weights(stripped.params, x).w;
    CHECK(*direct.w_tilde == doctest::Approx(via_strip).epsilon(1e-8));
  }
}

TEST_CASE("rank-one transform maps boundary values through the mobius rule") {
  const Complex F(0.0, 2.0);  // free measure at x = 0
  const auto mapped = rank_one_F(F, 1.0);
  REQUIRE(mapped.has_value());
  CHECK(std::abs(*mapped - F / (1.0 + F)) < 1e-15);
  // Denominator 1 + beta F = 0: the perturbed transform has a pole there.
  CHECK_FALSE(rank_one_F(Complex(-2.0, 0.0), 0.5).has_value());
}

TEST_CASE("weights refuse to evaluate at a point mass") {
  // beta1 = 1 moves mass 3/4 to E = 5/4; Im F blows up like mass/eps there.
  const JacobiParameters perturbed = apply(catalog(Catalog::Free), RankOne{1.0});
  CHECK_THROWS_AS(weights(perturbed, 1.25), NumericError);
  const BoundaryValue bv = boundary_F(perturbed, 1.25);
  CHECK_FALSE(bv.converged);
}

TEST_CASE("eigenvalue search finds the rank-one pair to tight tolerance") {
  const JacobiParameters free = catalog(Catalog::Free);
  const auto pair = eigenvalue_and_mass(free, 1.0, 1.0 + 1e-9, 4.0);
  REQUIRE(pair.has_value());
  CHECK(std::abs(pair->energy - oracles::kRankOneEnergy) <= 1e-10);
  CHECK(std::abs(pair->mass - oracles::kRankOneMass) <= 1e-8);
  CHECK(pair->residual < 1e-12);
  CHECK(pair->f_prime == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("eigenvalue search reports absence rather than inventing roots") {
  // For the free measure F((1, inf)) = (-2, 0), so 1 + beta F needs beta > 1/2.
  const JacobiParameters free = catalog(Catalog::Free);
  CHECK_FALSE(eigenvalue_and_mass(free, 0.3, 1.0 + 1e-9, 6.0).has_value());
  CHECK_THROWS_AS(eigenvalue_and_mass(free, 1.0, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(eigenvalue_and_mass(free, 0.0, 1.1, 2.0), std::invalid_argument);
}

TEST_CASE("chebyshev eigenvalue follows the arcsine closed form") {
  // F = -1/sqrt(z^2 - 1) for chebyshev1, so E = sqrt(1 + beta^2).
  const double beta = 1.5;
  const auto pair = eigenvalue_and_mass(catalog(Catalog::Chebyshev1), beta, 1.0 + 1e-9, 4.0);
  REQUIRE(pair.has_value());
  CHECK(std::abs(pair->energy - std::sqrt(1.0 + beta * beta)) <= 1e-10);
  // mass = 1/(beta^2 F'(E)) with F' = E (E^2-1)^{-3/2}.
  const double expect = std::pow(beta * beta, 1.5) / (beta * beta * pair->energy);
  CHECK(std::abs(pair->mass - expect) <= 1e-8);
}
