#include <doctest.h>

#include <cmath>
#include <random>

#include "cdklab/jacobi.hpp"
#include "oracles.hpp"

using namespace cdklab;

TEST_CASE("parameters index from one and fall back to the constant tail") {
  const JacobiParameters params({0.7, 0.9}, {0.1, -0.2, 0.3}, 0.5, 0.0);
  CHECK(params.a(1) == 0.7);
  CHECK(params.a(2) == 0.9);
  CHECK(params.a(3) == 0.5);
  CHECK(params.a(1000) == 0.5);
  CHECK(params.b(1) == 0.1);
  CHECK(params.b(3) == 0.3);
  CHECK(params.b(4) == 0.0);
  CHECK(params.head_depth() == 3);
  CHECK(params.min_a() == 0.5);
  const auto [lo, hi] = params.essential_spectrum();
  CHECK(lo == -1.0);
  CHECK(hi == 1.0);
}

TEST_CASE("constructor rejects non-finite and non-positive coefficients") {
  CHECK_THROWS_AS(JacobiParameters({0.0}, {}, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(JacobiParameters({-1.0}, {}, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(JacobiParameters({}, {}, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(JacobiParameters({}, {std::nan("")}, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(JacobiParameters({}, {}, 0.5, std::nan("")), std::invalid_argument);
}

TEST_CASE("a horizon bounds diagonal reads but not off-diagonal ones") {
  const JacobiParameters params({}, {0.1, 0.2}, 0.5, 0.0, 5);
  CHECK(params.b(5) == 0.0);
  CHECK_THROWS_AS(params.b(6), std::out_of_range);
  CHECK(params.a(100) == 0.5);  // the a-sequence is not perturbed
  CHECK(params.horizon() == 5);
}

TEST_CASE("catalog measures carry their defining coefficients") {
  const JacobiParameters free = catalog(Catalog::Free);
  CHECK(free.a(1) == 0.5);
  CHECK(free.b(7) == 0.0);
  const JacobiParameters cheb = catalog("chebyshev1");
  CHECK(cheb.a(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cheb.a(2) == 0.5);
  CHECK_THROWS_AS(catalog("unknown"), std::invalid_argument);
}

TEST_CASE("strip shifts coefficients down one row and reports the mass factor") {
  const JacobiParameters params({0.7, 0.9}, {0.1, -0.2}, 0.5, 0.05);
  const StripResult stripped = strip(params);
  CHECK(stripped.params.a(1) == 0.9);
  CHECK(stripped.params.a(2) == 0.5);
  CHECK(stripped.params.b(1) == -0.2);
  CHECK(stripped.params.b(2) == 0.05);
  CHECK(stripped.mass_factor == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("free-measure polynomials at zero follow the period-four pattern") {
  // z = 0, a = 1/2, b = 0: p_{n+1} = -p_{n-1}, so p: 1,0,-1,0,... q: 0,2,0,-2,...
  const PolyEvalReal ev = eval_pq(catalog(Catalog::Free), 0.0, 9);
  const double p_expected[] = {1, 0, -1, 0, 1, 0, -1, 0, 1};
  const double q_expected[] = {0, 2, 0, -2, 0, 2, 0, -2, 0};
  for (std::size_t j = 0; j < 9; ++j) {
    CHECK(ev.p[j] == doctest::Approx(p_expected[j]).epsilon(1e-14));
    CHECK(ev.q[j] == doctest::Approx(q_expected[j]).epsilon(1e-14));
  }
}

TEST_CASE("real and complex evaluation agree bitwise on the real axis") {
  const JacobiParameters params({0.8}, {0.3}, 0.5, -0.1);
  const PolyEvalReal real_ev = eval_pq(params, 0.37, 64);
  const PolyEval complex_ev = eval_pq(params, Complex(0.37, 0.0), 64);
  for (std::size_t j = 0; j < 64; ++j) {
    CHECK(std::real(complex_ev.p[j]) == real_ev.p[j]);
    CHECK(std::imag(complex_ev.p[j]) == 0.0);
    CHECK(std::real(complex_ev.q[j]) == real_ev.q[j]);
    CHECK(std::imag(complex_ev.q[j]) == 0.0);
  }
}

TEST_CASE("transfer columns carry the polynomial pairs and det stays one") {
  const JacobiParameters params({0.7}, {0.2, -0.1}, 0.5, 0.0);
  const Complex z(0.3, 0.4);
  for (std::size_t n : {1u, 2u, 5u, 17u}) {
    const TransferMatrix phi = transfer(params, z, n);
    const PolyEval ev = eval_pq(params, z, n + 1);
    const double a_n = params.a(n);
    CHECK(std::abs(phi.m00 - ev.p[n]) < 1e-13 * (1.0 + std::abs(ev.p[n])));
    CHECK(std::abs(phi.m10 - a_n * ev.p[n - 1]) < 1e-13 * (1.0 + std::abs(ev.p[n - 1])));
    CHECK(std::abs(phi.m01 + ev.q[n]) < 1e-13 * (1.0 + std::abs(ev.q[n])));
    CHECK(std::abs(phi.m11 + a_n * ev.q[n - 1]) < 1e-13 * (1.0 + std::abs(ev.q[n - 1])));
    // det = 1 exactly; float verification is relative to the size of the
    // cancelling products m00 m11 and m01 m10.
    CHECK(std::abs(phi.det() - 1.0) < 1e-13 * (1.0 + phi.frobenius_sq()));
  }
  const TransferMatrix id = transfer(params, z, 0);
  CHECK(id.m00 == Complex(1.0));
  CHECK(id.m11 == Complex(1.0));
}

TEST_CASE("transfer factors through one-step products and inverses") {
  const JacobiParameters params({0.9, 0.6}, {-0.3}, 0.5, 0.1);
  const Complex z(-0.2, 0.7);
  TransferMatrix product;
  for (std::size_t j = 1; j <= 6; ++j) product = one_step(params, z, j) * product;
  const TransferMatrix direct = transfer(params, z, 6);
  CHECK(std::abs(product.m00 - direct.m00) < 1e-12);
  CHECK(std::abs(product.m11 - direct.m11) < 1e-12);
  const TransferMatrix round_trip = direct * direct.inverse();
  CHECK(std::abs(round_trip.m00 - 1.0) < 1e-12);
  CHECK(std::abs(round_trip.m01) < 1e-12);
  CHECK(direct.operator_norm() >= std::sqrt(direct.frobenius_sq() / 2.0) - 1e-12);
}

TEST_CASE("wronskian of the solution pair is one at every step") {
  const JacobiParameters params({0.7, 1.3, 0.4}, {0.2, -0.5}, 0.6, -0.2);
  const PolyEval ev = eval_pq(params, Complex(0.1, 0.2), 40);
  for (std::size_t k = 1; k < 40; ++k) {
    const Complex w = params.a(k) * (ev.q[k] * ev.p[k - 1] - ev.p[k] * ev.q[k - 1]);
    const double scale =
        1.0 + params.a(k) * (std::abs(ev.q[k] * ev.p[k - 1]) + std::abs(ev.p[k] * ev.q[k - 1]));
    CHECK(std::abs(w - 1.0) < 1e-12 * scale);
  }
}

TEST_CASE("runaway recurrences overflow loudly with the failing index") {
  const JacobiParameters params({}, {}, 0.5, 0.0);
  try {
    eval_pq(params, 1e12, 2000);
    FAIL("expected OverflowError");
  } catch (const OverflowError& e) {
    CHECK(e.index() > 0);
    CHECK(e.index() < 40);  // growth rate ~1e12 per step leaves double range fast
  }
}

TEST_CASE("recur_pq visits exactly the requested prefix") {
  const JacobiParameters params = catalog(Catalog::Free);
  std::size_t visits = 0;
  recur_pq(params, 0.25, 7, [&](std::size_t j, double, double) {
    CHECK(j == visits);
    ++visits;
  });
  CHECK(visits == 7);
  CHECK_THROWS_AS(recur_pq(params, 0.25, 0, [](std::size_t, double, double) {}),
                  std::invalid_argument);
}

// Structural invariants over random parameter sets. Heads stay short and the
// test point stays inside the tail band; the 1e-10 bound is relative to the
// magnitude of the cancelling products, which is the strongest statement a
// float evaluation of an exact identity supports at n up to 1e4.
TEST_CASE("random parameter sets keep det and wronskian pinned at one") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> a_dist(0.2, 2.0);
  std::uniform_real_distribution<double> b_dist(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.1, oracles::kPi - 0.1);
  std::uniform_int_distribution<std::size_t> head_len(0, 8);
  std::uniform_int_distribution<std::size_t> n_dist(2, 10000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> head_a(head_len(rng)), head_b(head_len(rng));
    for (double& v : head_a) v = a_dist(rng);
    for (double& v : head_b) v = b_dist(rng);
    const double tail_a = a_dist(rng);
    const double tail_b = b_dist(rng);
    const JacobiParameters params(head_a, head_b, tail_a, tail_b);
    const double x = tail_b + 2.0 * tail_a * std::cos(angle(rng));
    const std::size_t n = n_dist(rng);

    const TransferMatrix phi = transfer(params, Complex(x, 0.0), n);
    CHECK(std::abs(phi.det() - 1.0) < 1e-10 * (1.0 + phi.frobenius_sq()));

    const PolyEvalReal ev = eval_pq(params, x, n + 1);
    const double w = params.a(n) * (ev.q[n] * ev.p[n - 1] - ev.p[n] * ev.q[n - 1]);
    const double scale = 1.0 + params.a(n) * (std::abs(ev.q[n] * ev.p[n - 1]) +
                                              std::abs(ev.p[n] * ev.q[n - 1]));
    CHECK(std::abs(w - 1.0) < 1e-10 * scale);
  }
}
