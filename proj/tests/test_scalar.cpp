#include <cmath>

#include "doctest.h"
#include "r1mi/prior.hpp"
#include "r1mi/rng.hpp"
#include "r1mi/scalar.hpp"

using namespace r1mi;

TEST_CASE("j_func closed forms") {
  Prior rad = make_sparse_rademacher(1.0);
  Prior sparse = make_sparse_rademacher(0.6);

  // Total mass 1 at the origin.
  CHECK(std::abs(j_func(sparse, 0.0, 0.0)) < 1e-14);
  // Two-atom closed form log cosh(B) - A/2.
  CHECK(j_func(rad, 2.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(j_func(rad, 0.4, 1.3) ==
        doctest::Approx(std::log(std::cosh(1.3)) - 0.2).epsilon(1e-14));
  // Direct three-term sum, evaluated independently.
  double direct = std::log(0.4 + 0.3 * std::exp(2.0 - 0.5) + 0.3 * std::exp(-2.0 - 0.5));
  CHECK(j_func(sparse, 1.0, 2.0) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(direct == doctest::Approx(0.5704891555663073).epsilon(1e-14));
}

TEST_CASE("j_func survives large arguments") {
  Prior rad = make_sparse_rademacher(1.0);
  double v = j_func(rad, 0.0, 700.0);  // log cosh(700) = 700 - log 2
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(700.0 - std::log(2.0)).epsilon(1e-12));
  CHECK(std::isfinite(j_func(make_sparse_rademacher(0.3), 500.0, -650.0)));
}

TEST_CASE("j_func invariant under atom permutation and duplicate merge") {
  Prior a({{0.0, 0.4}, {1.0, 0.3}, {-1.0, 0.3}});
  Prior b({{-1.0, 0.3}, {1.0, 0.15}, {1.0, 0.15}, {0.0, 0.4}});
  for (double A : {0.0, 0.7, 3.0})
    for (double B : {-2.0, 0.1, 5.0})
      CHECK(j_func(a, A, B) == doctest::Approx(j_func(b, A, B)).epsilon(1e-15));
}

TEST_CASE("denoiser closed forms") {
  Prior rad = make_sparse_rademacher(1.0);
  CHECK(denoiser(rad, 0.7, 3.0) == doctest::Approx(std::tanh(3.0)).epsilon(1e-14));
  CHECK(denoiser(rad, 0.7, 3.0) == doctest::Approx(0.9950547536867305).epsilon(1e-12));

  // Symmetric prior, B = 0: odd integrand.
  for (double A : {0.0, 1.0, 10.0}) {
    CHECK(std::abs(denoiser(make_sparse_rademacher(0.4), A, 0.0)) < 1e-15);
    CHECK(std::abs(denoiser(rad, A, 0.0)) < 1e-15);
  }
}

TEST_CASE("denoiser equals dJ/dB by finite differences") {
  // Spec point: rho = 0.3, A = 0.5, B = 1, step 1e-6 agrees to 1e-8.
  Prior p = make_sparse_rademacher(0.3);
  double h = 1e-6;
  double fd = (j_func(p, 0.5, 1.0 + h) - j_func(p, 0.5, 1.0 - h)) / (2.0 * h);
  CHECK(std::abs(denoiser(p, 0.5, 1.0) - fd) < 1e-8);

  // Random (prior, A, B) triples, tolerance 1e-7.
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    double rho = 0.05 + 0.95 * rng.uniform();
    Prior q = make_sparse_rademacher(rho);
    double A = 4.0 * rng.uniform();
    double B = 6.0 * (rng.uniform() - 0.5);
    double fd2 = (j_func(q, A, B + h) - j_func(q, A, B - h)) / (2.0 * h);
    CHECK(std::abs(denoiser(q, A, B) - fd2) < 1e-7);
  }
}

TEST_CASE("denoiser is non-decreasing in B and variance nonnegative") {
  Prior p = make_sparse_rademacher(0.35);
  for (double A : {0.0, 0.8, 5.0}) {
    double prev = denoiser(p, A, -8.0);
    for (double B = -7.75; B <= 8.0; B += 0.25) {
      double cur = denoiser(p, A, B);
      CHECK(cur >= prev - 1e-12);
      CHECK(denoiser_variance(p, A, B) >= 0.0);
      prev = cur;
    }
  }
}

TEST_CASE("denoiser_variance equals the B-derivative of the denoiser") {
  Prior p = make_sparse_rademacher(0.5);
  double h = 1e-6;
  for (double B : {-1.0, 0.0, 0.4, 2.5}) {
    double fd = (denoiser(p, 1.2, B + h) - denoiser(p, 1.2, B - h)) / (2.0 * h);
    CHECK(denoiser_variance(p, 1.2, B) == doctest::Approx(fd).epsilon(1e-6));
  }
}
