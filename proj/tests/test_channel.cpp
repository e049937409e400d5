#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "r1mi/channel.hpp"

using namespace r1mi;
namespace {

// Independent oracle: central finite differences of log P at w = 0 plus an
// exact two-point expectation.
double bernoulli_fisher_fd(double base, double slope) {
  auto logp = [&](double y, double w) {
    double p = base + slope * w;
    return y == 1.0 ? std::log(p) : std::log1p(-p);
  };
  double h = 1e-6;
  double s1 = (logp(1, h) - logp(1, -h)) / (2 * h);
  double s0 = (logp(0, h) - logp(0, -h)) / (2 * h);
  return base * s1 * s1 + (1.0 - base) * s0 * s0;
}

Channel custom_gaussian(double delta) {
  return Channel::custom(
      [delta](double y, double w) {
        double r = y - w;
        return -0.5 * r * r / delta - 0.5 * std::log(2 * 3.14159265358979323846 * delta);
      },
      [delta](double w, Rng& rng) { return w + std::sqrt(delta) * rng.gaussian(); }, {},
      true);
}

}  // namespace

TEST_CASE("gaussian effective delta is exact on a log grid") {
  for (double d : {1e-3, 0.02, 0.45, 0.7, 1.0, 13.0, 250.0})
    CHECK(effective_delta(Channel::gaussian(d)) == d);
}

TEST_CASE("bernoulli effective delta against the finite-difference oracle") {
  CHECK(effective_delta(Channel::bernoulli_linear(0.5, 1.0)) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(effective_delta(Channel::bernoulli_linear(0.2, 1.0)) ==
        doctest::Approx(0.16).epsilon(1e-12));
  for (double base : {0.2, 0.5, 0.8})
    for (double slope : {0.5, 1.0, -2.0}) {
      double fisher = bernoulli_fisher_fd(base, slope);
      CHECK(effective_delta(Channel::bernoulli_linear(base, slope)) ==
            doctest::Approx(1.0 / fisher).epsilon(1e-7));
    }
}

TEST_CASE("effective delta invariant under outcome relabeling") {
  // (base, slope) -> (1-base, -slope) describes the same law with labels
  // swapped.
  for (double base : {0.15, 0.5, 0.62})
    CHECK(effective_delta(Channel::bernoulli_linear(base, 1.3)) ==
          doctest::Approx(effective_delta(Channel::bernoulli_linear(1.0 - base, -1.3)))
              .epsilon(1e-13));
}

TEST_CASE("score closures") {
  ScoreAtZero g = score_at_zero(Channel::gaussian(1.0));
  CHECK(g.s(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.s_prime(2.0) == doctest::Approx(-1.0).epsilon(1e-14));

  ScoreAtZero b = score_at_zero(Channel::bernoulli_linear(0.5, 1.0));
  CHECK(b.s(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b.s(0.0) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("score invariants: E[s] = 0 and E[s'] = -E[s^2]") {
  for (double base : {0.3, 0.5}) {
    Channel c = Channel::bernoulli_linear(base, 1.0);
    ScoreAtZero sc = score_at_zero(c);
    double mean_s = 0.0, mean_sp = 0.0, mean_s2 = 0.0;
    for (double y : c.output_support()) {
      double p = std::exp(c.log_likelihood(y, 0.0));
      mean_s += p * sc.s(y);
      mean_sp += p * sc.s_prime(y);
      mean_s2 += p * sc.s(y) * sc.s(y);
    }
    CHECK(std::abs(mean_s) < 1e-8);
    CHECK(std::abs(mean_sp + mean_s2) < 1e-6);
  }
}

TEST_CASE("custom channel matches the builtin gaussian") {
  Channel c = custom_gaussian(0.7);
  CHECK(effective_delta(c) == doctest::Approx(0.7).epsilon(1e-6));
  ScoreAtZero sc = score_at_zero(c);
  CHECK(sc.s(0.5) == doctest::Approx(0.5 / 0.7).epsilon(1e-8));
  CHECK(sc.s_prime(0.3) == doctest::Approx(-1.0 / 0.7).epsilon(1e-6));
}

TEST_CASE("non-differentiable custom channel rejected") {
  // Laplace-like kink at w = y: |y - w| has no second derivative at 0 for
  // y = 0, tripping the smoothness spot-check.
  auto loglik = [](double y, double w) { return -std::abs(y - w); };
  auto sampler = [](double w, Rng& rng) { return w + rng.gaussian(); };
  CHECK_THROWS_AS(Channel::custom(loglik, sampler, {0.0, 1.0}, false),
                  std::invalid_argument);
}

TEST_CASE("sampling determinism and validity") {
  Channel g = Channel::gaussian(4.0);
  Rng a(12345), b(12345);
  for (int i = 0; i < 32; ++i)
    CHECK(sample_observation(g, 0.0, a) == sample_observation(g, 0.0, b));

  Channel bl = Channel::bernoulli_linear(0.5, 1.0);
  CHECK(bl.w_max() == doctest::Approx(0.5));
  Rng r(1);
  double y = sample_observation(bl, 0.25, r);
  CHECK((y == 0.0 || y == 1.0));
  CHECK_THROWS_AS(sample_observation(bl, 0.75, r), std::invalid_argument);
}

TEST_CASE("bernoulli law of large numbers") {
  Channel bl = Channel::bernoulli_linear(0.5, 1.0);
  Rng rng(777);
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += sample_observation(bl, 0.0, rng);
  CHECK(std::abs(acc / n - 0.5) < 0.01);
}

TEST_CASE("gaussian sampling mean") {
  Channel g = Channel::gaussian(4.0);
  Rng rng(4242);
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += sample_observation(g, 1.0, rng);
  CHECK(std::abs(acc / n - 1.0) < 3.0 * std::sqrt(4.0 / n));
}

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(Channel::gaussian(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Channel::gaussian(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(Channel::bernoulli_linear(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Channel::bernoulli_linear(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Channel::bernoulli_linear(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("json round trip") {
  Channel g = Channel::from_json("{\"kind\": \"gaussian\", \"delta\": 0.7}");
  CHECK(g.kind() == Channel::Kind::gaussian);
  CHECK(g.delta() == 0.7);
  Channel b = Channel::from_json("{\"kind\": \"bernoulli_linear\", \"base\": 0.5, \"slope\": 1.0}");
  CHECK(b.kind() == Channel::Kind::bernoulli_linear);
  CHECK(Channel::from_json(b.to_json()).base() == 0.5);
  CHECK_THROWS_AS(Channel::from_json("{\"kind\": \"poisson\"}"), std::invalid_argument);
}
