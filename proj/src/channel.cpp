#include "r1mi/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace r1mi {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFdStep = 1e-5;       // finite-difference step for custom scores
constexpr double kThirdDiffBound = 1e6;

double central_d1(const std::function<double(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

double central_d2(const std::function<double(double)>& f, double h) {
  return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

// One Richardson extrapolation step (halved h, fourth-order combination).
double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

// Adaptive Simpson with absolute tolerance eps on [a, b]. `floor` guards
// against endless subdivision once the integrand's own evaluation noise
// (finite-difference scores) dominates the Simpson error estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double eps,
                        double floor_tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(eps, floor_tol))
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, floor_tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, floor_tol, depth - 1);
}

double integrate_line(const std::function<double(double)>& f, double rel_tol) {
  // Expand the window until the integrand is negligible at the endpoints.
  double L = 1.0;
  double peak = std::abs(f(0.0));
  for (double y = -1.0; y <= 1.0; y += 0.25) peak = std::max(peak, std::abs(f(y)));
  while (L < 1e6) {
    double edge = std::max(std::abs(f(-L)), std::abs(f(L)));
    peak = std::max(peak, edge);
    if (edge <= 1e-14 * std::max(peak, 1e-300)) break;
    L *= 2.0;
  }
  double fa = f(-L), fm = f(0.0), fb = f(L);
  double whole = (2.0 * L) / 6.0 * (fa + 4.0 * fm + fb);
  // Tolerances keyed to the integrand scale, not the integral value, so
  // cancelling integrals (zero-mean scores) still terminate.
  double scale = std::max({std::abs(whole), 0.1 * peak * 2.0 * L, 1e-300});
  double eps = rel_tol * scale;
  return adaptive_simpson(f, -L, L, fa, fm, fb, whole, eps, 1e-14 * scale, 24);
}

}  // namespace

Channel Channel::gaussian(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("Channel::gaussian: delta must be positive");
  Channel c;
  c.kind_ = Kind::gaussian;
  c.delta_ = delta;
  c.continuous_ = true;
  c.w_max_ = HUGE_VAL;
  return c;
}

Channel Channel::bernoulli_linear(double base, double slope) {
  if (!(base > 0.0 && base < 1.0))
    throw std::invalid_argument("Channel::bernoulli_linear: base must lie in (0, 1)");
  if (slope == 0.0 || !std::isfinite(slope))
    throw std::invalid_argument("Channel::bernoulli_linear: slope must be nonzero and finite");
  Channel c;
  c.kind_ = Kind::bernoulli_linear;
  c.base_ = base;
  c.slope_ = slope;
  c.continuous_ = false;
  c.support_ = {0.0, 1.0};
  c.w_max_ = std::min(base, 1.0 - base) / std::abs(slope);
  return c;
}

Channel Channel::custom(std::function<double(double, double)> log_likelihood,
                        std::function<double(double, Rng&)> sampler,
                        std::vector<double> output_support, bool continuous) {
  if (!log_likelihood || !sampler)
    throw std::invalid_argument("Channel::custom: log-likelihood and sampler are both required");
  if (!continuous && output_support.empty())
    throw std::invalid_argument("Channel::custom: discrete channel needs an output support");

  Channel c;
  c.kind_ = Kind::custom;
  c.continuous_ = continuous;
  c.support_ = std::move(output_support);
  c.loglik_ = std::move(log_likelihood);
  c.sampler_ = std::move(sampler);
  c.w_max_ = HUGE_VAL;

  // Smoothness spot-check at w = 0: finite first/second differences and a
  // bounded third difference, at the support points (discrete) or at a few
  // fixed draws from P(.|0) (continuous).
  std::vector<double> ys = c.support_;
  if (ys.empty()) {
    Rng probe(0xC0FFEEULL);
    for (int k = 0; k < 7; ++k) ys.push_back(c.sampler_(0.0, probe));
  }
  const double h = 1e-3;
  for (double y : ys) {
    auto f = [&](double w) { return c.loglik_(y, w); };
    double d1 = central_d1(f, h), d1h = central_d1(f, h / 2);
    double d2 = central_d2(f, h), d2h = central_d2(f, h / 2);
    double d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
    if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(d3))
      throw std::invalid_argument("Channel::custom: log-likelihood not differentiable at w = 0");
    if (std::abs(d3) > kThirdDiffBound)
      throw std::invalid_argument("Channel::custom: third derivative bound exceeded at w = 0");
    // Kinks hide from symmetric differences at one step; halving the step
    // must leave the difference quotients essentially unchanged.
    if (std::abs(d1 - d1h) > 1e-3 * std::max(1.0, std::abs(d1h)) ||
        std::abs(d2 - d2h) > 1e-2 * std::max(1.0, std::abs(d2h)))
      throw std::invalid_argument("Channel::custom: log-likelihood not smooth at w = 0");
  }
  return c;
}

double Channel::log_likelihood(double y, double w) const {
  switch (kind_) {
    case Kind::gaussian: {
      double r = y - w;
      return -0.5 * r * r / delta_ - 0.5 * std::log(2.0 * kPi * delta_);
    }
    case Kind::bernoulli_linear: {
      double p = base_ + slope_ * w;
      if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("Channel: w outside bernoulli_linear validity range");
      if (y == 1.0) return std::log(p);        // log(0) = -inf for degenerate edges
      if (y == 0.0) return std::log1p(-p);
      throw std::invalid_argument("Channel: bernoulli_linear output must be 0 or 1");
    }
    case Kind::custom:
      return loglik_(y, w);
  }
  throw std::logic_error("Channel: unknown kind");
}

std::string Channel::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::gaussian:
      j["kind"] = "gaussian";
      j["delta"] = delta_;
      break;
    case Kind::bernoulli_linear:
      j["kind"] = "bernoulli_linear";
      j["base"] = base_;
      j["slope"] = slope_;
      break;
    case Kind::custom:
      throw std::invalid_argument("Channel::to_json: custom channels are not serializable");
  }
  return j.dump();
}

Channel Channel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("Channel::from_json: ") + e.what());
  }
  std::string kind = j.value("kind", "");
  if (kind == "gaussian") return gaussian(j.at("delta").get<double>());
  if (kind == "bernoulli_linear")
    return bernoulli_linear(j.at("base").get<double>(), j.at("slope").get<double>());
  throw std::invalid_argument("Channel::from_json: unknown kind \"" + kind + "\"");
}

ScoreAtZero score_at_zero(const Channel& c) {
  switch (c.kind_) {
    case Channel::Kind::gaussian: {
      double delta = c.delta_;
      return {[delta](double y) { return y / delta; },
              [delta](double) { return -1.0 / delta; }};
    }
    case Channel::Kind::bernoulli_linear: {
      double b = c.base_, s = c.slope_;
      return {[b, s](double y) { return y == 1.0 ? s / b : -s / (1.0 - b); },
              [b, s](double y) {
                return y == 1.0 ? -s * s / (b * b) : -s * s / ((1.0 - b) * (1.0 - b));
              }};
    }
    case Channel::Kind::custom: {
      auto loglik = c.loglik_;
      auto s = [loglik](double y) {
        auto f = [&](double w) { return loglik(y, w); };
        double d = richardson(central_d1(f, kFdStep), central_d1(f, kFdStep / 2));
        if (!std::isfinite(d))
          throw std::runtime_error("score_at_zero: non-finite first derivative");
        return d;
      };
      auto sp = [loglik](double y) {
        auto f = [&](double w) { return loglik(y, w); };
        double d = richardson(central_d2(f, kFdStep), central_d2(f, kFdStep / 2));
        if (!std::isfinite(d))
          throw std::runtime_error("score_at_zero: non-finite second derivative");
        return d;
      };

      // Zero-mean score check for custom channels.
      if (!c.continuous_) {
        double mean = 0.0;
        for (double y : c.support_) mean += std::exp(loglik(y, 0.0)) * s(y);
        if (std::abs(mean) > 1e-8)
          throw std::runtime_error("score_at_zero: score is not zero-mean at w = 0");
      } else {
        double mean = integrate_line(
            [&](double y) { return std::exp(loglik(y, 0.0)) * s(y); }, 1e-8);
        if (std::abs(mean) > 1e-6)
          throw std::runtime_error("score_at_zero: score is not zero-mean at w = 0");
      }
      return {s, sp};
    }
  }
  throw std::logic_error("score_at_zero: unknown kind");
}

double effective_delta(const Channel& c) {
  double fisher = 0.0;
  switch (c.kind_) {
    case Channel::Kind::gaussian:
      return c.delta_;  // inverse Fisher information, exact
    case Channel::Kind::bernoulli_linear:
    case Channel::Kind::custom: {
      ScoreAtZero sc = score_at_zero(c);
      if (!c.continuous_) {
        for (double y : c.support_) {
          double p = std::exp(c.log_likelihood(y, 0.0));
          double sv = sc.s(y);
          if (!std::isfinite(sv))
            throw std::runtime_error("effective_delta: non-finite score derivative");
          fisher += p * sv * sv;
        }
      } else {
        fisher = integrate_line(
            [&](double y) {
              double sv = sc.s(y);
              return std::exp(c.log_likelihood(y, 0.0)) * sv * sv;
            },
            1e-8);
      }
      break;
    }
  }
  if (!std::isfinite(fisher))
    throw std::runtime_error("effective_delta: Fisher information is not finite");
  if (fisher <= 1e-14)
    throw std::runtime_error("effective_delta: degenerate channel (Fisher information ~ 0)");
  return 1.0 / fisher;
}

double sample_observation(const Channel& c, double w, Rng& rng) {
  switch (c.kind_) {
    case Channel::Kind::gaussian:
      return w + std::sqrt(c.delta_) * rng.gaussian();
    case Channel::Kind::bernoulli_linear: {
      if (std::abs(w) > c.w_max_ * (1.0 + 1e-12))
        throw std::invalid_argument("sample_observation: w outside bernoulli_linear range");
      double p = std::min(1.0, std::max(0.0, c.base_ + c.slope_ * w));
      return rng.uniform() < p ? 1.0 : 0.0;
    }
    case Channel::Kind::custom:
      return c.sampler_(w, rng);
  }
  throw std::logic_error("sample_observation: unknown kind");
}

}  // namespace r1mi
