#pragma once

#include <functional>
#include <string>
#include <vector>

#include "r1mi/rng.hpp"

namespace r1mi {

// First and second derivatives of log P_out(y|w) at w = 0. The score s has
// zero mean under P_out(y|0) and E[s_prime] = -E[s^2] (both are checked for
// custom channels, analytic for built-ins).
struct ScoreAtZero {
  std::function<double(double)> s;
  std::function<double(double)> s_prime;
};

// Output channel P_out(y|w). Immutable; sampling takes a caller-supplied Rng.
class Channel {
 public:
  enum class Kind { gaussian, bernoulli_linear, custom };

  // y = w + sqrt(delta) * xi, xi ~ N(0,1). Requires delta > 0.
  static Channel gaussian(double delta);

  // P(y=1|w) = base + slope*w on y in {0,1}. Requires 0 < base < 1 and
  // slope != 0. Valid for |w| <= w_max, the largest value keeping the
  // success probability inside [0, 1] (the endpoints may be degenerate).
  static Channel bernoulli_linear(double base, double slope);

  // User-supplied channel. output_support lists the discrete outputs; pass
  // an empty list with continuous = true for a continuous channel. The
  // log-likelihood is spot-checked for smoothness at w = 0 (finite central
  // differences up to third order, bounded by 1e6); channels that fail are
  // rejected.
  static Channel custom(std::function<double(double, double)> log_likelihood,
                        std::function<double(double, Rng&)> sampler,
                        std::vector<double> output_support, bool continuous);

  Kind kind() const { return kind_; }
  double delta() const { return delta_; }
  double base() const { return base_; }
  double slope() const { return slope_; }
  double w_max() const { return w_max_; }
  bool continuous_output() const { return continuous_; }
  const std::vector<double>& output_support() const { return support_; }

  // log P_out(y|w); may be -inf for impossible discrete outcomes.
  double log_likelihood(double y, double w) const;

  // {"kind": "gaussian", "delta": d} or
  // {"kind": "bernoulli_linear", "base": b, "slope": s}.
  std::string to_json() const;
  static Channel from_json(const std::string& text);

  friend double effective_delta(const Channel& c);
  friend ScoreAtZero score_at_zero(const Channel& c);
  friend double sample_observation(const Channel& c, double w, Rng& rng);

 private:
  Channel() = default;

  Kind kind_ = Kind::gaussian;
  double delta_ = 1.0;                  // gaussian
  double base_ = 0.5, slope_ = 1.0;     // bernoulli_linear
  double w_max_ = HUGE_VAL;
  bool continuous_ = true;
  std::vector<double> support_;
  std::function<double(double, double)> loglik_;
  std::function<double(double, Rng&)> sampler_;
};

// Effective Gaussian noise: 1 / E_{P_out(y|0)}[ s(y)^2 ]. Exact finite sum
// for discrete outputs, closed form for the Gaussian channel, adaptive
// quadrature (relative tolerance 1e-8) for continuous custom channels.
// Throws if the Fisher information is <= 1e-14 or a derivative is not finite.
double effective_delta(const Channel& c);

// Score closures at w = 0. Analytic for built-ins; central finite
// differences with step 1e-5 and one Richardson extrapolation for custom
// channels.
ScoreAtZero score_at_zero(const Channel& c);

// One draw from P_out(.|w). Deterministic given the rng state. Throws a
// domain error if |w| exceeds the channel's validity range.
double sample_observation(const Channel& c, double w, Rng& rng);

}  // namespace r1mi
