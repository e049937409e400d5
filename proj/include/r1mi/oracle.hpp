#pragma once

#include <cstdint>
#include <vector>

#include "r1mi/bounds.hpp"
#include "r1mi/channel.hpp"
#include "r1mi/prior.hpp"
#include "r1mi/rng.hpp"

namespace r1mi {

// One synthetic observation matrix: x* drawn i.i.d. from the prior, and for
// every i <= j (diagonal included) y_ij drawn from P_out(.| x*_i x*_j / sqrt(n)).
struct Instance {
  int n = 0;
  std::vector<double> x_star;
  std::vector<double> y;  // n*n row-major, symmetric
  Prior prior;
  Channel channel;
  std::uint64_t seed = 0;

  double y_at(int i, int j) const { return y[static_cast<std::size_t>(i) * n + j]; }
};

Instance generate_instance(const Prior& p, const Channel& c, int n, std::uint64_t seed);

// Exact log of
//   Z(Y) = sum_x p(x) exp[ sum_{i<=j} ( -x_i^2 x_j^2 / (2 n delta)
//                                       + x_i x_j Y_ij / (sqrt(n) delta) ) ]
// over all |support|^n configurations, log-sum-exp stabilized. Gaussian
// channel only; enumeration capped at 1e7 states.
double log_partition(const Instance& inst);

struct OracleEstimate {
  double mi_per_var = 0.0;
  double stderr_ = 0.0;
  int n = 0;
  int num_y_samples = 0;
};

// Monte Carlo over Y with exact enumeration over x:
//   mi_per_var = E[x^2]^2 / (4 delta) - mean_k log Z(Y_k) / n,
// stderr the sample standard error. Deterministic given the seed; samples
// use independent per-sample streams, so the result is
// thread-count-independent.
OracleEstimate mi_monte_carlo(const Prior& p, double delta, int n, int num_samples,
                              std::uint64_t seed, int threads = 1);

enum class NishimoriF {
  overlap,   // f = <x, x'>         (inner product of two posterior samples)
  per_site,  // (1/n) sum_i <x_i>^2  vs  (1/n) sum_i <x_i x*_i>
  pair,      // averaged over i<j: <x_i x_j>^2-type check
};

struct NishimoriResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double max_abs_gap = 0.0;  // largest per-component |lhs_i - rhs_i|
  double gap_stderr = 0.0;   // standard error of the per-sample lhs-rhs
  int num_y_samples = 0;
};

// Both sides of E[f(x, x')] = E[f(x, x*)] computed exactly per sampled Y
// (posterior by enumeration) and averaged over Y samples. Gaussian channel;
// n <= 8.
NishimoriResult nishimori_check(const Prior& p, double delta, int n, NishimoriF f_choice,
                                int num_y_samples, std::uint64_t seed);

struct UniversalityResult {
  double mi_channel = 0.0;
  double channel_stderr = 0.0;
  double mi_gaussian = 0.0;
  double gaussian_stderr = 0.0;
  double gap = 0.0;  // mi_channel - mi_gaussian
};

// Per-variable mutual information under the true channel (enumeration MC
// with the channel likelihood in the posterior, reported in the same
// normalization as mi_monte_carlo) against the Gaussian model at
// delta = effective_delta(c). Discrete-output or Gaussian channels; n <= 12.
UniversalityResult universality_gap(const Prior& p, const Channel& c, int n,
                                    int num_samples, std::uint64_t seed);

}  // namespace r1mi
