#pragma once

#include <cstdint>
#include <vector>

#include "r1mi/bounds.hpp"
#include "r1mi/oracle.hpp"

namespace r1mi {

struct AmpInit {
  enum class Kind { random, spectral } kind = Kind::random;
  // Overlap of the random init toward x*; the init is placed on the
  // Nishimori lane (||f||^2/n equal to the initial overlap) so the overlap
  // trajectory is tracked by the scalar recursion from iteration one.
  double eps = 0.01;
  // When non-empty, used verbatim as f^0 (overrides kind).
  std::vector<double> vector;
};

struct AmpOptions {
  int max_iter = 200;
  double damping = 0.0;  // applied to the f-update, in [0, 1)
  AmpInit init;
};

struct AmpState {
  std::vector<double> estimate;
  std::vector<double> prev_estimate;
  int iteration = 0;
  bool converged = false;
  std::vector<double> overlap_history;   // |<f, x*>| / n per iteration
  std::vector<double> distance_history;  // ||f_{t+1} - f_t|| / sqrt(n)
};

// Iterative estimate of x* from a Gaussian-channel instance:
//   B_i^t = (1/(sqrt(n) delta)) sum_j Y_ij f_j^t - b^t f_i^{t-1}
//   A^t   = ||f^t||^2 / (n delta)
//   f^{t+1}_i = denoiser(prior, A^t, B_i^t)
//   b^t   = (1/(n delta)) sum_j denoiser_variance at (A^{t-1}, B_j^{t-1}).
// Stops when ||f_{t+1} - f_t||/sqrt(n) < 1e-8 or at max_iter. Throws with
// the iteration index if an iterate becomes non-finite.
AmpState amp_run(const Instance& inst, const AmpOptions& opts, std::uint64_t init_seed);

struct SeTrace {
  std::vector<double> m_values;
  bool converged = false;
  double fixed_point = 0.0;
};

// Damped iteration of state_evolution_step from m0 in (0, E[x^2]]:
//   m <- (1 - damping) * step(m) + damping * m,
// stopping when |m_{t+1} - m_t| < tol. Returns the trace either way.
SeTrace state_evolution_run(const ModelPoint& mp, double m0, int max_iter, double tol,
                            double damping = 0.5,
                            const Quadrature& q = default_quadrature());

}  // namespace r1mi
