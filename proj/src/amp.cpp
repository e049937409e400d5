#include "r1mi/amp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "r1mi/scalar.hpp"

namespace r1mi {
namespace {

std::vector<double> initial_estimate(const Instance& inst, const AmpInit& init,
                                     std::uint64_t seed) {
  const int n = inst.n;
  const double ex2 = inst.prior.second_moment();
  Rng rng(seed);
  std::vector<double> f(n);

  if (!init.vector.empty()) {
    if (static_cast<int>(init.vector.size()) != n)
      throw std::invalid_argument("amp_run: explicit init vector has wrong length");
    return init.vector;
  }

  if (init.kind == AmpInit::Kind::random) {
    double eps = init.eps;
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("amp_run: init eps must lie in (0, 1)");
    // f = eps x* + noise sized so ||f||^2/n == <f, x*>/n == eps E[x^2].
    double sigma = std::sqrt(eps * ex2 * (1.0 - eps));
    for (int i = 0; i < n; ++i) f[i] = eps * inst.x_star[i] + sigma * rng.gaussian();
    return f;
  }

  // Power-iteration baseline: leading direction of Y, scaled to a weak
  // initial magnitude.
  std::vector<double> v(n), w(n);
  for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
  for (int it = 0; it < 300; ++it) {
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += inst.y_at(i, j) * v[j];
      w[i] = acc;
      norm += acc * acc;
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::runtime_error("amp_run: power iteration collapsed");
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  double scale = std::sqrt(init.eps * ex2 * n);
  for (int i = 0; i < n; ++i) f[i] = scale * v[i];
  return f;
}

}  // namespace

AmpState amp_run(const Instance& inst, const AmpOptions& opts, std::uint64_t init_seed) {
  if (inst.channel.kind() != Channel::Kind::gaussian)
    throw std::invalid_argument("amp_run: Gaussian channel instance required");
  if (!(opts.damping >= 0.0 && opts.damping < 1.0))
    throw std::invalid_argument("amp_run: damping must lie in [0, 1)");

  const int n = inst.n;
  const double delta = inst.channel.delta();
  const double root_n = std::sqrt(static_cast<double>(n));
  const Prior& prior = inst.prior;

  AmpState state;
  state.estimate = initial_estimate(inst, opts.init, init_seed);
  state.prev_estimate.assign(n, 0.0);

  std::vector<double> b_field(n), f_new(n);
  std::vector<double> a_prev_b(n);  // B of the previous iteration
  double a_prev = 0.0;
  bool have_prev = false;

  auto overlap = [&](const std::vector<double>& f) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f[i] * inst.x_star[i];
    return std::abs(acc) / n;
  };

  for (int t = 0; t < opts.max_iter; ++t) {
    // Onsager coefficient from the previous iteration's denoiser slope.
    double onsager = 0.0;
    if (have_prev) {
      for (int j = 0; j < n; ++j)
        onsager += denoiser_variance(prior, a_prev, a_prev_b[j]);
      onsager /= n * delta;
    }

    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += state.estimate[i] * state.estimate[i];
    const double a_t = norm2 / (n * delta);

    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* row = &inst.y[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) acc += row[j] * state.estimate[j];
      b_field[i] = acc / (root_n * delta) - onsager * state.prev_estimate[i];
    }

    double dist2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double fi = denoiser(prior, a_t, b_field[i]);
      fi = (1.0 - opts.damping) * fi + opts.damping * state.estimate[i];
      if (!std::isfinite(fi))
        throw std::runtime_error("amp_run: iterate diverged at iteration " + std::to_string(t));
      f_new[i] = fi;
      double d = fi - state.estimate[i];
      dist2 += d * d;
    }

    state.prev_estimate = state.estimate;
    state.estimate = f_new;
    a_prev = a_t;
    a_prev_b = b_field;
    have_prev = true;
    state.iteration = t + 1;

    double dist = std::sqrt(dist2 / n);
    state.overlap_history.push_back(overlap(state.estimate));
    state.distance_history.push_back(dist);
    if (dist < 1e-8) {
      state.converged = true;
      break;
    }
  }
  return state;
}

SeTrace state_evolution_run(const ModelPoint& mp, double m0, int max_iter, double tol,
                            double damping, const Quadrature& q) {
  const double ex2 = mp.prior.second_moment();
  if (!(m0 > 0.0) || m0 > ex2)
    throw std::invalid_argument("state_evolution_run: m0 must lie in (0, E[x^2]]");
  if (!(damping >= 0.0 && damping < 1.0))
    throw std::invalid_argument("state_evolution_run: damping must lie in [0, 1)");

  SeTrace trace;
  double m = m0;
  trace.m_values.push_back(m);
  for (int t = 0; t < max_iter; ++t) {
    double next = (1.0 - damping) * state_evolution_step(mp, m, q) + damping * m;
    trace.m_values.push_back(next);
    if (std::abs(next - m) < tol) {
      trace.converged = true;
      m = next;
      break;
    }
    m = next;
  }
  trace.fixed_point = m;
  return trace;
}

}  // namespace r1mi
