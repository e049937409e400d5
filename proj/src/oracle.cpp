#include "r1mi/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>

namespace r1mi {
namespace {

constexpr double kStateCapacity = 1e7;

// Streaming log-sum-exp accumulator.
struct LogSumExp {
  double max_e = -HUGE_VAL;
  double sum = 0.0;

  void add(double e) {
    if (e == -HUGE_VAL) return;  // zero-weight term
    if (e <= max_e) {
      sum += std::exp(e - max_e);
    } else {
      sum = sum * std::exp(max_e - e) + 1.0;
      max_e = e;
    }
  }
  double value() const {
    if (max_e == -HUGE_VAL) throw std::runtime_error("log_partition: empty state sum");
    return max_e + std::log(sum);
  }
};

std::size_t checked_state_count(std::size_t num_atoms, int n) {
  double k = std::pow(static_cast<double>(num_atoms), n);
  if (k > kStateCapacity)
    throw std::runtime_error("oracle: state space exceeds the 1e7 enumeration capacity");
  return static_cast<std::size_t>(k + 0.5);
}

// Full enumeration of prior-support configurations, with per-state pair
// products cached for the posterior computations.
struct StateTable {
  int n = 0;
  std::size_t num_states = 0;
  int num_pairs = 0;                 // n(n+1)/2, pairs with i <= j
  std::vector<int> pair_i, pair_j;
  std::vector<double> values;        // num_states x n
  std::vector<double> log_prior;     // num_states
  std::vector<double> pair_prod;     // num_states x num_pairs
  std::vector<double> quad_term;     // sum_{i<=j} v_i^2 v_j^2 per state

  StateTable(const Prior& p, int n_) : n(n_) {
    const auto& atoms = p.atoms();
    num_states = checked_state_count(atoms.size(), n);
    num_pairs = n * (n + 1) / 2;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        pair_i.push_back(i);
        pair_j.push_back(j);
      }

    values.resize(num_states * n);
    log_prior.resize(num_states);
    pair_prod.resize(num_states * num_pairs);
    quad_term.resize(num_states);

    std::vector<std::size_t> idx(n, 0);
    for (std::size_t k = 0; k < num_states; ++k) {
      double logw = 0.0;
      for (int i = 0; i < n; ++i) {
        values[k * n + i] = atoms[idx[i]].value;
        logw += std::log(atoms[idx[i]].weight);
      }
      log_prior[k] = logw;
      double quad = 0.0;
      for (int q = 0; q < num_pairs; ++q) {
        double prod = values[k * n + pair_i[q]] * values[k * n + pair_j[q]];
        pair_prod[k * num_pairs + q] = prod;
        quad += prod * prod;
      }
      quad_term[k] = quad;
      for (int i = n - 1; i >= 0; --i) {
        if (++idx[i] < atoms.size()) break;
        idx[i] = 0;
      }
    }
  }
};

std::vector<double> pair_observations(const Instance& inst, const StateTable& st) {
  std::vector<double> yp(st.num_pairs);
  for (int q = 0; q < st.num_pairs; ++q) yp[q] = inst.y_at(st.pair_i[q], st.pair_j[q]);
  return yp;
}

}  // namespace

Instance generate_instance(const Prior& p, const Channel& c, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_instance: n must be >= 1");
  Rng rng(seed);

  Instance inst{n, {}, {}, p, c, seed};
  inst.x_star.resize(n);
  std::vector<double> weights;
  for (const Atom& a : p.atoms()) weights.push_back(a.weight);
  for (int i = 0; i < n; ++i) inst.x_star[i] = p.atoms()[rng.pick(weights)].value;

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  inst.y.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double w = inst.x_star[i] * inst.x_star[j] * scale;
      double obs = sample_observation(c, w, rng);
      inst.y[static_cast<std::size_t>(i) * n + j] = obs;
      inst.y[static_cast<std::size_t>(j) * n + i] = obs;
    }
  return inst;
}

double log_partition(const Instance& inst) {
  if (inst.channel.kind() != Channel::Kind::gaussian)
    throw std::invalid_argument("log_partition: Gaussian channel required");
  const double delta = inst.channel.delta();
  const int n = inst.n;
  const auto& atoms = inst.prior.atoms();
  const std::size_t num_atoms = atoms.size();
  checked_state_count(num_atoms, n);

  std::vector<double> log_w(num_atoms), val(num_atoms);
  for (std::size_t a = 0; a < num_atoms; ++a) {
    log_w[a] = std::log(atoms[a].weight);
    val[a] = atoms[a].value;
  }

  const double quad_scale = 1.0 / (2.0 * n * delta);
  const double lin_scale = 1.0 / (std::sqrt(static_cast<double>(n)) * delta);

  // Depth-first enumeration. cross[d][j] = sum_{i<d} x_i Y_ij, copied per
  // level so no undo is needed.
  std::vector<std::vector<double>> cross(n + 1, std::vector<double>(n, 0.0));
  LogSumExp lse;

  struct Frame {
    double logw, sx2, quad, lin;
  };
  std::vector<Frame> stack(n + 1);
  stack[0] = {0.0, 0.0, 0.0, 0.0};

  // Explicit recursion over configuration prefixes.
  auto recurse = [&](auto&& self, int d) -> void {
    const Frame f = stack[d];
    if (d == n) {
      lse.add(f.logw - f.quad * quad_scale + f.lin * lin_scale);
      return;
    }
    for (std::size_t a = 0; a < num_atoms; ++a) {
      const double v = val[a];
      const double v2 = v * v;
      stack[d + 1] = {f.logw + log_w[a],
                      f.sx2 + v2,
                      f.quad + v2 * f.sx2 + v2 * v2,
                      f.lin + v * cross[d][d] + v2 * inst.y_at(d, d)};
      for (int j = d + 1; j < n; ++j) cross[d + 1][j] = cross[d][j] + v * inst.y_at(d, j);
      self(self, d + 1);
    }
  };
  recurse(recurse, 0);
  return lse.value();
}

OracleEstimate mi_monte_carlo(const Prior& p, double delta, int n, int num_samples,
                              std::uint64_t seed, int threads) {
  if (!(delta > 0.0)) throw std::invalid_argument("mi_monte_carlo: delta must be positive");
  if (num_samples < 2) throw std::invalid_argument("mi_monte_carlo: need at least 2 samples");
  checked_state_count(p.atoms().size(), n);

  const Channel gauss = Channel::gaussian(delta);
  std::vector<double> vals(num_samples);

  auto run = [&](int k) {
    Instance inst = generate_instance(p, gauss, n, mix_seed(seed, k));
    vals[k] = log_partition(inst) / n;
  };

  int workers = std::max(1, threads);
  if (workers == 1) {
    for (int k = 0; k < num_samples; ++k) run(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int k = next.fetch_add(1); k < num_samples; k = next.fetch_add(1)) run(k);
      });
    for (auto& th : pool) th.join();
  }

  // Sequential reduction keeps the result independent of the thread count.
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= num_samples;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / (num_samples - 1));

  const double ex2 = p.second_moment();
  OracleEstimate est;
  est.mi_per_var = ex2 * ex2 / (4.0 * delta) - mean;
  est.stderr_ = sd / std::sqrt(static_cast<double>(num_samples));
  est.n = n;
  est.num_y_samples = num_samples;
  return est;
}

NishimoriResult nishimori_check(const Prior& p, double delta, int n, NishimoriF f_choice,
                                int num_y_samples, std::uint64_t seed) {
  if (n > 8) throw std::invalid_argument("nishimori_check: n must be <= 8");
  if (num_y_samples < 2) throw std::invalid_argument("nishimori_check: need >= 2 samples");
  if (!(delta > 0.0)) throw std::invalid_argument("nishimori_check: delta must be positive");

  const StateTable st(p, n);
  const Channel gauss = Channel::gaussian(delta);
  const double quad_scale = 1.0 / (2.0 * n * delta);
  const double lin_scale = 1.0 / (std::sqrt(static_cast<double>(n)) * delta);

  // Off-diagonal pair list for the pair check.
  std::vector<int> offdiag;
  for (int q = 0; q < st.num_pairs; ++q)
    if (st.pair_i[q] != st.pair_j[q]) offdiag.push_back(q);

  int num_components = 1;
  if (f_choice == NishimoriF::per_site) num_components = n;
  if (f_choice == NishimoriF::pair) num_components = static_cast<int>(offdiag.size());

  std::vector<double> lhs_acc(num_components, 0.0), rhs_acc(num_components, 0.0);
  std::vector<double> gaps(num_y_samples);
  double lhs_total = 0.0, rhs_total = 0.0;

  std::vector<double> post(st.num_states), mag(n), pair_mag;
  for (int s = 0; s < num_y_samples; ++s) {
    Instance inst = generate_instance(p, gauss, n, mix_seed(seed, s));
    std::vector<double> yp = pair_observations(inst, st);
    for (double& v : yp) v *= lin_scale;

    double max_e = -HUGE_VAL;
    for (std::size_t k = 0; k < st.num_states; ++k) {
      const double* pp = &st.pair_prod[k * st.num_pairs];
      double lin = 0.0;
      for (int q = 0; q < st.num_pairs; ++q) lin += pp[q] * yp[q];
      post[k] = st.log_prior[k] - st.quad_term[k] * quad_scale + lin;
      max_e = std::max(max_e, post[k]);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < st.num_states; ++k) {
      post[k] = std::exp(post[k] - max_e);
      z += post[k];
    }
    for (std::size_t k = 0; k < st.num_states; ++k) post[k] /= z;

    double lhs_s = 0.0, rhs_s = 0.0;
    switch (f_choice) {
      case NishimoriF::overlap:
      case NishimoriF::per_site: {
        std::fill(mag.begin(), mag.end(), 0.0);
        for (std::size_t k = 0; k < st.num_states; ++k)
          for (int i = 0; i < n; ++i) mag[i] += post[k] * st.values[k * n + i];
        for (int i = 0; i < n; ++i) {
          double l = mag[i] * mag[i];
          double r = mag[i] * inst.x_star[i];
          lhs_s += l;
          rhs_s += r;
          if (f_choice == NishimoriF::per_site) {
            lhs_acc[i] += l;
            rhs_acc[i] += r;
          }
        }
        if (f_choice == NishimoriF::per_site) {
          lhs_s /= n;
          rhs_s /= n;
        } else {
          lhs_acc[0] += lhs_s;
          rhs_acc[0] += rhs_s;
        }
        break;
      }
      case NishimoriF::pair: {
        pair_mag.assign(offdiag.size(), 0.0);
        for (std::size_t k = 0; k < st.num_states; ++k) {
          const double* pp = &st.pair_prod[k * st.num_pairs];
          for (std::size_t c = 0; c < offdiag.size(); ++c)
            pair_mag[c] += post[k] * pp[offdiag[c]];
        }
        for (std::size_t c = 0; c < offdiag.size(); ++c) {
          int q = offdiag[c];
          double truth = inst.x_star[st.pair_i[q]] * inst.x_star[st.pair_j[q]];
          double l = pair_mag[c] * pair_mag[c];
          double r = pair_mag[c] * truth;
          lhs_s += l;
          rhs_s += r;
          lhs_acc[c] += l;
          rhs_acc[c] += r;
        }
        lhs_s /= static_cast<double>(offdiag.size());
        rhs_s /= static_cast<double>(offdiag.size());
        break;
      }
    }
    gaps[s] = lhs_s - rhs_s;
    lhs_total += lhs_s;
    rhs_total += rhs_s;
  }

  NishimoriResult res;
  res.num_y_samples = num_y_samples;
  res.lhs = lhs_total / num_y_samples;
  res.rhs = rhs_total / num_y_samples;
  for (int c = 0; c < num_components; ++c)
    res.max_abs_gap =
        std::max(res.max_abs_gap, std::abs(lhs_acc[c] - rhs_acc[c]) / num_y_samples);

  double mean = (lhs_total - rhs_total) / num_y_samples;
  double ss = 0.0;
  for (double g : gaps) ss += (g - mean) * (g - mean);
  res.gap_stderr = std::sqrt(ss / (num_y_samples - 1)) / std::sqrt(double(num_y_samples));
  return res;
}

UniversalityResult universality_gap(const Prior& p, const Channel& c, int n,
                                    int num_samples, std::uint64_t seed) {
  if (n > 12) throw std::invalid_argument("universality_gap: n must be <= 12");
  if (c.kind() == Channel::Kind::custom && c.continuous_output())
    throw std::invalid_argument(
        "universality_gap: continuous non-Gaussian channels are not supported");

  const double delta_eff = effective_delta(c);
  const StateTable st(p, n);
  const double root_n = std::sqrt(static_cast<double>(n));

  // Distinct pair-product values; per-state codes index into them.
  std::vector<double> distinct;
  for (const Atom& a : p.atoms())
    for (const Atom& b : p.atoms()) distinct.push_back(a.value * b.value);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<std::uint8_t> code(st.num_states * st.num_pairs);
  for (std::size_t k = 0; k < st.num_states; ++k)
    for (int q = 0; q < st.num_pairs; ++q) {
      double v = st.pair_prod[k * st.num_pairs + q];
      code[k * st.num_pairs + q] = static_cast<std::uint8_t>(
          std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin());
    }

  std::vector<double> vals(num_samples);
  std::vector<double> lr(distinct.size());
  std::vector<double> state_lr(st.num_states);

  for (int s = 0; s < num_samples; ++s) {
    Instance inst = generate_instance(p, c, n, mix_seed(seed, s));
    std::vector<double> yp = pair_observations(inst, st);

    double truth_term = 0.0;
    std::fill(state_lr.begin(), state_lr.end(), 0.0);
    for (int q = 0; q < st.num_pairs; ++q) {
      const double y = yp[q];
      const double base_ll = c.log_likelihood(y, 0.0);
      for (std::size_t v = 0; v < distinct.size(); ++v)
        lr[v] = c.log_likelihood(y, distinct[v] / root_n) - base_ll;
      double w_true = inst.x_star[st.pair_i[q]] * inst.x_star[st.pair_j[q]] / root_n;
      truth_term += c.log_likelihood(y, w_true) - base_ll;

      for (std::size_t k = 0; k < st.num_states; ++k)
        state_lr[k] += lr[code[k * st.num_pairs + q]];
    }

    LogSumExp lse;
    for (std::size_t k = 0; k < st.num_states; ++k) lse.add(st.log_prior[k] + state_lr[k]);
    vals[s] = (truth_term - lse.value()) / n;
  }

  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= num_samples;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  double se = std::sqrt(ss / (num_samples - 1)) / std::sqrt(double(num_samples));

  // Shift to the same normalization as mi_monte_carlo, so the gap compares
  // like with like at every n.
  const double ex2 = p.second_moment();
  const double shift = (2.0 * p.moment(4) - ex2 * ex2) / (4.0 * n * delta_eff);

  UniversalityResult res;
  res.mi_channel = mean - shift;
  res.channel_stderr = se;
  OracleEstimate g = mi_monte_carlo(p, delta_eff, n, num_samples, mix_seed(seed, 0x6A55));
  res.mi_gaussian = g.mi_per_var;
  res.gaussian_stderr = g.stderr_;
  res.gap = res.mi_channel - res.mi_gaussian;
  return res;
}

}  // namespace r1mi
