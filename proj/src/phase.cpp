#include "r1mi/phase.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace r1mi {
namespace {

constexpr double kBracketLo = 1e-3;
constexpr double kBracketHi = 4.0;
constexpr double kDetectMThreshold = 1e-6;
constexpr double kInnerBracketWidth = 1e-3;  // detect resolution inside rho_star

template <typename Pred>
double bisect(double lo, double hi, double tol, Pred pred, bool pred_lo) {
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid) == pred_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ModelPoint sparse_model_point(double rho, double delta) {
  return ModelPoint(make_sparse_rademacher(rho), delta * std::pow(rho, 1.5));
}

double delta_algo(double rho) {
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("delta_algo: rho must lie in (0, 1]");
  return std::sqrt(rho);
}

double find_delta_detect(double rho, double tol, const Quadrature& q) {
  if (!(tol >= 1e-6)) throw std::invalid_argument("find_delta_detect: tol must be >= 1e-6");
  auto nontrivial = [&](double delta) {
    return minimize_bound_bethe(sparse_model_point(rho, delta), q).m_star > kDetectMThreshold;
  };
  bool lo = nontrivial(kBracketLo);
  bool hi = nontrivial(kBracketHi);
  if (lo == hi)
    throw std::runtime_error("find_delta_detect: predicate constant over bracket [1e-3, 4]");
  return bisect(kBracketLo, kBracketHi, tol, nontrivial, lo);
}

MatchThreshold find_delta_match(double rho, double tol, const Quadrature& q) {
  if (!(tol >= 1e-6)) throw std::invalid_argument("find_delta_match: tol must be >= 1e-6");
  auto matches = [&](double delta) {
    return evaluate_point(sparse_model_point(rho, delta), q).bounds_match;
  };
  if (matches(kBracketLo)) return {kBracketLo, true};
  if (!matches(kBracketHi))
    throw std::runtime_error("find_delta_match: bounds still separated at the upper bracket");
  return {bisect(kBracketLo, kBracketHi, tol, matches, false), false};
}

double find_rho_star(double tol, const Quadrature& q) {
  if (!(tol >= 1e-4)) throw std::invalid_argument("find_rho_star: tol must be >= 1e-4");
  auto separated = [&](double rho) {
    double detect = find_delta_detect(rho, kInnerBracketWidth, q);
    return detect > delta_algo(rho) + 2.0 * kInnerBracketWidth;
  };
  double lo = 0.01, hi = 0.5;
  bool plo = separated(lo);
  bool phi = separated(hi);
  if (plo == phi)
    throw std::runtime_error("find_rho_star: predicate constant over bracket [0.01, 0.5]");
  return bisect(lo, hi, tol, separated, plo);
}

Regime classify(const ThresholdSet& ts, double delta) {
  if (delta <= ts.delta_algo) return Regime::easy;
  if (delta < ts.delta_detect) return Regime::hard;
  return Regime::impossible_trivial;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::easy: return "easy";
    case Regime::hard: return "hard";
    case Regime::impossible_trivial: return "impossible-trivial";
  }
  return "?";
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(0.02 * i);
  return grid;
}

PhaseDiagram phase_diagram(const std::vector<double>& rho_grid, double tol, int threads,
                           const Quadrature& q) {
  if (rho_grid.empty()) throw std::invalid_argument("phase_diagram: empty rho grid");
  PhaseDiagram pd;
  pd.bracket_width = tol;
  pd.rows.resize(rho_grid.size());

  auto compute_row = [&](std::size_t i) {
    double rho = rho_grid[i];
    ThresholdSet ts;
    ts.rho = rho;
    ts.delta_algo = delta_algo(rho);
    ts.delta_detect = find_delta_detect(rho, tol, q);
    MatchThreshold mt = find_delta_match(rho, tol, q);
    ts.delta_match = mt.delta;
    ts.match_everywhere = mt.match_everywhere;
    ts.bracket_width = tol;
    pd.rows[i] = ts;
  };

  int workers = std::max(1, threads);
  if (workers == 1) {
    for (std::size_t i = 0; i < rho_grid.size(); ++i) compute_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < rho_grid.size(); i = next.fetch_add(1))
          compute_row(i);
      });
    for (auto& th : pool) th.join();
  }

  pd.rho_star = find_rho_star(1e-3, q);
  return pd;
}

std::vector<CurveRow> figure_curve(double rho, const std::vector<double>& delta_grid,
                                   const Quadrature& q) {
  for (std::size_t i = 1; i < delta_grid.size(); ++i)
    if (!(delta_grid[i] > delta_grid[i - 1]))
      throw std::invalid_argument("figure_curve: delta grid must be sorted ascending");
  std::vector<CurveRow> rows;
  rows.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    BoundResult r = evaluate_point(sparse_model_point(rho, delta), q);
    rows.push_back({delta, r.i_b_min, r.i_l_min, r.m_hat, r.m_tilde, r.bounds_match});
  }
  return rows;
}

}  // namespace r1mi
