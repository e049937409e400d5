#include "r1mi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "r1mi/scalar.hpp"

namespace r1mi {
namespace {

constexpr int kGridPoints = 401;
constexpr double kGoldenTol = 1e-9;   // bracket width on m
constexpr double kTieTol = 1e-9;      // value tolerance for near-minimal candidates

// E_{x,z} J(a_arg/delta, m x/delta + sqrt(a_arg/delta) z). Shared by both
// bounds so that i_lower(m_hat, m_hat) reproduces i_bethe(m_hat) bit for bit.
double j_expectation(const ModelPoint& mp, double a_arg, double m, const Quadrature& q) {
  const double delta = mp.delta;
  const double A = a_arg / delta;
  const double sq = std::sqrt(std::max(a_arg, 0.0) / delta);
  double acc = 0.0;
  for (const Atom& a : mp.prior.atoms()) {
    const double drift = m * a.value / delta;
    double inner = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      inner += q.weights[i] * j_func(mp.prior, A, drift + sq * q.nodes[i]);
    acc += a.weight * inner;
  }
  return acc;
}

// Golden-section minimum of f on [a, b]; returns the bracket midpoint once
// the bracket is narrower than tol.
double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

MinimizeResult minimize_on_overlap_domain(const std::function<double(double)>& f, double hi) {
  MinimizeResult out;
  if (hi <= 0.0) {
    out.m_star = 0.0;
    out.value = f(0.0);
    out.candidates = {{out.m_star, out.value}};
    return out;
  }

  std::vector<double> ms(kGridPoints), vs(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    ms[i] = hi * i / (kGridPoints - 1);
    vs[i] = f(ms[i]);
  }

  std::vector<Candidate> cands;
  for (int i = 0; i < kGridPoints; ++i) {
    bool left_ok = (i == 0) || vs[i] <= vs[i - 1];
    bool right_ok = (i == kGridPoints - 1) || vs[i] <= vs[i + 1];
    if (!(left_ok && right_ok)) continue;
    double a = ms[std::max(i - 1, 0)];
    double b = ms[std::min(i + 1, kGridPoints - 1)];
    double m_star = (a == b) ? a : golden_section(f, a, b, kGoldenTol);
    cands.push_back({m_star, f(m_star)});
    // A domain endpoint that is itself a grid minimum stays an exact
    // candidate, so boundary minimizers are reported as exactly 0 or hi.
    if (i == 0 || i == kGridPoints - 1) cands.push_back({ms[i], vs[i]});
  }

  double best = cands.front().value;
  for (const Candidate& c : cands) best = std::min(best, c.value);

  std::vector<Candidate> near;
  for (const Candidate& c : cands)
    if (c.value <= best + kTieTol) near.push_back(c);
  std::sort(near.begin(), near.end(),
            [](const Candidate& a, const Candidate& b) { return a.m < b.m; });

  out.m_star = near.front().m;       // ties break toward smaller m
  out.value = near.front().value;
  out.candidates = std::move(near);
  return out;
}

}  // namespace

ModelPoint::ModelPoint(Prior p, double d) : prior(std::move(p)), delta(d) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("ModelPoint: delta must be positive and finite");
}

double i_bethe(const ModelPoint& mp, double m, const Quadrature& q) {
  if (m < 0.0) throw std::invalid_argument("i_bethe: m must be nonnegative");
  const double ex2 = mp.prior.second_moment();
  if (m == 0.0) return ex2 * ex2 / (4.0 * mp.delta);  // J(0, 0) = 0
  return (m * m + ex2 * ex2) / (4.0 * mp.delta) - j_expectation(mp, m, m, q);
}

double i_lower(const ModelPoint& mp, double m, double m_hat, const Quadrature& q) {
  if (m_hat < 0.0) throw std::invalid_argument("i_lower: m_hat must be nonnegative");
  const double ex2 = mp.prior.second_moment();
  return (2.0 * m * m - m_hat * m_hat + ex2 * ex2) / (4.0 * mp.delta) -
         j_expectation(mp, m_hat, m, q);
}

MinimizeResult minimize_bound_bethe(const ModelPoint& mp, const Quadrature& q) {
  return minimize_on_overlap_domain([&](double m) { return i_bethe(mp, m, q); },
                                    mp.prior.second_moment());
}

MinimizeResult minimize_bound_lower(const ModelPoint& mp, double m_hat, const Quadrature& q) {
  return minimize_on_overlap_domain([&](double m) { return i_lower(mp, m, m_hat, q); },
                                    mp.prior.second_moment());
}

double state_evolution_step(const ModelPoint& mp, double m, const Quadrature& q) {
  if (m < 0.0) throw std::invalid_argument("state_evolution_step: m must be nonnegative");
  const double delta = mp.delta;
  const double ex2 = mp.prior.second_moment();
  const double A = m / delta;
  const double sq = std::sqrt(m / delta);
  double acc = 0.0;
  for (const Atom& a : mp.prior.atoms()) {
    const double drift = m * a.value / delta;
    double inner = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      inner += q.weights[i] * denoiser(mp.prior, A, drift + sq * q.nodes[i]);
    acc += a.weight * a.value * inner;
  }
  return std::clamp(acc, 0.0, ex2);
}

double mi_from_free_energy(const ModelPoint& mp, double f) {
  if (!std::isfinite(f)) throw std::invalid_argument("mi_from_free_energy: f must be finite");
  const double ex2 = mp.prior.second_moment();
  return f + ex2 * ex2 / (4.0 * mp.delta);
}

BoundResult evaluate_point(const ModelPoint& mp, const Quadrature& q) {
  MinimizeResult bethe = minimize_bound_bethe(mp, q);
  MinimizeResult lower = minimize_bound_lower(mp, bethe.m_star, q);

  BoundResult r;
  r.m_hat = bethe.m_star;
  r.i_b_min = bethe.value;
  r.m_tilde = lower.m_star;
  r.i_l_min = lower.value;
  r.bethe_candidates = std::move(bethe.candidates);
  r.lower_candidates = std::move(lower.candidates);
  r.bounds_match = std::abs(r.i_l_min - r.i_b_min) < kMatchEpsilon &&
                   std::abs(r.m_tilde - r.m_hat) < kMEpsilon;

  if (r.i_l_min > r.i_b_min + 1e-9)
    throw std::runtime_error("evaluate_point: lower bound exceeds upper bound value");

  // m_hat must be a stationary point of i_L (central difference; i_L is
  // smooth in m on both sides of zero). The slope and the step both carry a
  // 1/delta scale, so the step shrinks with delta and the tolerance is
  // applied to delta * i_L', the overlap-units residual; for delta >= 1 and
  // moderate signal-to-noise this is the plain 1e-6 slope check. At large
  // m_hat/delta the z-integrand develops a feature of width
  // sqrt(delta/m_hat) that the fixed-order rule resolves only partially,
  // shifting the located minimum by a few 1e-6; the allowance grows with
  // that ratio so the check keeps its bug-catching power where it is sharp.
  const double h = 1e-3 * std::min(mp.delta, 1.0);
  double slope = (i_lower(mp, r.m_hat + h, r.m_hat, q) -
                  i_lower(mp, r.m_hat - h, r.m_hat, q)) / (2.0 * h);
  const double snr = r.m_hat / mp.delta;
  const double tol = 1e-6 * std::max(1.0, snr / 4.0);
  if (std::abs(slope) * std::min(1.0, mp.delta) > tol)
    throw std::runtime_error("evaluate_point: i_L'(m_hat) stationarity check failed");

  return r;
}

}  // namespace r1mi
