// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "r1mi/amp.hpp"
#include "r1mi/bounds.hpp"
#include "r1mi/channel.hpp"
#include "r1mi/oracle.hpp"
#include "r1mi/phase.hpp"
#include "r1mi/prior.hpp"
#include "r1mi/rng.hpp"

using namespace r1mi;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %2d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

struct GridScan {
  std::vector<ThresholdSet> rows;
  double max_match = 0.0;
  double onset_rho = -1.0;  // smallest grid rho with match everywhere
};

GridScan scan_default_grid(const Quadrature& q) {
  GridScan scan;
  for (double rho : default_rho_grid()) {
    ThresholdSet ts;
    ts.rho = rho;
    ts.delta_algo = delta_algo(rho);
    ts.delta_detect = find_delta_detect(rho, 1e-3, q);
    MatchThreshold mt = find_delta_match(rho, 1e-3, q);
    ts.delta_match = mt.delta;
    ts.match_everywhere = mt.match_everywhere;
    ts.bracket_width = 1e-3;
    scan.rows.push_back(ts);
    if (!mt.match_everywhere) scan.max_match = std::max(scan.max_match, mt.delta);
    if (mt.match_everywhere && scan.onset_rho < 0.0) scan.onset_rho = rho;
  }
  return scan;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

int main() {
  const Quadrature& q61 = quadrature_of_order(61);
  const Quadrature& q121 = quadrature_of_order(121);

  // 1. Dense detection threshold.
  double c1_detect;
  {
    Timer t;
    c1_detect = find_delta_detect(1.0, 1e-3, q61);
    report(1, c1_detect >= 0.999 && c1_detect <= 1.001,
           "find_delta_detect(1.0, 1e-3) = " + fmt(c1_detect) + " in [0.999, 1.001]",
           t.elapsed());
  }

  // 2. Algorithmic threshold closed form on a 50-point grid.
  {
    Timer t;
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
      double rho = i / 50.0;
      double d = delta_algo(rho);
      worst = std::max(worst, std::abs(d * d - rho));
    }
    report(2, worst < 1e-12, "max |delta_algo(rho)^2 - rho| = " + fmt(worst) + " < 1e-12",
           t.elapsed());
  }

  // 3. Detection coincides with sqrt(rho) at rho = 0.6.
  double c3_detect;
  {
    Timer t;
    c3_detect = find_delta_detect(0.6, 1e-3, q61);
    double err = std::abs(c3_detect - std::sqrt(0.6));
    report(3, err < 0.02,
           "find_delta_detect(0.6) = " + fmt(c3_detect) + ", |diff to sqrt(0.6)| = " +
               fmt(err) + " < 0.02",
           t.elapsed());
  }

  // 4. Onset of the hard phase.
  double c4_rho_star;
  {
    Timer t;
    c4_rho_star = find_rho_star(1e-3, q61);
    report(4, c4_rho_star >= 0.07 && c4_rho_star <= 0.11,
           "find_rho_star(1e-3) = " + fmt(c4_rho_star) + " in [0.07, 0.11]", t.elapsed());
  }

  // 5. Hard-phase ordering at rho = 0.05.
  double c5_detect, c5_match;
  {
    Timer t;
    const double bw = 1e-3;
    double algo = delta_algo(0.05);
    c5_detect = find_delta_detect(0.05, bw, q61);
    MatchThreshold mt = find_delta_match(0.05, bw, q61);
    c5_match = mt.delta;
    bool ok = !mt.match_everywhere && algo + 2.0 * bw < c5_detect &&
              c5_detect + 2.0 * bw < c5_match;
    report(5, ok,
           "rho = 0.05: algo " + fmt(algo) + " < detect " + fmt(c5_detect) + " < match " +
               fmt(c5_match) + ", separations > 2e-3",
           t.elapsed());
  }

  // 6. Global match scale over the default grid.
  GridScan scan61;
  {
    Timer t;
    scan61 = scan_default_grid(q61);
    bool ok = scan61.max_match >= 0.10 && scan61.max_match <= 0.20;
    report(6, ok, "max delta_match over default grid = " + fmt(scan61.max_match) +
                      ", band [0.10, 0.20]",
           t.elapsed());
  }

  // 7. Onset of the all-noise match region.
  {
    Timer t;
    bool ok = scan61.onset_rho >= 0.55 && scan61.onset_rho <= 0.75;
    report(7, ok,
           "smallest grid rho with match-everywhere = " + fmt(scan61.onset_rho) +
               " in [0.55, 0.75]",
           t.elapsed());
  }

  // 8. Finite-n upper bound at four corners.
  {
    Timer t;
    struct Cfg {
      double rho, delta;
      int n;
    };
    bool ok = true;
    std::string detail;
    for (const Cfg& cfg :
         {Cfg{1.0, 2.0, 10}, Cfg{1.0, 0.5, 10}, Cfg{0.6, 0.3, 8}, Cfg{0.05, 0.5, 8}}) {
      Prior p = make_sparse_rademacher(cfg.rho);
      OracleEstimate est = mi_monte_carlo(p, cfg.delta, cfg.n, 4000, 20160817);
      double bethe = minimize_bound_bethe(ModelPoint(p, cfg.delta), q61).value;
      bool this_ok = est.mi_per_var <= bethe + 3.0 * est.stderr_;
      ok = ok && this_ok;
      detail += "(" + fmt(cfg.rho) + "," + fmt(cfg.delta) + "," + std::to_string(cfg.n) +
                "): mi " + fmt(est.mi_per_var) + " <= " + fmt(bethe) + " + 3se; ";
    }
    report(8, ok, detail, t.elapsed());
  }

  // 9. Algebraic identity and stationarity at 100 random points.
  {
    Timer t;
    Rng rng(271828);
    double worst_id = 0.0, worst_slope = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
      double rho = 0.02 + 0.98 * rng.uniform();
      double delta = std::pow(10.0, -1.3 + 1.9 * rng.uniform());  // [0.05, 4.0]
      ModelPoint mp(make_sparse_rademacher(rho), delta);
      double m_hat = minimize_bound_bethe(mp, q61).m_star;
      double id_gap = std::abs(i_lower(mp, m_hat, m_hat, q61) - i_bethe(mp, m_hat, q61));
      const double h = 1e-5;
      double slope = std::abs(i_lower(mp, m_hat + h, m_hat, q61) -
                              i_lower(mp, m_hat - h, m_hat, q61)) / (2.0 * h);
      worst_id = std::max(worst_id, id_gap);
      worst_slope = std::max(worst_slope, slope);
      ok = ok && id_gap < 1e-12 && slope < 1e-6;
    }
    report(9, ok,
           "max |i_L(m^,m^) - i_B(m^)| = " + fmt(worst_id) + " < 1e-12, max |i_L'(m^)| = " +
               fmt(worst_slope) + " < 1e-6",
           t.elapsed());
  }

  // 10. Nishimori per-site identity at n = 5.
  {
    Timer t;
    Prior p = make_sparse_rademacher(1.0);
    NishimoriResult r = nishimori_check(p, 1.0, 5, NishimoriF::per_site, 10000, 1318);
    double gap = std::abs(r.lhs - r.rhs);
    bool ok = gap <= 3.0 * r.gap_stderr && r.gap_stderr < 0.01;
    report(10, ok,
           "|lhs - rhs| = " + fmt(gap) + " <= 3 stderr (" + fmt(3.0 * r.gap_stderr) +
               "), stderr " + fmt(r.gap_stderr) + " < 0.01",
           t.elapsed());
  }

  // 11. Channel universality trend for bernoulli_linear(0.5, 1).
  {
    Timer t;
    Prior p = make_sparse_rademacher(1.0);
    Channel c = Channel::bernoulli_linear(0.5, 1.0);
    bool ok = true;
    double prev_gap = 0.0, prev_se = 0.0;
    std::string detail = "per-variable |gap| at n = 4, 8, 12: ";
    for (int i = 0; i < 3; ++i) {
      int n = 4 * (i + 1);
      UniversalityResult r = universality_gap(p, c, n, 3000, 9091);
      double g = std::abs(r.gap);
      double se = std::hypot(r.channel_stderr, r.gaussian_stderr);
      if (i > 0) ok = ok && g <= prev_gap + 2.0 * std::hypot(se, prev_se);
      detail += fmt(g) + (i < 2 ? ", " : "");
      prev_gap = g;
      prev_se = se;
    }
    report(11, ok, detail + " (non-increasing within 2 combined stderr)", t.elapsed());
  }

  // 12. AMP against state evolution.
  {
    Timer t;
    Prior p = make_sparse_rademacher(1.0);
    double fp = state_evolution_run(ModelPoint(p, 0.5), 0.01, 10000, 1e-10, 0.5, q61)
                    .fixed_point;
    double mean_low = 0.0, mean_high = 0.0;
    for (int k = 0; k < 8; ++k) {
      Instance inst = generate_instance(p, Channel::gaussian(0.5), 2000, mix_seed(77, 2 * k));
      AmpOptions opts;
      mean_low += amp_run(inst, opts, mix_seed(77, 2 * k + 1)).overlap_history.back() / 8.0;
      Instance hi = generate_instance(p, Channel::gaussian(2.0), 2000, mix_seed(88, 2 * k));
      mean_high += amp_run(hi, opts, mix_seed(88, 2 * k + 1)).overlap_history.back() / 8.0;
    }
    bool ok = std::abs(mean_low - fp) < 0.05 && mean_high < 0.05;
    report(12, ok,
           "delta 0.5: mean |overlap| " + fmt(mean_low) + " vs SE " + fmt(fp) +
               " (within 0.05); delta 2: " + fmt(mean_high) + " < 0.05",
           t.elapsed());
  }

  // 13. Quadrature robustness of every threshold from criteria 1-7.
  {
    Timer t;
    double worst = 0.0;
    worst = std::max(worst, std::abs(find_delta_detect(1.0, 1e-3, q121) - c1_detect));
    worst = std::max(worst, std::abs(find_delta_detect(0.6, 1e-3, q121) - c3_detect));
    worst = std::max(worst, std::abs(find_rho_star(1e-3, q121) - c4_rho_star));
    worst = std::max(worst, std::abs(find_delta_detect(0.05, 1e-3, q121) - c5_detect));
    worst = std::max(worst, std::abs(find_delta_match(0.05, 1e-3, q121).delta - c5_match));
    GridScan scan121 = scan_default_grid(q121);
    worst = std::max(worst, std::abs(scan121.max_match - scan61.max_match));
    worst = std::max(worst, std::abs(scan121.onset_rho - scan61.onset_rho));
    report(13, worst < 1e-4,
           "max threshold change at quadrature order 121 = " + fmt(worst) + " < 1e-4",
           t.elapsed());
  }

  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
