// Command-line front end: single-point bound evaluation, Fig-style curve
// sweeps, phase diagrams, small-n oracle validation, AMP experiments.
//
// point/sweep/phase address the sparse Rademacher family on its reduced
// noise axis (see include/r1mi/phase.hpp); oracle/nishimori/universality/amp
// take the literal channel noise.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "r1mi/amp.hpp"
#include "r1mi/bounds.hpp"
#include "r1mi/channel.hpp"
#include "r1mi/oracle.hpp"
#include "r1mi/phase.hpp"
#include "r1mi/prior.hpp"
#include "r1mi/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
  double rho = 1.0;
  double delta = 1.0;
  int n = 8;
  int samples = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  int quad_order = 61;
  double tol = 1e-3;
  std::string out;
  std::string config_path;
};

std::uint64_t config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

// One comment line under the CSV header records provenance.
void write_csv_preamble(std::ostream& os, const std::string& header,
                        const std::string& config_text, int quad_order) {
  os << header << "\n";
  os << "# r1mi " << r1mi::kVersion << " config=" << hex64(config_hash(config_text))
     << " quad_order=" << quad_order << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open output file: " + path);
  return os;
}

std::uint64_t ensure_seed(CommonOpts& o) {
  if (!o.seed_given) {
    o.seed = std::random_device{}();
    std::cerr << "note: no --seed given; using auto seed " << o.seed << "\n";
  }
  return o.seed;
}

// Flags > config file > defaults. Missing flags are backfilled from the
// JSON config document when one is provided.
void apply_config(CLI::App* cmd, CommonOpts& o) {
  if (o.config_path.empty()) return;
  std::ifstream is(o.config_path);
  if (!is) throw std::ios_base::failure("cannot open config file: " + o.config_path);
  json cfg = json::parse(is);

  auto backfill = [&](const char* flag, auto& target) {
    using T = std::decay_t<decltype(target)>;
    std::string key = flag;
    if (cfg.contains(key) && cmd->count("--" + key) == 0) target = cfg[key].get<T>();
  };
  backfill("rho", o.rho);
  backfill("delta", o.delta);
  backfill("n", o.n);
  backfill("samples", o.samples);
  backfill("threads", o.threads);
  backfill("quad-order", o.quad_order);
  backfill("tol", o.tol);
  backfill("out", o.out);
  if (cfg.contains("seed") && cmd->count("--seed") == 0) {
    o.seed = cfg["seed"].get<std::uint64_t>();
    o.seed_given = true;
  }
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_model = true) {
  if (with_model) {
    cmd->add_option("--rho", o.rho, "sparse Rademacher density in (0, 1]");
    cmd->add_option("--delta", o.delta, "noise level");
  }
  cmd->add_option("--seed", o.seed, "random seed")->each([&o](const std::string&) {
    o.seed_given = true;
  });
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--quad-order", o.quad_order, "Gauss-Hermite order (default 61)");
  cmd->add_option("--out", o.out, "output file path");
  cmd->add_option("--config", o.config_path, "JSON config file (flags take precedence)");
}

json bound_result_json(double rho, double delta, const r1mi::ModelPoint& mp,
                       const r1mi::BoundResult& r) {
  json j;
  j["rho"] = rho;
  j["delta"] = delta;
  j["model_delta"] = mp.delta;
  j["m_hat"] = r.m_hat;
  j["i_b_min"] = r.i_b_min;
  j["m_tilde"] = r.m_tilde;
  j["i_l_min"] = r.i_l_min;
  j["bounds_match"] = r.bounds_match;
  json cands = json::array();
  for (const auto& c : r.bethe_candidates) cands.push_back({{"m", c.m}, {"value", c.value}});
  j["bethe_candidates"] = cands;
  return j;
}

void emit(const std::string& out, const json& j) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    auto os = open_out(out);
    os << j.dump(2) << "\n";
  }
}

int cmd_point(CommonOpts& o) {
  const auto& q = r1mi::quadrature_of_order(o.quad_order);
  r1mi::ModelPoint mp = r1mi::sparse_model_point(o.rho, o.delta);
  r1mi::BoundResult r = r1mi::evaluate_point(mp, q);
  emit(o.out, bound_result_json(o.rho, o.delta, mp, r));
  return 0;
}

int cmd_sweep(CommonOpts& o, double dmin, double dmax, int steps) {
  if (steps < 2) throw std::invalid_argument("sweep: need at least 2 grid points");
  if (!(dmin > 0.0 && dmax > dmin)) throw std::invalid_argument("sweep: bad delta range");
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) grid[i] = dmin + (dmax - dmin) * i / (steps - 1);

  const auto& q = r1mi::quadrature_of_order(o.quad_order);
  auto rows = r1mi::figure_curve(o.rho, grid, q);

  std::string path = o.out.empty() ? "sweep.csv" : o.out;
  std::ostringstream cfg;
  cfg << "sweep rho=" << o.rho << " dmin=" << dmin << " dmax=" << dmax << " steps=" << steps;
  auto os = open_out(path);
  os.precision(12);
  write_csv_preamble(os, "delta,i_b_min,i_l_min,m_hat,m_tilde,bounds_match", cfg.str(),
                     o.quad_order);
  for (const auto& r : rows)
    os << r.delta << ',' << r.i_b_min << ',' << r.i_l_min << ',' << r.m_hat << ','
       << r.m_tilde << ',' << (r.bounds_match ? 1 : 0) << "\n";

  // Companion gnuplot script for the two bound curves.
  std::filesystem::path plot = std::filesystem::path(path).replace_extension(".gnuplot");
  auto ps = open_out(plot.string());
  ps << "set datafile separator ','\n"
     << "set xlabel 'delta'\n"
     << "set ylabel 'mutual information per variable'\n"
     << "plot '" << path << "' using 1:2 with lines title 'upper bound', \\\n"
     << "     '" << path << "' using 1:3 with lines dashtype 2 title 'lower bound'\n";
  std::cerr << "wrote " << path << " and " << plot.string() << "\n";
  return 0;
}

int cmd_phase(CommonOpts& o, double rho_min, double rho_max, double rho_step,
              const std::string& json_out) {
  std::vector<double> grid;
  if (rho_step <= 0.0) throw std::invalid_argument("phase: rho-step must be positive");
  for (double r = rho_min; r <= rho_max + 1e-12; r += rho_step) grid.push_back(r);

  const auto& q = r1mi::quadrature_of_order(o.quad_order);
  r1mi::PhaseDiagram pd = r1mi::phase_diagram(grid, o.tol, o.threads, q);

  std::string path = o.out.empty() ? "phase.csv" : o.out;
  std::ostringstream cfg;
  cfg << "phase rho=[" << rho_min << ',' << rho_max << "] step=" << rho_step
      << " tol=" << o.tol;
  auto os = open_out(path);
  os.precision(12);
  write_csv_preamble(os, "rho,delta_algo,delta_detect,delta_match,match_everywhere",
                     cfg.str(), o.quad_order);
  for (const auto& row : pd.rows)
    os << row.rho << ',' << row.delta_algo << ',' << row.delta_detect << ','
       << row.delta_match << ',' << (row.match_everywhere ? 1 : 0) << "\n";

  json summary;
  summary["rho_star"] = pd.rho_star;
  summary["bracket_width"] = pd.bracket_width;
  summary["rows"] = pd.rows.size();
  if (!json_out.empty()) {
    auto js = open_out(json_out);
    js << summary.dump(2) << "\n";
  } else {
    std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

int cmd_oracle(CommonOpts& o) {
  ensure_seed(o);
  const auto& q = r1mi::quadrature_of_order(o.quad_order);
  r1mi::Prior p = r1mi::make_sparse_rademacher(o.rho);
  r1mi::OracleEstimate est =
      r1mi::mi_monte_carlo(p, o.delta, o.n, o.samples, o.seed, o.threads);
  r1mi::ModelPoint mp(p, o.delta);
  double bethe_min = r1mi::minimize_bound_bethe(mp, q).value;

  json j;
  j["rho"] = o.rho;
  j["delta"] = o.delta;
  j["n"] = o.n;
  j["samples"] = o.samples;
  j["seed"] = o.seed;
  j["mi"] = est.mi_per_var;
  j["stderr"] = est.stderr_;
  j["bethe_min"] = bethe_min;
  j["ub_satisfied"] = est.mi_per_var <= bethe_min + 3.0 * est.stderr_;
  emit(o.out, j);
  return 0;
}

int cmd_nishimori(CommonOpts& o, const std::string& f_choice) {
  ensure_seed(o);
  r1mi::NishimoriF f = r1mi::NishimoriF::per_site;
  if (f_choice == "overlap") f = r1mi::NishimoriF::overlap;
  else if (f_choice == "per-site") f = r1mi::NishimoriF::per_site;
  else if (f_choice == "pair") f = r1mi::NishimoriF::pair;
  else throw std::invalid_argument("nishimori: --f must be overlap, per-site or pair");

  r1mi::Prior p = r1mi::make_sparse_rademacher(o.rho);
  r1mi::NishimoriResult r = r1mi::nishimori_check(p, o.delta, o.n, f, o.samples, o.seed);
  json j;
  j["rho"] = o.rho;
  j["delta"] = o.delta;
  j["n"] = o.n;
  j["samples"] = o.samples;
  j["seed"] = o.seed;
  j["f"] = f_choice;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["max_abs_gap"] = r.max_abs_gap;
  j["gap_stderr"] = r.gap_stderr;
  emit(o.out, j);
  return 0;
}

int cmd_universality(CommonOpts& o, const std::string& channel_json, double base,
                     double slope) {
  ensure_seed(o);
  r1mi::Channel c = channel_json.empty()
                        ? r1mi::Channel::bernoulli_linear(base, slope)
                        : r1mi::Channel::from_json(channel_json);
  r1mi::Prior p = r1mi::make_sparse_rademacher(o.rho);
  r1mi::UniversalityResult r = r1mi::universality_gap(p, c, o.n, o.samples, o.seed);
  json j;
  j["rho"] = o.rho;
  j["n"] = o.n;
  j["samples"] = o.samples;
  j["seed"] = o.seed;
  j["channel"] = channel_json.empty() ? c.to_json() : channel_json;
  j["effective_delta"] = r1mi::effective_delta(c);
  j["mi_channel"] = r.mi_channel;
  j["channel_stderr"] = r.channel_stderr;
  j["mi_gaussian"] = r.mi_gaussian;
  j["gaussian_stderr"] = r.gaussian_stderr;
  j["gap"] = r.gap;
  emit(o.out, j);
  return 0;
}

int cmd_amp(CommonOpts& o, int seeds, int max_iter, double damping, const std::string& init) {
  ensure_seed(o);
  r1mi::Prior p = r1mi::make_sparse_rademacher(o.rho);
  r1mi::Channel c = r1mi::Channel::gaussian(o.delta);
  r1mi::AmpOptions opts;
  opts.max_iter = max_iter;
  opts.damping = damping;
  opts.init.kind = (init == "spectral") ? r1mi::AmpInit::Kind::spectral
                                        : r1mi::AmpInit::Kind::random;

  const auto& quad = r1mi::quadrature_of_order(o.quad_order);
  r1mi::ModelPoint mp(p, o.delta);
  r1mi::SeTrace se = r1mi::state_evolution_run(mp, 0.01 * p.second_moment(), 10000, 1e-10,
                                               0.5, quad);

  json runs = json::array();
  double mean_overlap = 0.0;
  std::optional<std::ofstream> trace;
  if (!o.out.empty()) {
    trace.emplace(open_out(o.out));
    trace->precision(12);
    std::ostringstream cfg;
    cfg << "amp rho=" << o.rho << " delta=" << o.delta << " n=" << o.n
        << " seeds=" << seeds << " seed=" << o.seed;
    write_csv_preamble(*trace, "run,iteration,overlap,iterate_distance", cfg.str(),
                       o.quad_order);
  }
  for (int k = 0; k < seeds; ++k) {
    std::uint64_t inst_seed = r1mi::mix_seed(o.seed, 2 * k);
    std::uint64_t init_seed = r1mi::mix_seed(o.seed, 2 * k + 1);
    r1mi::Instance inst = r1mi::generate_instance(p, c, o.n, inst_seed);
    r1mi::AmpState st = r1mi::amp_run(inst, opts, init_seed);
    double final_overlap = st.overlap_history.empty() ? 0.0 : st.overlap_history.back();
    mean_overlap += final_overlap;
    runs.push_back({{"seed", inst_seed},
                    {"iterations", st.iteration},
                    {"converged", st.converged},
                    {"final_overlap", final_overlap}});
    if (trace)
      for (std::size_t t = 0; t < st.overlap_history.size(); ++t)
        *trace << k << ',' << t << ',' << st.overlap_history[t] << ','
               << st.distance_history[t] << "\n";
  }
  mean_overlap /= seeds;

  json j;
  j["rho"] = o.rho;
  j["delta"] = o.delta;
  j["n"] = o.n;
  j["seeds"] = seeds;
  j["seed"] = o.seed;
  j["damping"] = damping;
  j["init"] = init;
  j["mean_final_overlap"] = mean_overlap;
  j["se_fixed_point"] = se.fixed_point;
  j["se_converged"] = se.converged;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bethe and interpolation bounds for rank-one matrix estimation"};
  app.require_subcommand(1);

  CommonOpts o;
  double dmin = 0.01, dmax = 1.0;
  int steps = 50;
  double rho_min = 0.02, rho_max = 1.0, rho_step = 0.02;
  std::string json_out, f_choice = "per-site", channel_json, amp_init = "random";
  double base = 0.5, slope = 1.0;
  int seeds = 8, max_iter = 200;
  double damping = 0.0;

  CLI::App* point = app.add_subcommand("point", "evaluate both bounds at one (rho, delta)");
  add_common(point, o);

  CLI::App* sweep = app.add_subcommand("sweep", "bound curves over a delta grid");
  add_common(sweep, o);
  sweep->add_option("--delta-min", dmin, "grid start");
  sweep->add_option("--delta-max", dmax, "grid end");
  sweep->add_option("--delta-steps", steps, "grid size");

  CLI::App* phase = app.add_subcommand("phase", "threshold curves over a rho grid");
  add_common(phase, o);
  phase->add_option("--rho-min", rho_min, "rho grid start");
  phase->add_option("--rho-max", rho_max, "rho grid end");
  phase->add_option("--rho-step", rho_step, "rho grid step");
  phase->add_option("--tol", o.tol, "bisection bracket width");
  phase->add_option("--json-out", json_out, "summary JSON path");

  CLI::App* oracle = app.add_subcommand("oracle", "small-n Monte Carlo mutual information");
  add_common(oracle, o);
  oracle->add_option("--n", o.n, "system size");
  oracle->add_option("--samples", o.samples, "Y samples");

  CLI::App* nish = app.add_subcommand("nishimori", "posterior identity check");
  add_common(nish, o);
  nish->add_option("--n", o.n, "system size (<= 8)");
  nish->add_option("--samples", o.samples, "Y samples");
  nish->add_option("--f", f_choice, "overlap | per-site | pair");

  CLI::App* univ = app.add_subcommand("universality", "channel vs Gaussian comparison");
  add_common(univ, o);
  univ->add_option("--n", o.n, "system size (<= 12)");
  univ->add_option("--samples", o.samples, "Y samples");
  univ->add_option("--channel", channel_json, "channel JSON document");
  univ->add_option("--base", base, "bernoulli_linear base");
  univ->add_option("--slope", slope, "bernoulli_linear slope");

  CLI::App* amp = app.add_subcommand("amp", "message-passing runs against state evolution");
  add_common(amp, o);
  amp->add_option("--n", o.n, "system size");
  amp->add_option("--seeds", seeds, "independent runs");
  amp->add_option("--max-iter", max_iter, "iteration cap");
  amp->add_option("--damping", damping, "f-update damping in [0, 1)");
  amp->add_option("--init", amp_init, "random | spectral");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    apply_config(active, o);
    if (point->parsed()) return cmd_point(o);
    if (sweep->parsed()) return cmd_sweep(o, dmin, dmax, steps);
    if (phase->parsed()) return cmd_phase(o, rho_min, rho_max, rho_step, json_out);
    if (oracle->parsed()) return cmd_oracle(o);
    if (nish->parsed()) return cmd_nishimori(o, f_choice);
    if (univ->parsed()) return cmd_universality(o, channel_json, base, slope);
    if (amp->parsed()) return cmd_amp(o, seeds, max_iter, damping, amp_init);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
