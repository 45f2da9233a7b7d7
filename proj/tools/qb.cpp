// qb: command-line front end for the quasibalance library.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "qb/error.hpp"
#include "qb/pipeline.hpp"
#include "qb/synth.hpp"

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kData = 3 };

struct PanelArgs {
  std::string input;
  std::string config;
  qb::ColumnMapping columns;
  std::string delimiter = ",";
  std::optional<std::int64_t> p1, p2;
};

void add_panel_options(CLI::App* cmd, PanelArgs& a) {
  cmd->add_option("-i,--input", a.input, "Panel file (entity, period, value rows)")->required();
  cmd->add_option("--entity-col", a.columns.entity, "Entity column name")->capture_default_str();
  cmd->add_option("--period-col", a.columns.period, "Period column name")->capture_default_str();
  cmd->add_option("--value-col", a.columns.value, "Value column name")->capture_default_str();
  cmd->add_option("--delimiter", a.delimiter, "Field delimiter (',' or '\\t')")->capture_default_str();
}

void add_pair_options(CLI::App* cmd, PanelArgs& a) {
  add_panel_options(cmd, a);
  cmd->add_option("--config", a.config, "Run configuration (JSON)");
  cmd->add_option("--p1", a.p1, "First period (default: earliest)");
  cmd->add_option("--p2", a.p2, "Second period (default: the one after p1)");
}

char parse_delimiter(const std::string& d) {
  if (d == "\\t" || d == "tab") return '\t';
  if (d.size() != 1) throw qb::ConfigError("delimiter must be a single character");
  return d[0];
}

qb::LoadResult load(PanelArgs& a) {
  a.columns.delimiter = parse_delimiter(a.delimiter);
  return qb::load_panel(a.input, a.columns);
}

qb::RunConfig config_of(const PanelArgs& a) {
  return a.config.empty() ? qb::RunConfig{} : qb::load_config(a.config);
}

qb::PairedPanel paired(PanelArgs& a) {
  const auto obs = load(a).observations;
  std::map<std::int64_t, std::size_t> periods;
  for (const auto& o : obs) ++periods[o.period];
  std::int64_t p1, p2;
  if (a.p1) {
    p1 = *a.p1;
  } else {
    if (periods.size() < 2) throw qb::DataError("need observations in at least two periods");
    p1 = periods.begin()->first;
  }
  if (a.p2) {
    p2 = *a.p2;
  } else {
    const auto it = periods.upper_bound(p1);
    if (it == periods.end()) throw qb::DataError("no period after " + std::to_string(p1));
    p2 = it->first;
  }
  return qb::pair_periods(obs, p1, p2);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw qb::DataError("cannot write " + path);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Gibrat growth, detailed quasi-balance and Pareto/log-normal analysis of panel data"};
  app.require_subcommand(1);

  PanelArgs pa;
  std::string out;

  auto* ingest = app.add_subcommand("ingest", "Load a panel file and summarise it");
  add_panel_options(ingest, pa);

  auto* growth = app.add_subcommand("growth", "Conditional growth-rate densities q(r|x1) as TSV");
  add_pair_options(growth, pa);
  double g_theta = 1.0, g_log10_a = 0.0;
  growth->add_option("--theta", g_theta, "theta of the modified growth rate")->capture_default_str();
  growth->add_option("--log10-a", g_log10_a, "log10 a of the modified growth rate")->capture_default_str();
  growth->add_option("-o,--out", out, "Output TSV (default stdout)");

  auto* fit = app.add_subcommand("fit", "Pareto, log-normal, tent and alpha fits for one period pair");
  add_pair_options(fit, pa);
  fit->add_option("-o,--out", out, "Output JSON (default stdout)");

  auto* bal = app.add_subcommand("balance", "theta/a estimates, Gamma and symmetry tests for one period pair");
  add_pair_options(bal, pa);
  bal->add_option("-o,--out", out, "Output JSON (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic two-period panel with known parameters");
  qb::GeneratorSpec spec;
  std::string spec_file, mode = "quasistatic", truth_path;
  std::int64_t s_p1 = 1, s_p2 = 2;
  synth->add_option("--spec", spec_file, "Generator spec (JSON); flags below override it");
  auto* o_mode = synth->add_option("--mode", mode, "gibrat | static_nongibrat | quasistatic");
  auto* o_n = synth->add_option("-n,--n-entities", spec.n_entities, "Number of entities");
  auto* o_theta = synth->add_option("--theta", spec.theta);
  auto* o_la = synth->add_option("--log10-a", spec.log10_a);
  auto* o_alpha = synth->add_option("--alpha", spec.alpha);
  auto* o_mu1 = synth->add_option("--mu1", spec.mu1);
  auto* o_x0 = synth->add_option("--x0", spec.x0);
  auto* o_xmin = synth->add_option("--x-min", spec.x_min);
  auto* o_ksum = synth->add_option("--kernel-sum", spec.kernel_sum, "t+(x0) + t-(x0)");
  auto* o_seed = synth->add_option("--seed", spec.seed);
  auto* o_thr = synth->add_option("--threads", spec.threads);
  synth->add_option("--p1", s_p1, "Label of the first period")->capture_default_str();
  synth->add_option("--p2", s_p2, "Label of the second period")->capture_default_str();
  synth->add_option("-o,--out", out, "Panel CSV to write")->required();
  synth->add_option("--truth", truth_path, "Ground-truth JSON (default <out>.truth.json)");

  auto* pipe = app.add_subcommand("pipeline", "Full analysis over all period pairs; writes a JSON report");
  std::string cfg_path, report_path, out_dir, growth_mode;
  std::vector<std::string> inputs;
  std::optional<unsigned> threads;
  std::optional<double> x0, x_min, r_width, r_max;
  pipe->add_option("--config", cfg_path, "Run configuration (JSON)");
  pipe->add_option("-i,--input", inputs, "Input panel file(s); replaces the config's list");
  pipe->add_option("--out-dir", out_dir, "Directory for TSV plot data");
  pipe->add_option("--report", report_path, "Report path (default <out-dir>/report.json, else stdout)");
  pipe->add_option("--threads", threads);
  pipe->add_option("--x0", x0);
  pipe->add_option("--x-min", x_min);
  pipe->add_option("--r-width", r_width);
  pipe->add_option("--r-max", r_max);
  pipe->add_option("--growth-mode", growth_mode, "plain | modified");
  bool quiet = false;
  pipe->add_flag("-q,--quiet", quiet, "No progress lines on stderr");

  auto* check = app.add_subcommand("check", "Exit 0 iff every relation check in a report passes");
  std::string check_path;
  check->add_option("report", check_path, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) {
      const auto r = load(pa);
      std::map<std::int64_t, std::size_t> per;
      for (const auto& o : r.observations) ++per[o.period];
      qb::json j{{"n_observations", r.observations.size()}, {"rejected", r.rejected},
                 {"rejected_lines", r.rejected_lines}};
      for (const auto& [p, n] : per) j["per_period"][std::to_string(p)] = n;
      std::cout << j.dump(2) << '\n';
    } else if (*growth) {
      const auto cfg = config_of(pa);
      const auto panel = paired(pa);
      const auto r_edges = qb::linear_edges(-cfg.r_max, cfg.r_max, cfg.r_width);
      const auto g = qb::conditional_growth_density(panel, cfg.grid, r_edges, g_theta, g_log10_a);
      std::string s = "condition_bin\tx1_lower\tx1_upper\tpairs\tr_left\tr_right\tcount\tdensity_q\n";
      for (const auto& b : g.bins)
        for (std::size_t i = 0; i < b.counts.size(); ++i)
          s += std::to_string(b.condition_bin) + '\t' + qb::format_double(b.x1_lower) + '\t' +
               qb::format_double(b.x1_upper) + '\t' + std::to_string(b.count) + '\t' +
               qb::format_double(b.r_edges[i]) + '\t' + qb::format_double(b.r_edges[i + 1]) + '\t' +
               std::to_string(b.counts[i]) + '\t' + qb::format_double(b.density_q[i]) + '\n';
      emit(out, s);
      std::cerr << "x1 below grid: " << g.x1_below << ", above grid: " << g.x1_above << '\n';
    } else if (*fit) {
      emit(out, qb::fit_stage(paired(pa), config_of(pa)).dump(2) + "\n");
    } else if (*bal) {
      emit(out, qb::balance_stage(paired(pa), config_of(pa)).dump(2) + "\n");
    } else if (*synth) {
      qb::GeneratorSpec s;
      if (!spec_file.empty()) {
        std::ifstream in(spec_file);
        if (!in) throw qb::ConfigError("cannot open spec file: " + spec_file);
        try {
          s = qb::json::parse(in).get<qb::GeneratorSpec>();
        } catch (const qb::json::exception& e) {
          throw qb::ConfigError(spec_file + ": " + e.what());
        }
      }
      if (*o_mode) s.mode = qb::gen_mode_from_string(mode);
      if (*o_n) s.n_entities = spec.n_entities;
      if (*o_theta) s.theta = spec.theta;
      if (*o_la) s.log10_a = spec.log10_a;
      if (*o_alpha) s.alpha = spec.alpha;
      if (*o_mu1) s.mu1 = spec.mu1;
      if (*o_x0) s.x0 = spec.x0;
      if (*o_xmin) s.x_min = spec.x_min;
      if (*o_ksum) s.kernel_sum = spec.kernel_sum;
      if (*o_seed) s.seed = spec.seed;
      if (*o_thr) s.threads = spec.threads;
      if (s_p1 >= s_p2) throw qb::ConfigError("--p1 must be smaller than --p2");
      auto sp = qb::gen_panel(s);
      sp.panel.period_1 = s_p1;
      sp.panel.period_2 = s_p2;
      qb::write_panel(out, qb::to_observations(sp.panel));
      qb::json t = sp.truth;
      t["spec"] = qb::effective_spec(s);
      emit(truth_path.empty() ? out + ".truth.json" : truth_path, t.dump(2) + "\n");
    } else if (*pipe) {
      qb::RunConfig cfg = cfg_path.empty() ? qb::RunConfig{} : qb::load_config(cfg_path);
      if (!inputs.empty()) cfg.inputs = inputs;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (threads) cfg.threads = *threads;
      if (x0) cfg.x0 = *x0;
      if (x_min) cfg.x_min = *x_min;
      if (r_width) cfg.r_width = *r_width;
      if (r_max) cfg.r_max = *r_max;
      if (!growth_mode.empty()) cfg = qb::config_from_json([&] {
        auto j = qb::config_to_json(cfg);
        j["growth_mode"] = growth_mode;
        j["output_dir"] = cfg.output_dir;
        j["threads"] = cfg.threads;
        return j;
      }());
      const auto report = qb::run_pipeline(cfg, quiet ? nullptr : &std::cerr);
      if (report_path.empty() && !cfg.output_dir.empty()) report_path = cfg.output_dir + "/report.json";
      emit(report_path, qb::dump_report(report));
    } else if (*check) {
      std::ifstream in(check_path);
      if (!in) throw qb::DataError("cannot open report: " + check_path);
      qb::json report;
      try {
        in >> report;
      } catch (const qb::json::exception& e) {
        throw qb::DataError(check_path + ": " + e.what());
      }
      const auto r = qb::run_check(report);
      for (const auto& f : r.failures) std::cerr << "FAIL " << f << '\n';
      std::cout << (r.pass ? "PASS" : "FAIL") << '\n';
      return r.pass ? kOk : kCheckFailed;
    }
  } catch (const qb::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
