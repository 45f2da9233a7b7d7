#include "qb/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "qb/error.hpp"
#include "qb/fit.hpp"
#include "qb/stats.hpp"
#include "qb/theory.hpp"

namespace qb {
namespace {

const char* to_string(GrowthMode m) { return m == GrowthMode::plain ? "plain" : "modified"; }

GrowthMode growth_mode_from_string(const std::string& s) {
  if (s == "plain") return GrowthMode::plain;
  if (s == "modified") return GrowthMode::modified;
  throw ConfigError("growth_mode must be 'plain' or 'modified', got '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

void validate_window(const Window& w, const char* name) {
  if (!(w.lo > 0.0) || !std::isfinite(w.hi)) throw ConfigError(std::string("window '") + name + "' must be positive and finite");
  if (!(w.hi > w.lo))
    throw ConfigError(std::string("window '") + name + "' is inverted or empty: [" + format_double(w.lo) + ", " +
                      format_double(w.hi) + "]");
}

// log10 edges lo, lo + w, ... not beyond hi.
std::vector<double> window_log_edges(double lo, double hi, double width) {
  const double a = std::log10(lo), b = std::log10(hi);
  const auto n = static_cast<std::size_t>(std::floor((b - a) / width + 1e-9));
  if (n < 1) throw ConfigError("window narrower than one symmetry bin");
  std::vector<double> e(n + 1);
  for (std::size_t k = 0; k <= n; ++k) e[k] = a + width * static_cast<double>(k);
  return e;
}

std::string pair_tag(const PairedPanel& p) { return std::to_string(p.period_1) + "-" + std::to_string(p.period_2); }

class Logger {
 public:
  explicit Logger(std::ostream* os) : os_(os) {}
  void operator()(const std::string& tag, const std::string& msg) {
    if (!os_) return;
    std::lock_guard<std::mutex> lock(mu_);
    *os_ << '[' << tag << "] " << msg << '\n';
  }

 private:
  std::ostream* os_;
  std::mutex mu_;
};

struct Context {
  const PairedPanel& panel;
  const RunConfig& cfg;
  unsigned threads = 1;
  std::vector<double> x1, x2;
  json out = json::object();
  json errors = json::array();

  std::optional<ParetoFit> pareto1, pareto2;
  std::optional<LogNormalFit> logn1, logn2;
  std::optional<QuasiBalanceFit> large, middle;
  std::vector<TentFit> tents;
  std::optional<NonGibratFit> alpha;
  std::optional<ConditionalGrowth> growth;

  Context(const PairedPanel& p, const RunConfig& c) : panel(p), cfg(c) {
    x1.reserve(p.count());
    x2.reserve(p.count());
    for (const auto& pr : p.pairs) {
      x1.push_back(pr.x1);
      x2.push_back(pr.x2);
    }
  }

  template <class F>
  void stage(const char* name, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      errors.push_back(json{{"stage", name}, {"message", e.what()}});
    }
  }
};

void distributions(Context& c) {
  const RunConfig& cfg = c.cfg;
  json pareto = json::object(), logn = json::object();
  c.stage("pareto_p1", [&] { c.pareto1 = fit_pareto(c.x1, cfg.large.lo, cfg.large.hi); pareto["p1"] = *c.pareto1; });
  c.stage("pareto_p2", [&] { c.pareto2 = fit_pareto(c.x2, cfg.large.lo, cfg.large.hi); pareto["p2"] = *c.pareto2; });
  const auto edges = log_edges(cfg.middle.lo, cfg.middle.hi, cfg.density_bin_decades);
  c.stage("lognormal_p1", [&] {
    c.logn1 = fit_lognormal_mid(empirical_density(c.x1, edges), cfg.middle.lo, cfg.middle.hi);
    logn["p1"] = *c.logn1;
  });
  c.stage("lognormal_p2", [&] {
    c.logn2 = fit_lognormal_mid(empirical_density(c.x2, edges), cfg.middle.lo, cfg.middle.hi);
    logn["p2"] = *c.logn2;
  });
  c.out["pareto"] = pareto;
  c.out["lognormal"] = logn;
}

json classify_gamma(const QuasiBalanceFit& f, double tol) {
  GammaResult g;
  if (std::abs(1.0 - f.theta) <= tol) {
    g.status = GammaStatus::indeterminate;
    g.gamma = std::nan("");
  } else {
    g = gamma_relation(f.theta, f.log10_a);
  }
  json j = g;
  j["theta_tolerance"] = tol;
  return j;
}

void balance(Context& c) {
  const RunConfig& cfg = c.cfg;
  json bal = json::object(), gam = json::object(), sym = json::object();
  c.stage("balance_large", [&] {
    c.large = estimate_theta_a(c.panel, cfg.large, RegionKind::large);
    bal["large"] = *c.large;
    gam["large"] = classify_gamma(*c.large, cfg.tolerances.gamma_theta);
  });
  c.stage("balance_middle", [&] {
    c.middle = estimate_theta_a(c.panel, cfg.middle, RegionKind::middle);
    bal["middle"] = *c.middle;
    gam["middle"] = classify_gamma(*c.middle, cfg.tolerances.gamma_theta);
  });
  c.stage("symmetry_detailed", [&] {
    const double lo = std::log10(cfg.x_min);
    const auto edges = linear_edges(lo, lo + cfg.symmetry_decades, cfg.symmetry_bin_decades);
    sym["detailed"] = symmetry_statistic(c.panel, 1.0, 0.0, edges);
  });
  if (c.large)
    c.stage("symmetry_quasi_large", [&] {
      const auto edges = window_log_edges(cfg.large.lo, cfg.large.hi, cfg.symmetry_bin_decades);
      sym["quasi_large"] = symmetry_statistic(c.panel, c.large->theta, c.large->log10_a, edges);
    });
  if (c.middle)
    c.stage("symmetry_quasi_middle", [&] {
      const auto edges = window_log_edges(cfg.middle.lo, cfg.middle.hi, cfg.symmetry_bin_decades);
      sym["quasi_middle"] = symmetry_statistic(c.panel, c.middle->theta, c.middle->log10_a, edges);
    });
  c.out["balance"] = bal;
  c.out["gamma"] = gam;
  c.out["symmetry"] = sym;
}

void tents(Context& c) {
  const RunConfig& cfg = c.cfg;
  double theta = 1.0, la = 0.0;
  if (cfg.growth_mode == GrowthMode::modified) {
    if (!c.middle) {
      c.errors.push_back(json{{"stage", "tents"}, {"message", "modified growth rates need the middle-window fit"}});
      return;
    }
    theta = c.middle->theta;
    la = c.middle->log10_a;
  }
  c.out["growth"] = json{{"mode", to_string(cfg.growth_mode)}, {"theta", theta}, {"log10_a", la}};
  c.stage("growth", [&] {
    const auto r_edges = linear_edges(-cfg.r_max, cfg.r_max, cfg.r_width);
    c.growth = conditional_growth_density(c.panel, cfg.grid, r_edges, theta, la);
    c.out["growth"]["x1_below"] = c.growth->x1_below;
    c.out["growth"]["x1_above"] = c.growth->x1_above;
  });
  if (!c.growth) return;

  const auto& bins = c.growth->bins;
  std::vector<std::optional<TentFit>> fits(bins.size());
  std::vector<std::string> why(bins.size());
  detail::parallel_for(bins.size(), c.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        fits[i] = fit_tent(bins[i], cfg.r_max);
      } catch (const std::exception& ex) {
        why[i] = ex.what();
      }
    }
  });
  json tj = json::array(), failures = json::array();
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (fits[i]) {
      c.tents.push_back(*fits[i]);
      tj.push_back(*fits[i]);
    } else {
      failures.push_back(json{{"bin_index", bins[i].condition_bin}, {"pairs", bins[i].count}, {"message", why[i]}});
    }
  }
  c.out["tents"] = tj;
  c.out["tent_failures"] = failures;
  c.stage("non_gibrat", [&] {
    c.alpha = fit_alpha(c.tents, cfg.x0, cfg.x_min);
    c.out["non_gibrat"] = *c.alpha;
  });
}

void relations(Context& c) {
  c.stage("relations", [&] {
    if (!c.pareto1 || !c.pareto2 || !c.logn1 || !c.logn2 || !c.large || !c.middle)
      throw DataError("missing inputs from earlier stages");
    c.out["relations"] = relation_checks(c.pareto1->mu, c.pareto2->mu, c.large->theta, c.logn1->sigma,
                                         c.logn2->sigma, c.middle->theta, c.cfg.tolerances.mu,
                                         c.cfg.tolerances.sigma);
  });
}

struct Overlay {
  std::optional<PiecewiseDensity> p1, p2;
};

Overlay overlay(Context& c) {
  Overlay ov;
  c.stage("overlay", [&] {
    if (!c.pareto1 || !c.alpha) throw DataError("needs the Pareto fit and the Non-Gibrat fit");
    const RunConfig& cfg = c.cfg;
    double theta = 1.0, la = 0.0;
    if (cfg.growth_mode == GrowthMode::modified && c.middle) {
      theta = c.middle->theta;
      la = c.middle->log10_a;
    }
    const double kappa = theta * c.alpha->alpha;
    if (kappa < 0.0) throw DataError("fitted alpha is negative; the overlay density is not defined");
    json j = json{{"mu1", c.pareto1->mu}, {"kappa", kappa}, {"theta", theta}, {"log10_a", la}};
    ov.p1.emplace(c.pareto1->mu, kappa, 0.0, cfg.x0, cfg.x_min);
    std::vector<double> s;
    for (double v : c.x1)
      if (v >= cfg.x_min) s.push_back(v);
    j["ks_p1"] = ks_statistic(s, [&](double x) { return ov.p1->cdf(x); });
    j["n_p1"] = s.size();
    if (c.pareto2) {
      const double lower = std::pow(10.0, la) * std::pow(cfg.x_min, theta);
      ov.p2.emplace(c.pareto2->mu, kappa, 0.0, cfg.x0, lower, theta, la);
      s.clear();
      for (double v : c.x2)
        if (v >= lower) s.push_back(v);
      j["mu2"] = c.pareto2->mu;
      j["ks_p2"] = s.empty() ? json(nullptr) : json(ks_statistic(s, [&](double x) { return ov.p2->cdf(x); }));
      j["n_p2"] = s.size();
    }
    c.out["overlay"] = j;
  });
  return ov;
}

std::ofstream open_tsv(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw DataError("cannot write " + p.string());
  return os;
}

void write_tsvs(Context& c, const Overlay& ov) {
  const std::filesystem::path dir(c.cfg.output_dir);
  const std::string pre = "pair_" + pair_tag(c.panel) + "_";
  c.stage("write_tsv", [&] {
    std::filesystem::create_directories(dir);
    double lo = *std::min_element(c.x1.begin(), c.x1.end());
    double hi = *std::max_element(c.x1.begin(), c.x1.end());
    lo = std::min(lo, *std::min_element(c.x2.begin(), c.x2.end()));
    hi = std::max(hi, *std::max_element(c.x2.begin(), c.x2.end()));
    const double w = c.cfg.density_bin_decades;
    const double elo = std::pow(10.0, std::floor(std::log10(lo) / w) * w);
    const double ehi = std::pow(10.0, (std::floor(std::log10(hi) / w) + 1.0) * w);
    const auto edges = log_edges(elo, ehi, w);
    const auto d1 = empirical_density(c.x1, edges);
    const auto d2 = empirical_density(c.x2, edges);
    {
      auto os = open_tsv(dir / (pre + "density_p1.tsv"));
      write_density_tsv(os, d1);
    }
    {
      auto os = open_tsv(dir / (pre + "density_p2.tsv"));
      write_density_tsv(os, d2);
    }
    {
      auto os = open_tsv(dir / (pre + "overlay.tsv"));
      os << "x\tempirical_p1\tmodel_p1\tempirical_p2\tmodel_p2\n";
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double x = std::sqrt(edges[i] * edges[i + 1]);
        os << format_double(x) << '\t' << format_double(d1.density[i]) << '\t'
           << (ov.p1 ? format_double(ov.p1->pdf(x)) : "nan") << '\t' << format_double(d2.density[i])
           << '\t' << (ov.p2 ? format_double(ov.p2->pdf(x)) : "nan") << '\n';
      }
    }
    if (c.growth) {
      auto os = open_tsv(dir / (pre + "growth_q.tsv"));
      os << "condition_bin\tx1_lower\tr_left\tr_right\tcount\tdensity_q\tlog10_Q\n";
      for (const auto& g : c.growth->bins)
        for (std::size_t i = 0; i < g.counts.size(); ++i) {
          const double rc = 0.5 * (g.r_edges[i] + g.r_edges[i + 1]);
          const double q = g.density_q[i];
          os << g.condition_bin << '\t' << format_double(g.x1_lower) << '\t' << format_double(g.r_edges[i]) << '\t'
             << format_double(g.r_edges[i + 1]) << '\t' << g.counts[i] << '\t' << format_double(q) << '\t'
             << (q > 0.0 ? format_double(q_to_Q_log(std::log10(q), rc)) : "nan") << '\n';
        }
    }
    {
      auto os = open_tsv(dir / (pre + "tents.tsv"));
      os << "bin_index\tx1_lower\tc\tt_plus\tt_minus\tpairs\n";
      for (const auto& t : c.tents)
        os << t.bin_index << '\t' << format_double(t.x1_lower) << '\t' << format_double(t.c) << '\t'
           << format_double(t.t_plus) << '\t' << format_double(t.t_minus) << '\t' << t.pairs << '\n';
    }
    {
      auto os = open_tsv(dir / (pre + "scatter.tsv"));
      os << "log10_x1\tlog10_x2\n";
      for (const auto& p : c.panel.pairs)
        os << format_double(std::log10(p.x1)) << '\t' << format_double(std::log10(p.x2)) << '\n';
    }
  });
}

json analyze(const PairedPanel& panel, const RunConfig& cfg, unsigned threads, bool write) {
  Context c(panel, cfg);
  c.threads = threads;
  c.out["period_1"] = panel.period_1;
  c.out["period_2"] = panel.period_2;
  c.out["n_pairs"] = panel.count();
  distributions(c);
  balance(c);
  tents(c);
  relations(c);
  const Overlay ov = overlay(c);
  if (write) write_tsvs(c, ov);
  c.out["errors"] = c.errors;
  return c.out;
}

double num(const json& j, std::initializer_list<const char*> path) {
  const json* p = &j;
  for (const char* k : path) {
    if (!p->is_object() || !p->contains(k)) throw DataError(std::string("missing field '") + k + "'");
    p = &(*p)[k];
  }
  if (!p->is_number()) throw DataError("field is not a number");
  return p->get<double>();
}

}  // namespace

void validate(const RunConfig& cfg) {
  validate_window(cfg.large, "large");
  validate_window(cfg.middle, "middle");
  cfg.grid.validate();
  if (!(cfg.r_width > 0.0)) throw ConfigError("r_width must be positive");
  if (!(cfg.r_max >= cfg.r_width)) throw ConfigError("r_max must be at least r_width");
  if (!(cfg.x_min > 0.0) || !(cfg.x0 > cfg.x_min)) throw ConfigError("need 0 < x_min < x0");
  if (!(cfg.density_bin_decades > 0.0) || !(cfg.symmetry_bin_decades > 0.0) || !(cfg.symmetry_decades > 0.0))
    throw ConfigError("bin widths and symmetry span must be positive");
  if (!(cfg.tolerances.mu > 0.0) || !(cfg.tolerances.sigma > 0.0) || !(cfg.tolerances.gamma_theta >= 0.0))
    throw ConfigError("tolerances must be positive");
  for (const auto& [a, b] : cfg.period_pairs)
    if (a >= b) throw ConfigError("period pair (" + std::to_string(a) + ", " + std::to_string(b) + ") is not increasing");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    check_keys(j,
               {"inputs", "columns", "period_pairs", "windows", "grid", "r_width", "r_max", "x0", "x_min",
                "density_bin_decades", "symmetry_bin_decades", "symmetry_decades", "growth_mode", "tolerances",
                "output_dir", "seed", "threads"},
               "config");
    if (j.contains("inputs")) c.inputs = j["inputs"].get<std::vector<std::string>>();
    if (j.contains("columns")) {
      const json& m = j["columns"];
      check_keys(m, {"entity", "period", "value", "delimiter"}, "columns");
      c.columns.entity = m.value("entity", c.columns.entity);
      c.columns.period = m.value("period", c.columns.period);
      c.columns.value = m.value("value", c.columns.value);
      if (m.contains("delimiter")) {
        const auto d = m["delimiter"].get<std::string>();
        if (d.size() != 1) throw ConfigError("columns.delimiter must be a single character");
        c.columns.delimiter = d == "\\t" ? '\t' : d[0];
      }
    }
    if (j.contains("period_pairs"))
      for (const auto& p : j["period_pairs"]) {
        if (!p.is_array() || p.size() != 2) throw ConfigError("period_pairs entries must be [p1, p2]");
        c.period_pairs.emplace_back(p[0].get<std::int64_t>(), p[1].get<std::int64_t>());
      }
    if (j.contains("windows")) {
      const json& w = j["windows"];
      check_keys(w, {"large", "middle"}, "windows");
      if (w.contains("large")) c.large = w["large"].get<Window>();
      if (w.contains("middle")) c.middle = w["middle"].get<Window>();
    }
    if (j.contains("grid")) {
      check_keys(j["grid"], {"scale", "offset_decades", "width_decades", "n_bins"}, "grid");
      c.grid = j["grid"].get<LogBinGrid>();
    }
    c.r_width = j.value("r_width", c.r_width);
    c.r_max = j.value("r_max", c.r_max);
    c.x0 = j.value("x0", c.x0);
    c.x_min = j.value("x_min", c.x_min);
    c.density_bin_decades = j.value("density_bin_decades", c.density_bin_decades);
    c.symmetry_bin_decades = j.value("symmetry_bin_decades", c.symmetry_bin_decades);
    c.symmetry_decades = j.value("symmetry_decades", c.symmetry_decades);
    if (j.contains("growth_mode")) c.growth_mode = growth_mode_from_string(j["growth_mode"].get<std::string>());
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      check_keys(t, {"mu", "sigma", "gamma_theta"}, "tolerances");
      c.tolerances.mu = t.value("mu", c.tolerances.mu);
      c.tolerances.sigma = t.value("sigma", c.tolerances.sigma);
      c.tolerances.gamma_theta = t.value("gamma_theta", c.tolerances.gamma_theta);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

json config_to_json(const RunConfig& c) {
  json pairs = json::array();
  for (const auto& [a, b] : c.period_pairs) pairs.push_back(json::array({a, b}));
  return json{{"inputs", c.inputs},
              {"columns", json{{"entity", c.columns.entity},
                               {"period", c.columns.period},
                               {"value", c.columns.value},
                               {"delimiter", std::string(1, c.columns.delimiter)}}},
              {"period_pairs", pairs},
              {"windows", json{{"large", c.large}, {"middle", c.middle}}},
              {"grid", c.grid},
              {"r_width", c.r_width},
              {"r_max", c.r_max},
              {"x0", c.x0},
              {"x_min", c.x_min},
              {"density_bin_decades", c.density_bin_decades},
              {"symmetry_bin_decades", c.symmetry_bin_decades},
              {"symmetry_decades", c.symmetry_decades},
              {"growth_mode", to_string(c.growth_mode)},
              {"tolerances", json{{"mu", c.tolerances.mu},
                                  {"sigma", c.tolerances.sigma},
                                  {"gamma_theta", c.tolerances.gamma_theta}}},
              {"seed", c.seed}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json fit_stage(const PairedPanel& panel, const RunConfig& cfg) {
  validate(cfg);
  Context c(panel, cfg);
  c.threads = cfg.threads;
  distributions(c);
  if (cfg.growth_mode == GrowthMode::modified)
    c.stage("balance_middle", [&] { c.middle = estimate_theta_a(c.panel, cfg.middle, RegionKind::middle); });
  tents(c);
  c.out["errors"] = c.errors;
  return c.out;
}

json balance_stage(const PairedPanel& panel, const RunConfig& cfg) {
  validate(cfg);
  Context c(panel, cfg);
  balance(c);
  c.out["errors"] = c.errors;
  return c.out;
}

json analyze_pair(const PairedPanel& panel, const RunConfig& cfg) {
  validate(cfg);
  return analyze(panel, cfg, cfg.threads, !cfg.output_dir.empty());
}

json run_pipeline(const RunConfig& cfg, const std::vector<Observation>& obs) {
  return run_pipeline(cfg, obs, nullptr, 0);
}

json run_pipeline(const RunConfig& cfg, const std::vector<Observation>& obs, std::ostream* log,
                  std::size_t rejected) {
  validate(cfg);
  Logger logger(log);
  std::map<std::int64_t, std::size_t> per_period;
  for (const auto& o : obs) ++per_period[o.period];
  auto periods = cfg.period_pairs;
  if (periods.empty()) {
    for (auto it = per_period.begin(); it != per_period.end() && std::next(it) != per_period.end(); ++it)
      periods.emplace_back(it->first, std::next(it)->first);
    if (periods.empty()) throw DataError("need observations in at least two periods");
  }

  std::vector<json> results(periods.size());
  const unsigned outer = std::min<unsigned>(cfg.threads, static_cast<unsigned>(periods.size()));
  const unsigned inner = std::max(1u, cfg.threads / std::max(1u, outer));
  detail::parallel_for(periods.size(), outer, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto [p1, p2] = periods[i];
      const std::string tag = std::to_string(p1) + "-" + std::to_string(p2);
      try {
        const PairedPanel panel = pair_periods(obs, p1, p2);
        logger(tag, std::to_string(panel.count()) + " pairs");
        results[i] = analyze(panel, cfg, inner, !cfg.output_dir.empty());
        logger(tag, std::to_string(results[i]["errors"].size()) + " stage errors");
      } catch (const std::exception& ex) {
        results[i] = json{{"period_1", p1},
                          {"period_2", p2},
                          {"errors", json::array({json{{"stage", "pair"}, {"message", ex.what()}}})}};
        logger(tag, std::string("failed: ") + ex.what());
      }
    }
  });

  json report;
  report["schema"] = "quasibalance.report";
  report["version"] = kReportVersion;
  report["config"] = config_to_json(cfg);
  json pc = json::object();
  for (const auto& [p, n] : per_period) pc[std::to_string(p)] = n;
  report["ingest"] = json{{"n_observations", obs.size()}, {"rejected", rejected}, {"per_period", pc}};
  report["pairs"] = results;

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    auto os = open_tsv(std::filesystem::path(cfg.output_dir) / "timeseries.tsv");
    os << "period_1\tperiod_2\ttheta_h\ttheta_m\tmu_ratio\tsigma_ratio\tgamma_large\tgamma_middle\n";
    auto field = [](const json& r, std::initializer_list<const char*> path) -> std::string {
      try {
        return format_double(num(r, path));
      } catch (const std::exception&) {
        return "nan";
      }
    };
    for (const auto& r : results)
      os << r["period_1"].get<std::int64_t>() << '\t' << r["period_2"].get<std::int64_t>() << '\t'
         << field(r, {"balance", "large", "theta"}) << '\t' << field(r, {"balance", "middle", "theta"}) << '\t'
         << field(r, {"relations", "mu_ratio"}) << '\t' << field(r, {"relations", "sigma_ratio"}) << '\t'
         << field(r, {"gamma", "large", "gamma"}) << '\t' << field(r, {"gamma", "middle", "gamma"}) << '\n';
  }
  return report;
}

json run_pipeline(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  if (cfg.inputs.empty()) throw ConfigError("no input files given");
  std::vector<Observation> obs;
  std::size_t rejected = 0;
  std::set<std::pair<std::string, std::int64_t>> seen;
  for (const auto& path : cfg.inputs) {
    LoadResult r = load_panel(path, cfg.columns);
    rejected += r.rejected;
    for (auto& o : r.observations) {
      if (cfg.inputs.size() > 1 && !seen.emplace(o.entity_id, o.period).second)
        throw DataError("duplicate (entity, period) key (" + o.entity_id + ", " + std::to_string(o.period) +
                        ") across input files");
      obs.push_back(std::move(o));
    }
  }
  return run_pipeline(cfg, obs, log, rejected);
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

CheckResult run_check(const json& report) {
  CheckResult res;
  try {
    if (report.value("schema", "") != "quasibalance.report") throw DataError("not a quasibalance report");
    if (report.value("version", 0) != kReportVersion) throw DataError("unsupported report version");
    const double tol_mu = num(report, {"config", "tolerances", "mu"});
    const double tol_sigma = num(report, {"config", "tolerances", "sigma"});
    const json& pairs = report.at("pairs");
    if (pairs.empty()) throw DataError("report has no period pairs");
    for (const auto& p : pairs) {
      const std::string tag = std::to_string(p.value("period_1", 0LL)) + "-" + std::to_string(p.value("period_2", 0LL));
      try {
        const RelationReport r = relation_checks(
            num(p, {"pareto", "p1", "mu"}), num(p, {"pareto", "p2", "mu"}), num(p, {"balance", "large", "theta"}),
            num(p, {"lognormal", "p1", "sigma"}), num(p, {"lognormal", "p2", "sigma"}),
            num(p, {"balance", "middle", "theta"}), tol_mu, tol_sigma);
        if (!r.mu_pass)
          res.failures.push_back(tag + ": |(mu1+1)/(mu2+1) - theta_H| = " + format_double(r.mu_deviation) + " > " +
                                 format_double(tol_mu));
        if (!r.sigma_pass)
          res.failures.push_back(tag + ": |sigma2/sigma1 - theta_M| = " + format_double(r.sigma_deviation) + " > " +
                                 format_double(tol_sigma));
      } catch (const std::exception& e) {
        res.failures.push_back(tag + ": " + e.what());
      }
    }
  } catch (const std::exception& e) {
    res.failures.push_back(e.what());
  }
  res.pass = res.failures.empty();
  return res;
}

}  // namespace qb
