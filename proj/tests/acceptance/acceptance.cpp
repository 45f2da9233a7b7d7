// Acceptance suite: one PASS/FAIL line per criterion, each with its own runtime limit.
// Usage: qb_acceptance [AC1 AC5 ...]   (no arguments runs all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qb/fit.hpp"
#include "qb/pipeline.hpp"
#include "qb/scenarios.hpp"
#include "qb/stats.hpp"
#include "qb/synth.hpp"
#include "qb/theory.hpp"

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;  // informational, never affect the verdict
};

struct Criterion {
  const char* id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Kernel normalisation over a 5x5 slope grid.
Outcome ac1() {
  constexpr double tol = 1e-6;
  double worst = 0.0, worst_d = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double tp = 0.5 + 3.5 * i / 4.0, tm = 0.5 + 3.5 * j / 4.0;
      const auto q = [&](double s) { return qb::tent_density(std::exp(s), tp, tm) * std::exp(s); };
      // Tails beyond |s| = 80 carry less than exp(-40) of the mass.
      const double total = oracle::simpson(q, -80.0, 0.0, 20000) + oracle::simpson(q, 0.0, 80.0, 20000);
      worst = std::max(worst, std::abs(total - 1.0));
      worst_d = std::max(worst_d, std::abs(qb::tent_normalization(tp, tm) * (1 / tp + 1 / tm) - 1.0));
    }
  return {worst < tol && worst_d < 1e-14,
          "max |integral - 1| = " + fmt("%.2e", worst) + " (tol 1e-6), max |d (1/t+ + 1/t-) - 1| = " +
              fmt("%.1e", worst_d)};
}

// Balance equation residual and tamper sensitivity.
Outcome ac2() {
  const auto p = qb::scenarios::quasistatic_params();
  const auto grid = qb::log_grid(p.x_min * 1.0001, p.x0 * 100.0, 1000, p.x0);
  const auto r = qb::de_residual(p, grid);
  const auto k = qb::kernel_for(p, 60.0);
  const double ln_x0 = std::log(p.x0), kl = 1.01 * p.theta * p.alpha, kh = 1.01 * p.theta * p.alpha_high;
  const auto tampered = [&](double x) {
    const double l = std::log(x) - ln_x0;
    return -1.01 * (p.mu1 + 1.0) * std::log(x) - (l < 0 ? kl : kh) * l * l;
  };
  const auto t = qb::de_residual(k, p.theta, p.mu1, tampered, grid, 1.0);
  return {r.max_rel < 1e-5 && t.max_rel > 1e-2,
          "residual " + fmt("%.2e", r.max_rel) + " on " + std::to_string(r.n_points) +
              " points (< 1e-5), tampered " + fmt("%.3e", t.max_rel) + " (> 1e-2)"};
}

double num(const qb::json& j, std::initializer_list<const char*> path) {
  const qb::json* p = &j;
  for (const char* k : path) {
    if (!p->contains(k)) return std::nan("");
    p = &(*p)[k];
  }
  return p->is_number() ? p->get<double>() : std::nan("");
}

std::string stage_errors(const qb::json& r) {
  std::string s;
  for (const auto& e : r["errors"]) s += " [" + e["stage"].get<std::string>() + ": " + e["message"].get<std::string>() + "]";
  return s;
}

// Static round trip.
Outcome ac3() {
  const auto s = qb::gen_panel(qb::scenarios::static_spec(0.14, 1));
  const auto r = qb::analyze_pair(s.panel, qb::scenarios::static_config());
  const double alpha = num(r, {"non_gibrat", "alpha"});
  const double ks = num(r, {"overlay", "ks_p1"});
  Outcome o{std::abs(alpha - 0.14) <= 0.02 && ks < 0.02,
            "alpha = " + fmt("%.4f", alpha) + " (0.14 +- 0.02), overlay KS = " + fmt("%.4f", ks) + " (< 0.02)"};
  if (!o.pass) o.detail += stage_errors(r);
  return o;
}

// Gibrat limit.
Outcome ac4() {
  const auto cfg = qb::scenarios::static_config();
  const auto s = qb::gen_panel(qb::scenarios::gibrat_spec(1));
  const auto r = qb::analyze_pair(s.panel, cfg);
  const double alpha = num(r, {"non_gibrat", "alpha"});
  std::vector<double> tp, tm, sp, sm;
  for (const auto& t : r["tents"]) {
    const double lo = t["x1_lower"].get<double>();
    if (lo < cfg.x_min * (1 - 1e-9) || lo >= cfg.x0 * (1 - 1e-9)) continue;
    tp.push_back(t["t_plus"].get<double>());
    tm.push_back(t["t_minus"].get<double>());
    sp.push_back(t["stderr_t_plus"].get<double>());
    sm.push_back(t["stderr_t_minus"].get<double>());
  }
  const auto range = [](const std::vector<double>& v) {
    return v.empty() ? std::nan("") : *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
  };
  const double dp = range(tp), dm = range(tm);
  Outcome o{std::abs(alpha) <= 0.02 && dp < 0.1 && dm < 0.1,
            "alpha = " + fmt("%.4f", alpha) + " (0 +- 0.02), max pairwise diff t+ = " + fmt("%.3f", dp) +
                ", t- = " + fmt("%.3f", dm) + " over " + std::to_string(tp.size()) + " bins (< 0.1)"};
  // Largest standardised pairwise difference shows whether the spread is sampling noise.
  double z = 0.0;
  for (std::size_t i = 0; i < tp.size(); ++i)
    for (std::size_t j = i + 1; j < tp.size(); ++j) {
      z = std::max(z, std::abs(tp[i] - tp[j]) / std::hypot(sp[i], sp[j]));
      z = std::max(z, std::abs(tm[i] - tm[j]) / std::hypot(sm[i], sm[j]));
    }
  if (!sp.empty())
    o.notes.push_back("largest pairwise difference is " + fmt("%.2f", z) + " combined standard errors; per-bin stderr(t+) ranges " +
                      fmt("%.3f", *std::min_element(sp.begin(), sp.end())) + " to " +
                      fmt("%.3f", *std::max_element(sp.begin(), sp.end())));
  return o;
}

// Quasistatic round trip.
Outcome ac5() {
  const auto s = qb::gen_panel(qb::scenarios::quasistatic_spec(1));
  const auto r = qb::analyze_pair(s.panel, qb::scenarios::quasistatic_config());
  const double th = num(r, {"balance", "large", "theta"}), tm = num(r, {"balance", "middle", "theta"});
  const double mr = num(r, {"relations", "mu_ratio"}), sr = num(r, {"relations", "sigma_ratio"});
  const auto d2 = qb::quasistatic_density_2(qb::scenarios::quasistatic_params());
  std::vector<double> x2;
  for (const auto& p : s.panel.pairs) x2.push_back(p.x2);
  const double ks = qb::ks_statistic(x2, [&](double x) { return d2.cdf(x); });
  const bool ok = std::abs(th - 0.9) <= 0.03 && std::abs(tm - 0.9) <= 0.03 && std::abs(mr - 0.9) <= 0.05 &&
                  std::abs(sr - 0.9) <= 0.05 && ks < 0.01;
  Outcome o{ok, "theta_H = " + fmt("%.4f", th) + ", theta_M = " + fmt("%.4f", tm) + " (0.90 +- 0.03), mu ratio = " +
                    fmt("%.4f", mr) + ", sigma ratio = " + fmt("%.4f", sr) + " (0.90 +- 0.05), x2 KS = " +
                    fmt("%.4f", ks) + " (< 0.01)"};
  if (!ok) o.detail += stage_errors(r);
  return o;
}

// Detailed balance across 100 seeds, with power against a wrong transform.
Outcome ac6() {
  const double x_min = qb::scenarios::gibrat_spec().x_min;
  std::vector<double> edges;
  for (int k = 0; k <= 20; ++k) edges.push_back(std::log10(x_min) + 0.2 * k);
  int pass_true = 0, reject_wrong = 0, pass_static = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = qb::gen_panel(qb::scenarios::gibrat_spec(seed));
    pass_true += qb::symmetry_statistic(s.panel, 1.0, 0.0, edges).p_value > 0.01;
    reject_wrong += qb::symmetry_statistic(s.panel, 0.8, 0.0, edges).p_value < 0.01;
    const auto st = qb::gen_panel(qb::scenarios::static_spec(0.14, seed));
    pass_static += qb::symmetry_statistic(st.panel, 1.0, 0.0, edges).p_value > 0.01;
  }
  Outcome o{pass_true >= 95 && reject_wrong >= 95,
            "p > 0.01 in " + std::to_string(pass_true) + "/100 seeds (>= 95), wrong theta = 0.8 rejected in " +
                std::to_string(reject_wrong) + "/100 (>= 95)"};
  o.notes.push_back("static non-Gibrat panel (alpha = 0.14) passes in " + std::to_string(pass_static) + "/100 seeds");
  return o;
}

// Central limit behaviour of a multiplicative process.
Outcome ac7() {
  qb::GrowthLaw law;
  law.kind = qb::GrowthLaw::Kind::log_uniform;
  law.log_lo = -0.1;
  law.log_hi = 0.1;
  const std::size_t n = 100000, steps = 100;
  const double sd = std::sqrt(steps * (law.log_hi - law.log_lo) * (law.log_hi - law.log_lo) / 12.0);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = qb::sim_multiplicative(1.0, steps, law, i + 1).log_x.back() / sd;
  const double ks = qb::ks_statistic(z, qb::normal_cdf);
  return {ks < 0.01, "KS = " + fmt("%.4f", ks) + " (< 0.01) for 1e5 trajectories at t = 100"};
}

// Pareto estimator on an exact power law.
Outcome ac8() {
  qb::Engine g(1);
  std::vector<double> v(100000);
  for (auto& x : v) x = 1.0 / qb::uniform01_open_low(g);
  const auto f = qb::fit_pareto(v, 1.0, 1e4);
  Outcome o{std::abs(f.mu - 1.0) <= 0.05, "mu = " + fmt("%.4f", f.mu) + " (1.00 +- 0.05)"};
  o.notes.push_back("Hill estimate " + fmt("%.4f", f.hill_mu));
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Byte-identical reports and tables across runs and thread counts.
Outcome ac9() {
  std::vector<qb::Observation> obs;
  for (int k = 0; k < 3; ++k) {
    auto panel = qb::gen_panel(qb::scenarios::quasistatic_spec(100 + k, 30000)).panel;
    panel.period_1 = k + 1;
    panel.period_2 = k + 2;
    for (auto& e : panel.entities) e = "s" + std::to_string(k) + e;
    const auto o = qb::to_observations(panel);
    obs.insert(obs.end(), o.begin(), o.end());
  }
  const auto base = std::filesystem::temp_directory_path() / "qb_acceptance_ac9";
  std::filesystem::remove_all(base);
  auto cfg = qb::scenarios::quasistatic_config();
  cfg.seed = 7;
  std::vector<std::string> reports;
  std::vector<std::filesystem::path> dirs;
  for (unsigned threads : {1u, 4u, 4u}) {
    cfg.threads = threads;
    dirs.push_back(base / std::to_string(dirs.size()));
    cfg.output_dir = dirs.back().string();
    reports.push_back(qb::dump_report(qb::run_pipeline(cfg, obs)));
  }
  bool same = reports[0] == reports[1] && reports[1] == reports[2];
  std::size_t files = 0;
  for (const auto& f : std::filesystem::directory_iterator(dirs[0])) {
    ++files;
    const auto name = f.path().filename();
    const auto a = slurp(f.path());
    same = same && a == slurp(dirs[1] / name) && a == slurp(dirs[2] / name);
  }
  std::filesystem::remove_all(base);
  return {same && files > 0, std::string(same ? "identical" : "DIFFERENT") + " reports (" +
                                 std::to_string(reports[0].size()) + " bytes) and " + std::to_string(files) +
                                 " tables across 1-thread, 4-thread and repeated runs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"AC1", "kernel normalisation", 1.0, ac1},
      {"AC2", "balance equation residual", 1.0, ac2},
      {"AC3", "static round trip", 30.0, ac3},
      {"AC4", "Gibrat limit", 30.0, ac4},
      {"AC5", "quasistatic round trip", 60.0, ac5},
      {"AC6", "detailed balance over 100 seeds", 300.0, ac6},
      {"AC7", "multiplicative CLT", 10.0, ac7},
      {"AC8", "Pareto calibration", 5.0, ac8},
      {"AC9", "determinism", 120.0, ac9},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %s  %s: %s  [%.2f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", TOO SLOW");
    for (const auto& n : o.notes) std::printf("    note: %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
