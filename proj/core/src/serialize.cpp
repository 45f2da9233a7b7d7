#include "qb/serialize.hpp"

#include <cmath>

#include "qb/error.hpp"

namespace qb {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void to_json(json& j, const LogBinGrid& g) {
  j = json{{"scale", g.scale}, {"offset_decades", g.offset_decades}, {"width_decades", g.width_decades},
           {"n_bins", g.n_bins}};
}

void from_json(const json& j, LogBinGrid& g) {
  g.scale = j.value("scale", g.scale);
  g.offset_decades = j.value("offset_decades", g.offset_decades);
  g.width_decades = j.value("width_decades", g.width_decades);
  g.n_bins = j.value("n_bins", g.n_bins);
}

void to_json(json& j, const Window& w) { j = json::array({w.lo, w.hi}); }

void from_json(const json& j, Window& w) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("window must be a two-element array [lo, hi]");
  w.lo = j[0].get<double>();
  w.hi = j[1].get<double>();
}

void to_json(json& j, const LineFit& f) {
  j = json{{"slope", f.slope},
           {"intercept", f.intercept},
           {"r2", number_or_null(f.r2)},
           {"stderr_slope", number_or_null(f.stderr_slope)},
           {"stderr_intercept", number_or_null(f.stderr_intercept)},
           {"residual_rms", f.residual_rms},
           {"n", f.n}};
}

void to_json(json& j, const ParetoFit& f) {
  j = json{{"mu", number_or_null(f.mu)},
           {"c_const", number_or_null(f.c_const)},
           {"range", json::array({f.x_lo, f.x_hi})},
           {"n_points", f.n_points},
           {"residual_rms", number_or_null(f.residual_rms)},
           {"stderr_mu", number_or_null(f.stderr_mu)},
           {"hill_mu", number_or_null(f.hill_mu)},
           {"suspicious", f.suspicious}};
}

void to_json(json& j, const LogNormalFit& f) {
  j = json{{"sigma", number_or_null(f.sigma)},
           {"xbar", number_or_null(f.xbar)},
           {"range", json::array({f.x_lo, f.x_hi})},
           {"n_bins", f.n_bins},
           {"residual_rms", number_or_null(f.residual_rms)},
           {"quad_coef", number_or_null(f.quad_coef)},
           {"quad_stderr", number_or_null(f.quad_stderr)}};
}

void to_json(json& j, const TentFit& f) {
  j = json{{"bin_index", f.bin_index},
           {"x1_lower", f.x1_lower},
           {"x1_upper", f.x1_upper},
           {"c", f.c},
           {"t_plus", f.t_plus},
           {"t_minus", f.t_minus},
           {"n_pos", f.n_pos},
           {"n_neg", f.n_neg},
           {"pairs", f.pairs},
           {"residual_rms", number_or_null(f.residual_rms)},
           {"stderr_t_plus", number_or_null(f.stderr_t_plus)},
           {"stderr_t_minus", number_or_null(f.stderr_t_minus)}};
}

void to_json(json& j, const NonGibratFit& f) {
  j = json{{"alpha", f.alpha},
           {"t_plus_x0", f.t_plus_x0},
           {"t_minus_x0", f.t_minus_x0},
           {"x0", f.x0},
           {"region", json::array({f.x_min, f.x0})},
           {"mu_from_t", f.mu_from_t},
           {"residual_rms", number_or_null(f.residual_rms)},
           {"stderr_alpha", number_or_null(f.stderr_alpha)},
           {"n_tents", f.n_tents}};
}

void to_json(json& j, const QuasiBalanceFit& f) {
  j = json{{"theta", f.theta},
           {"log10_a", f.log10_a},
           {"region", f.region},
           {"region_kind", to_string(f.region_kind)},
           {"filter", to_string(f.filter)},
           {"n_pairs", f.n_pairs},
           {"stderr_theta", number_or_null(f.stderr_theta)},
           {"stderr_log10_a", number_or_null(f.stderr_log10_a)},
           {"r2", number_or_null(f.r2)},
           {"orthogonal_theta", number_or_null(f.orthogonal_theta)}};
}

void to_json(json& j, const GammaResult& g) {
  j = json{{"status", to_string(g.status)}, {"gamma", number_or_null(g.gamma)}};
}

void to_json(json& j, const SymmetryReport& s) {
  j = json{{"statistic", s.statistic}, {"dof", s.dof},         {"p_value", s.p_value},
           {"theta", s.theta},         {"log10_a", s.log10_a}, {"n_in_grid", s.n_in_grid}};
}

void to_json(json& j, const RelationReport& r) {
  j = json{{"mu_ratio", r.mu_ratio},
           {"theta_h", r.theta_h},
           {"mu_deviation", r.mu_deviation},
           {"mu_pass", r.mu_pass},
           {"sigma_ratio", r.sigma_ratio},
           {"theta_m", r.theta_m},
           {"sigma_deviation", r.sigma_deviation},
           {"sigma_pass", r.sigma_pass},
           {"tol_mu", r.tol_mu},
           {"tol_sigma", r.tol_sigma},
           {"pass", r.pass()}};
}

void to_json(json& j, const TheoryParams& p) {
  j = json{{"mu1", p.mu1},       {"mu2", p.mu2},         {"sigma1", p.sigma1},     {"sigma2", p.sigma2},
           {"theta", p.theta},   {"log10_a", p.log10_a}, {"alpha", p.alpha},       {"alpha_high", p.alpha_high},
           {"x0", p.x0},         {"x_min", p.x_min},     {"xbar1", p.xbar1}};
}

void to_json(json& j, const TentKernelParams& k) {
  j = json{{"t_plus_x0", k.t_plus_x0}, {"t_minus_x0", k.t_minus_x0}, {"alpha", k.alpha},
           {"alpha_high", k.alpha_high}, {"x0", k.x0},               {"x_cap", k.cap()}};
}

void to_json(json& j, const GeneratorSpec& s) {
  j = json{{"n_entities", s.n_entities}, {"theta", s.theta},   {"log10_a", s.log10_a},
           {"alpha", s.alpha},           {"mu1", s.mu1},       {"x0", s.x0},
           {"x_min", s.x_min},           {"kernel_sum", s.kernel_sum}, {"seed", s.seed},
           {"mode", to_string(s.mode)}};
}

void from_json(const json& j, GeneratorSpec& s) {
  static const char* known[] = {"n_entities", "theta", "log10_a",    "alpha", "mu1",    "x0",
                                "x_min",      "seed",  "kernel_sum", "mode",  "threads"};
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) throw ConfigError("generator spec: unknown key '" + k + "'");
  }
  s.n_entities = j.value("n_entities", s.n_entities);
  s.theta = j.value("theta", s.theta);
  s.log10_a = j.value("log10_a", s.log10_a);
  s.alpha = j.value("alpha", s.alpha);
  s.mu1 = j.value("mu1", s.mu1);
  s.x0 = j.value("x0", s.x0);
  s.x_min = j.value("x_min", s.x_min);
  s.kernel_sum = j.value("kernel_sum", s.kernel_sum);
  s.seed = j.value("seed", s.seed);
  s.threads = j.value("threads", s.threads);
  if (j.contains("mode")) s.mode = gen_mode_from_string(j.at("mode").get<std::string>());
}

void to_json(json& j, const GroundTruth& t) {
  j = json{{"mode", to_string(t.mode)},
           {"seed", t.seed},
           {"n", t.n},
           {"theta", t.theta},
           {"log10_a", t.log10_a},
           {"alpha", t.alpha},
           {"mu1", t.mu1},
           {"mu2", t.mu2},
           {"sigma1", number_or_null(t.sigma1)},
           {"sigma2", number_or_null(t.sigma2)},
           {"t_plus_x0", t.t_plus_x0},
           {"t_minus_x0", t.t_minus_x0},
           {"x0", t.x0},
           {"x_min", t.x_min},
           {"gamma", number_or_null(t.gamma)}};
}

}  // namespace qb
