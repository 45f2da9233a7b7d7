#include "qb/balance.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "qb/error.hpp"
#include "qb/fit.hpp"
#include "qb/stats.hpp"

namespace qb {

const char* to_string(RegionKind k) { return k == RegionKind::large ? "large" : "middle"; }
const char* to_string(RegionFilter f) { return f == RegionFilter::both ? "both" : "x1_only"; }

const char* to_string(GammaStatus s) {
  switch (s) {
    case GammaStatus::determined: return "determined";
    case GammaStatus::indeterminate: return "indeterminate";
    case GammaStatus::inconsistent: return "inconsistent";
  }
  return "unknown";
}

QuasiBalanceFit estimate_theta_a(const PairedPanel& panel, Window region, RegionKind kind, RegionFilter filter) {
  if (!(region.lo > 0.0) || !(region.hi > region.lo))
    throw ConfigError("estimate_theta_a: window must satisfy 0 < lo < hi");
  std::vector<double> u, v;
  for (const auto& p : panel.pairs) {
    if (!region.contains(p.x1)) continue;
    if (filter == RegionFilter::both && !region.contains(p.x2)) continue;
    u.push_back(std::log10(p.x1));
    v.push_back(std::log10(p.x2));
  }
  if (u.size() < 10)
    throw DataError(std::string("estimate_theta_a(") + to_string(kind) + "): " + std::to_string(u.size()) +
                    " pairs in window, need at least 10");
  const LineFit l = ols_line(u, v);
  QuasiBalanceFit f;
  f.theta = l.slope;
  f.log10_a = l.intercept;
  f.region = region;
  f.region_kind = kind;
  f.filter = filter;
  f.n_pairs = u.size();
  f.stderr_theta = l.stderr_slope;
  f.stderr_log10_a = l.stderr_intercept;
  f.r2 = l.r2;
  f.orthogonal_theta = orthogonal_slope(u, v);
  return f;
}

double modified_growth_rate(double x1, double x2, double theta, double log10_a) {
  if (!(x1 > 0.0) || !(x2 > 0.0)) throw ConfigError("modified_growth_rate: x1 and x2 must be positive");
  if (theta == 1.0 && log10_a == 0.0) return x2 / x1;
  return x2 / (std::pow(10.0, log10_a) * std::pow(x1, theta));
}

GammaResult gamma_relation(double theta, double log10_a) {
  GammaResult g;
  if (theta == 1.0) {
    g.status = log10_a == 0.0 ? GammaStatus::indeterminate : GammaStatus::inconsistent;
    g.gamma = std::numeric_limits<double>::quiet_NaN();
    return g;
  }
  g.status = GammaStatus::determined;
  g.gamma = 2.0 * log10_a / (1.0 - theta);
  return g;
}

double theta_from_gamma(double gamma, double log10_a) {
  if (gamma == 0.0 || !std::isfinite(gamma)) throw ConfigError("theta_from_gamma: Gamma must be finite and non-zero");
  return 1.0 - 2.0 * log10_a / gamma;
}

SymmetryReport symmetry_statistic(const CountMatrix& m) {
  if (m.rows != m.cols) throw ConfigError("symmetry_statistic: grid must be square");
  if (m.rows == 0) throw DataError("symmetry_statistic: empty grid");
  SymmetryReport r;
  r.n_in_grid = m.sum();
  if (r.n_in_grid == 0) throw DataError("symmetry_statistic: empty grid (no pairs inside)");
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = i + 1; j < m.cols; ++j) {
      const double a = static_cast<double>(m.at(i, j));
      const double b = static_cast<double>(m.at(j, i));
      if (a + b == 0.0) continue;
      r.statistic += (a - b) * (a - b) / (a + b);
      ++r.dof;
    }
  r.p_value = chi2_sf(r.statistic, static_cast<double>(r.dof));
  return r;
}

SymmetryReport symmetry_statistic(const PairedPanel& panel, double theta, double log10_a,
                                  std::span<const double> edges) {
  const CountMatrix m = joint_hist2d(panel, edges, edges, symmetrized_log_transform(theta, log10_a));
  SymmetryReport r = symmetry_statistic(m);
  r.theta = theta;
  r.log10_a = log10_a;
  return r;
}

}  // namespace qb
