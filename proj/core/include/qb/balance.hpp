#pragma once

#include <cstddef>
#include <span>

#include "qb/histogram.hpp"
#include "qb/panel.hpp"

namespace qb {

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class RegionKind { large, middle };
enum class RegionFilter { both, x1_only };

const char* to_string(RegionKind k);
const char* to_string(RegionFilter f);

struct QuasiBalanceFit {
  double theta = 0.0;
  double log10_a = 0.0;
  Window region;
  RegionKind region_kind = RegionKind::large;
  RegionFilter filter = RegionFilter::both;
  std::size_t n_pairs = 0;
  double stderr_theta = 0.0;
  double stderr_log10_a = 0.0;
  double r2 = 0.0;
  double orthogonal_theta = 0.0;  ///< diagnostic only
};

/// OLS of log10 x2 on log10 x1 over pairs inside the window.
QuasiBalanceFit estimate_theta_a(const PairedPanel& panel, Window region, RegionKind kind,
                                 RegionFilter filter = RegionFilter::both);

/// x2 / (a x1^theta)
double modified_growth_rate(double x1, double x2, double theta, double log10_a);

enum class GammaStatus { determined, indeterminate, inconsistent };
const char* to_string(GammaStatus s);

struct GammaResult {
  GammaStatus status = GammaStatus::indeterminate;
  double gamma = 0.0;  ///< NaN unless determined
};

/// Gamma = 2 log10 a / (1 - theta).
GammaResult gamma_relation(double theta, double log10_a);
double theta_from_gamma(double gamma, double log10_a);

struct SymmetryReport {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double theta = 1.0;
  double log10_a = 0.0;
  std::size_t n_in_grid = 0;
};

/// Bowker statistic on the square grid `edges` in (log10 x1, (log10 x2 - log10 a)/theta).
SymmetryReport symmetry_statistic(const PairedPanel& panel, double theta, double log10_a,
                                  std::span<const double> edges);
SymmetryReport symmetry_statistic(const CountMatrix& m);

}  // namespace qb
