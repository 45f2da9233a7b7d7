#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qb/histogram.hpp"

namespace qb {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double stderr_slope = 0.0;
  double stderr_intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t n = 0;
};

LineFit ols_line(std::span<const double> u, std::span<const double> v);
LineFit wls_line(std::span<const double> u, std::span<const double> v,
                 std::span<const double> w);

/// Total least squares slope (orthogonal regression).
double orthogonal_slope(std::span<const double> u, std::span<const double> v);

struct ParetoFit {
  double mu = 0.0;
  double c_const = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t n_points = 0;
  double residual_rms = 0.0;
  double stderr_mu = 0.0;
  double hill_mu = 0.0;  ///< NaN when not computed
  bool suspicious = false;  ///< mu <= 0
};

/// CCDF regression on a raw sample; the CCDF uses the whole sample, the fit only [x_lo, x_hi].
ParetoFit fit_pareto(std::span<const double> values, double x_lo, double x_hi);
ParetoFit fit_pareto(std::span<const CcdfPoint> ccdf, double x_lo, double x_hi);
/// log10 density against log10 geometric bin centre; slope is -(mu+1).
ParetoFit fit_pareto(const BinnedDensity& density, double x_lo, double x_hi);

/// Hill estimator over values >= x_lo.
double hill_estimator(std::span<const double> values, double x_lo);

struct LogNormalFit {
  double sigma = 0.0;
  double xbar = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t n_bins = 0;
  double residual_rms = 0.0;
  double quad_coef = 0.0;
  double quad_stderr = 0.0;
};

/// Quadratic fit of ln p_Y(y) on y = ln x over bins inside [x_lo, x_hi].
/// Bins are weighted by count; a density with no counts is fitted unweighted.
LogNormalFit fit_lognormal_mid(const BinnedDensity& density, double x_lo, double x_hi);

struct TentFit {
  int bin_index = 0;
  double x1_lower = 0.0;
  double x1_upper = 0.0;
  double c = 0.0;
  double t_plus = 0.0;
  double t_minus = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t pairs = 0;
  double residual_rms = 0.0;
  double stderr_t_plus = 0.0;
  double stderr_t_minus = 0.0;
};

/// log10 q = c - t_plus r (r > 0), c + t_minus r (r < 0), over r-bin centres with |r| <= r_max.
TentFit fit_tent(const GrowthRateDensity& grd, double r_max = 1.0);

struct NonGibratFit {
  double alpha = 0.0;
  double t_plus_x0 = 0.0;
  double t_minus_x0 = 0.0;
  double x0 = 0.0;
  double x_min = 0.0;
  double mu_from_t = 0.0;
  double residual_rms = 0.0;
  double stderr_alpha = 0.0;
  std::size_t n_tents = 0;
};

/// Joint weighted fit t+ = A + alpha L, t- = B - alpha L with L = ln(x1_lower/x0),
/// over tents with x1_lower in [x_min, x0), weighted by pair count.
NonGibratFit fit_alpha(std::span<const TentFit> tents, double x0, double x_min);

}  // namespace qb
