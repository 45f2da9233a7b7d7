#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qb {

struct TheoryParams {
  double mu1 = 2.0;
  double mu2 = 2.0 / 0.9;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double theta = 0.9;
  double log10_a = 0.2;
  double alpha = 1.0;       ///< below x0
  double alpha_high = 0.0;  ///< above x0
  double x0 = 3.0e5;
  double x_min = 100.0;
  double xbar1 = 0.0;
};

struct TentKernelParams {
  double t_plus_x0 = 2.0;
  double t_minus_x0 = 1.0;
  double alpha = 0.0;
  double x0 = 1.0;
  double alpha_high = 0.0;
  double x_cap = 0.0;  ///< slopes frozen above this; 0 means x0 * 1e3

  double t_plus(double x) const;
  double t_minus(double x) const;
  double cap() const { return x_cap > 0.0 ? x_cap : x0 * 1e3; }
};

double pdf_lognormal(double x, double sigma, double xbar);

/// C x^-(mu+1) exp(-alpha ln^2(x/x0)), single alpha on the whole axis.
double pdf_static(double x, double C, double mu, double alpha, double x0);

/// Normalised density on [x_lower, inf) of the form
///   C x^-(mu+1) exp(-kappa(z) ln^2(z/x0)),  z = (x/a)^(1/theta),
/// with kappa = kappa_low for z < x0 and kappa_high above.
class PiecewiseDensity {
 public:
  PiecewiseDensity(double mu, double kappa_low, double kappa_high, double x0, double x_lower,
                   double theta = 1.0, double log10_a = 0.0);

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double norm_const() const { return c_; }
  double lower() const { return x_lower_; }

 private:
  double log_py(double y) const;  // unnormalised log density in y = ln x

  double mu_, k_lo_, k_hi_, x0_, x_lower_, theta_, log10_a_;
  double y_lo_, y_hi_, log_scale_;
  double z_ = 1.0, log_c_ = 0.0, c_ = 0.0;
  std::vector<double> nodes_;  // y grid, split at the kink
  std::vector<double> cum_;    // normalised CDF at nodes_
};

PiecewiseDensity static_density(double mu, double alpha, double x0, double x_min,
                                double alpha_high = 0.0);
PiecewiseDensity quasistatic_density_1(const TheoryParams& p);
PiecewiseDensity quasistatic_density_2(const TheoryParams& p);

/// Each call normalises from scratch; build the density object for repeated use.
double pdf_quasistatic_1(double x, const TheoryParams& p);
double pdf_quasistatic_2(double x, const TheoryParams& p);

/// d = t+ t- / (t+ + t-)
double tent_normalization(double t_plus, double t_minus);
/// Q(R) = d R^(-t+ - 1) for R > 1, d R^(t- - 1) for R < 1.
double tent_density(double R, double t_plus, double t_minus);

struct StaticMap {
  double alpha;
  double mu;
};
struct StaticInverse {
  double sigma;
  double xbar;
};
StaticMap param_map_static(double sigma, double xbar, double x0);
StaticInverse param_map_static_inverse(double alpha, double mu, double x0);

enum class Mu2Reading {
  as_written,   ///< (1/sigma2^2) ln(a x0^theta / xbar1)
  mapped_mean,  ///< xbar2 = a xbar1^theta in place of xbar1, giving mu1/theta
};

struct QuasistaticMap {
  double sigma1;
  double sigma2;
  double mu1;
  double mu2;
  double xbar1;
  double xbar2;
};

/// Uses p.theta, p.alpha, p.mu1, p.x0, p.log10_a.
QuasistaticMap param_map_quasistatic(const TheoryParams& p,
                                     Mu2Reading reading = Mu2Reading::mapped_mean);
/// mu2 from (mu1 + 1)/(mu2 + 1) = theta.
double mu2_from_ratio(double mu1, double theta);

/// Fills sigma1, sigma2, mu2, xbar1 from theta, alpha, mu1, x0, log10_a.
TheoryParams complete_params(TheoryParams p, Mu2Reading reading = Mu2Reading::mapped_mean);

/// Kernel with t+(x0) - t-(x0) = (mu1 + 1)/theta - 1 and t+(x0) + t-(x0) = t_sum.
TentKernelParams kernel_for(const TheoryParams& p, double t_sum);

struct DeResidual {
  double max_rel = 0.0;       ///< at step h
  double max_rel_half = 0.0;  ///< at step h/2
  std::size_t n_points = 0;
  double max_sum_derivative = 0.0;   ///< |t+' + t-'|
  double max_second_order = 0.0;     ///< |t+' + x t+''|
};

using LogDensityFn = std::function<double(double)>;

/// Residual of theta [t+(x) - t-(x) + 1] P(x) + x P'(x) relative to theta (mu1 + 1) P(x).
/// The derivative is a central difference of ln P in ln x that never straddles x0.
/// Throws DataError when halving the step changes the residual by more than `tol`.
DeResidual de_residual(const TentKernelParams& kernel, double theta, double mu1,
                       const LogDensityFn& log_density, std::span<const double> grid,
                       double tol = 1e-5);
/// Default kernel (t_sum = 60) and the first-period density.
DeResidual de_residual(const TheoryParams& p, std::span<const double> grid, double tol = 1e-5);

/// n log-spaced points on [lo, hi] excluding any point within 1e-9 relative of `skip`.
std::vector<double> log_grid(double lo, double hi, std::size_t n, double skip = 0.0);

struct RelationReport {
  double mu_ratio = 0.0;     ///< (mu1 + 1)/(mu2 + 1)
  double theta_h = 0.0;
  double mu_deviation = 0.0;
  bool mu_pass = false;
  double sigma_ratio = 0.0;  ///< sigma2 / sigma1
  double theta_m = 0.0;
  double sigma_deviation = 0.0;
  bool sigma_pass = false;
  double tol_mu = 0.05;
  double tol_sigma = 0.05;

  bool pass() const { return mu_pass && sigma_pass; }
};

RelationReport relation_checks(double mu1, double mu2, double theta_h, double sigma1,
                               double sigma2, double theta_m, double tol_mu = 0.05,
                               double tol_sigma = 0.05);

}  // namespace qb
