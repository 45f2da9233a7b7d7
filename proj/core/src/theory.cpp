#include "qb/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "qb/error.hpp"

namespace qb {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 15>;

constexpr std::size_t kSegments = 2048;  // per side of the kink

}  // namespace

double TentKernelParams::t_plus(double x) const {
  const double L = std::log(std::min(x, cap()) / x0);
  return t_plus_x0 + (L < 0.0 ? alpha : alpha_high) * L;
}

double TentKernelParams::t_minus(double x) const {
  const double L = std::log(std::min(x, cap()) / x0);
  return t_minus_x0 - (L < 0.0 ? alpha : alpha_high) * L;
}

double pdf_lognormal(double x, double sigma, double xbar) {
  if (!(x > 0.0) || !(sigma > 0.0) || !(xbar > 0.0))
    throw ConfigError("pdf_lognormal: x, sigma and xbar must be positive");
  const double l = std::log(x / xbar);
  return std::exp(-l * l / (2.0 * sigma * sigma)) / (x * std::sqrt(2.0 * std::numbers::pi) * sigma);
}

double pdf_static(double x, double C, double mu, double alpha, double x0) {
  if (!(x > 0.0) || !(x0 > 0.0)) throw ConfigError("pdf_static: x and x0 must be positive");
  const double l = std::log(x / x0);
  return C * std::pow(x, -(mu + 1.0)) * std::exp(-alpha * l * l);
}

PiecewiseDensity::PiecewiseDensity(double mu, double kappa_low, double kappa_high, double x0, double x_lower,
                                   double theta, double log10_a)
    : mu_(mu), k_lo_(kappa_low), k_hi_(kappa_high), x0_(x0), x_lower_(x_lower), theta_(theta), log10_a_(log10_a) {
  if (!(x0 > 0.0) || !(x_lower > 0.0)) throw ConfigError("density: x0 and lower bound must be positive");
  if (!(theta > 0.0)) throw ConfigError("density: theta must be positive");
  if (k_lo_ < 0.0 || k_hi_ < 0.0) throw ConfigError("density: Gaussian coefficients must be non-negative");
  if (k_hi_ == 0.0 && !(mu_ > 0.0)) throw ConfigError("density: power-law tail with mu <= 0 is not normalisable");

  // ln p_Y is concave, so walk up until it has fallen well below its running maximum.
  y_lo_ = std::log(x_lower);
  const double y_kink = theta_ * std::log(x0_) + log10_a_ * std::numbers::ln10;
  double best = log_py(y_lo_);
  double y = y_lo_;
  double step = 0.05;
  for (int it = 0; it < 100000; ++it) {
    y += step;
    const double v = log_py(y);
    best = std::max(best, v);
    if (v < best - 60.0 && y > y_kink) break;
    step *= 1.01;
  }
  y_hi_ = y;
  log_scale_ = best;

  std::vector<double> nodes;
  auto add_uniform = [&](double a, double b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) nodes.push_back(a + (b - a) * static_cast<double>(i) / n);
  };
  if (y_kink > y_lo_ && y_kink < y_hi_) {
    add_uniform(y_lo_, y_kink, kSegments);
    add_uniform(y_kink, y_hi_, kSegments);
  } else {
    add_uniform(y_lo_, y_hi_, 2 * kSegments);
  }
  nodes.push_back(y_hi_);
  nodes_ = std::move(nodes);

  auto f = [this](double t) { return std::exp(log_py(t) - log_scale_); };
  cum_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) cum_[i] = cum_[i - 1] + Gauss::integrate(f, nodes_[i - 1], nodes_[i]);
  z_ = cum_.back();
  for (auto& c : cum_) c /= z_;
  log_c_ = -log_scale_ - std::log(z_);
  c_ = std::exp(log_c_);
}

double PiecewiseDensity::log_py(double y) const {
  const double w = (y - log10_a_ * std::numbers::ln10) / theta_;
  const double d = w - std::log(x0_);
  const double k = d < 0.0 ? k_lo_ : k_hi_;
  return -mu_ * y - k * d * d;
}

double PiecewiseDensity::log_pdf(double x) const {
  if (!(x >= x_lower_)) return -std::numeric_limits<double>::infinity();
  const double y = std::log(x);
  return log_c_ + log_py(y) - y;
}

double PiecewiseDensity::pdf(double x) const {
  if (!(x >= x_lower_)) return 0.0;
  return std::exp(log_pdf(x));
}

double PiecewiseDensity::cdf(double x) const {
  if (!(x > x_lower_)) return 0.0;
  const double y = std::log(x);
  if (y >= y_hi_) return 1.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  auto f = [this](double t) { return std::exp(log_py(t) - log_scale_); };
  const double part = Gauss::integrate(f, nodes_[i], y) / z_;
  return std::min(1.0, cum_[i] + part);
}

PiecewiseDensity static_density(double mu, double alpha, double x0, double x_min, double alpha_high) {
  return PiecewiseDensity(mu, alpha, alpha_high, x0, x_min);
}

PiecewiseDensity quasistatic_density_1(const TheoryParams& p) {
  return PiecewiseDensity(p.mu1, p.theta * p.alpha, p.theta * p.alpha_high, p.x0, p.x_min);
}

PiecewiseDensity quasistatic_density_2(const TheoryParams& p) {
  const double lower = std::pow(10.0, p.log10_a) * std::pow(p.x_min, p.theta);
  return PiecewiseDensity(p.mu2, p.theta * p.alpha, p.theta * p.alpha_high, p.x0, lower, p.theta, p.log10_a);
}

double pdf_quasistatic_1(double x, const TheoryParams& p) { return quasistatic_density_1(p).pdf(x); }
double pdf_quasistatic_2(double x, const TheoryParams& p) { return quasistatic_density_2(p).pdf(x); }

double tent_normalization(double t_plus, double t_minus) {
  if (!(t_plus > 0.0) || !(t_minus > 0.0))
    throw ConfigError("tent kernel is not normalisable: t+ and t- must be positive");
  return t_plus * t_minus / (t_plus + t_minus);
}

double tent_density(double R, double t_plus, double t_minus) {
  const double d = tent_normalization(t_plus, t_minus);
  if (!(R > 0.0)) return 0.0;
  if (R > 1.0) return d * std::pow(R, -t_plus - 1.0);
  if (R < 1.0) return d * std::pow(R, t_minus - 1.0);
  return d;
}

StaticMap param_map_static(double sigma, double xbar, double x0) {
  if (!(sigma > 0.0) || !(xbar > 0.0) || !(x0 > 0.0))
    throw ConfigError("param_map_static: sigma, xbar and x0 must be positive");
  const double s2 = sigma * sigma;
  return {1.0 / (2.0 * s2), std::log(x0 / xbar) / s2};
}

StaticInverse param_map_static_inverse(double alpha, double mu, double x0) {
  if (!(alpha > 0.0) || !(x0 > 0.0)) throw ConfigError("param_map_static_inverse: alpha and x0 must be positive");
  const double s2 = 1.0 / (2.0 * alpha);
  return {std::sqrt(s2), x0 * std::exp(-mu * s2)};
}

QuasistaticMap param_map_quasistatic(const TheoryParams& p, Mu2Reading reading) {
  if (!(p.theta > 0.0) || !(p.alpha > 0.0) || !(p.x0 > 0.0))
    throw ConfigError("param_map_quasistatic: theta * alpha must be positive");
  QuasistaticMap m{};
  m.sigma1 = 1.0 / std::sqrt(2.0 * p.theta * p.alpha);
  m.sigma2 = 1.0 / std::sqrt(2.0 * p.alpha / p.theta);
  m.mu1 = p.mu1;
  const double ln_x0 = std::log(p.x0);
  const double ln_a = p.log10_a * std::numbers::ln10;
  const double ln_xbar1 = ln_x0 - p.mu1 * m.sigma1 * m.sigma1;
  const double ln_xbar2 = ln_a + p.theta * ln_xbar1;
  m.xbar1 = std::exp(ln_xbar1);
  m.xbar2 = std::exp(ln_xbar2);
  const double ln_peak2 = ln_a + p.theta * ln_x0;
  const double s22 = m.sigma2 * m.sigma2;
  m.mu2 = reading == Mu2Reading::as_written ? (ln_peak2 - ln_xbar1) / s22 : (ln_peak2 - ln_xbar2) / s22;
  return m;
}

double mu2_from_ratio(double mu1, double theta) {
  if (theta == 0.0) throw ConfigError("mu2_from_ratio: theta must be non-zero");
  return (mu1 + 1.0) / theta - 1.0;
}

TheoryParams complete_params(TheoryParams p, Mu2Reading reading) {
  const QuasistaticMap m = param_map_quasistatic(p, reading);
  p.sigma1 = m.sigma1;
  p.sigma2 = m.sigma2;
  p.mu2 = m.mu2;
  p.xbar1 = m.xbar1;
  return p;
}

TentKernelParams kernel_for(const TheoryParams& p, double t_sum) {
  const double diff = (p.mu1 + 1.0) / p.theta - 1.0;
  TentKernelParams k;
  k.t_plus_x0 = 0.5 * (t_sum + diff);
  k.t_minus_x0 = 0.5 * (t_sum - diff);
  k.alpha = p.alpha;
  k.alpha_high = p.alpha_high;
  k.x0 = p.x0;
  return k;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n, double skip) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g;
  g.reserve(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    if (skip > 0.0 && std::abs(x / skip - 1.0) < 1e-9) continue;
    g.push_back(x);
  }
  return g;
}

DeResidual de_residual(const TentKernelParams& kernel, double theta, double mu1, const LogDensityFn& log_density,
                       std::span<const double> grid, double tol) {
  if (grid.size() < 3) throw ConfigError("de_residual: grid needs at least 3 points");
  const double norm = std::abs(theta * (mu1 + 1.0));
  if (!(norm > 0.0)) throw ConfigError("de_residual: theta (mu1 + 1) must be non-zero");
  const double s0 = std::log(kernel.x0);

  DeResidual out;
  double worst_change = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = std::log(grid[i]);
    double h = std::numeric_limits<double>::infinity();
    if (i > 0) h = std::min(h, s - std::log(grid[i - 1]));
    if (i + 1 < grid.size()) h = std::min(h, std::log(grid[i + 1]) - s);
    if (!(h > 0.0)) throw ConfigError("de_residual: grid must be strictly increasing");
    const double to_kink = std::abs(s - s0);
    if (to_kink < 1e-12) continue;
    h = std::min(h, 0.5 * to_kink);

    const double x = grid[i];
    const double drift = theta * (kernel.t_plus(x) - kernel.t_minus(x) + 1.0);
    auto rel = [&](double step) {
      const double d = (log_density(std::exp(s + step)) - log_density(std::exp(s - step))) / (2.0 * step);
      return std::abs(drift + d) / norm;
    };
    const double r1 = rel(h);
    const double r2 = rel(0.5 * h);
    out.max_rel = std::max(out.max_rel, r1);
    out.max_rel_half = std::max(out.max_rel_half, r2);
    worst_change = std::max(worst_change, std::abs(r1 - r2));
    ++out.n_points;

    // t+(x) = A + alpha ln(x/x0): t+' = alpha/x, t+'' = -alpha/x^2, t-' = -alpha/x.
    const double a = (x < kernel.x0) ? kernel.alpha : (x <= kernel.cap() ? kernel.alpha_high : 0.0);
    const double tp1 = a / x, tm1 = -a / x, tp2 = -a / (x * x);
    out.max_sum_derivative = std::max(out.max_sum_derivative, std::abs(tp1 + tm1));
    out.max_second_order = std::max(out.max_second_order, std::abs(tp1 + x * tp2) * x);
  }
  if (out.n_points == 0) throw ConfigError("de_residual: no usable grid points");
  if (worst_change > tol)
    throw DataError("de_residual: grid too coarse, halving the step changes the residual by " +
                    std::to_string(worst_change));
  return out;
}

DeResidual de_residual(const TheoryParams& p, std::span<const double> grid, double tol) {
  const TentKernelParams k = kernel_for(p, 60.0);
  const double kl = p.theta * p.alpha, kh = p.theta * p.alpha_high, ln_x0 = std::log(p.x0);
  auto logp = [=](double x) {
    const double l = std::log(x) - ln_x0;
    return -(p.mu1 + 1.0) * std::log(x) - (l < 0.0 ? kl : kh) * l * l;
  };
  return de_residual(k, p.theta, p.mu1, logp, grid, tol);
}

RelationReport relation_checks(double mu1, double mu2, double theta_h, double sigma1, double sigma2, double theta_m,
                               double tol_mu, double tol_sigma) {
  for (double v : {mu1, mu2, theta_h, sigma1, sigma2, theta_m})
    if (!std::isfinite(v)) throw DataError("relation_checks: non-finite input");
  if (mu2 == -1.0) throw DataError("relation_checks: mu2 = -1 makes the exponent ratio undefined");
  if (!(sigma1 > 0.0)) throw DataError("relation_checks: sigma1 must be positive");
  RelationReport r;
  r.mu_ratio = (mu1 + 1.0) / (mu2 + 1.0);
  r.theta_h = theta_h;
  r.mu_deviation = std::abs(r.mu_ratio - theta_h);
  r.mu_pass = r.mu_deviation <= tol_mu;
  r.sigma_ratio = sigma2 / sigma1;
  r.theta_m = theta_m;
  r.sigma_deviation = std::abs(r.sigma_ratio - theta_m);
  r.sigma_pass = r.sigma_deviation <= tol_sigma;
  r.tol_mu = tol_mu;
  r.tol_sigma = tol_sigma;
  return r;
}

}  // namespace qb
