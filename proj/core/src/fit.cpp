#include "qb/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "qb/error.hpp"

namespace qb {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Lstsq {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;
  double residual_rms = 0.0;
};

// Weighted least squares via column-pivoted QR; cov uses the weighted residual variance.
Lstsq weighted_lstsq(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                     const char* what) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd A = sw.asDiagonal() * X;
  const Eigen::VectorXd b = sw.asDiagonal() * y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < X.cols()) throw DataError(std::string(what) + ": design matrix is rank deficient");
  Lstsq out;
  out.beta = qr.solve(b);
  const Eigen::VectorXd e = y - X * out.beta;
  const double sse = (w.array() * e.array().square()).sum();
  out.residual_rms = std::sqrt(sse / w.sum());
  const auto dof = X.rows() - X.cols();
  const Eigen::MatrixXd xtx = A.transpose() * A;
  out.cov = xtx.inverse() * (dof > 0 ? sse / static_cast<double>(dof) : kNaN);
  return out;
}

}  // namespace

LineFit wls_line(std::span<const double> u, std::span<const double> v, std::span<const double> w) {
  if (u.size() != v.size() || u.size() != w.size()) throw ConfigError("wls_line: size mismatch");
  double sw = 0, su = 0, sv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(w[i] >= 0.0)) throw ConfigError("wls_line: weights must be non-negative");
    sw += w[i];
    su += w[i] * u[i];
    sv += w[i] * v[i];
  }
  std::size_t n = 0;
  for (double wi : w) n += wi > 0.0;
  if (n < 2 || !(sw > 0.0)) throw DataError("regression: need at least two weighted points");
  const double ub = su / sw, vb = sv / sw;
  double suu = 0, suv = 0, svv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = u[i] - ub, dv = v[i] - vb;
    suu += w[i] * du * du;
    suv += w[i] * du * dv;
    svv += w[i] * dv * dv;
  }
  if (!(suu > 0.0)) throw DataError("regression: degenerate u (all values equal)");
  LineFit f;
  f.n = n;
  f.slope = suv / suu;
  f.intercept = vb - f.slope * ub;
  double sse = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = v[i] - f.intercept - f.slope * u[i];
    sse += w[i] * e * e;
  }
  f.residual_rms = std::sqrt(sse / sw);
  f.r2 = svv > 0.0 ? 1.0 - sse / svv : (sse == 0.0 ? 1.0 : 0.0);
  if (n > 2) {
    const double s2 = sse / (n - 2.0);
    f.stderr_slope = std::sqrt(s2 / suu);
    f.stderr_intercept = std::sqrt(s2 * (1.0 / sw + ub * ub / suu));
  } else {
    f.stderr_slope = kNaN;
    f.stderr_intercept = kNaN;
  }
  return f;
}

LineFit ols_line(std::span<const double> u, std::span<const double> v) {
  std::vector<double> w(u.size(), 1.0);
  return wls_line(u, v, w);
}

double orthogonal_slope(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.size() < 2) throw DataError("orthogonal_slope: need two points");
  const double n = static_cast<double>(u.size());
  double ub = 0, vb = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    ub += u[i];
    vb += v[i];
  }
  ub /= n;
  vb /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sxx += (u[i] - ub) * (u[i] - ub);
    syy += (v[i] - vb) * (v[i] - vb);
    sxy += (u[i] - ub) * (v[i] - vb);
  }
  if (sxy == 0.0) return syy > sxx ? std::numeric_limits<double>::infinity() : 0.0;
  return (syy - sxx + std::sqrt((syy - sxx) * (syy - sxx) + 4.0 * sxy * sxy)) / (2.0 * sxy);
}

double hill_estimator(std::span<const double> values, double x_lo) {
  if (!(x_lo > 0.0)) throw ConfigError("hill_estimator: threshold must be positive");
  double s = 0.0;
  std::size_t k = 0;
  for (double x : values)
    if (x >= x_lo) {
      s += std::log(x / x_lo);
      ++k;
    }
  if (k == 0 || s == 0.0) return kNaN;
  return static_cast<double>(k) / s;
}

static void check_range(double lo, double hi, const char* what) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError(std::string(what) + ": range must satisfy 0 < x_lo < x_hi");
}

ParetoFit fit_pareto(std::span<const CcdfPoint> ccdf, double x_lo, double x_hi) {
  check_range(x_lo, x_hi, "fit_pareto");
  std::vector<double> u, v;
  for (const auto& p : ccdf)
    if (p.x >= x_lo && p.x <= x_hi && p.p > 0.0) {
      u.push_back(std::log10(p.x));
      v.push_back(std::log10(p.p));
    }
  if (u.size() < 3) throw DataError("fit_pareto: fewer than 3 points inside range");
  const LineFit l = ols_line(u, v);
  ParetoFit f;
  f.mu = -l.slope;
  f.c_const = f.mu * std::pow(10.0, l.intercept);
  f.x_lo = x_lo;
  f.x_hi = x_hi;
  f.n_points = u.size();
  f.residual_rms = l.residual_rms;
  f.stderr_mu = l.stderr_slope;
  f.hill_mu = kNaN;
  f.suspicious = !(f.mu > 0.0);
  return f;
}

ParetoFit fit_pareto(std::span<const double> values, double x_lo, double x_hi) {
  check_range(x_lo, x_hi, "fit_pareto");
  const auto ccdf = empirical_ccdf(values);
  ParetoFit f = fit_pareto(std::span<const CcdfPoint>(ccdf), x_lo, x_hi);
  f.hill_mu = hill_estimator(values, x_lo);
  return f;
}

ParetoFit fit_pareto(const BinnedDensity& d, double x_lo, double x_hi) {
  check_range(x_lo, x_hi, "fit_pareto");
  constexpr double eps = 1e-12;
  std::vector<double> u, v;
  for (std::size_t i = 0; i < d.density.size(); ++i) {
    const double l = d.edges[i], r = d.edges[i + 1];
    if (l >= x_lo * (1 - eps) && r <= x_hi * (1 + eps) && d.density[i] > 0.0) {
      u.push_back(0.5 * (std::log10(l) + std::log10(r)));
      v.push_back(std::log10(d.density[i]));
    }
  }
  if (u.size() < 3) throw DataError("fit_pareto: fewer than 3 populated bins inside range");
  const LineFit l = ols_line(u, v);
  ParetoFit f;
  f.mu = -l.slope - 1.0;
  f.c_const = std::pow(10.0, l.intercept);
  f.x_lo = x_lo;
  f.x_hi = x_hi;
  f.n_points = u.size();
  f.residual_rms = l.residual_rms;
  f.stderr_mu = l.stderr_slope;
  f.hill_mu = kNaN;
  f.suspicious = !(f.mu > 0.0);
  return f;
}

LogNormalFit fit_lognormal_mid(const BinnedDensity& d, double x_lo, double x_hi) {
  check_range(x_lo, x_hi, "fit_lognormal_mid");
  constexpr double eps = 1e-12;
  const bool weighted = d.total > 0;
  std::vector<double> y, lp, w;
  for (std::size_t i = 0; i < d.density.size(); ++i) {
    const double l = d.edges[i], r = d.edges[i + 1];
    if (!(l >= x_lo * (1 - eps) && r <= x_hi * (1 + eps) && d.density[i] > 0.0)) continue;
    if (weighted && d.counts[i] == 0) continue;
    const double py = d.density[i] * (r - l) / std::log(r / l);
    y.push_back(0.5 * (std::log(l) + std::log(r)));
    lp.push_back(std::log(py));
    w.push_back(weighted ? static_cast<double>(d.counts[i]) : 1.0);
  }
  if (y.size() < 4) throw DataError("fit_lognormal_mid: fewer than 4 populated bins inside range");
  double ym = 0.0;
  for (double v : y) ym += v;
  ym /= static_cast<double>(y.size());

  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd b(n), W(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = y[i] - ym;
    X(i, 0) = 1.0;
    X(i, 1) = t;
    X(i, 2) = t * t;
    b(i) = lp[i];
    W(i) = w[i];
  }
  const Lstsq s = weighted_lstsq(X, b, W, "fit_lognormal_mid");
  LogNormalFit f;
  f.quad_coef = s.beta(2);
  f.quad_stderr = std::sqrt(std::max(0.0, s.cov(2, 2)));
  const double se = std::isfinite(f.quad_stderr) ? f.quad_stderr : 0.0;
  if (!(f.quad_coef < -std::max(1e-8, 3.0 * se)))
    throw DataError("fit_lognormal_mid: non-concave log-density in window (quadratic coefficient " +
                    std::to_string(f.quad_coef) + ")");
  f.sigma = std::sqrt(-1.0 / (2.0 * f.quad_coef));
  f.xbar = std::exp(ym - s.beta(1) / (2.0 * f.quad_coef));
  f.x_lo = x_lo;
  f.x_hi = x_hi;
  f.n_bins = y.size();
  f.residual_rms = s.residual_rms;
  return f;
}

TentFit fit_tent(const GrowthRateDensity& g, double r_max) {
  if (!(r_max > 0.0)) throw ConfigError("fit_tent: r_max must be positive");
  std::vector<double> r, lq, w;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i + 1 < g.r_edges.size() && i < g.density_q.size(); ++i) {
    const double rc = 0.5 * (g.r_edges[i] + g.r_edges[i + 1]);
    if (std::abs(rc) > r_max + 1e-12 || g.counts[i] == 0 || !(g.density_q[i] > 0.0)) continue;
    r.push_back(rc);
    lq.push_back(std::log10(g.density_q[i]));
    w.push_back(static_cast<double>(g.counts[i]));
    n_pos += rc > 0.0;
    n_neg += rc < 0.0;
  }
  const std::string where = "fit_tent(bin " + std::to_string(g.condition_bin) + ")";
  if (n_pos == 0 && n_neg == 0) throw DataError(where + ": degenerate, all mass at r = 0");
  if (n_pos < 2 || n_neg < 2)
    throw DataError(where + ": one-sided data (" + std::to_string(n_pos) + " bins above r = 0, " +
                    std::to_string(n_neg) + " below)");
  const auto n = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 3);
  Eigen::VectorXd b(n), W(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    if (r[i] > 0.0) X(i, 1) = -r[i];
    if (r[i] < 0.0) X(i, 2) = r[i];
    b(i) = lq[i];
    W(i) = w[i];
  }
  const Lstsq s = weighted_lstsq(X, b, W, where.c_str());
  TentFit f;
  f.bin_index = g.condition_bin;
  f.x1_lower = g.x1_lower;
  f.x1_upper = g.x1_upper;
  f.c = s.beta(0);
  f.t_plus = s.beta(1);
  f.t_minus = s.beta(2);
  f.n_pos = n_pos;
  f.n_neg = n_neg;
  f.pairs = g.count;
  f.residual_rms = s.residual_rms;
  f.stderr_t_plus = std::sqrt(std::max(0.0, s.cov(1, 1)));
  f.stderr_t_minus = std::sqrt(std::max(0.0, s.cov(2, 2)));
  return f;
}

NonGibratFit fit_alpha(std::span<const TentFit> tents, double x0, double x_min) {
  if (!(x_min > 0.0) || !(x0 > x_min)) throw ConfigError("fit_alpha: region must satisfy 0 < x_min < x0");
  constexpr double eps = 1e-9;
  std::vector<const TentFit*> sel;
  for (const auto& t : tents)
    if (t.x1_lower >= x_min * (1 - eps) && t.x1_lower < x0 * (1 - eps) && t.pairs > 0) sel.push_back(&t);
  if (sel.size() < 3)
    throw DataError("fit_alpha: " + std::to_string(sel.size()) + " tents in [x_min, x0), need at least 3");
  const auto m = static_cast<Eigen::Index>(sel.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2 * m, 3);
  Eigen::VectorXd b(2 * m), W(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double L = std::log(sel[i]->x1_lower / x0);
    const double w = static_cast<double>(sel[i]->pairs);
    X(i, 0) = 1.0;
    X(i, 2) = L;
    b(i) = sel[i]->t_plus;
    W(i) = w;
    X(m + i, 1) = 1.0;
    X(m + i, 2) = -L;
    b(m + i) = sel[i]->t_minus;
    W(m + i) = w;
  }
  const Lstsq s = weighted_lstsq(X, b, W, "fit_alpha");
  NonGibratFit f;
  f.t_plus_x0 = s.beta(0);
  f.t_minus_x0 = s.beta(1);
  f.alpha = s.beta(2);
  f.x0 = x0;
  f.x_min = x_min;
  f.mu_from_t = f.t_plus_x0 - f.t_minus_x0;
  f.residual_rms = s.residual_rms;
  f.stderr_alpha = std::sqrt(std::max(0.0, s.cov(2, 2)));
  f.n_tents = sel.size();
  return f;
}

}  // namespace qb
