#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qb/error.hpp"
#include "qb/scenarios.hpp"
#include "qb/theory.hpp"

namespace {

double log_integral(const std::function<double(double)>& pdf, double lo, double hi, int n = 200000) {
  return oracle::simpson([&](double y) { return pdf(std::exp(y)) * std::exp(y); }, std::log(lo), std::log(hi), n);
}

TEST(LogNormalPdf, ShapeAndNormalisation) {
  const double sigma = 1.3, xbar = 50.0;
  EXPECT_NEAR(qb::pdf_lognormal(xbar, sigma, xbar), 1.0 / (xbar * sigma * std::sqrt(2 * M_PI)), 1e-15);
  EXPECT_NEAR(log_integral([&](double x) { return qb::pdf_lognormal(x, sigma, xbar); }, xbar * 1e-5, xbar * 1e5),
              1.0, 1e-6);
  for (double k : {0.5, 1.0, 2.0})
    EXPECT_NEAR(qb::pdf_lognormal(xbar * std::exp(k), sigma, xbar) * xbar * std::exp(k),
                qb::pdf_lognormal(xbar * std::exp(-k), sigma, xbar) * xbar * std::exp(-k), 1e-15);
  EXPECT_THROW(qb::pdf_lognormal(1.0, 0.0, 1.0), qb::ConfigError);
}

TEST(StaticPdf, Reductions) {
  const double mu = 1.3, x0 = 1e4;
  EXPECT_NEAR(qb::pdf_static(2.0, 1.0, mu, 0.0, x0) / qb::pdf_static(1.0, 1.0, mu, 0.0, x0), std::pow(2.0, -mu - 1),
              1e-15);
  EXPECT_NEAR(qb::pdf_static(x0, 1.0, mu, 0.7, x0), std::pow(x0, -mu - 1), 1e-20);
}

TEST(StaticPdf, EquivalentToLogNormalUnderMap) {
  const double sigma = 1.7, xbar = 300.0, x0 = 5e4;
  const auto m = qb::param_map_static(sigma, xbar, x0);
  double ref = 0;
  bool first = true;
  for (double x = 1.0; x < 1e8; x *= 1.7) {
    const double d = std::log(qb::pdf_static(x, 1.0, m.mu, m.alpha, x0)) - std::log(qb::pdf_lognormal(x, sigma, xbar));
    if (first) ref = d, first = false;
    EXPECT_NEAR(d, ref, 1e-10);
  }
}

TEST(StaticMap, KnownValuesAndRoundTrip) {
  EXPECT_NEAR(qb::param_map_static_inverse(0.14, 1.0, 1.0).sigma, 1.8898, 1e-4);
  const double xbar = 10.0;
  EXPECT_NEAR(qb::param_map_static(1.0, xbar, std::exp(1.0) * xbar).mu, 1.0, 1e-14);
  for (double s : {0.5, 1.0, 2.5})
    for (double xb : {3.0, 1e3}) {
      const auto m = qb::param_map_static(s, xb, 1e5);
      const auto b = qb::param_map_static_inverse(m.alpha, m.mu, 1e5);
      EXPECT_NEAR(b.sigma, s, 1e-12);
      EXPECT_NEAR(b.xbar / xb, 1.0, 1e-12);
    }
}

TEST(QuasistaticMap, KnownValues) {
  qb::TheoryParams p;
  p.theta = 0.9;
  p.alpha = 0.14;
  const auto m = qb::param_map_quasistatic(p);
  EXPECT_NEAR(m.sigma1, 1.9920, 1e-4);
  EXPECT_NEAR(m.sigma2, 1.7928, 1e-4);
  EXPECT_NEAR(m.sigma2 / m.sigma1, 0.9, 1e-15);
  EXPECT_NEAR(m.mu2, p.mu1 / p.theta, 1e-12);
  p.theta = 1.0;
  const auto u = qb::param_map_quasistatic(p);
  EXPECT_DOUBLE_EQ(u.sigma1, u.sigma2);
  EXPECT_NEAR(qb::mu2_from_ratio(1.0, 0.8), 1.5, 1e-15);
  EXPECT_THROW(qb::mu2_from_ratio(1.0, 0.0), qb::ConfigError);
  p.alpha = 0.0;
  EXPECT_THROW(qb::param_map_quasistatic(p), qb::ConfigError);
}

TEST(QuasistaticMap, AsWrittenReadingDiffersByKnownShift) {
  qb::TheoryParams p;
  const auto a = qb::param_map_quasistatic(p, qb::Mu2Reading::as_written);
  const auto b = qb::param_map_quasistatic(p, qb::Mu2Reading::mapped_mean);
  const double shift = (std::log(b.xbar2) - std::log(a.xbar1)) / (a.sigma2 * a.sigma2);
  EXPECT_NEAR(a.mu2 - b.mu2, shift, 1e-10);
}

TEST(QuasistaticMap, CompletedParamsKeepSigmaRatio) {
  for (double t : {0.6, 0.9, 1.1})
    for (double al : {0.1, 1.0, 4.0}) {
      qb::TheoryParams p;
      p.theta = t;
      p.alpha = al;
      const auto c = qb::complete_params(p);
      EXPECT_NEAR(c.sigma2 / c.sigma1 - t, 0.0, 1e-15);
    }
}

TEST(TentKernel, SlopeSumIsConstantAndCapped) {
  qb::TentKernelParams k{3.0, 2.0, 0.2, 1e4, 0.05, 0.0};
  for (double x = 10.0; x < 1e9; x *= 3.1) EXPECT_NEAR(k.t_plus(x) + k.t_minus(x), 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(k.t_plus(k.cap()), k.t_plus(k.cap() * 50));
  EXPECT_DOUBLE_EQ(k.t_plus(1e4), 3.0);
  EXPECT_NEAR(k.t_plus(1e3), 3.0 - 0.2 * std::log(10.0), 1e-12);
}

TEST(TentKernel, NormalisationAgainstQuadrature) {
  for (auto [tp, tm] : {std::pair{2.0, 2.0}, {3.0, 1.5}, {0.5, 4.0}}) {
    const auto q = [&](double s) { return qb::tent_density(std::exp(s), tp, tm) * std::exp(s); };
    const double total = oracle::simpson(q, -120.0, 0.0, 200000) + oracle::simpson(q, 0.0, 120.0, 200000);
    EXPECT_NEAR(total, 1.0, 1e-8);
    EXPECT_NEAR(qb::tent_normalization(tp, tm), 1.0 / (1.0 / tp + 1.0 / tm), 1e-15);
  }
  EXPECT_NEAR(qb::tent_normalization(2.0, 2.0), 1.0, 1e-15);
  EXPECT_THROW(qb::tent_normalization(0.0, 1.0), qb::ConfigError);
  EXPECT_THROW(qb::tent_density(2.0, 1.0, -1.0), qb::ConfigError);
}

TEST(PiecewiseDensity, SingleAlphaMatchesLiteralForm) {
  const double mu = 1.0, alpha = 0.14, x0 = 6.34e4, x_min = 1592.0;
  const auto d = qb::static_density(mu, alpha, x0, x_min, alpha);
  for (double x = x_min; x < 1e9; x *= 1.37)
    EXPECT_NEAR(d.pdf(x) / qb::pdf_static(x, d.norm_const(), mu, alpha, x0), 1.0, 1e-12);
  EXPECT_EQ(d.pdf(x_min * 0.99), 0.0);
}

TEST(PiecewiseDensity, NormalisedAndCdfMatchesQuadrature) {
  const auto p = qb::scenarios::quasistatic_params();
  std::vector<qb::PiecewiseDensity> ds{qb::static_density(1.0, 0.14, 6.34e4, 1592.0),
                                       qb::quasistatic_density_1(p), qb::quasistatic_density_2(p),
                                       qb::static_density(2.0, 0.0, 1e3, 10.0)};
  for (const auto& d : ds) {
    const auto f = [&](double x) { return d.pdf(x); };
    const double lo = d.lower(), kink_guess = lo * 1e4;
    EXPECT_NEAR(log_integral(f, lo, lo * 1e60, 400000), 1.0, 1e-6);
    for (double x : {lo * 1.5, lo * 30.0, kink_guess})
      EXPECT_NEAR(d.cdf(x), log_integral(f, lo, x, 400000), 1e-8) << "x = " << x;
    double prev = 0;
    for (double x = lo; x < lo * 1e8; x *= 1.2) {
      const double c = d.cdf(x);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(PiecewiseDensity, UnitThetaReducesSecondPeriodToFirst) {
  auto p = qb::scenarios::quasistatic_params();
  p.theta = 1.0;
  p.log10_a = 0.0;
  p = qb::complete_params(p);
  const auto d1 = qb::quasistatic_density_1(p), d2 = qb::quasistatic_density_2(p);
  for (double x = p.x_min; x < 1e9; x *= 1.41) EXPECT_NEAR(d2.pdf(x) / d1.pdf(x), 1.0, 1e-12);
}

TEST(PiecewiseDensity, SecondPeriodGaussianFactorIsOneAtPeak) {
  const auto p = qb::scenarios::quasistatic_params();
  const auto d2 = qb::quasistatic_density_2(p);
  const double peak = std::pow(10.0, p.log10_a) * std::pow(p.x0, p.theta);
  EXPECT_NEAR(d2.pdf(peak) * std::pow(peak, p.mu2 + 1) / d2.norm_const(), 1.0, 1e-12);
  EXPECT_NEAR(d2.lower(), std::pow(10.0, p.log10_a) * std::pow(p.x_min, p.theta), 1e-9);
}

TEST(PiecewiseDensity, InvalidParameters) {
  EXPECT_THROW(qb::PiecewiseDensity(1.0, -1.0, 0.0, 10.0, 1.0), qb::ConfigError);
  EXPECT_THROW(qb::PiecewiseDensity(0.0, 1.0, 0.0, 10.0, 1.0), qb::ConfigError);
  EXPECT_THROW(qb::PiecewiseDensity(1.0, 1.0, 0.0, 10.0, 1.0, 0.0), qb::ConfigError);
}

TEST(DeResidual, PowerLawIsExact) {
  qb::TheoryParams p;
  p.theta = 1.0;
  p.alpha = 0.0;
  p.mu1 = 1.5;
  const auto g = qb::log_grid(10.0, 1e7, 200, p.x0);
  EXPECT_LT(qb::de_residual(p, g).max_rel, 1e-10);
}

TEST(DeResidual, QuasistaticDensitySatisfiesEquation) {
  const auto p = qb::scenarios::quasistatic_params();
  const auto g = qb::log_grid(p.x_min * 1.0001, p.x0 * 100, 1000, p.x0);
  const auto r = qb::de_residual(p, g);
  EXPECT_LT(r.max_rel, 1e-5);
  EXPECT_LT(r.max_rel_half, 1e-5);
  EXPECT_EQ(r.n_points, g.size());
  EXPECT_LT(r.max_sum_derivative, 1e-12);
  EXPECT_LT(r.max_second_order, 1e-12);
}

TEST(DeResidual, TamperedExponentsAreDetected) {
  const auto p = qb::scenarios::quasistatic_params();
  const auto k = qb::kernel_for(p, 60.0);
  const double kl = 1.01 * p.theta * p.alpha, ln_x0 = std::log(p.x0);
  const auto logp = [&](double x) {
    const double l = std::log(x) - ln_x0;
    return -1.01 * (p.mu1 + 1.0) * std::log(x) - (l < 0 ? kl : 0.0) * l * l;
  };
  const auto g = qb::log_grid(p.x_min * 1.0001, p.x0 * 100, 1000, p.x0);
  EXPECT_GT(qb::de_residual(k, p.theta, p.mu1, logp, g).max_rel, 1e-2);
}

TEST(DeResidual, CoarseGridIsRejected) {
  const auto p = qb::scenarios::quasistatic_params();
  const auto k = qb::kernel_for(p, 60.0);
  const auto wiggly = [&](double x) { return -(p.mu1 + 1) * std::log(x) + 0.5 * std::sin(3 * std::log(x)); };
  const auto g = qb::log_grid(p.x_min, p.x0 * 0.99, 5);
  EXPECT_THROW(qb::de_residual(k, p.theta, p.mu1, wiggly, g), qb::DataError);
}

TEST(LogGrid, SkipsKinkAndSpansRange) {
  const auto g = qb::log_grid(1.0, 100.0, 3, 10.0);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g.front(), 1.0);
  EXPECT_NEAR(g.back(), 100.0, 1e-12);
  EXPECT_THROW(qb::log_grid(1.0, 1.0, 3), qb::ConfigError);
}

TEST(Relations, Checks) {
  const auto ok = qb::relation_checks(1.0, 1.0, 1.0, 2.0, 2.0, 1.0);
  EXPECT_TRUE(ok.pass());
  EXPECT_EQ(ok.mu_deviation, 0.0);
  const auto bad = qb::relation_checks(1.0, 1.5, 1.0, 2.0, 2.0, 1.0);
  EXPECT_NEAR(bad.mu_ratio, 0.8, 1e-15);
  EXPECT_FALSE(bad.mu_pass);
  EXPECT_TRUE(bad.sigma_pass);
  const auto p = qb::scenarios::quasistatic_params();
  const double mu2 = qb::mu2_from_ratio(p.mu1, p.theta);
  EXPECT_TRUE(qb::relation_checks(p.mu1, mu2, p.theta, p.sigma1, p.sigma2, p.theta).pass());
  EXPECT_THROW(qb::relation_checks(1.0, -1.0, 1.0, 1.0, 1.0, 1.0), qb::DataError);
  EXPECT_THROW(qb::relation_checks(1.0, 1.0, 1.0, 0.0, 1.0, 1.0), qb::DataError);
}

}  // namespace
