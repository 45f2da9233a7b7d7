#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qb {

double normal_cdf(double z);
double normal_quantile(double p);
/// log(1 - Phi(z)), accurate far into the upper tail.
double log_normal_sf(double z);

double chi2_sf(double stat, double dof);

/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_sf(double lambda);

/// One-sample KS distance of `sample` against `cdf`. Sorts a copy.
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);
double ks_statistic_sorted(std::span<const double> sorted,
                           const std::function<double(double)>& cdf);

/// Two-sample KS distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Approximate p-value for a two-sample distance with sizes n and m.
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);

}  // namespace qb
