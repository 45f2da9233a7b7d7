#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qb/panel.hpp"

namespace qb {

/// Bin n (1-based) spans scale * [10^(offset + width*(n-1)), 10^(offset + width*n)).
struct LogBinGrid {
  double scale = 4.0;
  double offset_decades = 1.0;
  double width_decades = 0.2;
  int n_bins = 20;

  double lower(int n) const;  ///< 1-based
  double upper(int n) const { return lower(n + 1); }
  std::vector<double> edges() const;
  /// 1-based bin, or nullopt outside the grid.
  std::optional<int> bin_of(double x) const;
  void validate() const;
};

/// Edges lo*10^(k*width) for k = 0.. while <= hi (within 1e-9 decades).
std::vector<double> log_edges(double lo, double hi, double width_decades);
/// Edges lo + k*width, k = 0..round((hi-lo)/width).
std::vector<double> linear_edges(double lo, double hi, double width);

struct BinnedDensity {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::vector<double> density;  ///< probability per unit x
  std::size_t total = 0;        ///< in-range count
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t size() const { return counts.size(); }
};

BinnedDensity empirical_density(std::span<const double> values, std::span<const double> edges);

struct CcdfPoint {
  double x;
  double p;  ///< fraction of the sample strictly greater than x
};

/// Unique sorted x with P(X > x); the smallest point carries 1 - (ties)/N, the largest 0.
std::vector<CcdfPoint> empirical_ccdf(std::span<const double> values);

struct GrowthRateDensity {
  int condition_bin = 0;  ///< 1-based bin of the x1 grid
  double x1_lower = 0.0;
  double x1_upper = 0.0;
  std::vector<double> r_edges;
  std::vector<std::size_t> counts;
  std::vector<double> density_q;  ///< normalised over pairs with r inside r_edges
  std::size_t count = 0;          ///< all pairs in this x1 bin
  std::size_t r_below = 0;
  std::size_t r_above = 0;

  std::size_t in_range() const { return count - r_below - r_above; }
};

struct ConditionalGrowth {
  std::vector<GrowthRateDensity> bins;
  std::size_t x1_below = 0;
  std::size_t x1_above = 0;
};

/// q(r|x1) per populated x1 bin with r = log10(x2 / (a x1^theta)).
ConditionalGrowth conditional_growth_density(const PairedPanel& panel, const LogBinGrid& grid,
                                             std::span<const double> r_edges, double theta = 1.0,
                                             double log10_a = 0.0);

/// log10 Q(R|x1) from log10 q(r|x1) at R = 10^r.
double q_to_Q_log(double log10_q, double r);
double Q_to_q_log(double log10_Q, double r);

struct CountMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> data;  ///< row-major

  std::size_t& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::size_t at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::size_t sum() const;
};

using PairTransform = std::function<std::pair<double, double>(double, double)>;

CountMatrix joint_hist2d(const PairedPanel& panel, std::span<const double> edges_u,
                         std::span<const double> edges_v, const PairTransform& transform);

/// (log10 x1, (log10 x2 - log10 a)/theta)
PairTransform symmetrized_log_transform(double theta, double log10_a);

void write_density_tsv(std::ostream& os, const BinnedDensity& d);

}  // namespace qb
