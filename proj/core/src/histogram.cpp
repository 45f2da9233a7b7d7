#include "qb/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qb/error.hpp"
#include "qb/panel.hpp"

namespace qb {
namespace {

void check_edges(std::span<const double> edges, const char* what) {
  if (edges.size() < 2) throw ConfigError(std::string(what) + ": need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw ConfigError(std::string(what) + ": edges must be strictly increasing");
}

// Index of the half-open cell [e[i], e[i+1]) holding x, or -1.
long cell_of(std::span<const double> edges, double x) {
  if (!(x >= edges.front()) || !(x < edges.back())) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return static_cast<long>(it - edges.begin()) - 1;
}

}  // namespace

double LogBinGrid::lower(int n) const {
  return scale * std::pow(10.0, offset_decades + width_decades * (n - 1));
}

std::vector<double> LogBinGrid::edges() const {
  std::vector<double> e(static_cast<std::size_t>(n_bins) + 1);
  for (int n = 1; n <= n_bins + 1; ++n) e[n - 1] = lower(n);
  return e;
}

std::optional<int> LogBinGrid::bin_of(double x) const {
  if (!(x > 0.0)) return std::nullopt;
  int k = static_cast<int>(std::floor((std::log10(x / scale) - offset_decades) / width_decades)) + 1;
  while (k >= 1 && x < lower(k)) --k;
  while (k <= n_bins && x >= lower(k + 1)) ++k;
  if (k < 1 || k > n_bins) return std::nullopt;
  return k;
}

void LogBinGrid::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("grid: scale must be positive");
  if (!(width_decades > 0.0)) throw ConfigError("grid: width_decades must be positive");
  if (n_bins < 1) throw ConfigError("grid: n_bins must be positive");
  if (!std::isfinite(offset_decades)) throw ConfigError("grid: offset_decades must be finite");
}

std::vector<double> log_edges(double lo, double hi, double width_decades) {
  if (!(lo > 0.0 && hi > lo && width_decades > 0.0)) throw ConfigError("log_edges: need 0 < lo < hi and width > 0");
  const double span = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::floor(span / width_decades + 1e-9));
  if (n < 1) throw ConfigError("log_edges: range narrower than one bin");
  std::vector<double> e(n + 1);
  for (std::size_t k = 0; k <= n; ++k) e[k] = lo * std::pow(10.0, width_decades * static_cast<double>(k));
  return e;
}

std::vector<double> linear_edges(double lo, double hi, double width) {
  if (!(hi > lo && width > 0.0)) throw ConfigError("linear_edges: need lo < hi and width > 0");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / width));
  if (n < 1) throw ConfigError("linear_edges: range narrower than one bin");
  std::vector<double> e(n + 1);
  for (std::size_t k = 0; k <= n; ++k) e[k] = lo + width * static_cast<double>(k);
  return e;
}

BinnedDensity empirical_density(std::span<const double> values, std::span<const double> edges) {
  check_edges(edges, "empirical_density");
  if (values.empty()) throw DataError("empirical_density: empty input");
  BinnedDensity d;
  d.edges.assign(edges.begin(), edges.end());
  d.counts.assign(edges.size() - 1, 0);
  d.density.assign(edges.size() - 1, 0.0);
  for (double v : values) {
    const long c = cell_of(edges, v);
    if (c >= 0) {
      ++d.counts[static_cast<std::size_t>(c)];
    } else if (v < edges.front()) {
      ++d.underflow;
    } else {
      ++d.overflow;
    }
  }
  for (auto c : d.counts) d.total += c;
  if (d.total > 0)
    for (std::size_t i = 0; i < d.counts.size(); ++i)
      d.density[i] = static_cast<double>(d.counts[i]) / (static_cast<double>(d.total) * (edges[i + 1] - edges[i]));
  return d;
}

std::vector<CcdfPoint> empirical_ccdf(std::span<const double> values) {
  if (values.empty()) throw DataError("empirical_ccdf: empty input");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    out.push_back({s[i], static_cast<double>(s.size() - j) / n});
    i = j;
  }
  return out;
}

ConditionalGrowth conditional_growth_density(const PairedPanel& panel, const LogBinGrid& grid,
                                             std::span<const double> r_edges, double theta,
                                             double log10_a) {
  grid.validate();
  check_edges(r_edges, "conditional_growth_density");
  const std::size_t nb = static_cast<std::size_t>(grid.n_bins);
  const std::size_t nr = r_edges.size() - 1;

  std::vector<GrowthRateDensity> all(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    all[b].condition_bin = static_cast<int>(b) + 1;
    all[b].x1_lower = grid.lower(static_cast<int>(b) + 1);
    all[b].x1_upper = grid.upper(static_cast<int>(b) + 1);
    all[b].r_edges.assign(r_edges.begin(), r_edges.end());
    all[b].counts.assign(nr, 0);
  }
  ConditionalGrowth out;
  for (const auto& p : panel.pairs) {
    const auto bin = grid.bin_of(p.x1);
    if (!bin) {
      (p.x1 < grid.lower(1) ? out.x1_below : out.x1_above) += 1;
      continue;
    }
    auto& g = all[static_cast<std::size_t>(*bin) - 1];
    ++g.count;
    const double r = std::log10(p.x2) - log10_a - theta * std::log10(p.x1);
    const long c = cell_of(r_edges, r);
    if (c >= 0) {
      ++g.counts[static_cast<std::size_t>(c)];
    } else if (r < r_edges.front()) {
      ++g.r_below;
    } else {
      ++g.r_above;
    }
  }
  for (auto& g : all) {
    if (g.count == 0) continue;
    g.density_q.assign(nr, 0.0);
    const double m = static_cast<double>(g.in_range());
    if (m > 0)
      for (std::size_t i = 0; i < nr; ++i)
        g.density_q[i] = static_cast<double>(g.counts[i]) / (m * (r_edges[i + 1] - r_edges[i]));
    out.bins.push_back(std::move(g));
  }
  if (out.bins.empty()) throw DataError("conditional_growth_density: all x1 bins are empty");
  return out;
}

double q_to_Q_log(double log10_q, double r) { return log10_q - r - std::log10(std::numbers::ln10); }
double Q_to_q_log(double log10_Q, double r) { return log10_Q + r + std::log10(std::numbers::ln10); }

std::size_t CountMatrix::sum() const {
  std::size_t s = 0;
  for (auto v : data) s += v;
  return s;
}

CountMatrix joint_hist2d(const PairedPanel& panel, std::span<const double> edges_u,
                         std::span<const double> edges_v, const PairTransform& transform) {
  check_edges(edges_u, "joint_hist2d");
  check_edges(edges_v, "joint_hist2d");
  CountMatrix m;
  m.rows = edges_u.size() - 1;
  m.cols = edges_v.size() - 1;
  m.data.assign(m.rows * m.cols, 0);
  for (const auto& p : panel.pairs) {
    const auto [u, v] = transform(p.x1, p.x2);
    const long i = cell_of(edges_u, u);
    const long j = cell_of(edges_v, v);
    if (i >= 0 && j >= 0) ++m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return m;
}

PairTransform symmetrized_log_transform(double theta, double log10_a) {
  if (theta == 0.0) throw ConfigError("symmetrized transform: theta must be non-zero");
  return [theta, log10_a](double x1, double x2) {
    return std::pair{std::log10(x1), (std::log10(x2) - log10_a) / theta};
  };
}

void write_density_tsv(std::ostream& os, const BinnedDensity& d) {
  os << "bin_left\tbin_right\tcount\tdensity\n";
  for (std::size_t i = 0; i < d.counts.size(); ++i)
    os << format_double(d.edges[i]) << '\t' << format_double(d.edges[i + 1]) << '\t' << d.counts[i] << '\t'
       << format_double(d.density[i]) << '\n';
}

}  // namespace qb
