#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qb/balance.hpp"
#include "qb/histogram.hpp"
#include "qb/panel.hpp"
#include "qb/serialize.hpp"

namespace qb {

inline constexpr int kReportVersion = 1;

enum class GrowthMode { plain, modified };

struct Tolerances {
  double mu = 0.05;
  double sigma = 0.05;
  double gamma_theta = 0.03;  ///< |1 - theta| at or below this reports Gamma as indeterminate
};

struct RunConfig {
  std::vector<std::string> inputs;
  ColumnMapping columns;
  std::vector<std::pair<std::int64_t, std::int64_t>> period_pairs;  ///< empty: consecutive periods
  Window large{2.0e5, 1.0e7};
  Window middle{5.0e3, 3.17e5};
  LogBinGrid grid;
  double r_width = 0.1;
  double r_max = 1.0;
  double x0 = 4.0 * 15848.931924611135;  // 4 * 10^4.2
  double x_min = 4.0 * 398.1071705534973;  // 4 * 10^2.6
  double density_bin_decades = 0.1;
  double symmetry_bin_decades = 0.2;
  double symmetry_decades = 4.0;  ///< span of the detailed-balance grid above x_min
  GrowthMode growth_mode = GrowthMode::plain;
  Tolerances tolerances;
  std::string output_dir;  ///< empty: no TSV output
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void validate(const RunConfig& cfg);
RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

/// Stage groups usable on their own.
json fit_stage(const PairedPanel& panel, const RunConfig& cfg);
json balance_stage(const PairedPanel& panel, const RunConfig& cfg);

/// Full analysis of one period pair; stage errors are recorded, not thrown.
json analyze_pair(const PairedPanel& panel, const RunConfig& cfg);

json run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr);
json run_pipeline(const RunConfig& cfg, const std::vector<Observation>& obs);
/// `log` receives progress lines tagged by period pair; `rejected` is echoed into the report.
json run_pipeline(const RunConfig& cfg, const std::vector<Observation>& obs, std::ostream* log,
                  std::size_t rejected = 0);

/// Serialised report text; identical inputs give identical bytes.
std::string dump_report(const json& report);

struct CheckResult {
  bool pass = false;
  std::vector<std::string> failures;
};

/// Recomputes both relation checks from the numbers in the report.
CheckResult run_check(const json& report);

}  // namespace qb
