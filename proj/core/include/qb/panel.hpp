#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qb {

struct Observation {
  std::string entity_id;
  std::int64_t period = 0;
  double value = 0.0;
};

struct ColumnMapping {
  std::string entity = "entity_id";
  std::string period = "period";
  std::string value = "value";
  char delimiter = ',';
};

struct LoadResult {
  std::vector<Observation> observations;
  std::size_t rejected = 0;          ///< rows dropped for value <= 0 or bad fields
  std::vector<std::size_t> rejected_lines;  ///< 1-based line numbers, capped at 100
};

struct Pair {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct PairedPanel {
  std::int64_t period_1 = 0;
  std::int64_t period_2 = 0;
  std::vector<std::string> entities;  ///< parallel to `pairs`
  std::vector<Pair> pairs;

  std::size_t count() const { return pairs.size(); }
};

LoadResult load_panel(const std::filesystem::path& path, const ColumnMapping& mapping = {});
LoadResult parse_panel(const std::string& text, const ColumnMapping& mapping = {},
                       const std::string& source = "<memory>");

void write_panel(const std::filesystem::path& path, const std::vector<Observation>& obs,
                 char delimiter = ',');

PairedPanel pair_periods(const std::vector<Observation>& obs, std::int64_t p1, std::int64_t p2);

/// Builds a panel directly from pairs; entity ids are synthesised.
PairedPanel make_panel(std::vector<Pair> pairs, std::int64_t p1 = 1, std::int64_t p2 = 2);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace qb
