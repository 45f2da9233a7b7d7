#include "qb/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "qb/error.hpp"

namespace qb {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_int(std::string_view s, std::int64_t& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

struct KeyHash {
  std::size_t operator()(const std::pair<std::string, std::int64_t>& k) const {
    return std::hash<std::string>()(k.first) ^ (std::hash<std::int64_t>()(k.second) * 0x9e3779b97f4a7c15ULL);
  }
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

LoadResult parse_panel(const std::string& text, const ColumnMapping& mapping, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw DataError(source + ": malformed header: file is empty");
  header = split(header_line, mapping.delimiter);

  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError(source + ": malformed header: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ce = column(mapping.entity);
  const std::size_t cp = column(mapping.period);
  const std::size_t cv = column(mapping.value);
  const std::size_t need = std::max({ce, cp, cv}) + 1;

  LoadResult res;
  std::unordered_set<std::pair<std::string, std::int64_t>, KeyHash> seen;
  auto reject = [&] {
    ++res.rejected;
    if (res.rejected_lines.size() < 100) res.rejected_lines.push_back(lineno);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, mapping.delimiter);
    Observation o;
    if (f.size() < need || f[ce].empty() || !parse_int(f[cp], o.period) ||
        !parse_double(f[cv], o.value) || !std::isfinite(o.value) || o.value <= 0.0) {
      reject();
      continue;
    }
    o.entity_id = std::string(f[ce]);
    if (!seen.emplace(o.entity_id, o.period).second)
      throw DataError(source + ": duplicate (entity, period) key (" + o.entity_id + ", " +
                      std::to_string(o.period) + ") at line " + std::to_string(lineno));
    res.observations.push_back(std::move(o));
  }
  if (res.observations.empty()) throw DataError(source + ": zero valid rows");
  return res;
}

LoadResult load_panel(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open panel file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_panel(ss.str(), mapping, path.string());
}

void write_panel(const std::filesystem::path& path, const std::vector<Observation>& obs, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write panel file: " + path.string());
  out << "entity_id" << delimiter << "period" << delimiter << "value\n";
  for (const auto& o : obs)
    out << o.entity_id << delimiter << o.period << delimiter << format_double(o.value) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

PairedPanel pair_periods(const std::vector<Observation>& obs, std::int64_t p1, std::int64_t p2) {
  if (p1 >= p2)
    throw ConfigError("pair_periods: period_1 (" + std::to_string(p1) + ") must precede period_2 (" +
                      std::to_string(p2) + ")");
  std::unordered_map<std::string_view, double> second;
  for (const auto& o : obs)
    if (o.period == p2 && o.value > 0.0) second.emplace(o.entity_id, o.value);

  std::vector<std::pair<std::string_view, Pair>> rows;
  for (const auto& o : obs) {
    if (o.period != p1 || !(o.value > 0.0)) continue;
    const auto it = second.find(o.entity_id);
    if (it != second.end()) rows.push_back({o.entity_id, Pair{o.value, it->second}});
  }
  if (rows.empty())
    throw DataError("pair_periods: no entity has positive values in both " + std::to_string(p1) +
                    " and " + std::to_string(p2));
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Duplicated input observations would pair twice; keep the first.
  rows.erase(std::unique(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
             rows.end());

  PairedPanel p;
  p.period_1 = p1;
  p.period_2 = p2;
  p.entities.reserve(rows.size());
  p.pairs.reserve(rows.size());
  for (const auto& [id, pr] : rows) {
    p.entities.emplace_back(id);
    p.pairs.push_back(pr);
  }
  return p;
}

PairedPanel make_panel(std::vector<Pair> pairs, std::int64_t p1, std::int64_t p2) {
  PairedPanel p;
  p.period_1 = p1;
  p.period_2 = p2;
  p.entities.reserve(pairs.size());
  char buf[32];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "e%07zu", i);
    p.entities.emplace_back(buf);
  }
  p.pairs = std::move(pairs);
  return p;
}

}  // namespace qb
