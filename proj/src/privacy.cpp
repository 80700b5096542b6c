#include "rai/privacy.hpp"

#include <algorithm>
#include <cmath>

#include "rai/error.hpp"

namespace rai {

std::string bin_label(const Column& column, std::size_t row, const BinSpec* spec) {
  if (column.is_missing(row)) return std::string(kMissingLabel);
  if (column.type == ColumnType::categorical) {
    std::string value(column.category(row));
    if (spec) {
      auto it = spec->merge.find(value);
      if (it != spec->merge.end()) return it->second;
    }
    return value;
  }
  const double v = column.numbers[row];
  if (!spec || spec->edges.empty()) return format_number(v);
  const auto& e = spec->edges;
  auto it = std::upper_bound(e.begin(), e.end(), v);
  if (it == e.begin()) return "(-inf," + format_number(e.front()) + ")";
  if (it == e.end()) return "[" + format_number(e.back()) + ",inf)";
  return "[" + format_number(*(it - 1)) + "," + format_number(*it) + ")";
}

std::vector<std::size_t> RiskScan::violations_at(std::size_t k_required) const {
  std::vector<std::size_t> rows;
  for (const auto& c : classes) {
    if (c.size() < k_required) rows.insert(rows.end(), c.rows.begin(), c.rows.end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

RiskScan reidentification_scan(const AuditTable& table,
                               const std::vector<std::string>& quasi_identifiers, std::size_t k,
                               const BinningSpec& binning) {
  if (quasi_identifiers.empty()) {
    throw Error(ErrorKind::argument, "re-identification scan needs at least one quasi-identifier");
  }
  if (k < 1) throw Error(ErrorKind::argument, "k must be >= 1");
  std::vector<const Column*> cols;
  std::vector<const BinSpec*> specs;
  for (const auto& name : quasi_identifiers) {
    cols.push_back(&table.column(name));
    auto it = binning.find(name);
    specs.push_back(it == binning.end() ? nullptr : &it->second);
  }
  for (const auto& [name, spec] : binning) {
    if (std::find(quasi_identifiers.begin(), quasi_identifiers.end(), name) ==
        quasi_identifiers.end()) {
      throw Error(ErrorKind::schema, "binning given for '" + name + "', which is not a quasi-identifier");
    }
    if (!std::is_sorted(spec.edges.begin(), spec.edges.end()) ||
        std::adjacent_find(spec.edges.begin(), spec.edges.end()) != spec.edges.end()) {
      throw Error(ErrorKind::argument, "bin edges for '" + name + "' must be strictly increasing");
    }
  }

  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    std::vector<std::string> key;
    key.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) key.push_back(bin_label(*cols[c], r, specs[c]));
    groups[std::move(key)].push_back(r);
  }

  RiskScan scan;
  scan.quasi_identifiers = quasi_identifiers;
  scan.k = k;
  scan.n_rows = table.n_rows();
  std::size_t singletons = 0;
  for (auto& [key, rows] : groups) {
    if (rows.size() == 1) ++singletons;
    scan.classes.push_back({key, std::move(rows)});
  }
  // groups is already keyed lexicographically; stable sort keeps that within equal sizes
  std::stable_sort(scan.classes.begin(), scan.classes.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  scan.unique_rate =
      scan.n_rows == 0 ? 0.0 : static_cast<double>(singletons) / static_cast<double>(scan.n_rows);
  scan.violating_rows = scan.violations_at(k);
  return scan;
}

}  // namespace rai
