#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rai/dataset.hpp"

namespace support {

/// Label / prediction / group table, optionally with scores.
inline rai::AuditTable table_of(const std::vector<int>& y, const std::vector<int>& yhat,
                                const std::vector<std::string>& group,
                                const std::string& privileged,
                                const std::vector<double>& scores = {}) {
  std::vector<std::optional<std::string>> g(group.begin(), group.end());
  std::vector<rai::Column> cols{rai::Column::numeric("y", std::vector<double>(y.begin(), y.end())),
                                rai::Column::categorical("group", g)};
  std::vector<rai::ColumnRole> roles{rai::ColumnRole::label, rai::ColumnRole::sensitive};
  if (!yhat.empty()) {
    cols.push_back(rai::Column::numeric("yhat", std::vector<double>(yhat.begin(), yhat.end())));
    roles.push_back(rai::ColumnRole::prediction);
  }
  if (!scores.empty()) {
    cols.push_back(rai::Column::numeric("score", scores));
    roles.push_back(rai::ColumnRole::score);
  }
  return rai::build_table(std::move(cols), std::move(roles), {{"group", privileged}});
}

/// Rows expanded from (group, label, prediction, count) cells.
struct Cell {
  std::string group;
  int y;
  int yhat;
  int count;
};

inline rai::AuditTable table_from_cells(const std::vector<Cell>& cells,
                                        const std::string& privileged) {
  std::vector<int> y, yhat;
  std::vector<std::string> g;
  for (const auto& c : cells) {
    for (int i = 0; i < c.count; ++i) {
      y.push_back(c.y);
      yhat.push_back(c.yhat);
      g.push_back(c.group);
    }
  }
  return table_of(y, yhat, g, privileged);
}

/// Fresh scratch directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("raiaudit-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Shifted-score fixture: group b's scores sit 0.2 below group a's.
inline rai::AuditTable shifted_scores() {
  const std::vector<double> s{0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.2, 0.1,
                              0.7, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.1};
  const std::vector<int> y{1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0};
  std::vector<std::string> g(16, "a");
  std::fill(g.begin() + 8, g.end(), "b");
  return table_of(y, {}, g, "a", s);
}

}  // namespace support
