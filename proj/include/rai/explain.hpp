#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rai/dataset.hpp"

namespace rai {

struct SurrogateConfig {
  int max_depth = 4;
  std::size_t min_leaf = 5;

  void validate() const;
};

enum class SplitKind { numeric, categorical };

/// Node of a surrogate tree. Internal nodes route a row left when
/// `value < threshold` (numeric; missing values go right) or when the
/// category equals `category` (categorical, one-vs-rest).
struct TreeNode {
  bool leaf = true;
  int prediction = 0;
  std::size_t samples = 0;
  std::int64_t class_counts[2] = {0, 0};
  double impurity = 0.0;
  int depth = 0;

  std::size_t feature = 0;  // index into SurrogateTree::features
  SplitKind kind = SplitKind::numeric;
  double threshold = 0.0;
  std::int32_t category = 0;  // code; -1 is the missing category
  double impurity_decrease = 0.0;  // parent impurity minus weighted child impurity
  std::size_t left = 0;
  std::size_t right = 0;
};

struct FeatureSpec {
  std::string name;
  ColumnType type = ColumnType::numeric;
  std::vector<std::string> levels;  // categorical levels seen at fit time
};

/// Gini classification tree fitted to black-box predictions. Node 0 is the root.
struct SurrogateTree {
  std::vector<FeatureSpec> features;
  std::vector<TreeNode> nodes;
  SurrogateConfig config;

  int depth() const;
  std::size_t leaf_count() const;
  /// Index of the leaf a row of `columns` lands in.
  std::size_t route(std::span<const Column> columns, std::size_t row) const;
  int predict(std::span<const Column> columns, std::size_t row) const;
  /// Human-readable condition of an internal node, e.g. "x1 < 0.5".
  std::string condition(const TreeNode& node, bool left_branch) const;
};

SurrogateTree fit_surrogate(std::span<const Column> features,
                            std::span<const std::uint8_t> blackbox_predictions,
                            const SurrogateConfig& config = {});

/// Fraction of rows on which the tree agrees with the black box.
double surrogate_fidelity(const SurrogateTree& tree, std::span<const Column> features,
                          std::span<const std::uint8_t> blackbox_predictions);

struct FeatureImportance {
  std::string feature;
  double importance = 0.0;
};

/// Sample-weighted impurity decrease per feature, normalized to sum to 1.
/// Ranked by importance, ties in feature order; empty for a single leaf.
std::vector<FeatureImportance> feature_importance(const SurrogateTree& tree);

/// One line per leaf: the path conditions joined by " AND ", then
/// " → class c (n=k)". A single leaf renders as "always → class c (n=k)".
std::vector<std::string> rule_lines(const SurrogateTree& tree);

/// Feature columns of a table in column order.
std::vector<Column> feature_columns(const AuditTable& table);

}  // namespace rai
