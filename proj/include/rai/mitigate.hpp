#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rai/dataset.hpp"

namespace rai {

// ---------------------------------------------------------------------------
// Reweighing

struct WeightCell {
  std::string group;
  int label = 0;
  std::int64_t count = 0;
  double weight = 1.0;
};

/// Per-(group, label) weights P(s) P(y) / P(s, y) from empirical
/// frequencies, expanded to one weight per row.
struct WeightAssignment {
  std::string sensitive;
  std::vector<WeightCell> cells;  // sorted by group, then label
  std::vector<double> row_weights;
  std::vector<std::string> warnings;

  double weight(std::string_view group, int label) const;
};

WeightAssignment reweigh(const AuditTable& table, const std::string& sensitive);

/// Adds (or replaces) the weight column.
AuditTable with_weights(const AuditTable& table, const WeightAssignment& weights);

// ---------------------------------------------------------------------------
// Per-group threshold optimization

enum class PerformanceMetric { accuracy, balanced_accuracy };
enum class FairnessObjective { equal_opportunity };

const char* to_string(PerformanceMetric metric);
const char* to_string(FairnessObjective objective);
PerformanceMetric parse_performance(std::string_view text);
FairnessObjective parse_objective(std::string_view text);

/// Evenly spaced thresholds i / (points - 1), i = 0 .. points - 1.
std::vector<double> uniform_grid(std::size_t points = 101);

struct OptimizerConfig {
  double epsilon = 0.10;
  std::vector<double> grid = uniform_grid();
  PerformanceMetric performance = PerformanceMetric::accuracy;
  FairnessObjective objective = FairnessObjective::equal_opportunity;

  void validate() const;
};

struct GroupThreshold {
  std::string group;
  double threshold = 0.5;
  std::size_t grid_index = 0;
  std::int64_t n = 0;
  std::int64_t positives = 0;
  std::int64_t true_positives = 0;
  std::int64_t correct = 0;
  double tpr = 0.0;
};

struct ThresholdPolicy {
  std::string sensitive;
  FairnessObjective objective = FairnessObjective::equal_opportunity;
  PerformanceMetric performance = PerformanceMetric::accuracy;
  double epsilon = 0.10;
  std::vector<GroupThreshold> groups;  // sorted by group name
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double max_tpr_gap = 0.0;

  /// Throws naming the group when it is not covered by the policy.
  double threshold_for(std::string_view group) const;
};

/// Chooses one grid threshold per group so that every pairwise TPR gap is
/// at most epsilon and the chosen performance metric is maximal over the
/// whole grid product. Ties go to the smaller maximum TPR gap, then to the
/// lexicographically smallest threshold vector in group order.
///
/// The search slides a TPR window [t, t + epsilon] over every attainable TPR
/// value t. Performance is a sum of per-group terms, so inside a window each
/// group independently takes its best threshold; the best window is the
/// global optimum because any feasible policy lies in the window anchored
/// at its own smallest TPR.
ThresholdPolicy optimize_thresholds(std::span<const double> scores,
                                    std::span<const std::uint8_t> labels,
                                    std::span<const std::int32_t> groups,
                                    const std::vector<std::string>& group_names,
                                    const OptimizerConfig& config);

ThresholdPolicy optimize_thresholds(const AuditTable& table, const std::string& sensitive,
                                    const OptimizerConfig& config = {});

/// prediction_i = 1 iff score_i >= threshold of the row's group.
AuditTable apply_policy(const AuditTable& table, const ThresholdPolicy& policy);

/// Standalone policy document (JSON) accepted back by parse_policy_document.
std::string policy_document(const ThresholdPolicy& policy);
ThresholdPolicy parse_policy_document(std::string_view text);

}  // namespace rai
