#include "rai/mitigate.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <json.hpp>

#include "rai/error.hpp"
#include "rai/kernels.hpp"
#include "rai/metrics.hpp"

namespace rai {

// ---------------------------------------------------------------------------
// Reweighing

double WeightAssignment::weight(std::string_view group, int label) const {
  for (const auto& c : cells) {
    if (c.group == group && c.label == label) return c.weight;
  }
  throw Error(ErrorKind::argument,
              "no weight cell for group '" + std::string(group) + "', label " + std::to_string(label));
}

WeightAssignment reweigh(const AuditTable& table, const std::string& sensitive) {
  if (!table.has_column(sensitive) || table.role(sensitive) != ColumnRole::sensitive) {
    throw Error(ErrorKind::schema, "unknown sensitive column '" + sensitive + "'");
  }
  const Column& col = table.column(sensitive);
  const auto labels = table.labels();
  const std::size_t k = col.levels.size();
  const std::size_t n = table.n_rows();

  std::vector<std::int64_t> joint(k * 2, 0), by_group(k, 0);
  std::int64_t by_label[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(col.codes[i]);
    joint[g * 2 + labels[i]] += 1;
    by_group[g] += 1;
    by_label[labels[i]] += 1;
  }

  WeightAssignment out;
  out.sensitive = sensitive;
  std::vector<double> cell_weight(k * 2, 0.0);
  std::size_t observed_groups = 0;
  for (std::size_t g = 0; g < k; ++g) {
    if (by_group[g] > 0) ++observed_groups;
    for (int y = 0; y < 2; ++y) {
      const auto count = joint[g * 2 + static_cast<std::size_t>(y)];
      if (count == 0) continue;
      const double w = (static_cast<double>(by_group[g]) * static_cast<double>(by_label[y])) /
                       (static_cast<double>(n) * static_cast<double>(count));
      cell_weight[g * 2 + static_cast<std::size_t>(y)] = w;
      out.cells.push_back({col.levels[g], y, count, w});
    }
  }
  if (observed_groups < 2) {
    out.warnings.push_back("only one group in '" + sensitive + "'; all weights are 1");
  }
  for (std::size_t g = 0; g < k; ++g) {
    for (int y = 0; y < 2; ++y) {
      if (by_group[g] > 0 && by_label[y] > 0 && joint[g * 2 + static_cast<std::size_t>(y)] == 0) {
        out.warnings.push_back("group '" + col.levels[g] + "' has no rows with label " +
                               std::to_string(y) + "; weights cannot make '" + sensitive +
                               "' independent of the label");
      }
    }
  }
  out.row_weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.row_weights[i] = cell_weight[static_cast<std::size_t>(col.codes[i]) * 2 + labels[i]];
  }
  return out;
}

AuditTable with_weights(const AuditTable& table, const WeightAssignment& weights) {
  if (weights.row_weights.size() != table.n_rows()) {
    throw Error(ErrorKind::argument, "weight vector length does not match the table");
  }
  auto existing = table.columns_with_role(ColumnRole::weight);
  std::string name = existing.empty() ? "weight" : existing.front();
  if (existing.empty()) {
    while (table.has_column(name)) name += "_";
  }
  return table.with_column(Column::numeric(name, weights.row_weights), ColumnRole::weight);
}

// ---------------------------------------------------------------------------
// Threshold optimization

const char* to_string(PerformanceMetric metric) {
  return metric == PerformanceMetric::accuracy ? "accuracy" : "balanced_accuracy";
}

const char* to_string(FairnessObjective) { return "equal_opportunity"; }

PerformanceMetric parse_performance(std::string_view text) {
  if (text == "accuracy") return PerformanceMetric::accuracy;
  if (text == "balanced_accuracy") return PerformanceMetric::balanced_accuracy;
  throw Error(ErrorKind::parse, "unknown performance metric '" + std::string(text) + "'");
}

FairnessObjective parse_objective(std::string_view text) {
  if (text == "equal_opportunity") return FairnessObjective::equal_opportunity;
  throw Error(ErrorKind::parse, "unsupported mitigation objective '" + std::string(text) + "'");
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw Error(ErrorKind::argument, "a threshold grid needs at least 2 points");
  std::vector<double> grid(points);
  const double steps = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / steps;
  return grid;
}

void OptimizerConfig::validate() const {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::argument, "mitigation epsilon must be >= 0");
  if (grid.empty()) throw Error(ErrorKind::argument, "threshold grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw Error(ErrorKind::argument, "threshold grid values must lie in [0,1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::argument, "threshold grid must be strictly increasing");
    }
  }
}

double ThresholdPolicy::threshold_for(std::string_view group) const {
  for (const auto& g : groups) {
    if (g.group == group) return g.threshold;
  }
  throw Error(ErrorKind::argument, "group '" + std::string(group) + "' is not covered by the policy");
}

namespace {

struct Candidate {
  std::size_t window = 0;                    // index into the sorted TPR values
  std::vector<std::vector<std::size_t>> best;  // per group: grid indices of equal best value
};

}  // namespace

ThresholdPolicy optimize_thresholds(std::span<const double> scores,
                                    std::span<const std::uint8_t> labels,
                                    std::span<const std::int32_t> groups,
                                    const std::vector<std::string>& group_names,
                                    const OptimizerConfig& config) {
  config.validate();
  const std::size_t k = group_names.size();
  const std::size_t m = config.grid.size();
  if (k == 0) throw Error(ErrorKind::argument, "threshold optimization needs at least one group");
  for (auto g : groups) {
    if (g < 0 || static_cast<std::size_t>(g) >= k) {
      throw Error(ErrorKind::argument, "group code out of range");
    }
  }
  const auto counts = kernels::threshold_counts(scores, labels, groups, k, config.grid);

  std::int64_t total_pos = 0, total_neg = 0;
  for (std::size_t g = 0; g < k; ++g) {
    if (counts.positives[g] == 0) {
      throw Error(ErrorKind::argument, "group '" + group_names[g] +
                                           "' has no positive-label rows, so its TPR is undefined");
    }
    total_pos += counts.positives[g];
    total_neg += counts.negatives[g];
  }

  // Per (group, grid index): TPR and an integer performance value whose sum
  // over groups orders policies exactly like the configured metric.
  std::vector<double> tpr(k * m);
  std::vector<std::int64_t> value(k * m);
  std::vector<double> attainable;
  attainable.reserve(k * m);
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto tp = counts.tp_at(g, j);
      const auto tn = counts.negatives[g] - counts.fp_at(g, j);
      tpr[g * m + j] = static_cast<double>(tp) / static_cast<double>(counts.positives[g]);
      value[g * m + j] = config.performance == PerformanceMetric::accuracy
                             ? tp + tn
                             : tp * total_neg + tn * total_pos;
      attainable.push_back(tpr[g * m + j]);
    }
  }
  std::sort(attainable.begin(), attainable.end());
  attainable.erase(std::unique(attainable.begin(), attainable.end()), attainable.end());

  const double eps = config.epsilon;
  auto in_window = [&](double rate, double lower) {
    return rate >= lower && within(rate - lower, eps);
  };

  // Best total per window [t, t + eps]; windows missing some group are invalid.
  constexpr std::int64_t kInvalid = std::numeric_limits<std::int64_t>::min();
  const auto n_windows = static_cast<std::int64_t>(attainable.size());
  std::vector<std::int64_t> window_total(attainable.size(), kInvalid);
#pragma omp parallel for schedule(static) if (n_windows * static_cast<std::int64_t>(k * m) > 200000)
  for (std::int64_t w = 0; w < n_windows; ++w) {
    const double lower = attainable[static_cast<std::size_t>(w)];
    std::int64_t total = 0;
    for (std::size_t g = 0; g < k; ++g) {
      std::int64_t best = kInvalid;
      for (std::size_t j = 0; j < m; ++j) {
        if (in_window(tpr[g * m + j], lower)) best = std::max(best, value[g * m + j]);
      }
      if (best == kInvalid) {
        total = kInvalid;
        break;
      }
      total += best;
    }
    window_total[static_cast<std::size_t>(w)] = total;
  }

  const std::int64_t optimum = *std::max_element(window_total.begin(), window_total.end());
  if (optimum == kInvalid) {
    throw Error(ErrorKind::infeasible,
                "no threshold policy keeps every TPR gap within epsilon=" + format_number(eps) +
                    " on this grid; use a larger epsilon or a finer grid");
  }

  // Every optimal policy is a product of per-group argmax sets of some optimal window.
  std::vector<Candidate> optimal;
  for (std::size_t w = 0; w < attainable.size(); ++w) {
    if (window_total[w] != optimum) continue;
    Candidate c;
    c.window = w;
    c.best.resize(k);
    for (std::size_t g = 0; g < k; ++g) {
      std::int64_t best = kInvalid;
      for (std::size_t j = 0; j < m; ++j) {
        if (in_window(tpr[g * m + j], attainable[w])) best = std::max(best, value[g * m + j]);
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (in_window(tpr[g * m + j], attainable[w]) && value[g * m + j] == best) {
          c.best[g].push_back(j);
        }
      }
    }
    optimal.push_back(std::move(c));
  }

  // Tie-break 1: smallest max-min TPR spread among the optimal products.
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& c : optimal) {
    std::vector<double> lowers;
    for (std::size_t g = 0; g < k; ++g) {
      for (auto j : c.best[g]) lowers.push_back(tpr[g * m + j]);
    }
    std::sort(lowers.begin(), lowers.end());
    lowers.erase(std::unique(lowers.begin(), lowers.end()), lowers.end());
    for (double lower : lowers) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      bool complete = true;
      for (std::size_t g = 0; g < k && complete; ++g) {
        double pick = std::numeric_limits<double>::infinity();
        for (auto j : c.best[g]) {
          const double r = tpr[g * m + j];
          if (r >= lower) pick = std::min(pick, r);
        }
        complete = pick != std::numeric_limits<double>::infinity();
        lo = std::min(lo, pick);
        hi = std::max(hi, pick);
      }
      if (complete) best_gap = std::min(best_gap, hi - lo);
    }
  }

  // Tie-break 2: lexicographically smallest grid-index vector with that spread.
  std::vector<std::size_t> chosen;
  for (const auto& c : optimal) {
    std::vector<double> lowers;
    for (std::size_t g = 0; g < k; ++g) {
      for (auto j : c.best[g]) lowers.push_back(tpr[g * m + j]);
    }
    std::sort(lowers.begin(), lowers.end());
    lowers.erase(std::unique(lowers.begin(), lowers.end()), lowers.end());
    for (double lower : lowers) {
      std::vector<std::size_t> pick(k, m);
      bool complete = true;
      for (std::size_t g = 0; g < k && complete; ++g) {
        for (auto j : c.best[g]) {
          const double r = tpr[g * m + j];
          if (r >= lower && r - lower <= best_gap) {
            pick[g] = std::min(pick[g], j);
          }
        }
        complete = pick[g] != m;
      }
      if (complete && (chosen.empty() || pick < chosen)) chosen = std::move(pick);
    }
  }

  ThresholdPolicy policy;
  policy.objective = config.objective;
  policy.performance = config.performance;
  policy.epsilon = eps;
  std::int64_t tp_total = 0, tn_total = 0, correct_total = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t g = 0; g < k; ++g) {
    const std::size_t j = chosen[g];
    GroupThreshold gt;
    gt.group = group_names[g];
    gt.threshold = config.grid[j];
    gt.grid_index = j;
    gt.n = counts.positives[g] + counts.negatives[g];
    gt.positives = counts.positives[g];
    gt.true_positives = counts.tp_at(g, j);
    const auto tn = counts.negatives[g] - counts.fp_at(g, j);
    gt.correct = gt.true_positives + tn;
    gt.tpr = tpr[g * m + j];
    tp_total += gt.true_positives;
    tn_total += tn;
    correct_total += gt.correct;
    lo = std::min(lo, gt.tpr);
    hi = std::max(hi, gt.tpr);
    policy.groups.push_back(std::move(gt));
  }
  const auto n = total_pos + total_neg;
  policy.accuracy = static_cast<double>(correct_total) / static_cast<double>(n);
  const double tnr = total_neg > 0 ? static_cast<double>(tn_total) / static_cast<double>(total_neg) : 0.0;
  policy.balanced_accuracy =
      0.5 * (static_cast<double>(tp_total) / static_cast<double>(total_pos) +
             (total_neg > 0 ? tnr : 1.0));
  policy.max_tpr_gap = hi - lo;
  std::sort(policy.groups.begin(), policy.groups.end(),
            [](const auto& a, const auto& b) { return a.group < b.group; });
  return policy;
}

ThresholdPolicy optimize_thresholds(const AuditTable& table, const std::string& sensitive,
                                    const OptimizerConfig& config) {
  if (!table.has_column(sensitive) || table.role(sensitive) != ColumnRole::sensitive) {
    throw Error(ErrorKind::schema, "unknown sensitive column '" + sensitive + "'");
  }
  const Column& col = table.column(sensitive);
  const auto labels = table.labels();
  auto policy = optimize_thresholds(table.scores(), labels, col.codes, col.levels, config);
  policy.sensitive = sensitive;
  return policy;
}

AuditTable apply_policy(const AuditTable& table, const ThresholdPolicy& policy) {
  if (!table.has_column(policy.sensitive)) {
    throw Error(ErrorKind::schema, "policy refers to unknown column '" + policy.sensitive + "'");
  }
  const Column& col = table.column(policy.sensitive);
  if (col.type != ColumnType::categorical) {
    throw Error(ErrorKind::argument, "policy column '" + policy.sensitive + "' is not categorical");
  }
  std::vector<double> per_level(col.levels.size());
  std::vector<bool> used(col.levels.size(), false);
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    if (col.codes[i] >= 0) used[static_cast<std::size_t>(col.codes[i])] = true;
  }
  for (std::size_t l = 0; l < col.levels.size(); ++l) {
    if (used[l]) per_level[l] = policy.threshold_for(col.levels[l]);
  }
  const auto scores = table.scores();
  std::vector<std::uint8_t> predictions(table.n_rows());
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    if (col.codes[i] < 0) {
      throw Error(ErrorKind::argument, "row " + std::to_string(i) + " has a missing group");
    }
    predictions[i] = scores[i] >= per_level[static_cast<std::size_t>(col.codes[i])] ? 1 : 0;
  }
  return table.with_predictions(predictions);
}

std::string policy_document(const ThresholdPolicy& policy) {
  nlohmann::json doc;
  doc["kind"] = "threshold_policy";
  doc["sensitive"] = policy.sensitive;
  doc["objective"] = to_string(policy.objective);
  doc["performance"] = to_string(policy.performance);
  doc["epsilon"] = policy.epsilon;
  doc["thresholds"] = nlohmann::json::object();
  for (const auto& g : policy.groups) {
    doc["thresholds"][g.group] = g.threshold;
    doc["achieved_tpr"][g.group] = g.tpr;
  }
  doc["accuracy"] = policy.accuracy;
  doc["balanced_accuracy"] = policy.balanced_accuracy;
  doc["max_tpr_gap"] = policy.max_tpr_gap;
  return doc.dump(2) + "\n";
}

ThresholdPolicy parse_policy_document(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("policy document: ") + e.what());
  }
  try {
    if (doc.value("kind", "") != "threshold_policy") {
      throw Error(ErrorKind::parse, "policy document: kind must be 'threshold_policy'");
    }
    ThresholdPolicy policy;
    policy.sensitive = doc.at("sensitive").get<std::string>();
    policy.objective = parse_objective(doc.value("objective", "equal_opportunity"));
    policy.performance = parse_performance(doc.value("performance", "accuracy"));
    policy.epsilon = doc.value("epsilon", 0.0);
    for (const auto& [group, theta] : doc.at("thresholds").items()) {
      GroupThreshold gt;
      gt.group = group;
      gt.threshold = theta.get<double>();
      if (!(gt.threshold >= 0.0 && gt.threshold <= 1.0)) {
        throw Error(ErrorKind::parse, "policy document: threshold for '" + group + "' outside [0,1]");
      }
      if (doc.contains("achieved_tpr") && doc["achieved_tpr"].contains(group)) {
        gt.tpr = doc["achieved_tpr"][group].get<double>();
      }
      policy.groups.push_back(std::move(gt));
    }
    policy.accuracy = doc.value("accuracy", 0.0);
    policy.balanced_accuracy = doc.value("balanced_accuracy", 0.0);
    policy.max_tpr_gap = doc.value("max_tpr_gap", 0.0);
    return policy;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("policy document: ") + e.what());
  }
}

}  // namespace rai
