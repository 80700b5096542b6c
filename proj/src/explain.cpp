#include "rai/explain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rai/error.hpp"

namespace rai {

namespace {

// Gains closer than this are treated as ties so that the earlier feature
// (then the smaller split value) wins regardless of rounding noise.
constexpr double kGainTolerance = 1e-12;

double gini(std::int64_t c0, std::int64_t c1) {
  const std::int64_t n = c0 + c1;
  if (n == 0) return 0.0;
  const double p0 = static_cast<double>(c0) / static_cast<double>(n);
  const double p1 = static_cast<double>(c1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  bool found = false;
  double gain = 0.0;
  std::size_t feature = 0;
  SplitKind kind = SplitKind::numeric;
  double threshold = 0.0;
  std::int32_t category = 0;
};

class Builder {
 public:
  Builder(std::span<const Column> features, std::span<const std::uint8_t> target,
          const SurrogateConfig& config, SurrogateTree& tree)
      : features_(features), target_(target), config_(config), tree_(tree) {}

  std::size_t build(std::vector<std::size_t> rows, int depth) {
    const std::size_t index = tree_.nodes.size();
    tree_.nodes.emplace_back();
    {
      TreeNode& node = tree_.nodes[index];
      for (auto r : rows) node.class_counts[target_[r]] += 1;
      node.samples = rows.size();
      node.depth = depth;
      node.impurity = gini(node.class_counts[0], node.class_counts[1]);
      node.prediction = node.class_counts[1] > node.class_counts[0] ? 1 : 0;
    }
    const TreeNode snapshot = tree_.nodes[index];
    const bool pure = snapshot.class_counts[0] == 0 || snapshot.class_counts[1] == 0;
    if (pure || depth >= config_.max_depth || rows.size() < 2 * config_.min_leaf) return index;

    const Split split = best_split(rows, snapshot);
    if (!split.found) return index;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (goes_left(split, r) ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    {
      TreeNode& node = tree_.nodes[index];
      node.leaf = false;
      node.feature = split.feature;
      node.kind = split.kind;
      node.threshold = split.threshold;
      node.category = split.category;
      node.impurity_decrease = split.gain;
    }
    const std::size_t l = build(std::move(left), depth + 1);
    const std::size_t r = build(std::move(right), depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = r;
    return index;
  }

 private:
  bool goes_left(const Split& s, std::size_t row) const {
    const Column& col = features_[s.feature];
    if (s.kind == SplitKind::numeric) return col.numbers[row] < s.threshold;  // NaN -> right
    return col.codes[row] == s.category;
  }

  void consider(Split& best, const TreeNode& parent, std::int64_t l0, std::int64_t l1,
                std::size_t feature, SplitKind kind, double threshold, std::int32_t category) {
    const std::int64_t r0 = parent.class_counts[0] - l0;
    const std::int64_t r1 = parent.class_counts[1] - l1;
    const auto nl = static_cast<std::size_t>(l0 + l1);
    const auto nr = static_cast<std::size_t>(r0 + r1);
    if (nl < config_.min_leaf || nr < config_.min_leaf) return;
    const double n = static_cast<double>(parent.samples);
    const double gain = parent.impurity - (static_cast<double>(nl) / n) * gini(l0, l1) -
                        (static_cast<double>(nr) / n) * gini(r0, r1);
    if (gain <= kGainTolerance) return;
    if (!best.found || gain > best.gain + kGainTolerance) {
      best = {true, gain, feature, kind, threshold, category};
    }
  }

  Split best_split(const std::vector<std::size_t>& rows, const TreeNode& parent) {
    Split best;
    for (std::size_t f = 0; f < features_.size(); ++f) {
      const Column& col = features_[f];
      if (col.type == ColumnType::numeric) {
        std::vector<std::pair<double, std::uint8_t>> values;
        values.reserve(rows.size());
        for (auto r : rows) {
          if (!std::isnan(col.numbers[r])) values.emplace_back(col.numbers[r], target_[r]);
        }
        std::sort(values.begin(), values.end());
        std::int64_t l0 = 0, l1 = 0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
          (values[i].second ? l1 : l0) += 1;
          const double a = values[i].first;
          const double b = values[i + 1].first;
          if (!(a < b)) continue;
          double mid = a + (b - a) / 2.0;
          if (!(a < mid)) mid = b;
          consider(best, parent, l0, l1, f, SplitKind::numeric, mid, 0);
        }
      } else {
        // one-vs-rest per category present, in code order (missing first)
        std::vector<std::pair<std::int32_t, std::uint8_t>> cats;
        cats.reserve(rows.size());
        for (auto r : rows) cats.emplace_back(col.codes[r], target_[r]);
        std::sort(cats.begin(), cats.end());
        for (std::size_t i = 0; i < cats.size();) {
          std::int64_t c0 = 0, c1 = 0;
          std::size_t j = i;
          for (; j < cats.size() && cats[j].first == cats[i].first; ++j) {
            (cats[j].second ? c1 : c0) += 1;
          }
          consider(best, parent, c0, c1, f, SplitKind::categorical, 0.0, cats[i].first);
          i = j;
        }
      }
    }
    return best;
  }

  std::span<const Column> features_;
  std::span<const std::uint8_t> target_;
  const SurrogateConfig& config_;
  SurrogateTree& tree_;
};

void check_columns(const SurrogateTree& tree, std::span<const Column> columns) {
  if (columns.size() != tree.features.size()) {
    throw Error(ErrorKind::schema, "surrogate was fitted on " + std::to_string(tree.features.size()) +
                                       " features, got " + std::to_string(columns.size()));
  }
  for (std::size_t f = 0; f < columns.size(); ++f) {
    if (columns[f].name != tree.features[f].name || columns[f].type != tree.features[f].type) {
      throw Error(ErrorKind::schema, "feature column " + std::to_string(f) + " ('" +
                                         columns[f].name + "') does not match the fitted feature '" +
                                         tree.features[f].name + "'");
    }
  }
}

}  // namespace

void SurrogateConfig::validate() const {
  if (max_depth < 0) throw Error(ErrorKind::argument, "max_depth must be >= 0");
  if (min_leaf < 1) throw Error(ErrorKind::argument, "min_leaf must be >= 1");
}

int SurrogateTree::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t SurrogateTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf; }));
}

std::size_t SurrogateTree::route(std::span<const Column> columns, std::size_t row) const {
  std::size_t at = 0;
  while (!nodes[at].leaf) {
    const TreeNode& node = nodes[at];
    const Column& col = columns[node.feature];
    bool left;
    if (node.kind == SplitKind::numeric) {
      left = col.numbers[row] < node.threshold;
    } else if (node.category < 0) {
      left = col.codes[row] < 0;
    } else {
      left = col.codes[row] >= 0 &&
             col.category(row) == features[node.feature].levels[static_cast<std::size_t>(node.category)];
    }
    at = left ? node.left : node.right;
  }
  return at;
}

int SurrogateTree::predict(std::span<const Column> columns, std::size_t row) const {
  return nodes[route(columns, row)].prediction;
}

std::string SurrogateTree::condition(const TreeNode& node, bool left_branch) const {
  const FeatureSpec& f = features[node.feature];
  if (node.kind == SplitKind::numeric) {
    return f.name + (left_branch ? " < " : " >= ") + format_number(node.threshold);
  }
  const std::string value = node.category < 0
                                ? std::string(kMissingLabel)
                                : f.levels[static_cast<std::size_t>(node.category)];
  return f.name + (left_branch ? " == " : " != ") + value;
}

SurrogateTree fit_surrogate(std::span<const Column> features,
                            std::span<const std::uint8_t> blackbox_predictions,
                            const SurrogateConfig& config) {
  config.validate();
  if (features.empty()) throw Error(ErrorKind::argument, "surrogate needs at least one feature column");
  const std::size_t n = blackbox_predictions.size();
  for (const auto& col : features) {
    if (col.size() != n) {
      throw Error(ErrorKind::argument, "feature '" + col.name + "' length differs from predictions");
    }
  }
  if (n == 0) {
    throw Error(ErrorKind::argument, "surrogate needs at least one row");
  }
  for (auto p : blackbox_predictions) {
    if (p > 1) throw Error(ErrorKind::argument, "black-box predictions must be 0 or 1");
  }

  SurrogateTree tree;
  tree.config = config;
  for (const auto& col : features) tree.features.push_back({col.name, col.type, col.levels});
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  Builder(features, blackbox_predictions, config, tree).build(std::move(rows), 0);
  return tree;
}

double surrogate_fidelity(const SurrogateTree& tree, std::span<const Column> features,
                          std::span<const std::uint8_t> blackbox_predictions) {
  check_columns(tree, features);
  const std::size_t n = blackbox_predictions.size();
  if (n == 0) throw Error(ErrorKind::argument, "fidelity of an empty evaluation set");
  for (const auto& col : features) {
    if (col.size() != n) {
      throw Error(ErrorKind::argument, "feature '" + col.name + "' length differs from predictions");
    }
  }
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.predict(features, i) == blackbox_predictions[i]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(n);
}

std::vector<FeatureImportance> feature_importance(const SurrogateTree& tree) {
  std::vector<double> raw(tree.features.size(), 0.0);
  const double root = static_cast<double>(tree.nodes.front().samples);
  bool any = false;
  for (const auto& node : tree.nodes) {
    if (node.leaf) continue;
    raw[node.feature] += static_cast<double>(node.samples) / root * node.impurity_decrease;
    any = true;
  }
  std::vector<FeatureImportance> out;
  if (!any) return out;
  double total = 0.0;
  for (double v : raw) total += v;
  std::vector<std::size_t> order;
  for (std::size_t f = 0; f < raw.size(); ++f) {
    if (raw[f] > 0.0) order.push_back(f);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
  for (auto f : order) out.push_back({tree.features[f].name, raw[f] / total});
  return out;
}

std::vector<std::string> rule_lines(const SurrogateTree& tree) {
  std::vector<std::string> lines;
  std::vector<std::string> path;
  std::function<void(std::size_t)> walk = [&](std::size_t at) {
    const TreeNode& node = tree.nodes[at];
    if (node.leaf) {
      std::string text;
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) text += " AND ";
        text += path[i];
      }
      if (text.empty()) text = "always";
      text += " → class " + std::to_string(node.prediction) + " (n=" +
              std::to_string(node.samples) + ")";
      lines.push_back(std::move(text));
      return;
    }
    path.push_back(tree.condition(node, true));
    walk(node.left);
    path.back() = tree.condition(node, false);
    walk(node.right);
    path.pop_back();
  };
  walk(0);
  return lines;
}

std::vector<Column> feature_columns(const AuditTable& table) {
  std::vector<Column> out;
  for (const auto& name : table.columns_with_role(ColumnRole::feature)) {
    out.push_back(table.column(name));
  }
  return out;
}

}  // namespace rai
