#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rai/dataset.hpp"
#include "rai/kernels.hpp"

namespace rai {

/// A real value that may be undefined (empty denominator). Undefined values
/// are never coerced to a number anywhere in the toolkit.
using Maybe = std::optional<double>;

/// Slack applied to every "<= epsilon" comparison so that rational rates
/// equal to epsilon are not rejected by binary rounding.
inline constexpr double kToleranceSlack = 1e-12;

inline bool within(double value, double epsilon) { return value <= epsilon + kToleranceSlack; }

struct GroupConfusion {
  std::string group;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
  std::int64_t n = 0;
  double base_rate = 0.0;       // P(Y=1 | group)
  double selection_rate = 0.0;  // P(Yhat=1 | group)
  Maybe tpr;
  Maybe fpr;
  Maybe ppv;

  static GroupConfusion from_cells(std::string group, const kernels::ConfusionCells& cells);
};

/// Keyed by category label, so iteration order is the sorted group order.
using ConfusionMap = std::map<std::string, GroupConfusion>;

ConfusionMap confusion_by_group(const AuditTable& table, const std::string& sensitive);
ConfusionMap confusion_by_group(std::span<const std::uint8_t> labels,
                                std::span<const std::uint8_t> predictions,
                                const Column& sensitive);

struct DisparateImpactBand {
  double low = 0.8;
  double high = 1.25;

  friend bool operator==(const DisparateImpactBand&, const DisparateImpactBand&) = default;
};

struct MetricConfig {
  double epsilon = 0.10;
  double alpha = 1.0;  // generalized-entropy order; 1 is the Theil index
  DisparateImpactBand di_band;

  void validate() const;
};

enum class Verdict { pass, fail, undefined };
const char* to_string(Verdict verdict);

/// Disparities of one non-privileged group, signed as group minus privileged.
struct GroupDisparity {
  std::string group;
  Maybe spd;
  Maybe di;
  Maybe eod;
  Maybe aod;
  Maybe ppd;
  Maybe fpr_diff;
};

/// Value of the worst group per metric (largest |difference|, or for
/// disparate impact the largest |ln DI|). Undefined if any group is.
struct DisparitySummary {
  Maybe spd;
  Maybe di;
  Maybe eod;
  Maybe aod;
  Maybe ppd;
};

struct FairnessReport {
  std::string privileged;
  double epsilon = 0.10;
  std::vector<GroupDisparity> groups;
  Verdict independence = Verdict::undefined;
  Verdict separation = Verdict::undefined;
  Verdict sufficiency = Verdict::undefined;
  DisparitySummary summary;
};

FairnessReport fairness_report(const ConfusionMap& confusions, const std::string& privileged,
                               const MetricConfig& config = {});

/// Per-individual benefit b_i = yhat_i - y_i + 1.
std::vector<double> benefits(std::span<const std::uint8_t> labels,
                             std::span<const std::uint8_t> predictions);

/// GE(alpha) of a nonnegative benefit vector; undefined when the mean is 0
/// (or, for alpha = 0, when any benefit is 0).
Maybe generalized_entropy(std::span<const double> benefit, double alpha);

Maybe theil_index(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions,
                  const MetricConfig& config = {});

/// Plug-in mutual information in nats between two categorical code vectors.
/// Negative codes (missing) form their own category.
double mutual_information(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

/// Same estimator over weighted rows.
double weighted_mutual_information(std::span<const std::int32_t> a,
                                   std::span<const std::int32_t> b,
                                   std::span<const double> weights);

/// Codes of a binary vector, for feeding 0/1 columns to mutual_information.
std::vector<std::int32_t> as_codes(std::span<const std::uint8_t> values);

/// Remaps codes (which may contain -1) onto [0, k); returns k.
std::size_t compact_codes(std::span<const std::int32_t> codes, std::vector<std::int32_t>& out);

}  // namespace rai
