#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rai/dataset.hpp"

namespace rai {

enum class AssociationMethod { cramers_v, correlation_ratio };
const char* to_string(AssociationMethod method);

struct Association {
  double score = 0.0;
  AssociationMethod method = AssociationMethod::cramers_v;
};

/// Cramer's V without small-sample correction, sqrt(chi2 / (n (min(r,c) - 1))),
/// over the observed categories (missing is a category). Undefined when
/// either side has a single observed category.
std::optional<double> cramers_v(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

/// Correlation ratio eta = sqrt(SS_between / SS_total) of a numeric column
/// across categories. Rows with a NaN value are skipped. Undefined when the
/// remaining values are constant or fall into fewer than two categories.
std::optional<double> correlation_ratio(std::span<const double> values,
                                        std::span<const std::int32_t> categories);

/// Dispatches on the feature column's type. The sensitive column must be categorical.
std::optional<Association> association(const Column& feature, const Column& sensitive);

struct ProxyFinding {
  std::string feature;
  std::string sensitive;
  double score = 0.0;
  AssociationMethod method = AssociationMethod::cramers_v;
  bool flagged = false;
};

struct ProxyScan {
  double threshold = 0.5;
  /// Sorted by score descending, then feature name, then sensitive name.
  std::vector<ProxyFinding> findings;
  /// One entry per pair whose score is undefined.
  std::vector<std::string> warnings;

  std::size_t flagged_count() const;
};

ProxyScan proxy_scan(const AuditTable& table, double threshold = 0.5);

}  // namespace rai
