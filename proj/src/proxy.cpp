#include "rai/proxy.hpp"

#include <algorithm>
#include <cmath>

#include "rai/error.hpp"
#include "rai/kernels.hpp"
#include "rai/metrics.hpp"

namespace rai {

const char* to_string(AssociationMethod method) {
  return method == AssociationMethod::cramers_v ? "cramers_v" : "correlation_ratio";
}

std::optional<double> cramers_v(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::argument, "cramers_v: length mismatch");
  if (a.empty()) return std::nullopt;
  std::vector<std::int32_t> ca, cb;
  const std::size_t r = compact_codes(a, ca);
  const std::size_t c = compact_codes(b, cb);
  if (std::min(r, c) < 2) return std::nullopt;

  const auto joint = kernels::contingency(ca, r, cb, c);
  std::vector<double> row(r, 0.0), col(c, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      row[i] += static_cast<double>(joint[i * c + j]);
      col[j] += static_cast<double>(joint[i * c + j]);
    }
  }
  const double n = static_cast<double>(a.size());
  double chi2 = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row[i] * col[j] / n;
      const double d = static_cast<double>(joint[i * c + j]) - expected;
      chi2 += d * d / expected;
    }
  }
  const double v = std::sqrt(chi2 / (n * static_cast<double>(std::min(r, c) - 1)));
  return std::min(1.0, v);
}

std::optional<double> correlation_ratio(std::span<const double> values,
                                        std::span<const std::int32_t> categories) {
  if (values.size() != categories.size()) {
    throw Error(ErrorKind::argument, "correlation_ratio: length mismatch");
  }
  std::vector<std::int32_t> kept_codes;
  std::vector<double> kept;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) continue;
    kept.push_back(values[i]);
    kept_codes.push_back(categories[i]);
  }
  std::vector<std::int32_t> codes;
  const std::size_t k = compact_codes(kept_codes, codes);
  if (kept.empty() || k < 2) return std::nullopt;

  double total = 0.0;
  std::vector<double> sums(k, 0.0);
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    total += kept[i];
    sums[static_cast<std::size_t>(codes[i])] += kept[i];
    counts[static_cast<std::size_t>(codes[i])] += 1.0;
  }
  const double mean = total / static_cast<double>(kept.size());
  double ss_total = 0.0;
  for (double x : kept) ss_total += (x - mean) * (x - mean);
  if (ss_total <= 0.0) return std::nullopt;
  double ss_between = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double d = sums[g] / counts[g] - mean;
    ss_between += counts[g] * d * d;
  }
  return std::min(1.0, std::sqrt(ss_between / ss_total));
}

std::optional<Association> association(const Column& feature, const Column& sensitive) {
  if (sensitive.type != ColumnType::categorical) {
    throw Error(ErrorKind::argument, "sensitive column '" + sensitive.name + "' is not categorical");
  }
  if (feature.type == ColumnType::categorical) {
    auto v = cramers_v(feature.codes, sensitive.codes);
    if (!v) return std::nullopt;
    return Association{*v, AssociationMethod::cramers_v};
  }
  auto eta = correlation_ratio(feature.numbers, sensitive.codes);
  if (!eta) return std::nullopt;
  return Association{*eta, AssociationMethod::correlation_ratio};
}

std::size_t ProxyScan::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const auto& f) { return f.flagged; }));
}

ProxyScan proxy_scan(const AuditTable& table, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::argument, "proxy threshold must lie in [0,1]");
  }
  const auto features = table.columns_with_role(ColumnRole::feature);
  const auto sensitives = table.columns_with_role(ColumnRole::sensitive);

  struct Pair {
    const Column* feature;
    const Column* sensitive;
    std::optional<Association> result;
  };
  std::vector<Pair> pairs;
  for (const auto& f : features) {
    for (const auto& s : sensitives) pairs.push_back({&table.column(f), &table.column(s), {}});
  }

  // Pairs are independent and write to their own slot; order is restored by the sort below.
  const auto n_pairs = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (n_pairs > 1 && table.n_rows() > 4096)
  for (std::int64_t p = 0; p < n_pairs; ++p) {
    auto& pair = pairs[static_cast<std::size_t>(p)];
    pair.result = association(*pair.feature, *pair.sensitive);
  }

  ProxyScan scan;
  scan.threshold = threshold;
  for (const auto& pair : pairs) {
    if (!pair.result) {
      scan.warnings.push_back("association of '" + pair.feature->name + "' with '" +
                              pair.sensitive->name + "' is undefined (constant column)");
      continue;
    }
    scan.findings.push_back({pair.feature->name, pair.sensitive->name, pair.result->score,
                             pair.result->method, pair.result->score >= threshold});
  }
  std::sort(scan.findings.begin(), scan.findings.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.feature != b.feature) return a.feature < b.feature;
    return a.sensitive < b.sensitive;
  });
  return scan;
}

}  // namespace rai
