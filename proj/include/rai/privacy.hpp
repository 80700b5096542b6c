#pragma once

#include <map>
#include <string>
#include <vector>

#include "rai/dataset.hpp"

namespace rai {

/// Binning for one quasi-identifier. Numeric columns use sorted `edges`
/// giving bins (-inf, e0), [e0, e1), ..., [e_last, inf); categorical
/// columns use `merge`, mapping a value to the label of its merged group
/// (unmapped values stay themselves).
struct BinSpec {
  std::vector<double> edges;
  std::map<std::string, std::string> merge;
};

using BinningSpec = std::map<std::string, BinSpec>;

struct EquivalenceClass {
  std::vector<std::string> key;  // one label per quasi-identifier, after binning
  std::vector<std::size_t> rows;
  std::size_t size() const { return rows.size(); }
};

struct RiskScan {
  std::vector<std::string> quasi_identifiers;
  std::size_t k = 5;
  std::size_t n_rows = 0;
  /// Ordered by size ascending, then key lexicographically.
  std::vector<EquivalenceClass> classes;
  double unique_rate = 0.0;
  /// Row indices in classes smaller than k, ascending.
  std::vector<std::size_t> violating_rows;

  /// Violating rows when the requirement is `k_required` instead of k.
  std::vector<std::size_t> violations_at(std::size_t k_required) const;
};

/// Label of one cell after binning, as used in equivalence-class keys.
std::string bin_label(const Column& column, std::size_t row, const BinSpec* spec);

RiskScan reidentification_scan(const AuditTable& table,
                               const std::vector<std::string>& quasi_identifiers,
                               std::size_t k = 5, const BinningSpec& binning = {});

}  // namespace rai
