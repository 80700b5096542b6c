#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rai {

enum class ColumnRole {
  label,
  score,
  prediction,
  sensitive,
  feature,
  quasi_identifier,
  weight,
  ignore,
};

enum class ColumnType { categorical, numeric };

enum class Format { csv, jsonl };

const char* to_string(ColumnRole role);
ColumnRole parse_role(std::string_view text);
Format parse_format(std::string_view text);

/// Display label used for the explicit missing category.
inline constexpr std::string_view kMissingLabel = "(missing)";

/// A typed column. Categorical values are stored as codes into a sorted
/// level dictionary with -1 marking a missing cell; numeric values are
/// doubles with NaN marking a missing cell.
struct Column {
  std::string name;
  ColumnType type = ColumnType::numeric;
  std::vector<double> numbers;
  std::vector<std::string> levels;
  std::vector<std::int32_t> codes;

  std::size_t size() const {
    return type == ColumnType::numeric ? numbers.size() : codes.size();
  }
  bool is_missing(std::size_t row) const;
  /// Cell rendered as text; missing cells render as an empty string.
  std::string text(std::size_t row) const;
  /// Category label for categorical cells, kMissingLabel for missing ones.
  std::string_view category(std::size_t row) const;

  static Column numeric(std::string name, std::vector<double> values);
  static Column categorical(std::string name,
                            const std::vector<std::optional<std::string>>& values);

  friend bool operator==(const Column&, const Column&);
};

struct Schema {
  std::map<std::string, ColumnRole> roles;
  /// sensitive column -> privileged category
  std::map<std::string, std::string> privileged;
  /// optional per-column type override for feature / quasi-identifier columns
  std::map<std::string, ColumnType> types;
  /// favorable outcome is label 0 in the source; flips label and prediction
  /// and maps score s to 1 - s at load time
  bool invert_label = false;
};

struct LoadOptions {
  Format format = Format::csv;
  char delimiter = ',';
};

/// Validated, immutable table of classifier outputs plus the attributes the
/// audit needs. Columns not named in the schema carry the ignore role.
class AuditTable {
 public:
  AuditTable() = default;

  std::size_t n_rows() const { return n_rows_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<ColumnRole>& roles() const { return roles_; }

  bool has_column(std::string_view name) const;
  const Column& column(std::string_view name) const;
  ColumnRole role(std::string_view name) const;
  std::vector<std::string> columns_with_role(ColumnRole role) const;

  const std::string& label_column() const;
  std::optional<std::string> score_column() const;
  std::optional<std::string> prediction_column() const;
  const std::string& privileged(std::string_view sensitive) const;
  const std::map<std::string, std::string>& privileged_values() const {
    return privileged_;
  }

  std::vector<std::uint8_t> labels() const;
  /// Throws if the table has no prediction column.
  std::vector<std::uint8_t> predictions() const;
  /// Throws if the table has no score column.
  std::span<const double> scores() const;

  /// Returns a copy with `col` added under `role`; a column of the same
  /// name is replaced. Single-valued roles (label, score, prediction,
  /// weight) replace whichever column held the role before.
  AuditTable with_column(Column col, ColumnRole role) const;
  AuditTable with_predictions(const std::vector<std::uint8_t>& predictions) const;

  friend bool operator==(const AuditTable&, const AuditTable&) = default;

 private:
  friend AuditTable build_table(std::vector<Column>, std::vector<ColumnRole>,
                                std::map<std::string, std::string>);
  void validate() const;

  std::size_t n_rows_ = 0;
  std::vector<Column> columns_;
  std::vector<ColumnRole> roles_;
  std::map<std::string, std::string> privileged_;
};

/// Builds and validates a table from already typed columns.
AuditTable build_table(std::vector<Column> columns, std::vector<ColumnRole> roles,
                       std::map<std::string, std::string> privileged);

AuditTable load_table(std::istream& source, const Schema& schema,
                      const LoadOptions& options = {});
AuditTable load_table_file(const std::string& path, const Schema& schema,
                           const LoadOptions& options = {});

/// Writes the table in `format`. Numbers use the shortest round-trip
/// decimal, so load_table(serialize(t)) reproduces t.
std::string serialize(const AuditTable& table, Format format = Format::csv,
                      char delimiter = ',');
/// Schema that reproduces `table`'s roles, privileged values and types.
Schema schema_of(const AuditTable& table);

/// prediction_i = 1 iff score_i >= threshold.
AuditTable binarize(const AuditTable& table, double threshold);

std::string format_number(double value);

}  // namespace rai
