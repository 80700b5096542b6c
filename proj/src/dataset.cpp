#include "rai/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "rai/error.hpp"

namespace rai {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::schema: return "schema mismatch";
    case ErrorKind::invariant: return "invariant violation";
    case ErrorKind::argument: return "invalid argument";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

namespace {

constexpr std::pair<ColumnRole, const char*> kRoleNames[] = {
    {ColumnRole::label, "label"},
    {ColumnRole::score, "score"},
    {ColumnRole::prediction, "prediction"},
    {ColumnRole::sensitive, "sensitive"},
    {ColumnRole::feature, "feature"},
    {ColumnRole::quasi_identifier, "quasi_identifier"},
    {ColumnRole::weight, "weight"},
    {ColumnRole::ignore, "ignore"},
};

bool single_valued(ColumnRole role) {
  return role == ColumnRole::label || role == ColumnRole::score ||
         role == ColumnRole::prediction || role == ColumnRole::weight;
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// One raw cell: nullopt means missing.
using RawCell = std::optional<std::string>;

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<RawCell>> columns;  // column-major
  std::vector<std::size_t> line_of_row;       // 1-based source line per data row
};

std::string row_ref(const RawTable& raw, std::size_t row) {
  return "row " + std::to_string(row) + " (line " + std::to_string(raw.line_of_row[row]) + ")";
}

RawTable parse_csv(std::istream& in, char delim) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() >= 3 && data.compare(0, 3, "\xEF\xBB\xBF") == 0) data.erase(0, 3);

  std::vector<std::vector<RawCell>> records;
  std::vector<std::size_t> record_lines;
  std::vector<RawCell> record;
  std::string field;
  bool quoted = false;
  bool in_quotes = false;
  bool record_open = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    if (field.empty() && !quoted) {
      record.emplace_back(std::nullopt);
    } else {
      record.emplace_back(field);
    }
    field.clear();
    quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // skip blank lines
    if (!(record.size() == 1 && !record[0])) {
      records.push_back(std::move(record));
      record_lines.push_back(record_line);
    }
    record.clear();
    record_open = false;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (!record_open) {
      record_open = true;
      record_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) {
        throw Error(ErrorKind::parse,
                    "line " + std::to_string(line) + ": stray quote inside unquoted field");
      }
      in_quotes = true;
      quoted = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      if (quoted) {
        throw Error(ErrorKind::parse,
                    "line " + std::to_string(line) + ": text after closing quote");
      }
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorKind::parse, "line " + std::to_string(record_line) + ": unterminated quote");
  }
  if (record_open) end_record();

  if (records.empty()) throw Error(ErrorKind::parse, "empty input: no header row");
  RawTable raw;
  for (std::size_t c = 0; c < records[0].size(); ++c) {
    if (!records[0][c]) {
      throw Error(ErrorKind::parse, "header column " + std::to_string(c) + " has an empty name");
    }
    raw.header.push_back(*records[0][c]);
  }
  raw.columns.resize(raw.header.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != raw.header.size()) {
      throw Error(ErrorKind::parse, "line " + std::to_string(record_lines[r]) + ": expected " +
                                        std::to_string(raw.header.size()) + " fields, found " +
                                        std::to_string(records[r].size()));
    }
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
      raw.columns[c].push_back(std::move(records[r][c]));
    }
    raw.line_of_row.push_back(record_lines[r]);
  }
  return raw;
}

RawTable parse_jsonl(std::istream& in) {
  using nlohmann::ordered_json;
  RawTable raw;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<ordered_json> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    ordered_json record;
    try {
      record = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": record is not an object");
    }
    for (auto it = record.begin(); it != record.end(); ++it) {
      if (index.emplace(it.key(), raw.header.size()).second) raw.header.push_back(it.key());
    }
    rows.push_back(std::move(record));
    raw.line_of_row.push_back(line);
  }
  raw.columns.resize(raw.header.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
      auto it = rows[r].find(raw.header[c]);
      RawCell cell;
      if (it != rows[r].end() && !it->is_null()) {
        if (it->is_string()) {
          cell = it->get<std::string>();
        } else if (it->is_boolean()) {
          cell = it->get<bool>() ? "1" : "0";
        } else if (it->is_number()) {
          cell = it->is_number_float() ? format_number(it->get<double>()) : it->dump();
        } else {
          throw Error(ErrorKind::parse, "line " + std::to_string(raw.line_of_row[r]) +
                                            ": column '" + raw.header[c] +
                                            "' holds a nested value");
        }
      }
      raw.columns[c].push_back(std::move(cell));
    }
  }
  return raw;
}

Column make_numeric(const std::string& name, const std::vector<RawCell>& cells,
                    const RawTable& raw, bool allow_missing) {
  std::vector<double> values(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (!cells[r]) {
      if (!allow_missing) {
        throw Error(ErrorKind::invariant,
                    row_ref(raw, r) + ", column '" + name + "': missing value");
      }
      values[r] = std::nan("");
      continue;
    }
    auto parsed = parse_double(*cells[r]);
    if (!parsed) {
      throw Error(ErrorKind::invariant, row_ref(raw, r) + ", column '" + name +
                                            "': '" + *cells[r] + "' is not a finite number");
    }
    values[r] = *parsed;
  }
  return Column::numeric(name, std::move(values));
}

bool all_numeric(const std::vector<RawCell>& cells) {
  bool any = false;
  for (const auto& cell : cells) {
    if (!cell) continue;
    if (!parse_double(*cell)) return false;
    any = true;
  }
  return any;
}

}  // namespace

const char* to_string(ColumnRole role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "ignore";
}

ColumnRole parse_role(std::string_view text) {
  for (const auto& [r, name] : kRoleNames) {
    if (text == name) return r;
  }
  throw Error(ErrorKind::parse, "unknown column role '" + std::string(text) + "'");
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "jsonl") return Format::jsonl;
  throw Error(ErrorKind::parse, "unknown table format '" + std::string(text) + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Column

bool Column::is_missing(std::size_t row) const {
  return type == ColumnType::numeric ? std::isnan(numbers[row]) : codes[row] < 0;
}

std::string Column::text(std::size_t row) const {
  if (type == ColumnType::numeric) return format_number(numbers[row]);
  return codes[row] < 0 ? std::string() : levels[static_cast<std::size_t>(codes[row])];
}

std::string_view Column::category(std::size_t row) const {
  if (codes[row] < 0) return kMissingLabel;
  return levels[static_cast<std::size_t>(codes[row])];
}

Column Column::numeric(std::string name, std::vector<double> values) {
  Column col;
  col.name = std::move(name);
  col.type = ColumnType::numeric;
  col.numbers = std::move(values);
  return col;
}

Column Column::categorical(std::string name,
                           const std::vector<std::optional<std::string>>& values) {
  Column col;
  col.name = std::move(name);
  col.type = ColumnType::categorical;
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (v) seen.insert(*v);
  }
  col.levels.assign(seen.begin(), seen.end());
  col.codes.reserve(values.size());
  for (const auto& v : values) {
    if (!v) {
      col.codes.push_back(-1);
    } else {
      auto it = std::lower_bound(col.levels.begin(), col.levels.end(), *v);
      col.codes.push_back(static_cast<std::int32_t>(it - col.levels.begin()));
    }
  }
  return col;
}

bool operator==(const Column& a, const Column& b) {
  if (a.name != b.name || a.type != b.type || a.size() != b.size()) return false;
  if (a.type == ColumnType::categorical) return a.levels == b.levels && a.codes == b.codes;
  for (std::size_t i = 0; i < a.numbers.size(); ++i) {
    const bool na = std::isnan(a.numbers[i]);
    const bool nb = std::isnan(b.numbers[i]);
    if (na != nb || (!na && a.numbers[i] != b.numbers[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// AuditTable

bool AuditTable::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& AuditTable::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::schema, "unknown column '" + std::string(name) + "'");
}

ColumnRole AuditTable::role(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return roles_[i];
  }
  throw Error(ErrorKind::schema, "unknown column '" + std::string(name) + "'");
}

std::vector<std::string> AuditTable::columns_with_role(ColumnRole role) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (roles_[i] == role) out.push_back(columns_[i].name);
  }
  return out;
}

const std::string& AuditTable::label_column() const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (roles_[i] == ColumnRole::label) return columns_[i].name;
  }
  throw Error(ErrorKind::schema, "table has no label column");
}

std::optional<std::string> AuditTable::score_column() const {
  auto cols = columns_with_role(ColumnRole::score);
  if (cols.empty()) return std::nullopt;
  return cols.front();
}

std::optional<std::string> AuditTable::prediction_column() const {
  auto cols = columns_with_role(ColumnRole::prediction);
  if (cols.empty()) return std::nullopt;
  return cols.front();
}

const std::string& AuditTable::privileged(std::string_view sensitive) const {
  auto it = privileged_.find(std::string(sensitive));
  if (it == privileged_.end()) {
    throw Error(ErrorKind::schema,
                "no privileged value declared for '" + std::string(sensitive) + "'");
  }
  return it->second;
}

std::vector<std::uint8_t> AuditTable::labels() const {
  const auto& col = column(label_column());
  std::vector<std::uint8_t> out(col.numbers.size());
  std::transform(col.numbers.begin(), col.numbers.end(), out.begin(),
                 [](double v) { return static_cast<std::uint8_t>(v != 0.0); });
  return out;
}

std::vector<std::uint8_t> AuditTable::predictions() const {
  auto name = prediction_column();
  if (!name) throw Error(ErrorKind::schema, "table has no prediction column");
  const auto& col = column(*name);
  std::vector<std::uint8_t> out(col.numbers.size());
  std::transform(col.numbers.begin(), col.numbers.end(), out.begin(),
                 [](double v) { return static_cast<std::uint8_t>(v != 0.0); });
  return out;
}

std::span<const double> AuditTable::scores() const {
  auto name = score_column();
  if (!name) throw Error(ErrorKind::schema, "table has no score column");
  return column(*name).numbers;
}

AuditTable AuditTable::with_column(Column col, ColumnRole role) const {
  auto columns = columns_;
  auto roles = roles_;
  bool replaced = false;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == col.name) {
      columns[i] = std::move(col);
      roles[i] = role;
      replaced = true;
      break;
    }
  }
  if (!replaced) {
    if (single_valued(role) && !columns_with_role(role).empty()) {
      throw Error(ErrorKind::argument, std::string("table already has a ") + to_string(role) +
                                           " column '" + columns_with_role(role).front() + "'");
    }
    columns.push_back(std::move(col));
    roles.push_back(role);
  }
  return build_table(std::move(columns), std::move(roles), privileged_);
}

AuditTable AuditTable::with_predictions(const std::vector<std::uint8_t>& predictions) const {
  if (predictions.size() != n_rows_) {
    throw Error(ErrorKind::argument, "prediction vector length does not match the table");
  }
  std::string name = prediction_column().value_or("prediction");
  if (!prediction_column()) {
    while (has_column(name)) name += "_";
  }
  std::vector<double> values(predictions.begin(), predictions.end());
  return with_column(Column::numeric(name, std::move(values)), ColumnRole::prediction);
}

void AuditTable::validate() const {
  if (columns_.size() != roles_.size()) {
    throw Error(ErrorKind::argument, "column and role lists differ in length");
  }
  std::set<std::string> names;
  std::map<ColumnRole, int> role_count;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& col = columns_[i];
    if (!names.insert(col.name).second) {
      throw Error(ErrorKind::invariant, "duplicate column name '" + col.name + "'");
    }
    if (col.size() != n_rows_) {
      throw Error(ErrorKind::invariant, "column '" + col.name + "' has the wrong length");
    }
    ++role_count[roles_[i]];
  }
  if (role_count[ColumnRole::label] != 1) {
    throw Error(ErrorKind::invariant,
                "expected exactly one label column, found " +
                    std::to_string(role_count[ColumnRole::label]));
  }
  for (ColumnRole r : {ColumnRole::score, ColumnRole::prediction, ColumnRole::weight}) {
    if (role_count[r] > 1) {
      throw Error(ErrorKind::invariant, std::string("more than one ") + to_string(r) + " column");
    }
  }

  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& col = columns_[i];
    const ColumnRole role = roles_[i];
    auto bad_row = [&](std::size_t r, const std::string& why) {
      throw Error(ErrorKind::invariant,
                  "row " + std::to_string(r) + ", column '" + col.name + "': " + why);
    };
    switch (role) {
      case ColumnRole::label:
      case ColumnRole::prediction:
      case ColumnRole::score:
      case ColumnRole::weight: {
        if (col.type != ColumnType::numeric) {
          throw Error(ErrorKind::invariant, "column '" + col.name + "' must be numeric");
        }
        for (std::size_t r = 0; r < n_rows_; ++r) {
          const double v = col.numbers[r];
          if (std::isnan(v)) bad_row(r, "missing value");
          if (!std::isfinite(v)) bad_row(r, "value is not finite");
          if ((role == ColumnRole::label || role == ColumnRole::prediction) && v != 0.0 &&
              v != 1.0) {
            bad_row(r, std::string(to_string(role)) + " value " + format_number(v) +
                           " is not 0 or 1");
          }
          if (role == ColumnRole::score && (v < 0.0 || v > 1.0)) {
            bad_row(r, "score outside [0,1] (" + format_number(v) + ")");
          }
          if (role == ColumnRole::weight && v < 0.0) bad_row(r, "negative weight");
        }
        break;
      }
      case ColumnRole::sensitive: {
        if (col.type != ColumnType::categorical) {
          throw Error(ErrorKind::invariant,
                      "sensitive column '" + col.name + "' must be categorical");
        }
        for (std::size_t r = 0; r < n_rows_; ++r) {
          if (col.codes[r] < 0) bad_row(r, "missing sensitive value");
        }
        if (col.levels.size() < 2) {
          throw Error(ErrorKind::invariant, "sensitive column '" + col.name +
                                                "' has fewer than 2 observed categories");
        }
        auto it = privileged_.find(col.name);
        if (it == privileged_.end()) {
          throw Error(ErrorKind::schema,
                      "no privileged value declared for sensitive column '" + col.name + "'");
        }
        if (!std::binary_search(col.levels.begin(), col.levels.end(), it->second)) {
          throw Error(ErrorKind::invariant, "privileged value '" + it->second +
                                                "' does not occur in column '" + col.name + "'");
        }
        break;
      }
      default:
        break;
    }
  }
  for (const auto& [name, value] : privileged_) {
    if (!names.count(name) || role(name) != ColumnRole::sensitive) {
      throw Error(ErrorKind::schema,
                  "privileged value given for '" + name + "', which is not a sensitive column");
    }
  }
}

AuditTable build_table(std::vector<Column> columns, std::vector<ColumnRole> roles,
                       std::map<std::string, std::string> privileged) {
  AuditTable table;
  table.n_rows_ = columns.empty() ? 0 : columns.front().size();
  table.columns_ = std::move(columns);
  table.roles_ = std::move(roles);
  table.privileged_ = std::move(privileged);
  table.validate();
  return table;
}

// ---------------------------------------------------------------------------
// Loading

AuditTable load_table(std::istream& source, const Schema& schema, const LoadOptions& options) {
  RawTable raw = options.format == Format::csv ? parse_csv(source, options.delimiter)
                                               : parse_jsonl(source);
  for (const auto& [name, role] : schema.roles) {
    if (std::find(raw.header.begin(), raw.header.end(), name) == raw.header.end()) {
      throw Error(ErrorKind::schema, "schema names column '" + name + "', which is not in the input");
    }
  }
  for (const auto& [name, type] : schema.types) {
    if (std::find(raw.header.begin(), raw.header.end(), name) == raw.header.end()) {
      throw Error(ErrorKind::schema, "type override names unknown column '" + name + "'");
    }
  }

  std::vector<Column> columns;
  std::vector<ColumnRole> roles;
  for (std::size_t c = 0; c < raw.header.size(); ++c) {
    const std::string& name = raw.header[c];
    auto& cells = raw.columns[c];
    auto rit = schema.roles.find(name);
    const ColumnRole role = rit == schema.roles.end() ? ColumnRole::ignore : rit->second;

    switch (role) {
      case ColumnRole::label:
      case ColumnRole::prediction:
      case ColumnRole::score:
      case ColumnRole::weight: {
        Column col = make_numeric(name, cells, raw, false);
        for (std::size_t r = 0; r < col.numbers.size(); ++r) {
          const double v = col.numbers[r];
          if ((role == ColumnRole::label || role == ColumnRole::prediction) && v != 0.0 &&
              v != 1.0) {
            throw Error(ErrorKind::invariant, row_ref(raw, r) + ", column '" + name + "': " +
                                                  to_string(role) + " value " + *cells[r] +
                                                  " is not 0 or 1");
          }
          if (role == ColumnRole::score && (v < 0.0 || v > 1.0)) {
            throw Error(ErrorKind::invariant, row_ref(raw, r) + ", column '" + name +
                                                  "': score outside [0,1] (" + *cells[r] + ")");
          }
          if (schema.invert_label) {
            if (role == ColumnRole::label || role == ColumnRole::prediction) {
              col.numbers[r] = 1.0 - v;
            } else if (role == ColumnRole::score) {
              col.numbers[r] = 1.0 - v;
            }
          }
        }
        columns.push_back(std::move(col));
        break;
      }
      case ColumnRole::sensitive: {
        for (std::size_t r = 0; r < cells.size(); ++r) {
          if (!cells[r]) {
            throw Error(ErrorKind::invariant,
                        row_ref(raw, r) + ", column '" + name + "': missing sensitive value");
          }
        }
        columns.push_back(Column::categorical(name, cells));
        break;
      }
      default: {
        auto tit = schema.types.find(name);
        const ColumnType type = tit != schema.types.end()
                                    ? tit->second
                                    : (all_numeric(cells) ? ColumnType::numeric
                                                          : ColumnType::categorical);
        columns.push_back(type == ColumnType::numeric ? make_numeric(name, cells, raw, true)
                                                      : Column::categorical(name, cells));
        break;
      }
    }
    roles.push_back(role);
  }
  return build_table(std::move(columns), std::move(roles), schema.privileged);
}

AuditTable load_table_file(const std::string& path, const Schema& schema,
                           const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return load_table(in, schema, options);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string csv_field(const Column& col, std::size_t row, char delim) {
  if (col.is_missing(row)) return {};
  std::string text = col.text(row);
  const bool needs_quotes =
      text.empty() || text.find_first_of(std::string("\"\r\n") + delim) != std::string::npos;
  if (col.type == ColumnType::numeric || !needs_quotes) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_header(const std::string& name, char delim) {
  if (name.find_first_of(std::string("\"\r\n") + delim) == std::string::npos) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string serialize(const AuditTable& table, Format format, char delimiter) {
  std::ostringstream out;
  const auto& cols = table.columns();
  if (format == Format::csv) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << delimiter;
      out << csv_header(cols[c].name, delimiter);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out << delimiter;
        out << csv_field(cols[c], r, delimiter);
      }
      out << '\n';
    }
    return out.str();
  }
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    nlohmann::ordered_json record = nlohmann::ordered_json::object();
    for (const auto& col : cols) {
      if (col.is_missing(r)) {
        record[col.name] = nullptr;
      } else if (col.type == ColumnType::numeric) {
        record[col.name] = col.numbers[r];
      } else {
        record[col.name] = col.text(r);
      }
    }
    out << record.dump() << '\n';
  }
  return out.str();
}

Schema schema_of(const AuditTable& table) {
  Schema schema;
  for (std::size_t i = 0; i < table.columns().size(); ++i) {
    const auto& col = table.columns()[i];
    const ColumnRole role = table.roles()[i];
    schema.roles[col.name] = role;
    if (role == ColumnRole::feature || role == ColumnRole::quasi_identifier ||
        role == ColumnRole::ignore) {
      schema.types[col.name] = col.type;
    }
  }
  schema.privileged = table.privileged_values();
  return schema;
}

AuditTable binarize(const AuditTable& table, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::argument, "threshold must lie in [0,1]");
  }
  auto scores = table.scores();
  std::vector<std::uint8_t> predictions(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    predictions[i] = scores[i] >= threshold ? 1 : 0;
  }
  return table.with_predictions(predictions);
}

}  // namespace rai
