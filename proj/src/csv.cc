#include "foldtree/csv.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "foldtree/error.h"

namespace foldtree {

namespace {

std::string trim(const std::string& s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c); };
  auto begin = std::find_if_not(s.begin(), s.end(), is_space);
  auto end = std::find_if_not(s.rbegin(), s.rend(), is_space).base();
  return begin < end ? std::string(begin, end) : std::string();
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_table(std::istream& in) {
  auto records = parse_csv(in);
  if (records.empty()) throw DataError("CSV input has no header row");
  RawTable table;
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto& record = records[i];
    if (record.size() == 1 && record[0].empty()) continue;  // blank line
    if (record.size() != table.header.size()) {
      throw DataError("CSV row " + std::to_string(i + 1) + " has " +
                      std::to_string(record.size()) + " fields, expected " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(record));
  }
  return table;
}

std::size_t find_column(const RawTable& table, const std::string& name) {
  auto it = std::find(table.header.begin(), table.header.end(), name);
  return it == table.header.end()
             ? table.header.size()
             : static_cast<std::size_t>(it - table.header.begin());
}

Column numeric_column(const RawTable& table, std::size_t j,
                      const NaTokens& na) {
  NumericColumn out;
  out.values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const auto& cell = row[j];
    if (na.contains(cell)) {
      out.values.emplace_back();
      continue;
    }
    auto value = parse_real(cell);
    if (!value) {
      throw DataError("column '" + table.header[j] +
                      "' expects numeric values, got '" + cell + "'");
    }
    out.values.push_back(*value);
  }
  return out;
}

// Levels come from the data and are sorted.
Column categorical_column(const RawTable& table, std::size_t j,
                          const NaTokens& na) {
  std::vector<std::string> levels;
  for (const auto& row : table.rows) {
    if (!na.contains(row[j])) levels.push_back(row[j]);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  CategoricalColumn out;
  out.codes.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (na.contains(row[j])) {
      out.codes.emplace_back();
    } else {
      auto it = std::lower_bound(levels.begin(), levels.end(), row[j]);
      out.codes.push_back(static_cast<int>(it - levels.begin()));
    }
  }
  out.levels = std::move(levels);
  return out;
}

bool all_numeric(const RawTable& table, std::size_t j, const NaTokens& na) {
  return std::all_of(table.rows.begin(), table.rows.end(), [&](const auto& row) {
    return na.contains(row[j]) || parse_real(row[j]).has_value();
  });
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool any = false;
  char c;
  auto end_field = [&] {
    record.push_back(trim(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started || trim(field).empty()) {
          field.clear();
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        if (!std::isspace(static_cast<unsigned char>(c))) field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV input ends inside a quoted field");
  if (any && (!field.empty() || !record.empty())) end_record();
  // Strip a UTF-8 byte order mark from the first header cell.
  if (!records.empty() && !records[0].empty() &&
      records[0][0].rfind("\xEF\xBB\xBF", 0) == 0) {
    records[0][0].erase(0, 3);
  }
  return records;
}

std::optional<double> parse_real(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

Dataset read_csv(std::istream& in, const std::string& target_name,
                 const NaTokens& na_tokens) {
  const RawTable table = read_table(in);
  const std::size_t target_col = find_column(table, target_name);
  if (target_col == table.header.size()) {
    throw DataError("target column '" + target_name + "' not found");
  }

  std::vector<std::string> labels;
  for (const auto& row : table.rows) {
    if (na_tokens.contains(row[target_col])) {
      throw DataError("target column '" + target_name +
                      "' has a missing value");
    }
    labels.push_back(row[target_col]);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() < 2) {
    throw DataError("target column '" + target_name +
                    "' has fewer than 2 distinct classes");
  }
  std::vector<int> target;
  target.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto it = std::lower_bound(labels.begin(), labels.end(), row[target_col]);
    target.push_back(static_cast<int>(it - labels.begin()));
  }

  std::vector<std::string> names;
  std::vector<Column> columns;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j == target_col) continue;
    names.push_back(table.header[j]);
    columns.push_back(all_numeric(table, j, na_tokens)
                          ? numeric_column(table, j, na_tokens)
                          : categorical_column(table, j, na_tokens));
  }
  return Dataset(std::move(names), std::move(columns), std::move(target),
                 std::move(labels));
}

Dataset load_csv(const std::string& path, const std::string& target_name,
                 const NaTokens& na_tokens) {
  auto in = open_input(path);
  return read_csv(in, target_name, na_tokens);
}

Dataset read_csv_with_schema(std::istream& in, const Schema& schema,
                             const std::vector<std::string>& class_labels,
                             const std::string& target_name,
                             const NaTokens& na_tokens) {
  const RawTable table = read_table(in);
  std::vector<std::string> names;
  std::vector<Column> columns;
  for (const auto& col : schema) {
    const std::size_t j = find_column(table, col.name);
    if (j == table.header.size()) {
      throw DataError("column '" + col.name + "' missing from input");
    }
    names.push_back(col.name);
    columns.push_back(col.type == ColumnType::kNumeric
                          ? numeric_column(table, j, na_tokens)
                          : categorical_column(table, j, na_tokens));
  }

  std::vector<int> target;
  std::vector<std::string> labels;
  const std::size_t target_col =
      target_name.empty() ? table.header.size()
                          : find_column(table, target_name);
  if (target_col != table.header.size()) {
    labels = class_labels;
    std::map<std::string, int> index;
    for (std::size_t c = 0; c < labels.size(); ++c) {
      index[labels[c]] = static_cast<int>(c);
    }
    for (const auto& row : table.rows) {
      const auto& cell = row[target_col];
      if (na_tokens.contains(cell)) {
        throw DataError("target column '" + target_name +
                        "' has a missing value");
      }
      auto [it, inserted] =
          index.try_emplace(cell, static_cast<int>(labels.size()));
      if (inserted) labels.push_back(cell);
      target.push_back(it->second);
    }
  }
  return Dataset(std::move(names), std::move(columns), std::move(target),
                 std::move(labels));
}

Dataset load_csv_with_schema(const std::string& path, const Schema& schema,
                             const std::vector<std::string>& class_labels,
                             const std::string& target_name,
                             const NaTokens& na_tokens) {
  auto in = open_input(path);
  return read_csv_with_schema(in, schema, class_labels, target_name,
                              na_tokens);
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos ||
      (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                          std::isspace(static_cast<unsigned char>(field.back()))));
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_real(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void write_csv(std::ostream& out, const Dataset& ds,
               const std::string& target_name, const std::string& na_token) {
  const bool labeled = !ds.target().empty();
  for (std::size_t j = 0; j < ds.n_columns(); ++j) {
    if (j > 0) out << ',';
    out << csv_escape(ds.names()[j]);
  }
  if (labeled) out << (ds.n_columns() > 0 ? "," : "") << csv_escape(target_name);
  out << '\n';
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < ds.n_columns(); ++j) {
      if (j > 0) out << ',';
      if (const auto* num = std::get_if<NumericColumn>(&ds.column(j))) {
        const auto& v = num->values[i];
        out << (v ? format_real(*v) : csv_escape(na_token));
      } else {
        const auto& cat = std::get<CategoricalColumn>(ds.column(j));
        const auto& code = cat.codes[i];
        out << csv_escape(code ? cat.levels[*code] : na_token);
      }
    }
    if (labeled) {
      out << (ds.n_columns() > 0 ? "," : "")
          << csv_escape(ds.class_labels()[ds.target()[i]]);
    }
    out << '\n';
  }
}

void save_csv(const std::string& path, const Dataset& ds,
              const std::string& target_name, const std::string& na_token) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out, ds, target_name, na_token);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace foldtree
