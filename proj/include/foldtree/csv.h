#ifndef FOLDTREE_CSV_H_
#define FOLDTREE_CSV_H_

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "foldtree/dataset.h"

namespace foldtree {

using NaTokens = std::set<std::string>;

inline NaTokens default_na_tokens() { return {"", "NA", "?"}; }

// RFC-4180 records: quoted fields, doubled quotes, CRLF or LF line ends.
// Cells are returned with surrounding whitespace trimmed.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// Parses a real number occupying the whole cell. Non-finite values do not
// count as numbers.
std::optional<double> parse_real(const std::string& cell);

// Loads a labeled dataset. A column is numeric iff every non-NA cell parses
// as a real; categorical levels are sorted lexicographically, as are the
// class labels. Throws IoError for unreadable files and DataError for a
// missing target column, missing target cells or fewer than two classes.
Dataset load_csv(const std::string& path, const std::string& target_name,
                 const NaTokens& na_tokens = default_na_tokens());
Dataset read_csv(std::istream& in, const std::string& target_name,
                 const NaTokens& na_tokens = default_na_tokens());

// Loads rows against a known schema (the prediction path). Columns are
// matched by name and typed by the schema; extra columns are ignored.
// When target_name names a present column its labels are mapped onto
// class_labels, with unseen labels appended. Throws DataError naming the
// offending column on a missing column or an unparseable numeric cell.
Dataset read_csv_with_schema(std::istream& in, const Schema& schema,
                             const std::vector<std::string>& class_labels,
                             const std::string& target_name,
                             const NaTokens& na_tokens = default_na_tokens());
Dataset load_csv_with_schema(const std::string& path, const Schema& schema,
                             const std::vector<std::string>& class_labels,
                             const std::string& target_name,
                             const NaTokens& na_tokens = default_na_tokens());

// Writes features then the target (when labeled). Missing cells are written
// as `na_token`; reals use the shortest round-trip representation.
void write_csv(std::ostream& out, const Dataset& ds,
               const std::string& target_name, const std::string& na_token = "NA");
void save_csv(const std::string& path, const Dataset& ds,
              const std::string& target_name, const std::string& na_token = "NA");

// Quotes a field when it contains a delimiter, quote or line break.
std::string csv_escape(const std::string& field);
std::string format_real(double value);

}  // namespace foldtree

#endif  // FOLDTREE_CSV_H_
