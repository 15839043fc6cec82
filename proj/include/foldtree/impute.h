#ifndef FOLDTREE_IMPUTE_H_
#define FOLDTREE_IMPUTE_H_

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "foldtree/dataset.h"

namespace foldtree {

enum class ImputationPolicy { kNodeWise, kRootNode };

const char* imputation_policy_name(ImputationPolicy policy);
ImputationPolicy parse_imputation_policy(const std::string& name);

struct NumericImputation {
  // Value substituted for missing cells.
  double constant = 0.0;
  // Whether a missing-value indicator column follows the value column. Set
  // iff the fitting rows had at least one missing cell.
  bool indicator = false;
  // The column was entirely missing in the fitting rows, so the constant was
  // taken from the root record.
  bool root_fallback = false;

  bool operator==(const NumericImputation&) const = default;
};

struct CategoricalImputation {
  // Levels observed in the fitting rows, sorted. One dummy column each.
  std::vector<std::string> levels;
  // A synthetic missing level (one more dummy column) was appended.
  bool missing_level = false;

  bool operator==(const CategoricalImputation&) const = default;
};

using ColumnImputation = std::variant<NumericImputation, CategoricalImputation>;

// Everything needed to replay the encoding on new rows.
struct ImputationRecord {
  std::vector<ColumnImputation> columns;

  // Width of the encoded design matrix.
  std::size_t encoded_width() const;

  bool operator==(const ImputationRecord&) const = default;
};

enum class SourceKind { kNumeric, kMissingIndicator, kCategoricalDummy };

// Origin of one encoded column. `level` is the index into the record's
// level table for dummies, -1 for the synthetic missing level, and unused
// otherwise.
struct ColumnSource {
  SourceKind kind;
  int column;
  int level = 0;

  bool operator==(const ColumnSource&) const = default;
};

// Fully numeric design matrix: no missing or non-finite entries. The dummy
// block of a categorical column is a full one-hot (no dropped level).
struct EncodedMatrix {
  Eigen::MatrixXd values;
  std::vector<ColumnSource> sources;
  RowIds rows;
};

// Median of the non-missing values; the mean of the two middle order
// statistics for even counts.
double median(std::vector<double> values);

// Fits the imputation for the given rows. Under kNodeWise the constants are
// the medians of `rows`; under kRootNode they are copied from `root` (which
// may be null at the root itself, where both policies coincide). Indicator
// columns and the categorical missing level depend only on `rows`. A numeric
// column with no observed value in `rows` takes the root constant (0 when
// there is no root record) and is flagged root_fallback.
ImputationRecord fit_imputation(const Dataset& ds, std::span<const int> rows,
                                ImputationPolicy policy,
                                const ImputationRecord* root = nullptr);

// Applies a record. Unseen categorical levels take the missing level when the
// record has one, otherwise an all-zero dummy block. Throws DataError on a
// schema mismatch (column count or type).
EncodedMatrix encode(const Dataset& ds, std::span<const int> rows,
                     const ImputationRecord& record);

}  // namespace foldtree

#endif  // FOLDTREE_IMPUTE_H_
