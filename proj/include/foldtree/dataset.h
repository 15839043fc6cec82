#ifndef FOLDTREE_DATASET_H_
#define FOLDTREE_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace foldtree {

enum class ColumnType { kNumeric, kCategorical };

const char* column_type_name(ColumnType type);
ColumnType parse_column_type(const std::string& name);

struct NumericColumn {
  std::vector<std::optional<double>> values;

  bool operator==(const NumericColumn&) const = default;
};

struct CategoricalColumn {
  std::vector<std::optional<int>> codes;
  // Sorted lexicographically; codes index into it.
  std::vector<std::string> levels;

  bool operator==(const CategoricalColumn&) const = default;
};

using Column = std::variant<NumericColumn, CategoricalColumn>;

struct ColumnSchema {
  std::string name;
  ColumnType type;

  bool operator==(const ColumnSchema&) const = default;
};

using Schema = std::vector<ColumnSchema>;

// Row indices into a Dataset. Tree nodes, folds and partitions all refer to
// rows this way instead of copying data.
using RowIds = std::vector<int>;

// Column-typed table with per-cell missingness and an integer class target.
// Immutable after construction.
//
// A dataset may be unlabeled (empty target, empty class table); that is the
// shape of a prediction input. Labeled datasets hold one class index per row.
class Dataset {
 public:
  Dataset() = default;
  // Throws DataError when lengths or codes are inconsistent.
  Dataset(std::vector<std::string> names, std::vector<Column> columns,
          std::vector<int> target, std::vector<std::string> class_labels);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return columns_.size(); }
  std::size_t n_classes() const { return class_labels_.size(); }
  bool labeled() const { return !target_.empty() || n_rows_ == 0; }

  const std::vector<std::string>& names() const { return names_; }
  const Column& column(std::size_t j) const { return columns_[j]; }
  const std::vector<Column>& columns() const { return columns_; }
  ColumnType type(std::size_t j) const;
  const std::vector<int>& target() const { return target_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }

  Schema schema() const;
  bool is_missing(std::size_t column, std::size_t row) const;

  // All row ids 0..n-1.
  RowIds all_rows() const;
  // Rows in the given order; level and class tables are kept as is.
  Dataset subset(std::span<const int> rows) const;
  // Per-class counts over the given rows (length n_classes()).
  std::vector<int> class_counts(std::span<const int> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Column> columns_;
  std::vector<int> target_;
  std::vector<std::string> class_labels_;
  std::size_t n_rows_ = 0;
};

// Stratified assignment of rows to k folds.
struct FoldPlan {
  int k = 0;
  // Rows covered by the plan; assignment[i] is the fold of rows[i].
  RowIds rows;
  std::vector<int> assignment;
  std::uint64_t seed = 0;

  // Dataset row ids in / not in the given fold, in plan order.
  RowIds fold_rows(int fold) const;
  RowIds complement_rows(int fold) const;
};

// Stratified, seeded partition. The first part receives round(n * fraction)
// rows, apportioned across classes by largest remainder, and every class with
// at least two rows keeps one row on each side.
std::pair<RowIds, RowIds> split_train_test_rows(const Dataset& ds,
                                                double fraction,
                                                std::uint64_t seed);
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                             double fraction,
                                             std::uint64_t seed);

// Stratified folds: each class's rows are shuffled and dealt round-robin,
// continuing the deal across classes so fold sizes differ by at most one.
FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed);
// Same, restricted to a subset of rows.
FoldPlan make_folds(const Dataset& ds, std::span<const int> rows, int k,
                    std::uint64_t seed);

}  // namespace foldtree

#endif  // FOLDTREE_DATASET_H_
