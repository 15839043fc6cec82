#include "foldtree/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "foldtree/error.h"
#include "foldtree/random.h"

namespace foldtree {

const char* column_type_name(ColumnType type) {
  return type == ColumnType::kNumeric ? "numeric" : "categorical";
}

ColumnType parse_column_type(const std::string& name) {
  if (name == "numeric") return ColumnType::kNumeric;
  if (name == "categorical") return ColumnType::kCategorical;
  throw DataError("unknown column type '" + name + "'");
}

namespace {

std::size_t column_length(const Column& column) {
  return std::visit(
      [](const auto& c) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>,
                                     NumericColumn>) {
          return c.values.size();
        } else {
          return c.codes.size();
        }
      },
      column);
}

}  // namespace

Dataset::Dataset(std::vector<std::string> names, std::vector<Column> columns,
                 std::vector<int> target,
                 std::vector<std::string> class_labels)
    : names_(std::move(names)),
      columns_(std::move(columns)),
      target_(std::move(target)),
      class_labels_(std::move(class_labels)) {
  if (names_.size() != columns_.size()) {
    throw DataError("column name count does not match column count");
  }
  n_rows_ = columns_.empty() ? target_.size() : column_length(columns_[0]);
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (column_length(columns_[j]) != n_rows_) {
      throw DataError("column '" + names_[j] + "' has inconsistent length");
    }
    if (const auto* cat = std::get_if<CategoricalColumn>(&columns_[j])) {
      const int n_levels = static_cast<int>(cat->levels.size());
      for (const auto& code : cat->codes) {
        if (code && (*code < 0 || *code >= n_levels)) {
          throw DataError("column '" + names_[j] +
                          "' has a level code outside its level table");
        }
      }
    } else {
      for (const auto& v : std::get<NumericColumn>(columns_[j]).values) {
        if (v && !std::isfinite(*v)) {
          throw DataError("column '" + names_[j] + "' has a non-finite value");
        }
      }
    }
  }
  if (!target_.empty()) {
    if (target_.size() != n_rows_) {
      throw DataError("target length does not match row count");
    }
    const int n_classes = static_cast<int>(class_labels_.size());
    for (int y : target_) {
      if (y < 0 || y >= n_classes) {
        throw DataError("class index outside the class-label table");
      }
    }
  }
}

ColumnType Dataset::type(std::size_t j) const {
  return std::holds_alternative<NumericColumn>(columns_[j])
             ? ColumnType::kNumeric
             : ColumnType::kCategorical;
}

Schema Dataset::schema() const {
  Schema schema;
  schema.reserve(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    schema.push_back({names_[j], type(j)});
  }
  return schema;
}

bool Dataset::is_missing(std::size_t column, std::size_t row) const {
  if (const auto* num = std::get_if<NumericColumn>(&columns_[column])) {
    return !num->values[row].has_value();
  }
  return !std::get<CategoricalColumn>(columns_[column]).codes[row].has_value();
}

RowIds Dataset::all_rows() const {
  RowIds rows(n_rows_);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

Dataset Dataset::subset(std::span<const int> rows) const {
  std::vector<Column> columns;
  columns.reserve(columns_.size());
  for (const auto& column : columns_) {
    if (const auto* num = std::get_if<NumericColumn>(&column)) {
      NumericColumn out;
      out.values.reserve(rows.size());
      for (int r : rows) out.values.push_back(num->values[r]);
      columns.emplace_back(std::move(out));
    } else {
      const auto& cat = std::get<CategoricalColumn>(column);
      CategoricalColumn out;
      out.levels = cat.levels;
      out.codes.reserve(rows.size());
      for (int r : rows) out.codes.push_back(cat.codes[r]);
      columns.emplace_back(std::move(out));
    }
  }
  std::vector<int> target;
  if (!target_.empty()) {
    target.reserve(rows.size());
    for (int r : rows) target.push_back(target_[r]);
  }
  Dataset out(names_, std::move(columns), std::move(target), class_labels_);
  out.n_rows_ = rows.size();
  return out;
}

std::vector<int> Dataset::class_counts(std::span<const int> rows) const {
  std::vector<int> counts(class_labels_.size(), 0);
  for (int r : rows) ++counts[target_[r]];
  return counts;
}

RowIds FoldPlan::fold_rows(int fold) const {
  RowIds out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (assignment[i] == fold) out.push_back(rows[i]);
  }
  return out;
}

RowIds FoldPlan::complement_rows(int fold) const {
  RowIds out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (assignment[i] != fold) out.push_back(rows[i]);
  }
  return out;
}

namespace {

// Rows grouped by class, each group shuffled with the shared engine in class
// order.
std::vector<RowIds> shuffled_class_groups(const Dataset& ds,
                                          std::span<const int> rows,
                                          Rng& rng) {
  std::vector<RowIds> groups(ds.n_classes());
  for (int r : rows) groups[ds.target()[r]].push_back(r);
  for (auto& group : groups) shuffle(std::span<int>(group), rng);
  return groups;
}

}  // namespace

std::pair<RowIds, RowIds> split_train_test_rows(const Dataset& ds,
                                                double fraction,
                                                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw UsageError("split fraction must lie in (0, 1)");
  }
  if (!ds.labeled()) throw DataError("cannot stratify an unlabeled dataset");
  Rng rng(seed);
  const RowIds all = ds.all_rows();
  const auto groups = shuffled_class_groups(ds, all, rng);
  const std::size_t n_classes = groups.size();

  // Largest-remainder apportionment of round(n * fraction) first-part rows.
  const auto total = static_cast<long>(std::llround(
      static_cast<double>(ds.n_rows()) * fraction));
  std::vector<long> take(n_classes);
  std::vector<double> remainder(n_classes);
  long assigned = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double exact = static_cast<double>(groups[c].size()) * fraction;
    take[c] = static_cast<long>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(take[c]);
    assigned += take[c];
  }
  std::vector<std::size_t> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t i = 0; assigned < total && i < n_classes; ++i) {
    const std::size_t c = order[i];
    if (take[c] < static_cast<long>(groups[c].size())) {
      ++take[c];
      ++assigned;
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    const long size = static_cast<long>(groups[c].size());
    if (size >= 2) take[c] = std::clamp(take[c], 1L, size - 1);
  }

  RowIds first, second;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto& group = groups[c];
    first.insert(first.end(), group.begin(), group.begin() + take[c]);
    second.insert(second.end(), group.begin() + take[c], group.end());
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());

  auto distinct_classes = [&](const RowIds& part) {
    std::vector<int> counts = ds.class_counts(part);
    return std::count_if(counts.begin(), counts.end(),
                         [](int n) { return n > 0; });
  };
  if (distinct_classes(first) < 2 || distinct_classes(second) < 2) {
    throw DataError("split leaves a partition with fewer than 2 classes");
  }
  return {std::move(first), std::move(second)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                             double fraction,
                                             std::uint64_t seed) {
  auto [first, second] = split_train_test_rows(ds, fraction, seed);
  return {ds.subset(first), ds.subset(second)};
}

FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed) {
  const RowIds all = ds.all_rows();
  return make_folds(ds, all, k, seed);
}

FoldPlan make_folds(const Dataset& ds, std::span<const int> rows, int k,
                    std::uint64_t seed) {
  if (k < 2) throw UsageError("fold count must be at least 2");
  if (static_cast<std::size_t>(k) > rows.size()) {
    throw UsageError("fold count exceeds the number of rows");
  }
  if (!ds.labeled()) throw DataError("cannot stratify an unlabeled dataset");
  Rng rng(seed);
  const auto groups = shuffled_class_groups(ds, rows, rng);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.rows.assign(rows.begin(), rows.end());
  std::vector<int> fold_of_row(ds.n_rows(), -1);
  int next_fold = 0;
  for (const auto& group : groups) {
    for (int r : group) {
      fold_of_row[r] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  plan.assignment.reserve(rows.size());
  for (int r : rows) plan.assignment.push_back(fold_of_row[r]);
  return plan;
}

}  // namespace foldtree
