#include "foldtree/impute.h"

#include <algorithm>
#include <unordered_map>

#include "foldtree/error.h"

namespace foldtree {

const char* imputation_policy_name(ImputationPolicy policy) {
  return policy == ImputationPolicy::kNodeWise ? "node" : "root";
}

ImputationPolicy parse_imputation_policy(const std::string& name) {
  if (name == "node" || name == "node_wise") return ImputationPolicy::kNodeWise;
  if (name == "root" || name == "root_node") return ImputationPolicy::kRootNode;
  throw UsageError("unknown imputation policy '" + name + "'");
}

std::size_t ImputationRecord::encoded_width() const {
  std::size_t width = 0;
  for (const auto& column : columns) {
    if (const auto* num = std::get_if<NumericImputation>(&column)) {
      width += num->indicator ? 2 : 1;
    } else {
      const auto& cat = std::get<CategoricalImputation>(column);
      width += cat.levels.size() + (cat.missing_level ? 1 : 0);
    }
  }
  return width;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return lower + (upper - lower) / 2.0;
}

ImputationRecord fit_imputation(const Dataset& ds, std::span<const int> rows,
                                ImputationPolicy policy,
                                const ImputationRecord* root) {
  if (rows.empty()) throw DataError("cannot fit imputation on zero rows");
  if (root && root->columns.size() != ds.n_columns()) {
    throw DataError("root imputation record does not match the schema");
  }
  ImputationRecord record;
  record.columns.reserve(ds.n_columns());
  for (std::size_t j = 0; j < ds.n_columns(); ++j) {
    if (const auto* num = std::get_if<NumericColumn>(&ds.column(j))) {
      std::vector<double> observed;
      observed.reserve(rows.size());
      for (int r : rows) {
        if (num->values[r]) observed.push_back(*num->values[r]);
      }
      NumericImputation imp;
      imp.indicator = observed.size() < rows.size();
      const NumericImputation* root_imp =
          root ? std::get_if<NumericImputation>(&root->columns[j]) : nullptr;
      if (root && !root_imp) {
        throw DataError("root imputation record does not match the schema");
      }
      if (policy == ImputationPolicy::kRootNode && root_imp) {
        imp.constant = root_imp->constant;
      } else if (!observed.empty()) {
        imp.constant = median(std::move(observed));
      } else {
        imp.constant = root_imp ? root_imp->constant : 0.0;
        imp.root_fallback = true;
      }
      record.columns.emplace_back(imp);
    } else {
      const auto& cat = std::get<CategoricalColumn>(ds.column(j));
      std::vector<bool> seen(cat.levels.size(), false);
      bool any_missing = false;
      for (int r : rows) {
        if (cat.codes[r]) {
          seen[*cat.codes[r]] = true;
        } else {
          any_missing = true;
        }
      }
      CategoricalImputation imp;
      for (std::size_t l = 0; l < cat.levels.size(); ++l) {
        if (seen[l]) imp.levels.push_back(cat.levels[l]);
      }
      imp.missing_level = any_missing;
      record.columns.emplace_back(std::move(imp));
    }
  }
  return record;
}

EncodedMatrix encode(const Dataset& ds, std::span<const int> rows,
                     const ImputationRecord& record) {
  if (record.columns.size() != ds.n_columns()) {
    throw DataError("schema mismatch: record has " +
                    std::to_string(record.columns.size()) +
                    " columns, data has " + std::to_string(ds.n_columns()));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  EncodedMatrix out;
  out.rows.assign(rows.begin(), rows.end());
  out.values.setZero(n, static_cast<Eigen::Index>(record.encoded_width()));
  out.sources.reserve(record.encoded_width());

  Eigen::Index col = 0;
  for (std::size_t j = 0; j < ds.n_columns(); ++j) {
    const int source = static_cast<int>(j);
    if (const auto* imp = std::get_if<NumericImputation>(&record.columns[j])) {
      const auto* num = std::get_if<NumericColumn>(&ds.column(j));
      if (!num) {
        throw DataError("schema mismatch: column '" + ds.names()[j] +
                        "' expected numeric");
      }
      out.sources.push_back({SourceKind::kNumeric, source});
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& v = num->values[rows[i]];
        out.values(i, col) = v ? *v : imp->constant;
      }
      ++col;
      if (imp->indicator) {
        out.sources.push_back({SourceKind::kMissingIndicator, source});
        for (Eigen::Index i = 0; i < n; ++i) {
          out.values(i, col) = num->values[rows[i]] ? 0.0 : 1.0;
        }
        ++col;
      }
    } else {
      const auto& cimp = std::get<CategoricalImputation>(record.columns[j]);
      const auto* cat = std::get_if<CategoricalColumn>(&ds.column(j));
      if (!cat) {
        throw DataError("schema mismatch: column '" + ds.names()[j] +
                        "' expected categorical");
      }
      // Dataset level code -> dummy offset, -1 for unseen.
      std::vector<int> slot(cat->levels.size(), -1);
      for (std::size_t l = 0; l < cat->levels.size(); ++l) {
        auto it = std::lower_bound(cimp.levels.begin(), cimp.levels.end(),
                                   cat->levels[l]);
        if (it != cimp.levels.end() && *it == cat->levels[l]) {
          slot[l] = static_cast<int>(it - cimp.levels.begin());
        }
      }
      const int n_levels = static_cast<int>(cimp.levels.size());
      const int fallback = cimp.missing_level ? n_levels : -1;
      for (int l = 0; l < n_levels; ++l) {
        out.sources.push_back({SourceKind::kCategoricalDummy, source, l});
      }
      if (cimp.missing_level) {
        out.sources.push_back({SourceKind::kCategoricalDummy, source, -1});
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& code = cat->codes[rows[i]];
        const int offset = code && slot[*code] >= 0 ? slot[*code] : fallback;
        if (offset >= 0) out.values(i, col + offset) = 1.0;
      }
      col += n_levels + (cimp.missing_level ? 1 : 0);
    }
  }
  return out;
}

}  // namespace foldtree
