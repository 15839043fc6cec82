#include "foldtree/axis_gini.h"

#include <algorithm>
#include <numeric>

#include "foldtree/split_strength.h"

namespace foldtree {

int AxisGiniTree::n_leaves() const {
  return static_cast<int>(std::count_if(
      nodes.begin(), nodes.end(),
      [](const AxisGiniNode& n) { return n.feature < 0; }));
}

namespace {

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

double weighted_gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) sum_sq += static_cast<double>(c) * c;
  return total - sum_sq / total;
}

class AxisGrower {
 public:
  AxisGrower(const Eigen::MatrixXd& x, const std::vector<int>& y,
             int n_classes, double threshold, int max_depth)
      : x_(x),
        y_(y),
        n_classes_(n_classes),
        threshold_(threshold),
        max_depth_(max_depth),
        min_size_(std::max(2 * n_classes, 10)) {}

  int grow(std::vector<int> idx, int depth, std::vector<AxisGiniNode>& nodes) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    std::vector<int> counts(n_classes_, 0);
    for (int i : idx) ++counts[y_[i]];
    const int label = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    nodes[id].label = label;
    const int n = static_cast<int>(idx.size());
    const int errors = n - counts[label];
    if (errors == 0 || n < min_size_ || depth >= max_depth_) return id;

    const BestSplit best = find_split(idx, counts);
    if (best.feature < 0) return id;
    std::vector<int> left, right;
    for (int i : idx) {
      (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    }
    const int n_after = plurality_errors(left) + plurality_errors(right);
    if (split_strength(n, errors, n_after).p_value > threshold_) return id;

    nodes[id].feature = best.feature;
    nodes[id].threshold = best.threshold;
    const int l = grow(std::move(left), depth + 1, nodes);
    nodes[id].left = l;
    const int r = grow(std::move(right), depth + 1, nodes);
    nodes[id].right = r;
    return id;
  }

 private:
  int plurality_errors(const std::vector<int>& idx) const {
    std::vector<int> counts(n_classes_, 0);
    for (int i : idx) ++counts[y_[i]];
    return static_cast<int>(idx.size()) -
           *std::max_element(counts.begin(), counts.end());
  }

  BestSplit find_split(const std::vector<int>& idx,
                       const std::vector<int>& counts) const {
    const int n = static_cast<int>(idx.size());
    BestSplit best;
    best.impurity = weighted_gini(counts, n);
    std::vector<int> order(idx);
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return x_(a, f) < x_(b, f);
      });
      std::vector<int> left(n_classes_, 0);
      std::vector<int> right = counts;
      for (int k = 0; k + 1 < n; ++k) {
        ++left[y_[order[k]]];
        --right[y_[order[k]]];
        const double lo = x_(order[k], f);
        const double hi = x_(order[k + 1], f);
        if (lo == hi) continue;
        const double impurity =
            weighted_gini(left, k + 1) + weighted_gini(right, n - k - 1);
        if (impurity < best.impurity - 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = lo + (hi - lo) / 2;
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  int n_classes_;
  double threshold_;
  int max_depth_;
  int min_size_;
};

}  // namespace

AxisGiniTree fit_axis_gini(const Dataset& ds, std::span<const int> rows,
                           double threshold, int max_depth) {
  AxisGiniTree tree;
  tree.imputation = fit_imputation(ds, rows, ImputationPolicy::kNodeWise);
  const EncodedMatrix encoded = encode(ds, rows, tree.imputation);
  std::vector<int> y;
  for (int r : rows) y.push_back(ds.target()[r]);
  std::vector<int> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  AxisGrower grower(encoded.values, y, static_cast<int>(ds.n_classes()),
                    threshold, max_depth);
  grower.grow(std::move(idx), 0, tree.nodes);
  return tree;
}

std::vector<int> predict_axis_gini(const AxisGiniTree& tree, const Dataset& ds,
                                   std::span<const int> rows) {
  const EncodedMatrix encoded = encode(ds, rows, tree.imputation);
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int id = 0;
    while (tree.nodes[id].feature >= 0) {
      const AxisGiniNode& node = tree.nodes[id];
      id = encoded.values(static_cast<Eigen::Index>(i), node.feature) <=
                   node.threshold
               ? node.left
               : node.right;
    }
    out[i] = tree.nodes[id].label;
  }
  return out;
}

}  // namespace foldtree
