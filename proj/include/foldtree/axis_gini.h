#ifndef FOLDTREE_AXIS_GINI_H_
#define FOLDTREE_AXIS_GINI_H_

#include <span>
#include <vector>

#include "foldtree/dataset.h"
#include "foldtree/impute.h"

namespace foldtree {

// Baseline univariate tree: binary x <= t splits chosen by weighted Gini,
// plurality leaves, and the same z-test acceptance rule as the LDA trees.
// Rows are encoded once with the root imputation record.
struct AxisGiniNode {
  int feature = -1;  // encoded column; -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;  // plurality class of the node's training rows
};

struct AxisGiniTree {
  ImputationRecord imputation;
  std::vector<AxisGiniNode> nodes;

  int n_leaves() const;
};

AxisGiniTree fit_axis_gini(const Dataset& ds, std::span<const int> rows,
                           double threshold = 0.01, int max_depth = 30);

std::vector<int> predict_axis_gini(const AxisGiniTree& tree, const Dataset& ds,
                                   std::span<const int> rows);

}  // namespace foldtree

#endif  // FOLDTREE_AXIS_GINI_H_
