#ifndef FOLDTREE_FORWARD_SELECT_H_
#define FOLDTREE_FORWARD_SELECT_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "foldtree/ulda.h"

namespace foldtree {

struct SelectionStep {
  int column = 0;
  double gain = 0.0;     // increase of the trace criterion
  double p_value = 0.0;  // adjusted step p-value

  bool operator==(const SelectionStep&) const = default;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  // Best remaining candidate when selection stopped on significance; absent
  // when candidates ran out or no candidate had a positive gain.
  std::optional<SelectionStep> rejected;

  std::vector<int> features() const;
  // Trace criterion of the selected subset (sum of gains).
  double trace() const;

  bool operator==(const SelectionTrace&) const = default;
};

struct ForwardResult {
  // nullopt: nothing was selected, so there is no discriminant direction.
  std::optional<UldaModel> model;
  SelectionTrace trace;
};

// P-value for adding one column with trace gain `gain` when `n_selected`
// columns are already in. (n - 1 - n_selected) * gain is referred to a
// chi-square with (n_classes - 1) degrees of freedom, and the result is
// Bonferroni-adjusted over the `n_candidates` columns competing at the step.
double step_p_value(double gain, int n_rows, int n_selected, int n_classes,
                    int n_candidates);

// Greedy forward ULDA. Each step adds the column with the largest trace gain
// (lowest column id on ties) and stops once that column's p-value exceeds
// alpha or no column has a positive gain. Gains are computed by S_T-metric
// Gram-Schmidt on the moments, so each step costs O(M * k) after the initial
// scatter pass.
ForwardResult forward_ulda(const DiscriminantMoments& moments,
                           PriorMode priors, double alpha);
ForwardResult forward_ulda(const Eigen::MatrixXd& x, std::span<const int> y,
                           int n_classes, PriorMode priors, double alpha);

// Acceptance order of the selected columns. Throws DataError on an empty
// trace.
std::vector<int> rank_columns(const SelectionTrace& trace);

}  // namespace foldtree

#endif  // FOLDTREE_FORWARD_SELECT_H_
