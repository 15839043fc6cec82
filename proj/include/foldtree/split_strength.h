#ifndef FOLDTREE_SPLIT_STRENGTH_H_
#define FOLDTREE_SPLIT_STRENGTH_H_

#include <span>

namespace foldtree {

// One-sided two-sample z-test of training accuracy before vs after a split.
// Small p means the split removed significantly many training errors.
struct SplitStrength {
  int n_total = 0;
  int n_before = 0;  // training errors without the split
  int n_after = 0;   // training errors routing through the split
  double z = 0.0;
  double p_value = 0.5;

  bool operator==(const SplitStrength&) const = default;
};

// z = (N_before - N_after) /
//     sqrt((N_before (N - N_before) + N_after (N - N_after)) / N),
// p = 1 - Phi(z). A zero denominator with equal counts gives z = 0, p = 0.5;
// with unequal counts z is +-infinity. Throws UsageError when the counts
// violate 0 <= N_before, N_after <= N_total or N_total < 1.
SplitStrength split_strength(int n_total, int n_before, int n_after);

// Standard normal upper tail, 1 - Phi(z).
double normal_upper_tail(double z);

// CART's weakest-link strength (R(t) - R(T_t)) / (|leaves| - 1). Reported
// for comparison only. Throws UsageError when n_terminals < 2.
double cart_alpha(double node_errors, double subtree_errors, int n_terminals);

// 1 - sum p_j^2. Throws UsageError unless the proportions are nonnegative
// and sum to 1 within 1e-10.
double gini_index(std::span<const double> proportions);

}  // namespace foldtree

#endif  // FOLDTREE_SPLIT_STRENGTH_H_
