#include "foldtree/split_strength.h"

#include <cmath>
#include <limits>

#include "foldtree/error.h"

namespace foldtree {

double normal_upper_tail(double z) {
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

SplitStrength split_strength(int n_total, int n_before, int n_after) {
  if (n_total < 1 || n_before < 0 || n_after < 0 || n_before > n_total ||
      n_after > n_total) {
    throw UsageError("split strength counts out of range");
  }
  SplitStrength s{n_total, n_before, n_after, 0.0, 0.5};
  const double n = n_total;
  const double before = n_before;
  const double after = n_after;
  const double variance =
      (before * (n - before) + after * (n - after)) / n;
  const double diff = before - after;
  if (variance > 0.0) {
    s.z = diff / std::sqrt(variance);
  } else if (diff != 0.0) {
    s.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  s.p_value = normal_upper_tail(s.z);
  return s;
}

double cart_alpha(double node_errors, double subtree_errors, int n_terminals) {
  if (n_terminals < 2) throw UsageError("cart_alpha needs at least 2 leaves");
  return (node_errors - subtree_errors) / static_cast<double>(n_terminals - 1);
}

double gini_index(std::span<const double> proportions) {
  double sum = 0.0;
  double squares = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0)) throw UsageError("negative class proportion");
    sum += p;
    squares += p * p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw UsageError("class proportions do not sum to 1");
  }
  return 1.0 - squares;
}

}  // namespace foldtree
