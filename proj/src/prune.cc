#include "foldtree/prune.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "foldtree/error.h"
#include "foldtree/parallel.h"

namespace foldtree {

std::vector<int> PruningSequence::collapsed_in(std::size_t k) const {
  std::vector<int> out;
  for (std::size_t id = 0; id < collapse_step.size(); ++id) {
    const int step = collapse_step[id];
    if (step >= 0 && static_cast<std::size_t>(step) < k) {
      out.push_back(static_cast<int>(id));
    }
  }
  return out;
}

SplitStrength subtree_strength(const TreeModel& tree, int node_id,
                               const std::vector<bool>& is_leaf) {
  const TreeNode& node = tree.nodes[node_id];
  int n_after = 0;
  std::vector<int> stack{node_id};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (is_leaf[id]) {
      n_after += tree.nodes[id].training_errors;
      continue;
    }
    for (const auto& [cls, child] : tree.nodes[id].children) {
      stack.push_back(child);
    }
  }
  return split_strength(node.n_rows, node.training_errors, n_after);
}

PruningSequence pruning_sequence(const TreeModel& tree) {
  const std::size_t n = tree.nodes.size();
  PruningSequence seq;
  seq.collapse_step.assign(n, -1);

  // Per node: summed training errors and count of the current leaves below.
  // Nodes are stored parents first, so a reverse sweep fills both.
  std::vector<int> leaf_errors(n, 0);
  std::vector<int> leaf_count(n, 0);
  std::vector<bool> is_leaf(n, false);
  std::vector<bool> alive(n, true);
  for (std::size_t i = n; i-- > 0;) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      is_leaf[i] = true;
      leaf_errors[i] = node.training_errors;
      leaf_count[i] = 1;
    }
    if (node.parent >= 0) {
      leaf_errors[node.parent] += leaf_errors[i];
      leaf_count[node.parent] += leaf_count[i];
    }
  }
  seq.leaves.push_back(leaf_count[0]);

  while (!is_leaf[0]) {
    int weakest = -1;
    double weakest_p = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || is_leaf[i]) continue;
      const TreeNode& node = tree.nodes[i];
      const double p =
          split_strength(node.n_rows, node.training_errors, leaf_errors[i])
              .p_value;
      const bool better =
          weakest < 0 || p > weakest_p ||
          (p == weakest_p && node.depth > tree.nodes[weakest].depth);
      if (better) {
        weakest = static_cast<int>(i);
        weakest_p = p;
      }
    }

    const int error_delta =
        tree.nodes[weakest].training_errors - leaf_errors[weakest];
    const int leaf_delta = 1 - leaf_count[weakest];
    for (int a = weakest; a >= 0; a = tree.nodes[a].parent) {
      leaf_errors[a] += error_delta;
      leaf_count[a] += leaf_delta;
    }
    std::vector<int> stack;
    for (const auto& [cls, child] : tree.nodes[weakest].children) {
      stack.push_back(child);
    }
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      alive[id] = false;
      for (const auto& [cls, child] : tree.nodes[id].children) {
        stack.push_back(child);
      }
    }
    is_leaf[weakest] = true;
    seq.collapse_step[weakest] = static_cast<int>(seq.steps.size());
    seq.steps.push_back({weakest, weakest_p});
    seq.leaves.push_back(leaf_count[0]);
  }
  return seq;
}

std::vector<double> sequence_accuracy(const TreeModel& tree,
                                      const PruningSequence& sequence,
                                      const Dataset& ds,
                                      std::span<const int> rows) {
  const int n_subtrees = static_cast<int>(sequence.size());
  std::vector<double> out(n_subtrees, 0.0);
  if (rows.empty()) return out;

  const std::vector<std::vector<int>> paths = route_paths(tree, ds, rows);

  // Whether each node's own model gets each row right, one batch per node.
  std::vector<std::vector<int>> members(tree.nodes.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int id : paths[i]) members[id].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<char>> correct(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    correct[i].resize(paths[i].size());
  }
  std::vector<std::size_t> cursor(rows.size(), 0);
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    if (members[id].empty()) continue;
    RowIds subset;
    for (int i : members[id]) subset.push_back(rows[i]);
    const std::vector<int> labels =
        node_model_labels(tree.nodes[id], ds, subset);
    for (std::size_t m = 0; m < members[id].size(); ++m) {
      const int i = members[id][m];
      // Paths list nodes parents first and ids are preorder, so nodes are
      // met in path order.
      correct[i][cursor[i]++] = labels[m] == ds.target()[rows[i]];
    }
  }

  // Subtree k predicts a row with the first path node collapsed before step
  // k, or with the path's leaf when there is none. Accumulate by ranges.
  const int never = std::numeric_limits<int>::max();
  std::vector<long> diff(n_subtrees + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int prefix_min = never;
    const std::vector<int>& path = paths[i];
    for (std::size_t d = 0; d < path.size(); ++d) {
      const int step = sequence.collapse_step[path[d]];
      const bool last = d + 1 == path.size();
      int lo = -1;
      int hi = std::min(prefix_min, n_subtrees - 1);
      if (last && step < 0) {
        lo = 0;
      } else if (step >= 0 && step < prefix_min) {
        lo = step + 1;
      }
      if (lo >= 0 && lo <= hi && correct[i][d]) {
        ++diff[lo];
        --diff[hi + 1];
      }
      if (step >= 0) prefix_min = std::min(prefix_min, step);
    }
  }
  long running = 0;
  for (int k = 0; k < n_subtrees; ++k) {
    running += diff[k];
    out[k] = static_cast<double>(running) / static_cast<double>(rows.size());
  }
  return out;
}

TreeModel prune(const TreeModel& tree, const Dataset& ds,
                std::span<const int> rows, int k, std::uint64_t seed) {
  if (tree.root().is_leaf()) return tree;
  const PruningSequence sequence = pruning_sequence(tree);
  const FoldPlan plan = make_folds(ds, rows, k, seed);

  struct FoldResult {
    std::vector<int> leaves;
    std::vector<double> accuracy;
    int held_out = 0;
  };
  std::vector<FoldResult> results(k);
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t f) {
    const RowIds train_rows = plan.complement_rows(static_cast<int>(f));
    const RowIds test_rows = plan.fold_rows(static_cast<int>(f));
    const TreeModel fold_tree = grow(ds, train_rows, tree.config);
    const PruningSequence fold_seq = pruning_sequence(fold_tree);
    results[f].leaves = fold_seq.leaves;
    results[f].accuracy =
        sequence_accuracy(fold_tree, fold_seq, ds, test_rows);
    results[f].held_out = static_cast<int>(test_rows.size());
  });

  PruningReport report;
  report.folds = k;
  report.seed = seed;
  report.grown_leaves = sequence.leaves.front();
  double total = 0.0;
  for (const auto& r : results) total += r.held_out;
  for (int target : sequence.leaves) {
    double correct = 0.0;
    for (const auto& r : results) {
      std::size_t j = 0;
      while (r.leaves[j] > target) ++j;
      correct += r.accuracy[j] * r.held_out;
    }
    CvPoint point;
    point.leaves = target;
    point.accuracy = correct / total;
    point.standard_error =
        std::sqrt(point.accuracy * (1.0 - point.accuracy) / total);
    report.curve.push_back(point);
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < report.curve.size(); ++s) {
    if (report.curve[s].accuracy > report.curve[best].accuracy) best = s;
  }
  const double bar =
      report.curve[best].accuracy - report.curve[best].standard_error;
  std::size_t chosen = best;
  for (std::size_t s = best; s < report.curve.size(); ++s) {
    if (report.curve[s].accuracy >= bar) chosen = s;
  }
  report.chosen_leaves = report.curve[chosen].leaves;

  TreeModel out = collapse_nodes(tree, sequence.collapsed_in(chosen));
  out.pruning = report;
  out.training_accuracy = accuracy(predict_labels(out, ds, rows), ds, rows);
  return out;
}

}  // namespace foldtree
