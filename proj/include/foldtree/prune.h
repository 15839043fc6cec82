#ifndef FOLDTREE_PRUNE_H_
#define FOLDTREE_PRUNE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "foldtree/dataset.h"
#include "foldtree/tree.h"

namespace foldtree {

struct PruneStep {
  int node = 0;
  // Subtree z-test p-value of `node` when it was collapsed.
  double p_value = 0.0;
};

// Nested weakest-link sequence. Subtree k is the tree with steps [0, k)
// applied; subtree 0 is the full tree and the last subtree is the root leaf.
struct PruningSequence {
  std::vector<PruneStep> steps;
  std::vector<int> leaves;  // leaves of subtree k; size steps.size() + 1
  // Per node id: index of the step collapsing it, or -1 when it is never
  // collapsed itself (original leaves and nodes removed with an ancestor).
  std::vector<int> collapse_step;

  std::size_t size() const { return leaves.size(); }
  // Nodes turned into leaves in subtree k.
  std::vector<int> collapsed_in(std::size_t k) const;
};

// z-test of replacing the subtree under `node_id` by the node itself:
// N_before is the node model's training errors, N_after the summed training
// errors of the subtree's current leaves.
SplitStrength subtree_strength(const TreeModel& tree, int node_id,
                               const std::vector<bool>& is_leaf);

// Repeatedly collapses the internal node whose subtree split is weakest
// (largest subtree p-value; ties go to the deeper node, then the lower id).
PruningSequence pruning_sequence(const TreeModel& tree);

// Held-out accuracy of every subtree in `sequence` on `rows`.
std::vector<double> sequence_accuracy(const TreeModel& tree,
                                      const PruningSequence& sequence,
                                      const Dataset& ds,
                                      std::span<const int> rows);

// Cost-complexity pruning with k-fold cross-validation. Each fold regrows a
// tree with the same config on the other folds and scores its own sequence
// on the held-out fold; subtrees are matched across trees by leaf count (a
// fold contributes its first subtree with at most as many leaves). The
// chosen subtree is the smallest one whose CV accuracy is within one
// standard error of the best. Nothing is refitted. Folds run in parallel.
TreeModel prune(const TreeModel& tree, const Dataset& ds,
                std::span<const int> rows, int k, std::uint64_t seed);

}  // namespace foldtree

#endif  // FOLDTREE_PRUNE_H_
