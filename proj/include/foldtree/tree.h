#ifndef FOLDTREE_TREE_H_
#define FOLDTREE_TREE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "foldtree/dataset.h"
#include "foldtree/forward_select.h"
#include "foldtree/impute.h"
#include "foldtree/split_strength.h"
#include "foldtree/ulda.h"

namespace foldtree {

enum class Method { kLdaTree, kFoldTree };
enum class Stopping { kPrestop, kCvPrune };

const char* method_name(Method method);
Method parse_method(const std::string& name);
const char* stopping_name(Stopping stopping);
Stopping parse_stopping(const std::string& name);

struct GrowthConfig {
  Method method = Method::kLdaTree;
  Stopping stopping = Stopping::kPrestop;
  // A split is accepted when its p-value is at most the threshold in force:
  // prestop_threshold under kPrestop, growth_threshold while growing the
  // tree that cost-complexity pruning will cut back.
  double prestop_threshold = 0.01;
  double growth_threshold = 0.6;
  double forward_alpha = 0.05;
  ImputationPolicy imputation = ImputationPolicy::kNodeWise;
  int folds = 10;
  std::uint64_t seed = 0;
  int max_depth = 30;
  // 0 means max(2 * n_classes, 10).
  int min_node_size = 0;

  double acceptance_threshold() const {
    return stopping == Stopping::kPrestop ? prestop_threshold
                                          : growth_threshold;
  }
  int effective_min_node_size(int n_classes) const;

  bool operator==(const GrowthConfig&) const = default;
};

// Which priors the split model ended up with. The refit paths fire when the
// Gini index of the estimated-prior predictions is at most 0.1; a Gini of
// exactly 0 (everything predicted into one class) is routed to the refit too.
enum class PriorPath { kEstimated, kLowGiniRefit, kZeroGiniRefit };

const char* prior_path_name(PriorPath path);
PriorPath parse_prior_path(const std::string& name);

struct SplitDiagnostics {
  SplitStrength strength;
  double predicted_gini = 0.0;
  PriorPath prior_path = PriorPath::kEstimated;
  bool accepted = false;

  bool operator==(const SplitDiagnostics&) const = default;
};

struct PluralityModel {
  int label = 0;
  // Training class proportions, one entry per class.
  std::vector<double> proportions;

  bool operator==(const PluralityModel&) const = default;
};

using NodeModel = std::variant<UldaModel, PluralityModel>;

struct TreeNode {
  int id = 0;
  int depth = 0;
  int parent = -1;
  // Training rows reaching the node. Not serialized.
  RowIds rows;
  int n_rows = 0;
  std::vector<int> class_counts;
  ImputationRecord imputation;
  NodeModel model;
  // Training errors of `model` on the node's rows.
  int training_errors = 0;
  // Forward selection behind the node's discriminant fit (FoLDTree only).
  std::optional<SelectionTrace> selection;
  // Present iff the node is internal.
  std::optional<UldaModel> split;
  // Predicted class -> child node id.
  std::map<int, int> children;
  // Present whenever a split candidate was evaluated with the z-test.
  std::optional<SplitDiagnostics> diagnostics;

  bool is_leaf() const { return children.empty(); }
  // Class ids that own a child branch, ascending.
  std::vector<int> branch_classes() const;
};

struct CvPoint {
  int leaves = 0;
  double accuracy = 0.0;
  double standard_error = 0.0;

  bool operator==(const CvPoint&) const = default;
};

struct PruningReport {
  int folds = 0;
  std::uint64_t seed = 0;
  int chosen_leaves = 0;
  int grown_leaves = 0;
  std::vector<CvPoint> curve;

  bool operator==(const PruningReport&) const = default;
};

class TreeModel {
 public:
  // Node ids equal their index; node 0 is the root.
  std::vector<TreeNode> nodes;
  Schema schema;
  std::vector<std::string> class_labels;
  GrowthConfig config;
  std::optional<PruningReport> pruning;
  double training_accuracy = 0.0;

  const TreeNode& root() const { return nodes.front(); }
  int n_classes() const { return static_cast<int>(class_labels.size()); }
  int n_leaves() const;
  int depth() const;
  // Checks ids, parent links, acyclicity and branch keys. Throws DataError.
  void validate() const;
};

// Grows a tree on `rows` of `ds` with the acceptance threshold of `config`.
// No pruning happens here. Throws DataError when the rows carry fewer than
// two classes.
TreeModel grow(const Dataset& ds, std::span<const int> rows,
               const GrowthConfig& config);

// grow() followed, under Stopping::kCvPrune, by cross-validated pruning.
TreeModel train(const Dataset& ds, std::span<const int> rows,
                const GrowthConfig& config);
TreeModel train(const Dataset& ds, const GrowthConfig& config);

// Leaf reached by each row. Throws DataError on a schema mismatch.
std::vector<int> route(const TreeModel& tree, const Dataset& ds,
                       std::span<const int> rows);

// Every node on each row's path, root first.
std::vector<std::vector<int>> route_paths(const TreeModel& tree,
                                          const Dataset& ds,
                                          std::span<const int> rows);

std::vector<int> predict_labels(const TreeModel& tree, const Dataset& ds,
                                std::span<const int> rows);
std::vector<int> predict_labels(const TreeModel& tree, const Dataset& ds);

// n x n_classes posteriors. Plurality leaves emit their training class
// proportions.
Eigen::MatrixXd predict_posteriors(const TreeModel& tree, const Dataset& ds,
                                   std::span<const int> rows);
Eigen::MatrixXd predict_posteriors(const TreeModel& tree, const Dataset& ds);

// Labels from one node's own model for the given rows (the rows are encoded
// with the node's imputation record).
std::vector<int> node_model_labels(const TreeNode& node, const Dataset& ds,
                                   std::span<const int> rows);

double accuracy(std::span<const int> predicted, const Dataset& ds,
                std::span<const int> rows);

// Copy of `tree` in which every node of `collapse` becomes a leaf with its
// stored node model. Node ids are renumbered in preorder.
TreeModel collapse_nodes(const TreeModel& tree, const std::vector<int>& collapse);

// Throws DataError when the data schema differs from the tree's.
void check_schema(const TreeModel& tree, const Dataset& ds);

}  // namespace foldtree

#endif  // FOLDTREE_TREE_H_
