#include "foldtree/tree.h"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "foldtree/error.h"
#include "foldtree/prune.h"

namespace foldtree {

const char* method_name(Method method) {
  return method == Method::kLdaTree ? "ldatree" : "foldtree";
}

Method parse_method(const std::string& name) {
  if (name == "ldatree") return Method::kLdaTree;
  if (name == "foldtree") return Method::kFoldTree;
  throw UsageError("unknown method '" + name + "'");
}

const char* stopping_name(Stopping stopping) {
  return stopping == Stopping::kPrestop ? "prestop" : "cv";
}

Stopping parse_stopping(const std::string& name) {
  if (name == "prestop") return Stopping::kPrestop;
  if (name == "cv" || name == "cv_prune") return Stopping::kCvPrune;
  throw UsageError("unknown stopping mode '" + name + "'");
}

const char* prior_path_name(PriorPath path) {
  switch (path) {
    case PriorPath::kEstimated:
      return "estimated";
    case PriorPath::kLowGiniRefit:
      return "low_gini_refit";
    case PriorPath::kZeroGiniRefit:
      return "zero_gini_refit";
  }
  return "estimated";
}

PriorPath parse_prior_path(const std::string& name) {
  if (name == "estimated") return PriorPath::kEstimated;
  if (name == "low_gini_refit") return PriorPath::kLowGiniRefit;
  if (name == "zero_gini_refit") return PriorPath::kZeroGiniRefit;
  throw DataError("unknown prior path '" + name + "'");
}

int GrowthConfig::effective_min_node_size(int n_classes) const {
  return min_node_size > 0 ? min_node_size : std::max(2 * n_classes, 10);
}

std::vector<int> TreeNode::branch_classes() const {
  std::vector<int> out;
  out.reserve(children.size());
  for (const auto& [cls, child] : children) out.push_back(cls);
  return out;
}

int TreeModel::n_leaves() const {
  return static_cast<int>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int TreeModel::depth() const {
  int out = 0;
  for (const auto& node : nodes) out = std::max(out, node.depth);
  return out;
}

void TreeModel::validate() const {
  if (nodes.empty()) throw DataError("tree has no nodes");
  if (nodes[0].parent != -1) throw DataError("root node has a parent");
  std::vector<int> seen(nodes.size(), 0);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (seen[id]++) throw DataError("node table contains a cycle");
    const TreeNode& node = nodes[id];
    if (node.id != id) throw DataError("node id does not match its index");
    if (node.is_leaf() != !node.split.has_value()) {
      throw DataError("node " + std::to_string(id) +
                      ": split model present iff internal");
    }
    if (!node.is_leaf() && node.children.size() < 2) {
      throw DataError("internal node with fewer than two children");
    }
    for (const auto& [cls, child] : node.children) {
      if (cls < 0 || cls >= n_classes()) {
        throw DataError("branch key outside the class table");
      }
      if (child <= 0 || child >= static_cast<int>(nodes.size())) {
        throw DataError("child id out of range");
      }
      if (nodes[child].parent != id) throw DataError("broken parent link");
      stack.push_back(child);
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw DataError("node table contains unreachable nodes");
  }
}

void check_schema(const TreeModel& tree, const Dataset& ds) {
  const Schema schema = ds.schema();
  if (schema.size() != tree.schema.size()) {
    throw DataError("schema mismatch: model expects " +
                    std::to_string(tree.schema.size()) + " columns, data has " +
                    std::to_string(schema.size()));
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j] != tree.schema[j]) {
      throw DataError("schema mismatch at column '" + tree.schema[j].name +
                      "'");
    }
  }
}

namespace {

int plurality_label(const std::vector<int>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

std::vector<int> targets_of(const Dataset& ds, std::span<const int> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (int r : rows) y.push_back(ds.target()[r]);
  return y;
}

struct Candidate {
  UldaModel model;
  double gini = 0.0;
  PriorPath path = PriorPath::kEstimated;
  std::map<int, RowIds> groups;
};

struct NodeFit {
  RowIds rows;
  std::vector<int> counts;
  ImputationRecord imputation;
  NodeModel model;
  int errors = 0;
  std::optional<SelectionTrace> selection;
  std::optional<Candidate> candidate;
};

class Grower {
 public:
  Grower(const Dataset& ds, const GrowthConfig& config)
      : ds_(ds),
        config_(config),
        n_classes_(static_cast<int>(ds.n_classes())),
        min_size_(config.effective_min_node_size(n_classes_)) {}

  std::vector<TreeNode> run(std::span<const int> rows) {
    NodeFit root = fit_node(RowIds(rows.begin(), rows.end()), 0);
    root_record_ = root.imputation;
    build(std::move(root), 0, -1);
    return std::move(nodes_);
  }

 private:
  NodeFit fit_node(RowIds rows, int depth) {
    NodeFit fit;
    fit.rows = std::move(rows);
    const auto n = static_cast<int>(fit.rows.size());
    fit.counts = ds_.class_counts(fit.rows);
    fit.imputation =
        fit_imputation(ds_, fit.rows, config_.imputation,
                       root_record_ ? &*root_record_ : nullptr);

    PluralityModel plurality;
    plurality.label = plurality_label(fit.counts);
    for (int c : fit.counts) {
      plurality.proportions.push_back(static_cast<double>(c) / n);
    }
    const int plurality_correct = fit.counts[plurality.label];
    fit.errors = n - plurality_correct;
    fit.model = std::move(plurality);

    const auto present =
        std::count_if(fit.counts.begin(), fit.counts.end(),
                      [](int c) { return c > 0; });
    if (present < 2) return fit;

    const EncodedMatrix encoded = encode(ds_, fit.rows, fit.imputation);
    const std::vector<int> y = targets_of(ds_, fit.rows);
    const DiscriminantMoments moments =
        compute_moments(encoded.values, y, n_classes_);

    std::optional<UldaModel> estimated;
    if (config_.method == Method::kLdaTree) {
      std::vector<int> all(static_cast<std::size_t>(moments.n_columns()));
      std::iota(all.begin(), all.end(), 0);
      estimated = fit_ulda(moments, PriorMode::kEstimated, all);
    } else {
      ForwardResult forward =
          forward_ulda(moments, PriorMode::kEstimated, config_.forward_alpha);
      estimated = std::move(forward.model);
      fit.selection = std::move(forward.trace);
    }
    if (!estimated) return fit;

    std::vector<int> predicted = predict(*estimated, encoded.values);
    int correct = 0;
    for (int i = 0; i < n; ++i) correct += predicted[i] == y[i];
    if (correct > plurality_correct) {
      fit.model = *estimated;
      fit.errors = n - correct;
    }

    if (n < min_size_ || depth >= config_.max_depth) return fit;

    std::vector<double> shares(n_classes_, 0.0);
    for (int c : predicted) shares[c] += 1.0 / n;
    Candidate candidate;
    candidate.gini = gini_index(shares);
    candidate.model = std::move(*estimated);
    if (candidate.gini <= 0.1) {
      candidate.path = candidate.gini == 0.0 ? PriorPath::kZeroGiniRefit
                                             : PriorPath::kLowGiniRefit;
      candidate.model =
          candidate.model.with_priors(PriorMode::kEqual, moments.counts);
      predicted = predict(candidate.model, encoded.values);
    }
    for (int i = 0; i < n; ++i) {
      candidate.groups[predicted[i]].push_back(fit.rows[i]);
    }
    if (candidate.groups.size() >= 2) fit.candidate = std::move(candidate);
    return fit;
  }

  int build(NodeFit fit, int depth, int parent) {
    const int id = static_cast<int>(nodes_.size());
    {
      TreeNode node;
      node.id = id;
      node.depth = depth;
      node.parent = parent;
      node.n_rows = static_cast<int>(fit.rows.size());
      node.rows = std::move(fit.rows);
      node.class_counts = std::move(fit.counts);
      node.imputation = std::move(fit.imputation);
      node.model = std::move(fit.model);
      node.training_errors = fit.errors;
      node.selection = std::move(fit.selection);
      nodes_.push_back(std::move(node));
    }
    if (!fit.candidate) return id;

    Candidate& candidate = *fit.candidate;
    std::vector<std::pair<int, NodeFit>> children;
    int n_after = 0;
    for (auto& [cls, rows] : candidate.groups) {
      NodeFit child = fit_node(std::move(rows), depth + 1);
      n_after += child.errors;
      children.emplace_back(cls, std::move(child));
    }
    SplitDiagnostics diagnostics;
    diagnostics.strength =
        split_strength(nodes_[id].n_rows, fit.errors, n_after);
    diagnostics.predicted_gini = candidate.gini;
    diagnostics.prior_path = candidate.path;
    diagnostics.accepted =
        diagnostics.strength.p_value <= config_.acceptance_threshold();
    nodes_[id].diagnostics = diagnostics;
    if (!diagnostics.accepted) return id;

    nodes_[id].split = std::move(candidate.model);
    for (auto& [cls, child] : children) {
      const int child_id = build(std::move(child), depth + 1, id);
      nodes_[id].children[cls] = child_id;
    }
    return id;
  }

  const Dataset& ds_;
  GrowthConfig config_;
  int n_classes_;
  int min_size_;
  std::optional<ImputationRecord> root_record_;
  std::vector<TreeNode> nodes_;
};

// Splits `positions` (indices into `rows`) among the children of an internal
// node.
std::vector<std::pair<int, std::vector<int>>> dispatch(
    const TreeNode& node, const Dataset& ds, std::span<const int> rows,
    const std::vector<int>& positions) {
  RowIds subset;
  subset.reserve(positions.size());
  for (int p : positions) subset.push_back(rows[p]);
  const EncodedMatrix encoded = encode(ds, subset, node.imputation);
  const std::vector<int> branches = node.branch_classes();
  const std::vector<int> predicted =
      predict(*node.split, encoded.values, branches);
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    groups[node.children.at(predicted[i])].push_back(positions[i]);
  }
  return {groups.begin(), groups.end()};
}

// Calls at_node(node, positions) for every node reached, parents first.
template <typename Visitor>
void walk(const TreeModel& tree, const Dataset& ds, std::span<const int> rows,
          Visitor&& at_node) {
  check_schema(tree, ds);
  std::vector<int> all(rows.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::pair<int, std::vector<int>>> stack;
  stack.emplace_back(0, std::move(all));
  while (!stack.empty()) {
    auto [id, positions] = std::move(stack.back());
    stack.pop_back();
    if (positions.empty()) continue;
    const TreeNode& node = tree.nodes[id];
    at_node(node, positions);
    if (node.is_leaf()) continue;
    for (auto& entry : dispatch(node, ds, rows, positions)) {
      stack.push_back(std::move(entry));
    }
  }
}

}  // namespace

TreeModel grow(const Dataset& ds, std::span<const int> rows,
               const GrowthConfig& config) {
  if (!ds.labeled()) throw DataError("training data has no target");
  if (rows.empty()) throw DataError("training data has no rows");
  const std::vector<int> counts = ds.class_counts(rows);
  if (std::count_if(counts.begin(), counts.end(),
                    [](int c) { return c > 0; }) < 2) {
    throw DataError("training data needs at least two classes");
  }
  TreeModel tree;
  tree.schema = ds.schema();
  tree.class_labels = ds.class_labels();
  tree.config = config;
  tree.nodes = Grower(ds, config).run(rows);
  tree.training_accuracy = accuracy(predict_labels(tree, ds, rows), ds, rows);
  return tree;
}

TreeModel train(const Dataset& ds, std::span<const int> rows,
                const GrowthConfig& config) {
  TreeModel tree = grow(ds, rows, config);
  if (config.stopping == Stopping::kCvPrune) {
    tree = prune(tree, ds, rows, config.folds, config.seed);
  }
  return tree;
}

TreeModel train(const Dataset& ds, const GrowthConfig& config) {
  const RowIds rows = ds.all_rows();
  return train(ds, rows, config);
}

std::vector<int> route(const TreeModel& tree, const Dataset& ds,
                       std::span<const int> rows) {
  std::vector<int> leaf(rows.size(), -1);
  walk(tree, ds, rows, [&](const TreeNode& node, const std::vector<int>& pos) {
    if (!node.is_leaf()) return;
    for (int p : pos) leaf[p] = node.id;
  });
  return leaf;
}

std::vector<std::vector<int>> route_paths(const TreeModel& tree,
                                          const Dataset& ds,
                                          std::span<const int> rows) {
  std::vector<std::vector<int>> paths(rows.size());
  walk(tree, ds, rows, [&](const TreeNode& node, const std::vector<int>& pos) {
    for (int p : pos) paths[p].push_back(node.id);
  });
  return paths;
}

std::vector<int> node_model_labels(const TreeNode& node, const Dataset& ds,
                                   std::span<const int> rows) {
  if (const auto* plurality = std::get_if<PluralityModel>(&node.model)) {
    return std::vector<int>(rows.size(), plurality->label);
  }
  const EncodedMatrix encoded = encode(ds, rows, node.imputation);
  return predict(std::get<UldaModel>(node.model), encoded.values);
}

std::vector<int> predict_labels(const TreeModel& tree, const Dataset& ds,
                                std::span<const int> rows) {
  std::vector<int> out(rows.size(), -1);
  walk(tree, ds, rows, [&](const TreeNode& node, const std::vector<int>& pos) {
    if (!node.is_leaf()) return;
    RowIds subset;
    subset.reserve(pos.size());
    for (int p : pos) subset.push_back(rows[p]);
    const std::vector<int> labels = node_model_labels(node, ds, subset);
    for (std::size_t i = 0; i < pos.size(); ++i) out[pos[i]] = labels[i];
  });
  return out;
}

std::vector<int> predict_labels(const TreeModel& tree, const Dataset& ds) {
  const RowIds rows = ds.all_rows();
  return predict_labels(tree, ds, rows);
}

Eigen::MatrixXd predict_posteriors(const TreeModel& tree, const Dataset& ds,
                                   std::span<const int> rows) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(rows.size()), tree.n_classes());
  walk(tree, ds, rows, [&](const TreeNode& node, const std::vector<int>& pos) {
    if (!node.is_leaf()) return;
    if (const auto* plurality = std::get_if<PluralityModel>(&node.model)) {
      const Eigen::Map<const Eigen::RowVectorXd> shares(
          plurality->proportions.data(),
          static_cast<Eigen::Index>(plurality->proportions.size()));
      for (int p : pos) out.row(p) = shares;
      return;
    }
    RowIds subset;
    subset.reserve(pos.size());
    for (int p : pos) subset.push_back(rows[p]);
    const EncodedMatrix encoded = encode(ds, subset, node.imputation);
    const Eigen::MatrixXd probs =
        posterior(std::get<UldaModel>(node.model), encoded.values);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      out.row(pos[i]) = probs.row(static_cast<Eigen::Index>(i));
    }
  });
  return out;
}

Eigen::MatrixXd predict_posteriors(const TreeModel& tree, const Dataset& ds) {
  const RowIds rows = ds.all_rows();
  return predict_posteriors(tree, ds, rows);
}

double accuracy(std::span<const int> predicted, const Dataset& ds,
                std::span<const int> rows) {
  if (rows.empty()) return 0.0;
  int correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    correct += predicted[i] == ds.target()[rows[i]];
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

TreeModel collapse_nodes(const TreeModel& tree,
                         const std::vector<int>& collapse) {
  const std::unordered_set<int> collapsed(collapse.begin(), collapse.end());
  TreeModel out;
  out.schema = tree.schema;
  out.class_labels = tree.class_labels;
  out.config = tree.config;
  out.pruning = tree.pruning;

  // Preorder copy; (old id, new parent id) pairs.
  std::vector<std::pair<int, int>> stack{{0, -1}};
  while (!stack.empty()) {
    const auto [old_id, parent] = stack.back();
    stack.pop_back();
    TreeNode node = tree.nodes[old_id];
    node.id = static_cast<int>(out.nodes.size());
    node.parent = parent;
    const std::map<int, int> old_children = std::move(node.children);
    node.children.clear();
    const bool keep_split = !old_children.empty() && !collapsed.contains(old_id);
    if (!keep_split) node.split.reset();
    out.nodes.push_back(std::move(node));
    if (parent >= 0) {
      // Recover the branch key pointing at old_id.
      const TreeNode& old_parent = tree.nodes[tree.nodes[old_id].parent];
      for (const auto& [cls, child] : old_parent.children) {
        if (child == old_id) out.nodes[parent].children[cls] = out.nodes.back().id;
      }
    }
    if (keep_split) {
      const int new_id = out.nodes.back().id;
      for (auto it = old_children.rbegin(); it != old_children.rend(); ++it) {
        stack.emplace_back(it->second, new_id);
      }
    }
  }
  return out;
}

}  // namespace foldtree
