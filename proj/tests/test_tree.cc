#include <algorithm>
#include <set>

#include "doctest.h"

#include "foldtree/error.h"
#include "foldtree/impute.h"
#include "foldtree/serialize.h"
#include "foldtree/synthetic.h"
#include "foldtree/tree.h"
#include "test_support.h"

using namespace foldtree;

namespace {

GrowthConfig make_config(Method method, Stopping stopping) {
  GrowthConfig config;
  config.method = method;
  config.stopping = stopping;
  config.seed = 3;
  return config;
}

// Structural invariants of a freshly grown tree (training rows retained).
void check_invariants(const TreeModel& tree, const Dataset& ds) {
  tree.validate();
  const int min_size = tree.config.effective_min_node_size(tree.n_classes());
  for (const TreeNode& node : tree.nodes) {
    CHECK(node.n_rows == static_cast<int>(node.rows.size()));
    CHECK(node.class_counts == ds.class_counts(node.rows));
    CHECK(node.depth <= tree.config.max_depth);
    if (const auto* plurality = std::get_if<PluralityModel>(&node.model)) {
      const auto top = std::max_element(node.class_counts.begin(),
                                        node.class_counts.end());
      CHECK(plurality->label == top - node.class_counts.begin());
      CHECK(node.training_errors == node.n_rows - *top);
    }
    if (node.is_leaf()) continue;

    REQUIRE(node.split);
    CHECK(node.n_rows >= min_size);
    CHECK(node.children.size() >= 2);
    // Branch keys are exactly the classes the split predicts on the node.
    const EncodedMatrix e = encode(ds, node.rows, node.imputation);
    const std::vector<int> predicted = predict(*node.split, e.values);
    const std::set<int> classes(predicted.begin(), predicted.end());
    CHECK(std::vector<int>(classes.begin(), classes.end()) ==
          node.branch_classes());

    int total = 0;
    for (const auto& [cls, child_id] : node.children) {
      const TreeNode& child = tree.nodes[child_id];
      CHECK(child.parent == node.id);
      CHECK(child.depth == node.depth + 1);
      CHECK(child.n_rows < node.n_rows);
      for (int r : child.rows) {
        const auto pos = std::find(node.rows.begin(), node.rows.end(), r) -
                         node.rows.begin();
        CHECK(predicted[pos] == cls);
      }
      total += child.n_rows;
    }
    CHECK(total == node.n_rows);
    REQUIRE(node.diagnostics);
    CHECK(node.diagnostics->accepted);
  }
}

}  // namespace

TEST_CASE("names parse back") {
  for (Method m : {Method::kLdaTree, Method::kFoldTree}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  for (Stopping s : {Stopping::kPrestop, Stopping::kCvPrune}) {
    CHECK(parse_stopping(stopping_name(s)) == s);
  }
  for (PriorPath p : {PriorPath::kEstimated, PriorPath::kLowGiniRefit,
                      PriorPath::kZeroGiniRefit}) {
    CHECK(parse_prior_path(prior_path_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_method("cart"), Error);
  CHECK_THROWS_AS(parse_stopping("never"), Error);
}

TEST_CASE("minimum node size") {
  GrowthConfig config;
  CHECK(config.effective_min_node_size(2) == 10);
  CHECK(config.effective_min_node_size(7) == 14);
  config.min_node_size = 25;
  CHECK(config.effective_min_node_size(7) == 25);
}

TEST_CASE("grown trees satisfy structural invariants") {
  const Dataset ds = gen_chessboard(3, 3, 60, false, 2, 5);
  const RowIds rows = ds.all_rows();
  for (Method method : {Method::kLdaTree, Method::kFoldTree}) {
    GrowthConfig config = make_config(method, Stopping::kPrestop);
    config.prestop_threshold = config.growth_threshold;
    const TreeModel tree = grow(ds, rows, config);
    CHECK(tree.n_leaves() > 1);
    check_invariants(tree, ds);
    if (method == Method::kFoldTree) {
      for (const auto& node : tree.nodes) {
        if (std::holds_alternative<UldaModel>(node.model)) {
          CHECK(node.selection);
        }
      }
    }
  }
}

TEST_CASE("routing partitions rows and matches training membership") {
  const Dataset ds = gen_chessboard(3, 3, 60, true, 0, 6);
  const RowIds rows = ds.all_rows();
  const TreeModel tree = grow(ds, rows, make_config(Method::kLdaTree,
                                                    Stopping::kPrestop));
  REQUIRE(tree.n_leaves() > 1);
  const std::vector<int> leaf = route(tree, ds, rows);
  const auto paths = route_paths(tree, ds, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TreeNode& node = tree.nodes[leaf[i]];
    CHECK(node.is_leaf());
    CHECK(std::find(node.rows.begin(), node.rows.end(), rows[i]) !=
          node.rows.end());
    CHECK(paths[i].front() == 0);
    CHECK(paths[i].back() == leaf[i]);
  }
}

TEST_CASE("posteriors sum to one and agree with labels") {
  const Dataset ds = testing::to_dataset(
      testing::gaussian_sample(400, 4, 3, 1.2, 8), 0.1, 9);
  const TreeModel tree =
      train(ds, make_config(Method::kFoldTree, Stopping::kPrestop));
  const RowIds rows = ds.all_rows();
  const Eigen::MatrixXd p = predict_posteriors(tree, ds, rows);
  const std::vector<int> labels = predict_labels(tree, ds, rows);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-10);
    Eigen::Index top;
    p.row(i).maxCoeff(&top);
    CHECK(p(i, labels[i]) == p(i, top));
  }
}

TEST_CASE("dominant class triggers the equal-prior refit") {
  const Dataset ds = gen_dominant_class(809, 191, 1);
  const TreeModel tree =
      grow(ds, ds.all_rows(), make_config(Method::kLdaTree, Stopping::kPrestop));
  const TreeNode& root = tree.root();
  REQUIRE(root.diagnostics);
  CHECK(root.diagnostics->prior_path != PriorPath::kEstimated);
  CHECK(root.diagnostics->predicted_gini <= 0.1);
  CHECK(root.diagnostics->accepted);
  CHECK_FALSE(root.is_leaf());
  REQUIRE(root.split);
  CHECK(root.split->prior_mode == PriorMode::kEqual);
  CHECK(tree.training_accuracy > 0.95);
}

TEST_CASE("growth is deterministic") {
  const Dataset ds = gen_chessboard(3, 3, 40, false, 3, 10);
  const GrowthConfig config = make_config(Method::kFoldTree, Stopping::kCvPrune);
  CHECK(model_to_json(train(ds, config)) == model_to_json(train(ds, config)));
}

TEST_CASE("imputation policies agree without missing data") {
  const Dataset ds = gen_chessboard(3, 3, 40, false, 0, 11);
  GrowthConfig config = make_config(Method::kLdaTree, Stopping::kPrestop);
  const TreeModel node = train(ds, config);
  config.imputation = ImputationPolicy::kRootNode;
  const TreeModel root = train(ds, config);
  CHECK(predict_labels(node, ds) == predict_labels(root, ds));
  CHECK(node.n_leaves() == root.n_leaves());
}

TEST_CASE("collapsing renumbers in preorder") {
  const Dataset ds = gen_chessboard(3, 3, 60, false, 0, 12);
  const TreeModel tree =
      grow(ds, ds.all_rows(), make_config(Method::kLdaTree, Stopping::kPrestop));
  REQUIRE(tree.n_leaves() > 2);
  int target = -1;
  for (const auto& node : tree.nodes) {
    if (node.id != 0 && !node.is_leaf()) target = node.id;
  }
  if (target < 0) target = 0;
  const TreeModel cut = collapse_nodes(tree, {target});
  cut.validate();
  CHECK(cut.nodes.size() < tree.nodes.size());
  for (const auto& node : cut.nodes) {
    for (const auto& [cls, child] : node.children) CHECK(child > node.id);
  }
  const TreeModel stump = collapse_nodes(tree, {0});
  CHECK(stump.n_leaves() == 1);
}

TEST_CASE("invalid training input") {
  const Dataset ds = gen_chessboard(2, 2, 10, false, 0, 13);
  std::vector<int> one_class;
  for (int r = 0; r < static_cast<int>(ds.n_rows()); ++r) {
    if (ds.target()[r] == 0) one_class.push_back(r);
  }
  CHECK_THROWS_AS(grow(ds, one_class, GrowthConfig{}), Error);
  CHECK_THROWS_AS(grow(ds, RowIds{}, GrowthConfig{}), Error);
}

TEST_CASE("schema check names the offending column") {
  const Dataset ds = gen_chessboard(2, 2, 20, false, 0, 14);
  const TreeModel tree = train(ds, GrowthConfig{});
  NumericColumn a{{1.0}};
  const Dataset other({"x1", "z"}, {a, a}, {}, ds.class_labels());
  try {
    check_schema(tree, other);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
    CHECK(std::string(e.what()).find("x2") != std::string::npos);
  }
}
