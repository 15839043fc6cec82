// foldtree: train, predict and benchmark LDA-split classification trees.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "foldtree/bench.h"
#include "foldtree/csv.h"
#include "foldtree/error.h"
#include "foldtree/serialize.h"
#include "foldtree/synthetic.h"
#include "foldtree/tree.h"

namespace {

using namespace foldtree;

struct TrainArgs {
  std::string data;
  std::string target = "y";
  std::string method = "ldatree";
  std::string stopping = "prestop";
  std::string imputation = "node";
  std::string out;
  int folds = 10;
  std::uint64_t seed = 0;
  double prestop_p = 0.01;
  double growth_p = 0.6;
  double forward_alpha = 0.05;
  bool quiet = false;
};

struct PredictArgs {
  std::string model;
  std::string data;
  std::string target;
  std::string out;
  bool probs = false;
};

struct BenchArgs {
  std::string spec;
  std::vector<std::string> methods;
  int cv = 0;
  double holdout = 0.5;
  std::uint64_t seed = 1;
  bool json = false;
  std::string stopping = "cv";
  int prune_folds = 10;
  int per_square = 0;
  int board = 0;
  int classes = 0;
  int noise_dims = -1;
  int per_center = 0;
  std::string dump_csv;
};

void print_summary(const TreeModel& tree, std::ostream& out) {
  out << "method " << method_name(tree.config.method) << "  stopping "
      << stopping_name(tree.config.stopping) << "  imputation "
      << imputation_policy_name(tree.config.imputation) << "\n";
  out << "leaves " << tree.n_leaves() << "  depth " << tree.depth()
      << "  training accuracy " << tree.training_accuracy << "\n";
  if (tree.pruning) {
    out << "pruning: grown leaves " << tree.pruning->grown_leaves
        << ", chosen leaves " << tree.pruning->chosen_leaves << " ("
        << tree.pruning->folds << "-fold cv, 1-SE rule)\n";
  }
  out << "split tests (node depth rows N_before N_after z p prior accepted):\n";
  char line[200];
  for (const auto& node : tree.nodes) {
    if (!node.diagnostics) continue;
    const SplitDiagnostics& d = *node.diagnostics;
    std::snprintf(line, sizeof line,
                  "  %5d %3d %7d %7d %7d %9.3f %10.3g %-15s %s\n", node.id,
                  node.depth, d.strength.n_total, d.strength.n_before,
                  d.strength.n_after, d.strength.z, d.strength.p_value,
                  prior_path_name(d.prior_path),
                  node.is_leaf() ? "no" : "yes");
    out << line;
  }
}

void run_train(const TrainArgs& a) {
  const Dataset ds = load_csv(a.data, a.target);
  GrowthConfig config;
  config.method = parse_method(a.method);
  config.stopping = parse_stopping(a.stopping);
  config.imputation = parse_imputation_policy(a.imputation);
  config.folds = a.folds;
  config.seed = a.seed;
  config.prestop_threshold = a.prestop_p;
  config.growth_threshold = a.growth_p;
  config.forward_alpha = a.forward_alpha;
  const TreeModel tree = train(ds, config);
  save_model(tree, a.out);
  if (!a.quiet) print_summary(tree, std::cout);
}

void run_predict(const PredictArgs& a) {
  const TreeModel tree = load_model(a.model);
  const Dataset ds = load_csv_with_schema(a.data, tree.schema,
                                          tree.class_labels, a.target);
  check_schema(tree, ds);
  const RowIds rows = ds.all_rows();
  const std::vector<int> labels = predict_labels(tree, ds, rows);
  Eigen::MatrixXd probs;
  if (a.probs) probs = predict_posteriors(tree, ds, rows);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw IoError("cannot open '" + a.out + "' for writing");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "predicted";
  if (a.probs) {
    for (const auto& label : tree.class_labels) {
      out << "," << csv_escape("p_" + label);
    }
  }
  out << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << csv_escape(tree.class_labels[labels[i]]);
    if (a.probs) {
      for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        out << "," << format_real(probs(static_cast<Eigen::Index>(i), c));
      }
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing predictions");
  if (!a.target.empty() && ds.labeled() && ds.n_rows() > 0) {
    std::cerr << "accuracy " << accuracy(labels, ds, rows) << "\n";
  }
}

void run_bench_command(const BenchArgs& a) {
  const SyntheticKind kind = parse_synthetic_kind(a.spec);
  SyntheticSpec spec = SyntheticSpec::defaults(kind, a.seed);
  if (a.per_square > 0) spec.per_square = a.per_square;
  if (a.board > 0) spec.board = a.board;
  if (a.classes > 0) spec.classes = a.classes;
  if (a.noise_dims >= 0) spec.noise_dims = a.noise_dims;
  if (a.per_center > 0) spec.per_center = a.per_center;
  const Dataset ds = generate(spec);
  if (!a.dump_csv.empty()) save_csv(a.dump_csv, ds, "y");

  const BenchProtocol protocol = a.cv > 0 ? BenchProtocol::cv(a.cv)
                                          : BenchProtocol::holdout(a.holdout);
  BenchOptions options;
  options.stopping = parse_stopping(a.stopping);
  options.prune_folds = a.prune_folds;
  const std::vector<std::string> methods =
      a.methods.empty() ? bench_methods() : a.methods;
  const BenchReport report =
      run_bench(ds, a.spec, methods, protocol, a.seed, options);
  std::cout << (a.json ? report_to_json(report) + "\n" : format_report(report));
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kIo:
      return 4;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LDA-split classification trees (LDATree / FoLDTree)"};
  app.require_subcommand(1);
  const auto probability = CLI::Range(0.0, 1.0);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit a tree and write a model file");
  train_cmd->add_option("--data", train_args.data, "Training CSV")->required();
  train_cmd->add_option("--target", train_args.target, "Class column name")
      ->capture_default_str();
  train_cmd->add_option("--method", train_args.method, "ldatree or foldtree")
      ->check(CLI::IsMember({"ldatree", "foldtree"}))
      ->capture_default_str();
  train_cmd->add_option("--stopping", train_args.stopping, "prestop or cv")
      ->check(CLI::IsMember({"prestop", "cv"}))
      ->capture_default_str();
  train_cmd->add_option("--imputation", train_args.imputation, "node or root")
      ->check(CLI::IsMember({"node", "root"}))
      ->capture_default_str();
  train_cmd->add_option("--folds", train_args.folds, "CV folds for pruning")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed, "Seed for CV folds")
      ->capture_default_str();
  train_cmd->add_option("--prestop-p", train_args.prestop_p,
                        "Split acceptance p-value under prestop")
      ->check(probability)
      ->capture_default_str();
  train_cmd->add_option("--growth-p", train_args.growth_p,
                        "Split acceptance p-value before pruning")
      ->check(probability)
      ->capture_default_str();
  train_cmd->add_option("--forward-alpha", train_args.forward_alpha,
                        "Forward selection significance level")
      ->check(probability)
      ->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "Model JSON path")->required();
  train_cmd->add_flag("--quiet", train_args.quiet, "Do not print the summary");

  PredictArgs predict_args;
  auto* predict_cmd =
      app.add_subcommand("predict", "Predict labels with a model file");
  predict_cmd->add_option("--model", predict_args.model, "Model JSON")
      ->required();
  predict_cmd->add_option("--data", predict_args.data, "Input CSV")->required();
  predict_cmd->add_option("--target", predict_args.target,
                          "Class column; accuracy is reported on stderr");
  predict_cmd->add_option("--out", predict_args.out,
                          "Output CSV (default stdout)");
  predict_cmd->add_flag("--probs", predict_args.probs,
                        "Add one posterior column per class");

  BenchArgs bench_args;
  auto* bench_cmd =
      app.add_subcommand("bench", "Run methods on a synthetic dataset");
  bench_cmd->add_option("spec", bench_args.spec,
                        "chessboard3x3, rotated_chessboard, chessboard_noise, "
                        "xor6d, dominant_class or split_strength_demo")
      ->required();
  bench_cmd->add_option("--methods", bench_args.methods,
                        "Comma-separated: ldatree,foldtree,plurality,axis_gini")
      ->delimiter(',');
  auto* cv_opt = bench_cmd->add_option("--cv", bench_args.cv, "k-fold CV")
                     ->check(CLI::Range(2, 1000000));
  bench_cmd->add_option("--holdout", bench_args.holdout,
                        "Training fraction of a holdout split")
      ->check(CLI::Range(0.0, 1.0))
      ->excludes(cv_opt)
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "Seed")->capture_default_str();
  bench_cmd->add_option("--stopping", bench_args.stopping,
                        "Stopping mode of the LDA trees")
      ->check(CLI::IsMember({"prestop", "cv"}))
      ->capture_default_str();
  bench_cmd->add_option("--prune-folds", bench_args.prune_folds,
                        "CV folds for pruning")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  bench_cmd->add_option("--per-square", bench_args.per_square,
                        "Points per chessboard square");
  bench_cmd->add_option("--board", bench_args.board, "Chessboard side");
  bench_cmd->add_option("--classes", bench_args.classes, "Chessboard classes");
  bench_cmd->add_option("--noise-dims", bench_args.noise_dims,
                        "Noise columns for chessboard_noise");
  bench_cmd->add_option("--per-center", bench_args.per_center,
                        "Points per XOR corner");
  bench_cmd->add_option("--dump-csv", bench_args.dump_csv,
                        "Also write the generated dataset to this CSV");
  bench_cmd->add_flag("--json", bench_args.json, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) run_train(train_args);
    if (*predict_cmd) run_predict(predict_args);
    if (*bench_cmd) run_bench_command(bench_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
