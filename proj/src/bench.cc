#include "foldtree/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "foldtree/axis_gini.h"
#include "foldtree/error.h"

namespace foldtree {

const std::vector<std::string>& bench_methods() {
  static const std::vector<std::string> methods{"ldatree", "foldtree",
                                                "plurality", "axis_gini"};
  return methods;
}

BenchProtocol BenchProtocol::holdout(double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw UsageError("holdout fraction must be in (0, 1)");
  }
  BenchProtocol p;
  p.kind = Kind::kHoldout;
  p.fraction = fraction;
  return p;
}

BenchProtocol BenchProtocol::cv(int folds) {
  if (folds < 2) throw UsageError("fold count must be at least 2");
  BenchProtocol p;
  p.kind = Kind::kCrossValidation;
  p.folds = folds;
  return p;
}

std::string BenchProtocol::describe() const {
  std::ostringstream out;
  if (kind == Kind::kHoldout) {
    out << "holdout(" << fraction << ")";
  } else {
    out << "cv(" << folds << ")";
  }
  return out.str();
}

const MethodResult& BenchReport::result(const std::string& method) const {
  for (const auto& r : results) {
    if (r.method == method) return r;
  }
  throw UsageError("method '" + method + "' not in report");
}

namespace {

struct Fitted {
  std::vector<int> predicted;
  int leaves = 1;
};

Fitted fit_and_predict(const std::string& method, const Dataset& ds,
                       const RowIds& train_rows, const RowIds& test_rows,
                       std::uint64_t seed, const BenchOptions& options) {
  Fitted out;
  if (method == "plurality") {
    const std::vector<int> counts = ds.class_counts(train_rows);
    const int label = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    out.predicted.assign(test_rows.size(), label);
    return out;
  }
  if (method == "axis_gini") {
    const AxisGiniTree tree = fit_axis_gini(ds, train_rows);
    out.predicted = predict_axis_gini(tree, ds, test_rows);
    out.leaves = tree.n_leaves();
    return out;
  }
  GrowthConfig config;
  config.method = parse_method(method);
  config.stopping = options.stopping;
  config.folds = options.prune_folds;
  config.imputation = options.imputation;
  config.seed = seed;
  const TreeModel tree = train(ds, train_rows, config);
  out.predicted = predict_labels(tree, ds, test_rows);
  out.leaves = tree.n_leaves();
  return out;
}

}  // namespace

BenchReport run_bench(const Dataset& ds, const std::string& name,
                      const std::vector<std::string>& methods,
                      const BenchProtocol& protocol, std::uint64_t seed,
                      const BenchOptions& options) {
  if (methods.empty()) throw UsageError("no methods requested");
  for (const auto& m : methods) {
    const auto& known = bench_methods();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw UsageError("unknown method '" + m + "'");
    }
  }

  std::vector<std::pair<RowIds, RowIds>> replicates;
  if (protocol.kind == BenchProtocol::Kind::kHoldout) {
    replicates.push_back(split_train_test_rows(ds, protocol.fraction, seed));
  } else {
    const FoldPlan plan = make_folds(ds, protocol.folds, seed);
    for (int f = 0; f < protocol.folds; ++f) {
      replicates.emplace_back(plan.complement_rows(f), plan.fold_rows(f));
    }
  }

  BenchReport report;
  report.dataset = name;
  report.seed = seed;
  report.protocol = protocol;
  report.n_rows = static_cast<int>(ds.n_rows());
  report.n_features = static_cast<int>(ds.n_columns());
  report.n_classes = static_cast<int>(ds.n_classes());

  for (const auto& method : methods) {
    MethodResult result;
    result.method = method;
    double leaf_sum = 0.0;
    for (std::size_t r = 0; r < replicates.size(); ++r) {
      const auto& [train_rows, test_rows] = replicates[r];
      const auto start = std::chrono::steady_clock::now();
      const Fitted fitted = fit_and_predict(method, ds, train_rows, test_rows,
                                            seed + r, options);
      result.seconds += std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      result.replicate_accuracy.push_back(
          accuracy(fitted.predicted, ds, test_rows));
      leaf_sum += fitted.leaves;
    }
    const auto k = static_cast<double>(replicates.size());
    double sum = 0.0;
    for (double a : result.replicate_accuracy) sum += a;
    result.accuracy = sum / k;
    if (replicates.size() > 1) {
      double ss = 0.0;
      for (double a : result.replicate_accuracy) {
        ss += (a - result.accuracy) * (a - result.accuracy);
      }
      result.accuracy_sd = std::sqrt(ss / (k - 1.0));
    }
    result.leaves = leaf_sum / k;
    report.results.push_back(std::move(result));
  }
  return report;
}

BenchReport run_bench(const SyntheticSpec& spec,
                      const std::vector<std::string>& methods,
                      const BenchProtocol& protocol, std::uint64_t seed,
                      const BenchOptions& options) {
  return run_bench(generate(spec), synthetic_kind_name(spec.kind), methods,
                   protocol, seed, options);
}

std::string format_report(const BenchReport& report) {
  std::ostringstream out;
  out << "dataset " << report.dataset << "  rows " << report.n_rows
      << "  features " << report.n_features << "  classes "
      << report.n_classes << "  protocol " << report.protocol.describe()
      << "  seed " << report.seed << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %10s\n", "method",
                "accuracy", "sd", "leaves", "seconds");
  out << line;
  for (const auto& r : report.results) {
    std::snprintf(line, sizeof line, "%-10s %9.4f %9.4f %9.1f %10.3f\n",
                  r.method.c_str(), r.accuracy, r.accuracy_sd, r.leaves,
                  r.seconds);
    out << line;
  }
  return out.str();
}

std::string report_to_json(const BenchReport& report) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& r : report.results) {
    methods.push_back({{"method", r.method},
                       {"accuracy", r.accuracy},
                       {"accuracy_sd", r.accuracy_sd},
                       {"leaves", r.leaves},
                       {"seconds", r.seconds},
                       {"replicate_accuracy", r.replicate_accuracy}});
  }
  nlohmann::json doc = {{"dataset", report.dataset},
                        {"seed", report.seed},
                        {"protocol", report.protocol.describe()},
                        {"rows", report.n_rows},
                        {"features", report.n_features},
                        {"classes", report.n_classes},
                        {"results", methods}};
  return doc.dump(2);
}

}  // namespace foldtree
