#include <cmath>

#include "doctest.h"

#include "json.hpp"

#include "foldtree/axis_gini.h"
#include "foldtree/bench.h"
#include "foldtree/error.h"
#include "foldtree/synthetic.h"

using namespace foldtree;

TEST_CASE("axis gini finds a single threshold") {
  NumericColumn x;
  NumericColumn noise;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    x.values.emplace_back(i * 0.1);
    noise.values.emplace_back((i * 37) % 11);
    y.push_back(i < 40 ? 0 : 1);
  }
  const Dataset ds({"x", "noise"}, {x, noise}, y, {"a", "b"});
  const AxisGiniTree tree = fit_axis_gini(ds, ds.all_rows());
  CHECK(tree.n_leaves() == 2);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold > 3.9);
  CHECK(tree.nodes[0].threshold < 4.0);
  CHECK(predict_axis_gini(tree, ds, ds.all_rows()) == y);
}

TEST_CASE("axis gini cannot split a checkerboard's marginals") {
  const Dataset ds = gen_chessboard(2, 2, 200, false, 0, 1);
  const AxisGiniTree tree = fit_axis_gini(ds, ds.all_rows());
  CHECK(tree.n_leaves() <= 4);
}

TEST_CASE("holdout bench report") {
  const Dataset ds = gen_chessboard(3, 3, 40, false, 0, 2);
  BenchOptions options;
  options.prune_folds = 4;
  const BenchReport report = run_bench(ds, "board", bench_methods(),
                                       BenchProtocol::holdout(0.5), 3, options);
  CHECK(report.results.size() == 4);
  CHECK(report.n_rows == 360);
  CHECK(report.result("plurality").accuracy == doctest::Approx(1.0 / 3));
  CHECK(report.result("ldatree").accuracy > report.result("plurality").accuracy);
  for (const auto& r : report.results) {
    CHECK(r.replicate_accuracy.size() == 1);
    CHECK(r.accuracy_sd == 0.0);
  }
  CHECK_THROWS_AS(report.result("svm"), Error);

  const auto doc = nlohmann::json::parse(report_to_json(report));
  CHECK(doc["results"].size() == 4);
  CHECK(doc["protocol"] == "holdout(0.5)");
  CHECK(format_report(report).find("axis_gini") != std::string::npos);
}

TEST_CASE("cv bench aggregates folds") {
  const Dataset ds = gen_xor6d(4, 0.2, 3);
  BenchOptions options;
  options.stopping = Stopping::kPrestop;
  const BenchReport report = run_bench(ds, "xor", {"ldatree", "plurality"},
                                       BenchProtocol::cv(4), 5, options);
  const MethodResult& r = report.result("ldatree");
  REQUIRE(r.replicate_accuracy.size() == 4);
  double mean = 0.0;
  for (double a : r.replicate_accuracy) mean += a / 4;
  double ss = 0.0;
  for (double a : r.replicate_accuracy) ss += (a - mean) * (a - mean);
  CHECK(r.accuracy == doctest::Approx(mean));
  CHECK(r.accuracy_sd == doctest::Approx(std::sqrt(ss / 3)));
}

TEST_CASE("bench input validation") {
  const Dataset ds = gen_chessboard(2, 2, 10, false, 0, 4);
  CHECK_THROWS_AS(run_bench(ds, "d", {"nosuch"}, BenchProtocol::cv(2), 1, {}),
                  Error);
  CHECK_THROWS_AS(run_bench(ds, "d", {}, BenchProtocol::cv(2), 1, {}), Error);
  CHECK_THROWS_AS(BenchProtocol::cv(1), Error);
  CHECK_THROWS_AS(BenchProtocol::holdout(0.0), Error);
}
