#ifndef FOLDTREE_BENCH_H_
#define FOLDTREE_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "foldtree/dataset.h"
#include "foldtree/synthetic.h"
#include "foldtree/tree.h"

namespace foldtree {

// Methods: "ldatree", "foldtree", "plurality", "axis_gini".
const std::vector<std::string>& bench_methods();

struct BenchProtocol {
  enum class Kind { kHoldout, kCrossValidation };
  Kind kind = Kind::kHoldout;
  double fraction = 0.5;  // training share under kHoldout
  int folds = 10;         // under kCrossValidation

  static BenchProtocol holdout(double fraction);
  static BenchProtocol cv(int folds);
  std::string describe() const;
};

struct BenchOptions {
  // Applied to the two LDA trees.
  Stopping stopping = Stopping::kCvPrune;
  int prune_folds = 10;
  ImputationPolicy imputation = ImputationPolicy::kNodeWise;
};

struct MethodResult {
  std::string method;
  double accuracy = 0.0;     // mean test accuracy over replicates
  double accuracy_sd = 0.0;  // sample SD over replicates (0 for one)
  double leaves = 0.0;       // mean leaf count (1 for plurality)
  double seconds = 0.0;      // total fit wall time
  std::vector<double> replicate_accuracy;
};

struct BenchReport {
  std::string dataset;
  std::uint64_t seed = 0;
  BenchProtocol protocol;
  int n_rows = 0;
  int n_features = 0;
  int n_classes = 0;
  std::vector<MethodResult> results;

  const MethodResult& result(const std::string& method) const;
};

// Deterministic given the seed (wall times aside). Throws UsageError on an
// empty or unknown method list.
BenchReport run_bench(const Dataset& ds, const std::string& name,
                      const std::vector<std::string>& methods,
                      const BenchProtocol& protocol, std::uint64_t seed,
                      const BenchOptions& options = {});
BenchReport run_bench(const SyntheticSpec& spec,
                      const std::vector<std::string>& methods,
                      const BenchProtocol& protocol, std::uint64_t seed,
                      const BenchOptions& options = {});

std::string format_report(const BenchReport& report);
std::string report_to_json(const BenchReport& report);

}  // namespace foldtree

#endif  // FOLDTREE_BENCH_H_
