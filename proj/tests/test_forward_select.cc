#include <cmath>
#include <numeric>

#include "doctest.h"

#include "foldtree/error.h"
#include "foldtree/forward_select.h"
#include "test_support.h"

using namespace foldtree;

namespace {

// trace(S_T^-1 S_B) on a column subset, straight from the scatter matrices.
double subset_trace(const ScatterDecomposition& s, const std::vector<int>& cols) {
  const auto k = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd t(k, k), b(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      t(i, j) = s.total(cols[i], cols[j]);
      b(i, j) = s.between(cols[i], cols[j]);
    }
  }
  return (t.ldlt().solve(b)).trace();
}

// Two informative columns (0 and 3) among eight.
testing::Sample mostly_noise(std::uint64_t seed) {
  testing::Sample s = testing::gaussian_sample(300, 8, 3, 0.0, seed);
  for (Eigen::Index i = 0; i < 300; ++i) {
    s.x(i, 0) += 2.0 * s.y[i];
    s.x(i, 3) += s.y[i] == 1 ? 1.5 : 0.0;
  }
  return s;
}

}  // namespace

TEST_CASE("step p-value is a chi-square tail times the candidate count") {
  // Two degrees of freedom: the tail is exp(-x / 2).
  const double gain = 0.02;
  const double stat = (500 - 1 - 2) * gain;
  CHECK(step_p_value(gain, 500, 2, 3, 1) ==
        doctest::Approx(std::exp(-stat / 2)).epsilon(1e-12));
  CHECK(step_p_value(gain, 500, 2, 3, 4) ==
        doctest::Approx(4 * std::exp(-stat / 2)).epsilon(1e-12));
  CHECK(step_p_value(0.0, 500, 2, 3, 4) == 1.0);
  CHECK(step_p_value(1.0, 3, 2, 3, 1) == 1.0);
}

TEST_CASE("each step takes the largest trace gain") {
  const auto s = mostly_noise(1);
  const ScatterDecomposition sc = compute_scatter(s.x, s.y, 3);
  const ForwardResult r =
      forward_ulda(s.x, s.y, 3, PriorMode::kEstimated, 0.05);
  REQUIRE(r.model);
  std::vector<int> chosen;
  double before = 0.0;
  for (const auto& step : r.trace.steps) {
    int best = -1;
    double best_gain = -1.0;
    for (int c = 0; c < 8; ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      auto cols = chosen;
      cols.push_back(c);
      const double g = subset_trace(sc, cols) - before;
      if (g > best_gain) {
        best_gain = g;
        best = c;
      }
    }
    CHECK(step.column == best);
    CHECK(step.gain == doctest::Approx(best_gain).epsilon(1e-8));
    CHECK(step.p_value <= 0.05);
    chosen.push_back(best);
    before += best_gain;
  }
  CHECK(r.trace.features().size() >= 2);
  CHECK(r.trace.features()[0] == 0);
  CHECK(r.trace.trace() == doctest::Approx(before).epsilon(1e-10));
  CHECK(r.model->features == r.trace.features());
  CHECK(rank_columns(r.trace) == r.trace.features());
}

TEST_CASE("model on the selected columns equals a direct fit") {
  const auto s = mostly_noise(2);
  const ForwardResult r =
      forward_ulda(s.x, s.y, 3, PriorMode::kEqual, 0.05);
  REQUIRE(r.model);
  const auto features = r.trace.features();
  const auto direct = fit_ulda(s.x, s.y, 3, PriorMode::kEqual, features);
  REQUIRE(direct);
  CHECK((posterior(*r.model, s.x) - posterior(*direct, s.x)).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("stopping records the rejected candidate") {
  const auto s = mostly_noise(3);
  const ForwardResult r =
      forward_ulda(s.x, s.y, 3, PriorMode::kEstimated, 0.05);
  if (r.trace.rejected) CHECK(r.trace.rejected->p_value > 0.05);
  const ForwardResult none =
      forward_ulda(s.x, s.y, 3, PriorMode::kEstimated, 0.0);
  CHECK(none.trace.steps.empty());
  CHECK_FALSE(none.model);
  CHECK_THROWS_AS(rank_columns(none.trace), Error);
}

TEST_CASE("collinear columns are never selected twice") {
  auto s = mostly_noise(4);
  Eigen::MatrixXd wide(s.x.rows(), 9);
  wide << s.x, 2.0 * s.x.col(0);
  const ForwardResult r =
      forward_ulda(wide, s.y, 3, PriorMode::kEstimated, 0.05);
  const auto f = r.trace.features();
  const bool both = std::find(f.begin(), f.end(), 0) != f.end() &&
                    std::find(f.begin(), f.end(), 8) != f.end();
  CHECK_FALSE(both);
}
