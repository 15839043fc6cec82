#include "foldtree/forward_select.h"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "foldtree/error.h"

namespace foldtree {

namespace {

// A candidate whose residual keeps less than this share of its total scatter
// after projecting out the selected columns is treated as collinear.
constexpr double kCollinearTol = 1e-8;

}  // namespace

std::vector<int> SelectionTrace::features() const {
  std::vector<int> out;
  out.reserve(steps.size());
  for (const auto& step : steps) out.push_back(step.column);
  return out;
}

double SelectionTrace::trace() const {
  double sum = 0.0;
  for (const auto& step : steps) sum += step.gain;
  return sum;
}

double step_p_value(double gain, int n_rows, int n_selected, int n_classes,
                    int n_candidates) {
  const double dof = static_cast<double>(n_rows - 1 - n_selected);
  if (dof <= 0.0 || n_classes < 2) return 1.0;
  const double stat = dof * std::max(gain, 0.0);
  const double p = boost::math::gamma_q(0.5 * (n_classes - 1), 0.5 * stat);
  return std::min(1.0, p * std::max(1, n_candidates));
}

ForwardResult forward_ulda(const DiscriminantMoments& mo, PriorMode priors,
                           double alpha) {
  if (mo.classes.size() < 2) {
    throw DataError("forward selection needs at least two classes");
  }
  const Eigen::Index m = mo.n_columns();
  const auto n_classes = static_cast<int>(mo.classes.size());
  const Eigen::MatrixXd& total = mo.total;
  const Eigen::MatrixXd& between = mo.between_factor;  // k x m

  std::vector<bool> available(m);
  for (Eigen::Index j = 0; j < m; ++j) available[j] = !mo.constant[j];

  // For each accepted direction u_a (S_T-orthonormal): S_T u_a and B u_a.
  std::vector<Eigen::VectorXd> total_dirs;
  std::vector<Eigen::VectorXd> between_dirs;

  ForwardResult result;
  while (true) {
    int best = -1;
    double best_gain = 0.0;
    double best_residual = 0.0;
    Eigen::VectorXd best_proj;
    int n_candidates = 0;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (!available[c]) continue;
      const double scale = total(c, c);
      Eigen::VectorXd proj(total_dirs.size());
      double residual = scale;
      Eigen::VectorXd b = between.col(c);
      for (std::size_t a = 0; a < total_dirs.size(); ++a) {
        proj(a) = total_dirs[a](c);
        residual -= proj(a) * proj(a);
        b -= proj(a) * between_dirs[a];
      }
      if (!(residual > kCollinearTol * scale)) {
        available[c] = false;
        continue;
      }
      ++n_candidates;
      const double gain = b.squaredNorm() / residual;
      if (best < 0 || gain > best_gain) {
        best = static_cast<int>(c);
        best_gain = gain;
        best_residual = residual;
        best_proj = std::move(proj);
      }
    }
    if (best < 0 || !(best_gain > 0.0)) break;

    const int n_selected = static_cast<int>(result.trace.steps.size());
    const double p = step_p_value(best_gain, mo.n_rows, n_selected, n_classes,
                                  n_candidates);
    const SelectionStep step{best, best_gain, p};
    if (p > alpha) {
      result.trace.rejected = step;
      break;
    }
    result.trace.steps.push_back(step);
    available[best] = false;

    const double norm = std::sqrt(best_residual);
    Eigen::VectorXd t = total.col(best);
    Eigen::VectorXd b = between.col(best);
    for (std::size_t a = 0; a < total_dirs.size(); ++a) {
      t -= best_proj(a) * total_dirs[a];
      b -= best_proj(a) * between_dirs[a];
    }
    total_dirs.push_back(t / norm);
    between_dirs.push_back(b / norm);
  }

  if (!result.trace.steps.empty()) {
    result.model = fit_ulda(mo, priors, result.trace.features());
  }
  return result;
}

ForwardResult forward_ulda(const Eigen::MatrixXd& x, std::span<const int> y,
                           int n_classes, PriorMode priors, double alpha) {
  return forward_ulda(compute_moments(x, y, n_classes), priors, alpha);
}

std::vector<int> rank_columns(const SelectionTrace& trace) {
  if (trace.steps.empty()) throw DataError("empty selection trace");
  return trace.features();
}

}  // namespace foldtree
