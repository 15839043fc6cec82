#include "foldtree/ulda.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "foldtree/error.h"

namespace foldtree {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Floor on 1 - eigenvalue for directions that separate the classes exactly.
constexpr double kMinWithinFraction = 1e-12;

void require_finite(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw DataError("design matrix has non-finite entries");
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& centered) {
  const Eigen::Index m = centered.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  out.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  return out.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXd priors_for(PriorMode mode, const Eigen::VectorXd& counts) {
  if (mode == PriorMode::kEqual) {
    return Eigen::VectorXd::Constant(counts.size(),
                                     1.0 / static_cast<double>(counts.size()));
  }
  return counts / counts.sum();
}

}  // namespace

const char* prior_mode_name(PriorMode mode) {
  return mode == PriorMode::kEstimated ? "estimated" : "equal";
}

PriorMode parse_prior_mode(const std::string& name) {
  if (name == "estimated") return PriorMode::kEstimated;
  if (name == "equal") return PriorMode::kEqual;
  throw DataError("unknown prior mode '" + name + "'");
}

ScatterDecomposition compute_scatter(const Eigen::MatrixXd& x,
                                     std::span<const int> y, int n_classes) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw DataError("label count does not match row count");
  }
  ScatterDecomposition s;
  s.class_counts = Eigen::VectorXi::Zero(n_classes);
  s.class_means = Eigen::MatrixXd::Zero(n_classes, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    ++s.class_counts(y[i]);
    s.class_means.row(y[i]) += x.row(i);
  }
  if ((s.class_counts.array() > 0).count() < 2) {
    throw DataError("scatter needs at least two classes");
  }
  for (int c = 0; c < n_classes; ++c) {
    if (s.class_counts(c) > 0) s.class_means.row(c) /= s.class_counts(c);
  }
  s.grand_mean = x.colwise().mean().transpose();

  s.total = gram(x.rowwise() - s.grand_mean.transpose());

  s.between = Eigen::MatrixXd::Zero(m, m);
  for (int c = 0; c < n_classes; ++c) {
    if (s.class_counts(c) == 0) continue;
    const Eigen::VectorXd d = s.class_means.row(c).transpose() - s.grand_mean;
    s.between.noalias() += static_cast<double>(s.class_counts(c)) * d * d.transpose();
  }

  Eigen::MatrixXd within_centered(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    within_centered.row(i) = x.row(i) - s.class_means.row(y[i]);
  }
  s.within = gram(within_centered);
  return s;
}

DiscriminantMoments compute_moments(const Eigen::MatrixXd& x,
                                    std::span<const int> y, int n_classes) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw DataError("label count does not match row count");
  }
  require_finite(x);

  std::vector<int> count(n_classes, 0);
  for (int c : y) ++count[c];
  DiscriminantMoments mo;
  mo.n_rows = static_cast<int>(n);
  mo.n_classes_total = n_classes;
  std::vector<int> slot(n_classes, -1);
  for (int c = 0; c < n_classes; ++c) {
    if (count[c] > 0) {
      slot[c] = static_cast<int>(mo.classes.size());
      mo.classes.push_back(c);
    }
  }
  const auto k = static_cast<Eigen::Index>(mo.classes.size());
  mo.counts.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) mo.counts(c) = count[mo.classes[c]];

  mo.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mo.mean.transpose();
  mo.total = gram(centered);

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, m);
  for (Eigen::Index i = 0; i < n; ++i) sums.row(slot[y[i]]) += centered.row(i);
  mo.between_factor = sums.array().colwise() / mo.counts.array().sqrt();

  mo.constant.assign(m, true);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double first = x(0, j);
    for (Eigen::Index i = 1; i < n; ++i) {
      if (x(i, j) != first) {
        mo.constant[j] = false;
        break;
      }
    }
  }
  return mo;
}

UldaModel UldaModel::with_priors(PriorMode mode,
                                 const Eigen::VectorXd& counts) const {
  UldaModel out = *this;
  out.prior_mode = mode;
  out.priors = priors_for(mode, counts);
  return out;
}

std::optional<UldaModel> fit_ulda(const DiscriminantMoments& mo,
                                  PriorMode priors,
                                  std::span<const int> subset) {
  if (mo.classes.size() < 2) {
    throw DataError("discriminant fit needs at least two classes");
  }
  const auto m = static_cast<Eigen::Index>(subset.size());
  const double n = mo.n_rows;
  const double tol_scale =
      static_cast<double>(std::max<Eigen::Index>(m, mo.n_rows)) * kEps;

  // Constant columns carry no scatter; their rows of W stay zero.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!mo.constant[subset[j]]) kept.push_back(j);
  }
  if (kept.empty()) return std::nullopt;
  const auto p = static_cast<Eigen::Index>(kept.size());

  // Scale to unit total scatter per column, then whiten by the eigenbasis of
  // the resulting correlation matrix truncated at the rank tolerance. This is
  // the Moore-Penrose route: W lives in range(S_T).
  Eigen::VectorXd inv_scale(p);
  for (Eigen::Index a = 0; a < p; ++a) {
    const int col = subset[kept[a]];
    inv_scale(a) = 1.0 / std::sqrt(mo.total(col, col));
  }
  Eigen::MatrixXd corr(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) {
      corr(a, b) = mo.total(subset[kept[a]], subset[kept[b]]) * inv_scale(a) *
                   inv_scale(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const Eigen::VectorXd& evals = eig.eigenvalues();  // ascending
  const double rank_tol = tol_scale * evals(p - 1);
  Eigen::Index r = 0;
  while (r < p && evals(p - 1 - r) > rank_tol) ++r;
  if (r == 0) return std::nullopt;

  Eigen::MatrixXd whiten(p, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Eigen::Index src = p - 1 - i;
    whiten.col(i) = eig.eigenvectors().col(src) / std::sqrt(evals(src));
  }
  whiten = inv_scale.asDiagonal() * whiten;

  const auto k = static_cast<Eigen::Index>(mo.classes.size());
  Eigen::MatrixXd between(k, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    between.col(a) = mo.between_factor.col(subset[kept[a]]);
  }
  const Eigen::MatrixXd whitened_between = between * whiten;  // k x r

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened_between, Eigen::ComputeThinV);
  const Eigen::VectorXd lambda = svd.singularValues().array().square();
  Eigen::Index q = 0;
  while (q < lambda.size() && lambda(q) > tol_scale) ++q;
  if (q == 0) return std::nullopt;

  Eigen::MatrixXd directions = svd.matrixV().leftCols(q);
  // Sign convention: the largest-magnitude entry of each direction in the
  // whitened basis is positive.
  for (Eigen::Index i = 0; i < q; ++i) {
    Eigen::Index arg;
    directions.col(i).cwiseAbs().maxCoeff(&arg);
    if (directions(arg, i) < 0) directions.col(i) *= -1.0;
  }
  const Eigen::MatrixXd w_kept = whiten * directions;  // p x q

  UldaModel model;
  model.classes = mo.classes;
  model.features.assign(subset.begin(), subset.end());
  model.n_classes_total = mo.n_classes_total;
  model.center.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) model.center(j) = mo.mean(subset[j]);
  model.transform = Eigen::MatrixXd::Zero(m, q);
  for (Eigen::Index a = 0; a < p; ++a) {
    model.transform.row(kept[a]) = w_kept.row(a);
  }
  model.eigenvalues = lambda.head(q);
  model.trace = model.eigenvalues.sum();
  model.centroids = (whitened_between * directions).array().colwise() /
                    mo.counts.array().sqrt();
  const double dof = std::max(1.0, n - static_cast<double>(k));
  model.within_variance =
      (1.0 - model.eigenvalues.array()).max(kMinWithinFraction) / dof;
  model.prior_mode = priors;
  model.priors = priors_for(priors, mo.counts);
  return model;
}

std::optional<UldaModel> fit_ulda(const Eigen::MatrixXd& x,
                                  std::span<const int> y, int n_classes,
                                  PriorMode priors,
                                  std::span<const int> features) {
  std::vector<int> all;
  if (features.empty()) {
    all.resize(x.cols());
    std::iota(all.begin(), all.end(), 0);
    features = all;
  }
  Eigen::MatrixXd selected(x.rows(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j] < 0 || features[j] >= x.cols()) {
      throw DataError("feature index outside the design matrix");
    }
    selected.col(static_cast<Eigen::Index>(j)) = x.col(features[j]);
  }
  const DiscriminantMoments mo = compute_moments(selected, y, n_classes);
  std::vector<int> local(features.size());
  std::iota(local.begin(), local.end(), 0);
  auto model = fit_ulda(mo, priors, local);
  if (model) model->features.assign(features.begin(), features.end());
  return model;
}

Eigen::MatrixXd log_scores(const UldaModel& model, const Eigen::MatrixXd& x) {
  const auto m = static_cast<Eigen::Index>(model.features.size());
  Eigen::MatrixXd centered(x.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const int col = model.features[j];
    if (col >= x.cols()) {
      throw DataError("design matrix has fewer columns than the model uses");
    }
    centered.col(j) = x.col(col).array() - model.center(j);
  }
  const Eigen::MatrixXd z = centered * model.transform;
  const Eigen::ArrayXd inv_var = model.within_variance.array().inverse();

  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(
      x.rows(), model.n_classes_total,
      -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const Eigen::ArrayXXd diff =
        z.rowwise() - model.centroids.row(ci);
    const Eigen::VectorXd dist =
        (diff.square().rowwise() * inv_var.transpose()).rowwise().sum();
    out.col(model.classes[c]) =
        (std::log(model.priors(ci)) - 0.5 * dist.array()).matrix();
  }
  return out;
}

Eigen::MatrixXd posterior(const UldaModel& model, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd scores = log_scores(model, x);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (int c : model.classes) top = std::max(top, scores(i, c));
    double total = 0.0;
    for (int c : model.classes) {
      out(i, c) = std::exp(scores(i, c) - top);
      total += out(i, c);
    }
    out.row(i) /= total;
  }
  return out;
}

int restricted_argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row,
                      std::span<const int> allowed) {
  int best = -1;
  auto consider = [&](int c) {
    if (best < 0 || row(c) > row(best) || (row(c) == row(best) && c < best)) {
      best = c;
    }
  };
  if (allowed.empty()) {
    for (Eigen::Index c = 0; c < row.size(); ++c) consider(static_cast<int>(c));
  } else {
    for (int c : allowed) consider(c);
  }
  return best;
}

std::vector<int> predict(const UldaModel& model, const Eigen::MatrixXd& x,
                         std::span<const int> allowed) {
  if (allowed.empty()) allowed = model.classes;
  const Eigen::MatrixXd scores = log_scores(model, x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = restricted_argmax(scores.row(i), allowed);
  }
  return out;
}

Eigen::MatrixXd psd_pseudo_inverse(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& evals = eig.eigenvalues();
  const double top = evals.cwiseAbs().maxCoeff();
  const double tol = static_cast<double>(a.rows()) * kEps * top;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals(i) > tol) inv(i) = 1.0 / evals(i);
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double criterion_trace(const Eigen::MatrixXd& w, const Eigen::MatrixXd& total,
                       const Eigen::MatrixXd& between) {
  const Eigen::MatrixXd wt = w.transpose() * total * w;
  const Eigen::MatrixXd wb = w.transpose() * between * w;
  if (wb.isZero(0.0)) return 0.0;
  return (psd_pseudo_inverse(0.5 * (wt + wt.transpose())) * wb).trace();
}

double criterion_trace(const Eigen::MatrixXd& w,
                       const ScatterDecomposition& scatter) {
  return criterion_trace(w, scatter.total, scatter.between);
}

}  // namespace foldtree
