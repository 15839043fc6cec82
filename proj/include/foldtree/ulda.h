#ifndef FOLDTREE_ULDA_H_
#define FOLDTREE_ULDA_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace foldtree {

enum class PriorMode { kEstimated, kEqual };

const char* prior_mode_name(PriorMode mode);
PriorMode parse_prior_mode(const std::string& name);

// Scatter matrices of a labeled design matrix. Class rows are indexed by
// class id; absent classes have zero count and a zero mean row.
struct ScatterDecomposition {
  Eigen::MatrixXd total;    // S_T
  Eigen::MatrixXd between;  // S_B
  Eigen::MatrixXd within;   // S_W
  Eigen::MatrixXd class_means;
  Eigen::VectorXd grand_mean;
  Eigen::VectorXi class_counts;
};

// S_T, S_B and S_W, each by direct summation. `n_classes` bounds the class
// ids in `y`. Throws DataError when fewer than two classes are present.
ScatterDecomposition compute_scatter(const Eigen::MatrixXd& x,
                                     std::span<const int> y, int n_classes);

// Centered sufficient statistics for discriminant fits on any column subset
// of one design matrix. Only classes present in the rows are kept.
struct DiscriminantMoments {
  std::vector<int> classes;         // present class ids, ascending
  Eigen::VectorXd counts;           // rows per present class
  Eigen::VectorXd mean;             // grand mean per column
  Eigen::MatrixXd total;            // S_T
  // Row c is sqrt(n_c) * (class mean - grand mean), so S_B = B^T B.
  Eigen::MatrixXd between_factor;
  std::vector<bool> constant;       // column takes a single value
  int n_rows = 0;
  int n_classes_total = 0;

  Eigen::Index n_columns() const { return mean.size(); }
};

DiscriminantMoments compute_moments(const Eigen::MatrixXd& x,
                                    std::span<const int> y, int n_classes);

// A fitted uncorrelated LDA. Scores are z = W^T (x - center), which satisfy
// W^T S_T W = I on the fitting rows. Class posteriors are Gaussian in score
// space with the pooled within-class variance of each score, which is what
// makes the model coincide with classical LDA when S_T is nonsingular.
struct UldaModel {
  std::vector<int> classes;          // class ids the model can predict
  std::vector<int> features;         // design-matrix columns used, in order
  Eigen::VectorXd center;            // grand mean over `features`
  Eigen::MatrixXd transform;         // W: |features| x q
  Eigen::MatrixXd centroids;         // |classes| x q projected class means
  Eigen::VectorXd eigenvalues;       // q discriminant eigenvalues, decreasing
  Eigen::VectorXd within_variance;   // q pooled within-class score variances
  Eigen::VectorXd priors;            // |classes|, positive, sum to 1
  PriorMode prior_mode = PriorMode::kEstimated;
  double trace = 0.0;                // attained trace criterion
  int n_classes_total = 0;           // width of posterior rows

  Eigen::Index dimension() const { return transform.cols(); }
  // Same model with different priors (estimated priors come from counts).
  UldaModel with_priors(PriorMode mode, const Eigen::VectorXd& counts) const;
};

// Fits ULDA on the chosen columns (all columns when `features` is empty).
// Returns nullopt when there is no discriminant direction (all class means
// coincide up to the rank tolerance). Throws DataError when fewer than two
// classes are present or an entry is non-finite.
std::optional<UldaModel> fit_ulda(const Eigen::MatrixXd& x,
                                  std::span<const int> y, int n_classes,
                                  PriorMode priors,
                                  std::span<const int> features = {});

// Same, from precomputed moments; `subset` indexes moment columns.
std::optional<UldaModel> fit_ulda(const DiscriminantMoments& moments,
                                  PriorMode priors,
                                  std::span<const int> subset);

// Unnormalized log posteriors, n x n_classes_total; classes outside the
// model get -infinity. `x` is the full design matrix the model was fitted
// against (columns are selected through model.features).
Eigen::MatrixXd log_scores(const UldaModel& model, const Eigen::MatrixXd& x);

// Class posteriors, n x n_classes_total, rows summing to 1. Computed with
// log-sum-exp. Throws DataError on a column count too small for the model.
Eigen::MatrixXd posterior(const UldaModel& model, const Eigen::MatrixXd& x);

// Index of the largest entry among `allowed` (all entries when empty); ties
// go to the lowest index.
int restricted_argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row,
                      std::span<const int> allowed = {});

// Predicted class per row, restricted to `allowed` when non-empty.
std::vector<int> predict(const UldaModel& model, const Eigen::MatrixXd& x,
                         std::span<const int> allowed = {});

// trace((W^T S_T W)^+ (W^T S_B W)).
double criterion_trace(const Eigen::MatrixXd& w,
                       const ScatterDecomposition& scatter);
double criterion_trace(const Eigen::MatrixXd& w, const Eigen::MatrixXd& total,
                       const Eigen::MatrixXd& between);

// Moore-Penrose inverse of a symmetric positive semidefinite matrix.
Eigen::MatrixXd psd_pseudo_inverse(const Eigen::MatrixXd& a);

}  // namespace foldtree

#endif  // FOLDTREE_ULDA_H_
