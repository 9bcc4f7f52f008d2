#pragma once

// Distance geometry of superimposed constellations under input-dependent
// noise: rotated Euclidean distances, their extreme values, the smoothed
// soft-min (log-sum-exp) design objective with its analytic gradient, and
// equal-density ellipses of 2D constellation points.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "scma/errors.hpp"
#include "scma/model.hpp"

namespace scma {

/// Rotated Euclidean distance
///   sum_k (a_k - b_k)^2 / sqrt((varsigma2 a_k + 1)(varsigma2 b_k + 1)),
/// i.e. (a - b)^T G_a^{-1/2} G_b^{-1/2} (a - b) with G = varsigma2 diag(s) + I.
/// Reduces to the squared Euclidean distance at varsigma2 = 0.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar red(const Eigen::MatrixBase<DerivedA>& a,
                              const Eigen::MatrixBase<DerivedB>& b,
                              typename DerivedA::Scalar varsigma2) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw DimensionError("red: vectors differ in length");
  if ((a.array() < Scalar(0)).any() || (b.array() < Scalar(0)).any()) {
    throw DomainError("red: intensities must be nonnegative");
  }
  const auto ga = varsigma2 * a.array() + Scalar(1);
  const auto gb = varsigma2 * b.array() + Scalar(1);
  return ((a - b).array().square() / (ga * gb).sqrt()).sum();
}

struct DistanceHistogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::int64_t> counts;
};

struct DistanceReport {
  double d_min = 0.0;
  double d_max = 0.0;
  std::int64_t pair_count = 0;
  std::optional<DistanceHistogram> histogram;
};

inline constexpr std::int64_t kDefaultMaxPairs = 4096LL * 4095LL / 2;

/// Minimum and maximum RED over all unordered pairs i < j (lexicographic
/// scan). With fewer than two points d_min = d_max = 0 and pair_count = 0.
DistanceReport pairwise_report(const SuperConstellation& constellation, double varsigma2,
                               int histogram_bins = 0,
                               std::int64_t max_pairs = kDefaultMaxPairs);

/// Calls visit(i, j, red) for every pair i < j in lexicographic order.
void for_each_red(const SuperConstellation& constellation, double varsigma2,
                  const std::function<void(int, int, double)>& visit);

/// Linear map from the stacked constellation vector L = vec([C_1, ..., C_J])
/// to the superimposed points. Entry (n, m) of C_u sits at L index
/// n + N * (m + M * u).
class StackedLayout {
 public:
  /// Uses the graph, gains and dimensions of `prototype`; its constellation
  /// values are irrelevant.
  explicit StackedLayout(CodebookSet prototype, std::int64_t max_points = kDefaultMaxPoints);

  const CodebookSet& prototype() const { return prototype_; }
  Eigen::Index size() const { return coefficients_.cols(); }
  Eigen::Index points() const { return points_; }
  int resources() const { return prototype_.params().K; }

  Eigen::Index index(int user, int symbol, int n) const {
    const auto& p = prototype_.params();
    return n + p.N * (symbol + p.M * static_cast<Eigen::Index>(user));
  }

  /// Sparse (P*K) x (N*M*J) coefficient matrix; row i + P*k yields s_i^k.
  const Eigen::SparseMatrix<double>& coefficients() const { return coefficients_; }

  /// P x K matrix of superimposed points, row order as enumerate_superimposed.
  Eigen::MatrixXd superimpose(const Eigen::VectorXd& L) const;

  /// Chain rule through the linear map: d/dL given d/ds (P x K).
  Eigen::VectorXd pullback(const Eigen::MatrixXd& point_gradient) const;

  Eigen::VectorXd stack(const std::vector<Codebook>& books) const;
  std::vector<Codebook> unstack(const Eigen::VectorXd& L) const;

 private:
  CodebookSet prototype_;
  Eigen::Index points_ = 0;
  Eigen::SparseMatrix<double> coefficients_;
};

struct StackedVector {
  std::shared_ptr<const StackedLayout> layout;
  Eigen::VectorXd values;

  /// Codebook set carrying these values and the layout's structure.
  CodebookSet to_set() const;
};

StackedVector stack(const CodebookSet& set, std::int64_t max_points = kDefaultMaxPoints);

/// Summary of one soft-min evaluation. `d_min` doubles as the exponent
/// shift; `log_sum` is ln sum_{i<j} exp(-beta (d_ij - d_min)).
struct SoftMinStats {
  double value = 0.0;
  double d_min = 0.0;
  double log_sum = 0.0;
  std::int64_t pairs = 0;
};

/// (1/beta) ln sum_{i != j} exp(-beta d_ij) over ordered pairs of the rows
/// of `points`. Zero when there are fewer than two points.
SoftMinStats softmin_stats(const Eigen::MatrixXd& points, double beta, double varsigma2);

/// Gradient of the soft-min value with respect to every point coordinate
/// (P x K), reusing the shift and normalizer from `stats`.
Eigen::MatrixXd softmin_point_gradient(const Eigen::MatrixXd& points, double beta,
                                       double varsigma2, const SoftMinStats& stats);

/// Throws DomainError for beta <= 0 or negative entries of L.
double logsumexp_objective(const StackedVector& L, double beta, double varsigma2);
Eigen::VectorXd logsumexp_gradient(const StackedVector& L, double beta, double varsigma2);

struct EpdEllipse {
  int user = 0;
  int point = 0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d semi_axes = Eigen::Vector2d::Zero();
  Eigen::Matrix2d axis_directions = Eigen::Matrix2d::Identity();  ///< columns
  double confidence = 0.95;
};

/// Chi-square (2 dof) quantile; 5.991 at 0.95, -2 ln(1 - p) otherwise.
double chi_square_2dof_quantile(double confidence);

/// One coordinate-aligned ellipse per constellation point, semi-axis n equal
/// to sqrt(q * (varsigma2 sigma2 c_n + sigma2)). Throws UnsupportedError
/// unless N = 2.
std::vector<EpdEllipse> epd_ellipses(const Codebook& book, double sigma2, double varsigma2,
                                     double confidence = 0.95);

}  // namespace scma
