#pragma once

#include <Eigen/Dense>

namespace scma::detail {

// Row-blocked RED evaluation over the upper triangle of a P x K point
// matrix. For a fixed row i, the distances to rows i+1..P-1 are produced as
// one contiguous array so Eigen can vectorize across partners.
class PairKernel {
 public:
  PairKernel(const Eigen::MatrixXd& points, double varsigma2)
      : s_(points),
        varsigma2_(varsigma2),
        a_((varsigma2 * points.array() + 1.0).rsqrt()),
        buffer_(points.rows()) {}

  Eigen::Index size() const { return s_.rows(); }
  Eigen::Index resources() const { return s_.cols(); }
  double varsigma2() const { return varsigma2_; }
  const Eigen::MatrixXd& points() const { return s_; }
  const Eigen::ArrayXXd& whitening() const { return a_; }

  /// Distances from row i to every later row; valid for the returned length.
  Eigen::Ref<const Eigen::ArrayXd> distances_from(Eigen::Index i) {
    const Eigen::Index n = s_.rows() - i - 1;
    auto d = buffer_.head(n);
    d.setZero();
    for (Eigen::Index k = 0; k < s_.cols(); ++k) {
      d += (s_(i, k) - s_.col(k).tail(n).array()).square() * (a_(i, k) * a_.col(k).tail(n));
    }
    return d;
  }

 private:
  const Eigen::MatrixXd& s_;
  double varsigma2_;
  Eigen::ArrayXXd a_;
  Eigen::ArrayXd buffer_;
};

}  // namespace scma::detail
