#include "scma/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pair_kernel.hpp"

namespace scma {

namespace {

void require_nonnegative(const Eigen::MatrixXd& points) {
  if (points.size() > 0 && points.minCoeff() < 0.0) {
    throw DomainError("superimposed intensities must be nonnegative");
  }
}

}  // namespace

DistanceReport pairwise_report(const SuperConstellation& constellation, double varsigma2,
                               int histogram_bins, std::int64_t max_pairs) {
  require_nonnegative(constellation.points);
  const std::int64_t P = constellation.size();
  DistanceReport report;
  report.pair_count = P * (P - 1) / 2;
  if (report.pair_count > max_pairs) {
    std::ostringstream os;
    os << report.pair_count << " pairs exceed the budget of " << max_pairs;
    throw CapacityError(os.str());
  }
  if (P < 2) return report;

  detail::PairKernel kernel(constellation.points, varsigma2);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index i = 0; i + 1 < P; ++i) {
    const auto d = kernel.distances_from(i);
    lo = std::min(lo, d.minCoeff());
    hi = std::max(hi, d.maxCoeff());
  }
  report.d_min = lo;
  report.d_max = hi;

  if (histogram_bins > 0) {
    DistanceHistogram h{lo, hi, std::vector<std::int64_t>(histogram_bins, 0)};
    const double width = (hi - lo) / histogram_bins;
    for (Eigen::Index i = 0; i + 1 < P; ++i) {
      const auto d = kernel.distances_from(i);
      for (Eigen::Index t = 0; t < d.size(); ++t) {
        int bin = width > 0.0 ? static_cast<int>((d(t) - lo) / width) : 0;
        h.counts[std::clamp(bin, 0, histogram_bins - 1)] += 1;
      }
    }
    report.histogram = std::move(h);
  }
  return report;
}

void for_each_red(const SuperConstellation& constellation, double varsigma2,
                  const std::function<void(int, int, double)>& visit) {
  require_nonnegative(constellation.points);
  detail::PairKernel kernel(constellation.points, varsigma2);
  for (Eigen::Index i = 0; i + 1 < kernel.size(); ++i) {
    const auto d = kernel.distances_from(i);
    for (Eigen::Index t = 0; t < d.size(); ++t) {
      visit(static_cast<int>(i), static_cast<int>(i + 1 + t), d(t));
    }
  }
}

StackedLayout::StackedLayout(CodebookSet prototype, std::int64_t max_points)
    : prototype_(std::move(prototype)) {
  const SystemParams& p = prototype_.params();
  const double count = std::pow(static_cast<double>(p.M), p.J);
  if (count > static_cast<double>(max_points)) {
    throw CapacityError("stacked layout: M^J exceeds the point limit");
  }
  points_ = static_cast<Eigen::Index>(count);
  const Eigen::Index cols = static_cast<Eigen::Index>(p.N) * p.M * p.J;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(points_) * p.J * p.N);
  std::vector<int> symbols(p.J);
  for (Eigen::Index i = 0; i < points_; ++i) {
    Eigen::Index rest = i;
    for (int u = p.J - 1; u >= 0; --u) {
      symbols[u] = static_cast<int>(rest % p.M);
      rest /= p.M;
    }
    for (int u = 0; u < p.J; ++u) {
      const auto& support = prototype_.graph().vn_neighbors(u);
      for (int n = 0; n < p.N; ++n) {
        const int k = support[n];
        triplets.emplace_back(i + points_ * k, index(u, symbols[u], n), prototype_.gains()[u](k));
      }
    }
  }
  coefficients_.resize(points_ * p.K, cols);
  coefficients_.setFromTriplets(triplets.begin(), triplets.end());
}

Eigen::MatrixXd StackedLayout::superimpose(const Eigen::VectorXd& L) const {
  if (L.size() != size()) throw DimensionError("stacked vector has the wrong length");
  const Eigen::VectorXd flat = coefficients_ * L;
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), points_, resources());
}

Eigen::VectorXd StackedLayout::pullback(const Eigen::MatrixXd& point_gradient) const {
  if (point_gradient.rows() != points_ || point_gradient.cols() != resources()) {
    throw DimensionError("point gradient must be P x K");
  }
  const Eigen::Map<const Eigen::VectorXd> flat(point_gradient.data(), point_gradient.size());
  return coefficients_.transpose() * flat;
}

Eigen::VectorXd StackedLayout::stack(const std::vector<Codebook>& books) const {
  const auto& p = prototype_.params();
  if (static_cast<int>(books.size()) != p.J) throw DimensionError("need J codebooks");
  Eigen::VectorXd L(size());
  for (int u = 0; u < p.J; ++u) {
    if (books[u].C.rows() != p.N || books[u].C.cols() != p.M) {
      throw DimensionError("constellation matrices must be N x M");
    }
    L.segment(index(u, 0, 0), static_cast<Eigen::Index>(p.N) * p.M) =
        Eigen::Map<const Eigen::VectorXd>(books[u].C.data(), books[u].C.size());
  }
  return L;
}

std::vector<Codebook> StackedLayout::unstack(const Eigen::VectorXd& L) const {
  const auto& p = prototype_.params();
  if (L.size() != size()) throw DimensionError("stacked vector has the wrong length");
  std::vector<Codebook> books(p.J);
  for (int u = 0; u < p.J; ++u) {
    books[u].C = Eigen::Map<const Eigen::MatrixXd>(L.data() + index(u, 0, 0), p.N, p.M);
    books[u].user_index = u;
  }
  return books;
}

CodebookSet StackedVector::to_set() const {
  return layout->prototype().with_books(layout->unstack(values));
}

StackedVector stack(const CodebookSet& set, std::int64_t max_points) {
  auto layout = std::make_shared<const StackedLayout>(set, max_points);
  Eigen::VectorXd values = layout->stack(set.books());
  return {std::move(layout), std::move(values)};
}

SoftMinStats softmin_stats(const Eigen::MatrixXd& points, double beta, double varsigma2) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  require_nonnegative(points);
  SoftMinStats stats;
  const Eigen::Index P = points.rows();
  stats.pairs = static_cast<std::int64_t>(P) * (P - 1) / 2;
  if (P < 2) return stats;

  // Running shift: sum holds sum exp(-beta (d - shift)) for the current
  // minimum, rescaled whenever a block lowers it.
  detail::PairKernel kernel(points, varsigma2);
  double shift = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < P; ++i) {
    const auto d = kernel.distances_from(i);
    const double block_min = d.minCoeff();
    if (block_min < shift) {
      sum = std::isfinite(shift) ? sum * std::exp(-beta * (shift - block_min)) : 0.0;
      shift = block_min;
    }
    sum += (-beta * (d - shift)).exp().sum();
  }
  stats.d_min = shift;
  stats.log_sum = std::log(sum);
  stats.value = -shift + (std::numbers::ln2 + stats.log_sum) / beta;
  return stats;
}

Eigen::MatrixXd softmin_point_gradient(const Eigen::MatrixXd& points, double beta,
                                       double varsigma2, const SoftMinStats& stats) {
  const Eigen::Index P = points.rows();
  const Eigen::Index K = points.cols();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(P, K);
  if (P < 2) return grad;

  detail::PairKernel kernel(points, varsigma2);
  const Eigen::ArrayXXd& a = kernel.whitening();
  const double half_shot = 0.5 * varsigma2;
  Eigen::ArrayXd w(P), delta(P), prod(P), base(P), quad(P);
  for (Eigen::Index i = 0; i + 1 < P; ++i) {
    const Eigen::Index n = P - i - 1;
    const auto d = kernel.distances_from(i);
    // df/dd_ij for the unordered pair, both orderings folded together.
    auto c = w.head(n);
    c = -(-beta * (d - stats.d_min) - stats.log_sum).exp();
    for (Eigen::Index k = 0; k < K; ++k) {
      auto dk = delta.head(n);
      auto pk = prod.head(n);
      auto bk = base.head(n);
      auto qk = quad.head(n);
      dk = points(i, k) - points.col(k).tail(n).array();
      pk = a(i, k) * a.col(k).tail(n);
      bk = 2.0 * dk * pk;
      qk = half_shot * dk.square() * pk;
      grad(i, k) += (c * (bk - qk * (a(i, k) * a(i, k)))).sum();
      grad.col(k).tail(n).array() += c * (-bk - qk * a.col(k).tail(n).square());
    }
  }
  return grad;
}

double logsumexp_objective(const StackedVector& L, double beta, double varsigma2) {
  if (L.values.size() > 0 && L.values.minCoeff() < 0.0) {
    throw DomainError("stacked vector entries must be nonnegative");
  }
  return softmin_stats(L.layout->superimpose(L.values), beta, varsigma2).value;
}

Eigen::VectorXd logsumexp_gradient(const StackedVector& L, double beta, double varsigma2) {
  if (L.values.size() > 0 && L.values.minCoeff() < 0.0) {
    throw DomainError("stacked vector entries must be nonnegative");
  }
  const Eigen::MatrixXd points = L.layout->superimpose(L.values);
  const SoftMinStats stats = softmin_stats(points, beta, varsigma2);
  return L.layout->pullback(softmin_point_gradient(points, beta, varsigma2, stats));
}

double chi_square_2dof_quantile(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must be in (0, 1)");
  if (confidence == 0.95) return 5.991;
  return -2.0 * std::log1p(-confidence);
}

std::vector<EpdEllipse> epd_ellipses(const Codebook& book, double sigma2, double varsigma2,
                                     double confidence) {
  if (book.C.rows() != 2) throw UnsupportedError("ellipses need 2D constellations (N = 2)");
  const double q = chi_square_2dof_quantile(confidence);
  std::vector<EpdEllipse> out;
  out.reserve(book.C.cols());
  for (int m = 0; m < book.C.cols(); ++m) {
    EpdEllipse e;
    e.user = book.user_index;
    e.point = m;
    e.center = book.C.col(m);
    e.semi_axes = (q * (varsigma2 * sigma2 * e.center.array() + sigma2)).sqrt();
    e.confidence = confidence;
    out.push_back(e);
  }
  return out;
}

}  // namespace scma
