#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "scma/errors.hpp"
#include "scma/fixtures.hpp"
#include "scma/metrics.hpp"

using namespace scma;

namespace {

std::vector<Eigen::MatrixXd> raw_books(const CodebookSet& set) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& b : set.books()) out.push_back(b.C);
  return out;
}

CodebookSet random_set(int J, std::uint64_t seed, double varsigma2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  SystemParams p;
  p.J = J;
  p.varsigma2 = varsigma2;
  std::vector<Codebook> books;
  for (int j = 0; j < J; ++j) {
    Codebook b{Eigen::MatrixXd(2, 4), j};
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 4; ++m) b.C(n, m) = u(rng);
    books.push_back(b);
  }
  return CodebookSet(p, build_factor_graph(4, J, 2), books);
}

}  // namespace

TEST_CASE("red closed form") {
  Eigen::Vector2d a(1, 0), b(0, 1);
  CHECK(red(a, b, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(red(a, a, 3.0) == 0.0);
  Eigen::Vector4d x(0.3, 2.0, 0.0, 5.0), y(1.2, 0.1, 4.0, 5.5);
  CHECK(red(x, y, 0.0) == doctest::Approx((x - y).squaredNorm()).epsilon(1e-15));
  CHECK(red(x, y, 7.0) == red(y, x, 7.0));
  for (double v : {0.0, 0.5, 5.0, 20.0}) CHECK(red(x, y, v) <= (x - y).squaredNorm());
  CHECK(red(x, y, 2.0) == doctest::Approx(oracle::red(x.transpose(), y.transpose(), 2.0)));
  Eigen::Vector4d neg(0.3, -1, 0, 0);
  CHECK_THROWS_AS(red(neg, y, 1.0), DomainError);
  CHECK_THROWS_AS(red(Eigen::VectorXd(a), Eigen::VectorXd(x), 1.0), DimensionError);
  Eigen::Vector2f af(1, 0), bf(0, 1);
  CHECK(red(af, bf, 3.0f) == doctest::Approx(1.0));
}

TEST_CASE("pairwise report against brute force") {
  const CodebookSet set = load_fixture("ls-j3");
  const DistanceReport r = pairwise_report(enumerate_superimposed(set), 5.0);
  CHECK(r.pair_count == 2016);
  const Eigen::MatrixXd pts = oracle::superimpose(raw_books(set));
  CHECK(r.d_min == doctest::Approx(oracle::min_red(pts, 5.0)).epsilon(1e-12));
  double dmax = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = i + 1; j < 64; ++j) dmax = std::max(dmax, oracle::red(pts.row(i), pts.row(j), 5.0));
  CHECK(r.d_max == doctest::Approx(dmax).epsilon(1e-12));
  CHECK(0.0 <= r.d_min);
  CHECK(r.d_min <= r.d_max);

  // varsigma2 = 0 gives the squared minimum Euclidean distance.
  double med = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 64; ++i)
    for (int j = i + 1; j < 64; ++j) med = std::min(med, (pts.row(i) - pts.row(j)).squaredNorm());
  CHECK(std::abs(pairwise_report(enumerate_superimposed(set), 0.0).d_min - med) < 1e-12);
}

TEST_CASE("pairwise report edge cases") {
  CodebookSet set = load_fixture("ls-j3");
  auto books = set.books();
  books[0].C.col(1) = books[0].C.col(0);
  CHECK(pairwise_report(enumerate_superimposed(set.with_books(books)), 5.0).d_min == 0.0);

  const SuperConstellation sc = enumerate_superimposed(set);
  CHECK_THROWS_AS(pairwise_report(sc, 5.0, 0, 2015), CapacityError);
  const DistanceReport h = pairwise_report(sc, 5.0, 10);
  REQUIRE(h.histogram);
  std::int64_t total = 0;
  for (auto c : h.histogram->counts) total += c;
  CHECK(total == 2016);

  int visits = 0, last_i = -1, last_j = -1;
  bool ordered = true;
  for_each_red(sc, 5.0, [&](int i, int j, double) {
    if (i < last_i || (i == last_i && j <= last_j) || j <= i) ordered = false;
    last_i = i;
    last_j = j;
    ++visits;
  });
  CHECK(visits == 2016);
  CHECK(ordered);
}

TEST_CASE("stacked layout reproduces enumeration") {
  const CodebookSet set = load_fixture("ls-j4");
  const StackedVector L = stack(set);
  CHECK(L.values.size() == 2 * 4 * 4);
  CHECK(L.values(L.layout->index(1, 2, 1)) == set.book(1).C(1, 2));
  const Eigen::MatrixXd pts = L.layout->superimpose(L.values);
  CHECK((pts - enumerate_superimposed(set).points).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pts - oracle::superimpose(raw_books(set))).cwiseAbs().maxCoeff() < 1e-12);
  const CodebookSet back = L.to_set();
  for (int j = 0; j < 4; ++j) CHECK(back.book(j).C == set.book(j).C);
}

TEST_CASE("log-sum-exp objective") {
  const CodebookSet set = load_fixture("ls-j3");
  const StackedVector L = stack(set);
  const Eigen::MatrixXd pts = oracle::superimpose(raw_books(set));
  const double dmin = oracle::min_red(pts, 5.0);
  const double P = 64.0 * 63.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (int beta = 1; beta <= 30; ++beta) {
    const double f = logsumexp_objective(L, beta, 5.0);
    CHECK(f == doctest::Approx(oracle::softmin(pts, beta, 5.0)).epsilon(1e-10));
    CHECK(-f <= dmin + 1e-12);
    CHECK(-f >= dmin - std::log(P) / beta - 1e-12);
    CHECK(-f >= prev - 1e-12);
    prev = -f;
  }
  // large beta stays finite (beta d far above 700)
  const StackedVector big = stack(scale_codebook_set(set, 3000.0));
  CHECK(std::isfinite(logsumexp_objective(big, 30.0, 5.0)));

  Eigen::VectorXd neg = L.values;
  neg(3) = -0.1;
  CHECK_THROWS_AS(logsumexp_objective(StackedVector{L.layout, neg}, 1.0, 5.0), DomainError);
  CHECK_THROWS_AS(logsumexp_objective(L, 0.0, 5.0), DomainError);
}

TEST_CASE("softmin with two distances and with equal distances") {
  // Three collinear points: 0, 1, 3 on one axis; distances 1, 4, 9 squared.
  Eigen::MatrixXd pts(3, 1);
  pts << 0, 1, 3;
  const SoftMinStats s = softmin_stats(pts, 1.0, 0.0);
  const double direct = std::log(2 * (std::exp(-1.0) + std::exp(-9.0) + std::exp(-4.0)));
  CHECK(s.value == doctest::Approx(direct).epsilon(1e-14));

  Eigen::MatrixXd two(2, 1);
  two << 0, 10;
  // ordered pairs: two identical terms at d = 100
  CHECK(softmin_stats(two, 1.0, 0.0).value == doctest::Approx(-100.0 + std::log(2.0)));

  // equilateral triangle in 2D: every pair at squared distance 1
  Eigen::MatrixXd tri(3, 2);
  tri << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2;
  for (double beta : {1.0, 7.0, 30.0})
    CHECK(softmin_stats(tri, beta, 0.0).value == doctest::Approx(-1.0 + std::log(6.0) / beta).epsilon(1e-12));

  Eigen::MatrixXd one(1, 2);
  one << 1, 1;
  CHECK(softmin_stats(one, 1.0, 0.0).value == 0.0);
}

TEST_CASE("gradient matches central differences") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double v = seed % 4 == 0 ? 0.0 : 5.0;
    const CodebookSet set = random_set(3, seed, v);
    const StackedVector L = stack(set);
    const double beta = 1.0 + static_cast<double>(seed % 5);
    const Eigen::VectorXd g = logsumexp_gradient(L, beta, v);
    const double h = 1e-6;
    Eigen::VectorXd fd(L.values.size());
    for (Eigen::Index i = 0; i < L.values.size(); ++i) {
      Eigen::VectorXd up = L.values, dn = L.values;
      up(i) += h;
      dn(i) -= h;
      fd(i) = (logsumexp_objective(StackedVector{L.layout, up}, beta, v) -
               logsumexp_objective(StackedVector{L.layout, dn}, beta, v)) /
              (2 * h);
    }
    const double rel = (g - fd).norm() / std::max(fd.norm(), 1e-12);
    CHECK(rel < 1e-5);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("gradient symmetry") {
  // Uniform L: every entry 1.5. Swapping symbols 0 and 1 of one user is a
  // relabeling of the point set, so the gradient must swap the same way.
  SystemParams p;
  p.varsigma2 = 5.0;
  std::vector<Codebook> books;
  for (int j = 0; j < 3; ++j) {
    Codebook b{Eigen::MatrixXd::Constant(2, 4, 1.5), j};
    b.C(0, 0) = 0.5;
    b.C(0, 1) = 2.5;
    books.push_back(b);
  }
  const CodebookSet set(p, build_factor_graph(4, 3, 2), books);
  const StackedVector L = stack(set);
  const Eigen::VectorXd g = logsumexp_gradient(L, 3.0, 5.0);
  for (int j = 0; j < 3; ++j) {
    for (int m : {2, 3}) {
      CHECK(g(L.layout->index(j, m, 0)) ==
            doctest::Approx(g(L.layout->index(j, 5 - m, 0))).epsilon(1e-10));
    }
  }
}

TEST_CASE("equal-density ellipses") {
  const CodebookSet set = load_fixture("ls-j3");
  const auto circles = epd_ellipses(set.book(0), 0.01, 0.0);
  CHECK(circles.size() == 4);
  for (const auto& e : circles) {
    CHECK(e.semi_axes(0) == doctest::Approx(std::sqrt(5.991 * 0.01)));
    CHECK(e.semi_axes(1) == doctest::Approx(std::sqrt(5.991 * 0.01)));
    CHECK(e.confidence == 0.95);
  }
  Codebook one{Eigen::MatrixXd(2, 1), 0};
  one.C << 0.01, 9.0;
  const auto e = epd_ellipses(one, 0.01, 10.0);
  CHECK(e[0].semi_axes(0) == doctest::Approx(std::sqrt(5.991 * 0.011)).epsilon(1e-12));
  CHECK(e[0].semi_axes(1) == doctest::Approx(std::sqrt(5.991 * 0.91)).epsilon(1e-12));
  CHECK(e[0].center == Eigen::Vector2d(0.01, 9.0));
  CHECK(e[0].axis_directions == Eigen::Matrix2d::Identity());

  const auto ls = epd_ellipses(set.book(1), 0.01, 5.0);
  for (const auto& a : ls) {
    for (const auto& b : ls) {
      if (a.center(1) > b.center(1)) CHECK(a.semi_axes(1) > b.semi_axes(1));
    }
  }
  Codebook three{Eigen::MatrixXd::Ones(3, 4), 0};
  CHECK_THROWS_AS(epd_ellipses(three, 0.01, 1.0), UnsupportedError);
  CHECK(chi_square_2dof_quantile(0.95) == 5.991);
  CHECK(chi_square_2dof_quantile(0.5) == doctest::Approx(-2 * std::log(0.5)));
}
