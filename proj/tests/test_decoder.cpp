#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scma/decoder.hpp"
#include "scma/errors.hpp"
#include "scma/fixtures.hpp"
#include "scma/simulator.hpp"

using namespace scma;

namespace {

CodebookSet with_noise(const CodebookSet& set, double sigma2, double varsigma2) {
  SystemParams p = set.params();
  p.sigma2 = sigma2;
  p.varsigma2 = varsigma2;
  return set.with_params(p);
}

}  // namespace

TEST_CASE("closed-form operation counts") {
  const OpCounts mpa = op_counts(4, 3, 4, 6, DecoderVariant::Mpa);
  CHECK(mpa.exponential == 4608);
  CHECK(mpa.multiplication == 6 * 4608);
  CHECK(mpa.addition == 8 * 4608);
  CHECK(mpa.comparison == 0);
  const OpCounts ml = op_counts(4, 3, 4, 6, DecoderVariant::MaxLog);
  CHECK(ml.comparison == 4608);
  CHECK(ml.exponential == 0);
  CHECK(ml.multiplication == 4 * 4608);
  CHECK(ml.addition == 10 * 3 * 4608);
  CHECK(op_counts(4, 3, 4, 0, DecoderVariant::Mpa) == OpCounts{});
  CHECK(op_counts(4, 3, 4, 0, DecoderVariant::MaxLog) == OpCounts{});
}

TEST_CASE("instrumented counters match the closed form on the regular graph") {
  const CodebookSet set = load_fixture("ls-j6");
  const Eigen::VectorXd y = enumerate_superimposed(set).points.row(1234).transpose();
  for (int iters : {1, 6}) {
    OpCounts ml;
    DecoderOptions o;
    o.n_iters = iters;
    MaxLogMpaDecoder(set, o).decode(y, &ml);
    CHECK(ml == op_counts(4, 3, 4, iters, DecoderVariant::MaxLog));
    OpCounts mpa;
    mpa_linear(y, set, iters, &mpa);
    CHECK(mpa == op_counts(4, 3, 4, iters, DecoderVariant::Mpa));
    CHECK(mpa.exponential > 0);
  }
}

TEST_CASE("decoder state shape") {
  const CodebookSet set = load_fixture("ls-j3");
  const DecoderState s = max_log_mpa(Eigen::VectorXd::Ones(4), set);
  CHECK(s.edges.size() == 6);
  for (auto [k, j] : s.edges) CHECK(set.graph().matrix()(k, j) == 1);
  CHECK(s.edge(3, 0) >= 0);
  CHECK(s.edge(3, 1) == -1);
  CHECK(s.llrs.rows() == 3);
  CHECK(s.llrs.cols() == 2);
  for (int j = 0; j < 3; ++j)
    for (int b = 0; b < 2; ++b) CHECK(s.hard_bits(j, b) == (s.llrs(j, b) > 0 ? 0 : 1));
  CHECK_THROWS_AS(max_log_mpa(Eigen::VectorXd::Ones(3), set), DimensionError);
  CHECK_THROWS_AS(max_log_mpa(Eigen::VectorXd::Ones(4), set, 0), ConfigError);
}

TEST_CASE("noise-free input recovers every tuple") {
  for (const char* name : {"ls-j3", "dr-j3", "ls-j4"}) {
    const CodebookSet set = load_fixture(name);
    const SuperConstellation sc = enumerate_superimposed(set);
    const MaxLogMpaDecoder dec(set);
    for (int i = 0; i < sc.size(); ++i) {
      const DecoderState s = dec.decode(sc.points.row(i).transpose());
      for (int j = 0; j < set.params().J; ++j) CHECK(s.symbols[j] == sc.index_tuples(i, j));
      const JointDecision jd = joint_map_bruteforce(sc.points.row(i).transpose(), set);
      CHECK(jd.index == i);
    }
  }
}

TEST_CASE("joint ML recovers noise-free tuples at J = 6") {
  const CodebookSet set = load_fixture("ls-j6");
  const SuperConstellation sc = enumerate_superimposed(set);
  for (int i : {0, 77, 2048, 4095}) {
    const JointDecision jd = joint_map_bruteforce(sc.points.row(i).transpose(), set);
    CHECK(jd.index == i);
    CHECK(jd.label == sc.labels[i]);
    CHECK(jd.unique());
  }
  CHECK_THROWS_AS(joint_map_bruteforce(sc.points.row(0).transpose(), set, 1000), CapacityError);
}

TEST_CASE("tree graph: Max-Log-MPA equals joint ML when the maximizer is unique") {
  const CodebookSet set = load_fixture("ls-j3");
  const SuperConstellation sc = enumerate_superimposed(set);
  DecoderOptions o;
  o.include_log_det = true;
  const MaxLogMpaDecoder dec(set, o);
  int compared = 0, agree = 0;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    TrialStream stream(11, t);
    const int i = stream.uniform_int(64);
    const Eigen::VectorXd y =
        add_idgn(sc.points.row(i).transpose(), set.params().sigma2, set.params().varsigma2, stream);
    const JointDecision jd = joint_map_bruteforce(y, set);
    if (!jd.unique()) continue;
    ++compared;
    const DecoderState s = dec.decode(y);
    bool same = true;
    for (int j = 0; j < 3; ++j) same = same && s.symbols[j] == jd.symbols[j];
    if (same) ++agree;
  }
  CHECK(compared > 9900);
  CHECK(agree == compared);
}

TEST_CASE("varsigma2 = 0 gives bitwise the AWGN messages") {
  for (const char* name : {"ls-j3", "ls-j6"}) {
    const CodebookSet set = with_noise(load_fixture(name), 0.5, 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 12.0);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd y(4);
      for (auto& v : y) v = u(rng);
      DecoderOptions o;
      o.early_exit = false;
      o.n_iters = 4;
      const DecoderState s = MaxLogMpaDecoder(set, o).decode(y);
      const oracle::AwgnReference ref(y, set, 4);
      for (std::size_t e = 0; e < s.edges.size(); ++e) {
        const auto [k, j] = s.edges[e];
        CHECK(s.rn_to_vn[e] == ref.rn_to_vn[k][j]);
      }
    }
  }
}

TEST_CASE("constant metric shift leaves LLRs unchanged") {
  // With varsigma2 = 0 the log normalizer adds the same constant to every
  // combination of a resource.
  const CodebookSet set = with_noise(load_fixture("ls-j6"), 0.3, 0.0);
  const Eigen::VectorXd y = enumerate_superimposed(set).points.row(999).transpose().array() + 0.4;
  DecoderOptions plain, shifted;
  shifted.include_log_det = true;
  plain.n_iters = shifted.n_iters = 1;
  const DecoderState a = MaxLogMpaDecoder(set, plain).decode(y);
  const DecoderState b = MaxLogMpaDecoder(set, shifted).decode(y);
  const double c = -0.5 * std::log(2 * 3.14159265358979323846 * 0.3);
  for (std::size_t e = 0; e < a.edges.size(); ++e)
    CHECK((b.rn_to_vn[e].array() - a.rn_to_vn[e].array() - c).abs().maxCoeff() < 1e-12);
  CHECK((a.llrs - b.llrs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("relabeling one bit flips that LLR") {
  const CodebookSet set = load_fixture("ls-j3");
  auto books = set.books();
  // Swap symbols that differ in the first bit of user 2: 0<->2, 1<->3.
  const Eigen::MatrixXd C = books[1].C;
  books[1].C.col(0) = C.col(2);
  books[1].C.col(2) = C.col(0);
  books[1].C.col(1) = C.col(3);
  books[1].C.col(3) = C.col(1);
  const CodebookSet swapped = set.with_books(books);
  TrialStream stream(3, 0);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd y = add_idgn(enumerate_superimposed(set).points.row(t).transpose(), 0.01, 5.0, stream);
    const DecoderState a = max_log_mpa(y, set);
    const DecoderState b = max_log_mpa(y, swapped);
    CHECK(b.llrs(1, 0) == doctest::Approx(-a.llrs(1, 0)).epsilon(1e-12));
    CHECK(b.llrs(1, 1) == doctest::Approx(a.llrs(1, 1)).epsilon(1e-12));
    CHECK(b.llrs(0, 0) == doctest::Approx(a.llrs(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("tree graph messages reach a fixpoint") {
  const CodebookSet set = load_fixture("ls-j3");
  TrialStream stream(8, 0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd y = add_idgn(enumerate_superimposed(set).points.row(3 * t).transpose(), 0.01, 5.0, stream);
    DecoderOptions o;
    o.early_exit = false;
    o.n_iters = 4;
    const DecoderState a = MaxLogMpaDecoder(set, o).decode(y);
    o.n_iters = 12;
    const DecoderState b = MaxLogMpaDecoder(set, o).decode(y);
    for (std::size_t e = 0; e < a.edges.size(); ++e)
      CHECK((a.rn_to_vn[e] - b.rn_to_vn[e]).cwiseAbs().maxCoeff() < 1e-12);
    DecoderOptions early;
    early.n_iters = 12;
    const DecoderState c = MaxLogMpaDecoder(set, early).decode(y);
    CHECK(c.iterations < 12);
    CHECK(c.llrs == b.llrs);
  }
}

TEST_CASE("single user decodes by its own metric") {
  SystemParams p;
  p.J = 1;
  p.varsigma2 = 5.0;
  const CodebookSet full = load_fixture("ls-j3");
  const CodebookSet set(p, build_factor_graph(4, 1, 2), {full.book(0)});
  TrialStream stream(2, 0);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd y = codeword(set, 0, t % 4);
    y = add_idgn(y, 0.2, 5.0, stream);
    int best = 0;
    double best_v = -1e300;
    for (int m = 0; m < 4; ++m) {
      double v = 0.0;
      for (int n = 0; n < 2; ++n) {
        const int k = oracle::kSupports[0][n];
        const double x = set.book(0).C(n, m);
        v -= (y(k) - x) * (y(k) - x) / (2.0 * (0.01 + 0.05 * x));
      }
      if (v > best_v) {
        best_v = v;
        best = m;
      }
    }
    CHECK(max_log_mpa(y, set).symbols[0] == best);
  }
}

TEST_CASE("sum-product on the tree gives exact marginals") {
  const CodebookSet set = load_fixture("ls-j3");
  const SuperConstellation sc = enumerate_superimposed(set);
  TrialStream stream(21, 0);
  for (int t = 0; t < 30; ++t) {
    const Eigen::VectorXd y = add_idgn(sc.points.row(2 * t).transpose(), 0.05, 5.0, stream);
    Eigen::MatrixXd marg = Eigen::MatrixXd::Zero(3, 4);
    for (int i = 0; i < 64; ++i) {
      double ll = 0.0;
      for (int k = 0; k < 4; ++k) ll += oracle::gaussian_log_pdf(y(k), sc.points(i, k), 0.05 * (1 + 5 * sc.points(i, k)));
      for (int j = 0; j < 3; ++j) marg(j, sc.index_tuples(i, j)) += std::exp(ll);
    }
    const DecoderState s = mpa_linear(y, set.with_params([&] {
      SystemParams p = set.params();
      p.sigma2 = 0.05;
      return p;
    }()), 4);
    for (int j = 0; j < 3; ++j) {
      const Eigen::RowVectorXd exact = marg.row(j) / marg.row(j).sum();
      const Eigen::RowVectorXd got = s.beliefs.row(j).array().exp().matrix();
      CHECK((exact - got).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("sum-product with zero iterations returns the prior") {
  const CodebookSet set = load_fixture("ls-j4");
  const DecoderState s = mpa_linear(Eigen::VectorXd::Ones(4), set, 0);
  CHECK((s.beliefs.array() - std::log(0.25)).abs().maxCoeff() < 1e-15);
  CHECK(s.llrs.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("high SNR: sum-product and Max-Log agree") {
  const CodebookSet set = with_noise(load_fixture("ls-j6"), 1e-6, 5.0);
  const SuperConstellation sc = enumerate_superimposed(set);
  const MaxLogMpaDecoder dec(set);
  int agree = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    TrialStream stream(9, t);
    const int i = stream.uniform_int(sc.size());
    const Eigen::VectorXd y = add_idgn(sc.points.row(i).transpose(), 1e-6, 5.0, stream);
    if (dec.decode(y).hard_bits == mpa_linear(y, set).hard_bits) ++agree;
  }
  CHECK(agree >= 0.99 * trials);
}

TEST_CASE("joint ML reduces to nearest point without shot noise") {
  const CodebookSet set = with_noise(load_fixture("ls-j4"), 0.3, 0.0);
  const SuperConstellation sc = enumerate_superimposed(set);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 15.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd y(4);
    for (auto& v : y) v = u(rng);
    Eigen::Index nearest = 0;
    (sc.points.rowwise() - y.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
    CHECK(joint_map_bruteforce(y, set).index == nearest);
  }
}

TEST_CASE("log-determinant term decides between equally scaled residuals") {
  // Two points on one coordinate at 4 and 1; y placed so both normalized
  // residuals are equal. Only the log term separates them.
  SystemParams p;
  p.J = 1;
  p.M = 2;
  p.varsigma2 = 5.0;
  p.sigma2 = 0.1;
  Codebook b{Eigen::MatrixXd(2, 2), 0};
  b.C << 4.0, 1.0, 0.5, 0.5;
  const CodebookSet set(p, build_factor_graph(4, 1, 2), {b});
  const double sa = std::sqrt(0.1 * (1 + 5 * 4.0)), sb = std::sqrt(0.1 * (1 + 5 * 1.0));
  const double y1 = (4.0 * sb + 1.0 * sa) / (sa + sb);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  y(1) = y1;
  y(3) = 0.5;
  CHECK((4.0 - y1) / sa == doctest::Approx((y1 - 1.0) / sb));
  const JointDecision jd = joint_map_bruteforce(y, set);
  CHECK(jd.symbols[0] == 1);  // lower intensity, lower variance
  CHECK(jd.unique());
}

TEST_CASE("resource log-likelihood") {
  CHECK(resource_log_likelihood(1.0, 2.0, 0.01, 5.0, true) ==
        doctest::Approx(oracle::gaussian_log_pdf(1.0, 2.0, 0.01 * 11)));
  CHECK(resource_log_likelihood(1.0, 2.0, 0.01, 5.0, false) == doctest::Approx(-1.0 / 0.22));
}
