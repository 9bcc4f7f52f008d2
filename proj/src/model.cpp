#include "scma/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "scma/errors.hpp"

namespace scma {

std::string to_string(Labeling labeling) {
  switch (labeling) {
    case Labeling::NaturalBinary:
      return "natural-binary";
    case Labeling::Gray:
      return "gray";
  }
  return "natural-binary";
}

Labeling labeling_from_string(const std::string& name) {
  if (name == "natural-binary") return Labeling::NaturalBinary;
  if (name == "gray") return Labeling::Gray;
  throw FormatError("unknown labeling '" + name + "'");
}

int SystemParams::bits_per_symbol() const {
  return M > 0 ? std::countr_zero(static_cast<unsigned>(M)) : 0;
}

std::int64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  std::int64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

void SystemParams::validate() const {
  if (K < 1 || N < 1 || N > K) {
    std::ostringstream os;
    os << "need K >= N >= 1 (K=" << K << ", N=" << N << ")";
    throw DimensionError(os.str());
  }
  if (J < 1 || J > binomial(K, N)) {
    std::ostringstream os;
    os << "J=" << J << " users exceed the C(" << K << "," << N << ")=" << binomial(K, N)
       << " available support patterns";
    throw DimensionError(os.str());
  }
  // M = 1 is admitted as the degenerate single-codeword case.
  if (M < 1 || !std::has_single_bit(static_cast<unsigned>(M))) {
    throw DimensionError("codebook size M must be a power of two");
  }
  if (J * bits_per_symbol() > 64) throw DimensionError("J*log2(M) must not exceed 64 bits");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be > 0");
  if (!(varsigma2 >= 0.0) || !std::isfinite(varsigma2)) {
    throw DomainError("varsigma2 must be >= 0");
  }
  if (!(Pe > 0.0) || !std::isfinite(Pe)) throw DomainError("Pe must be > 0");
}

FactorGraph::FactorGraph(Eigen::MatrixXi F) : F_(std::move(F)) {
  if (F_.rows() < 1 || F_.cols() < 1) throw DimensionError("empty factor graph");
  if ((F_.array() != 0 && F_.array() != 1).any()) {
    throw DimensionError("factor graph entries must be 0 or 1");
  }
  const Eigen::VectorXi weights = F_.colwise().sum().transpose();
  nonzeros_ = weights(0);
  if (nonzeros_ < 1 || (weights.array() != nonzeros_).any()) {
    throw DimensionError("every factor graph column must have the same number N >= 1 of ones");
  }
  std::set<std::vector<int>> seen;
  rn_neighbors_.assign(F_.rows(), {});
  vn_neighbors_.assign(F_.cols(), {});
  for (int j = 0; j < F_.cols(); ++j) {
    for (int k = 0; k < F_.rows(); ++k) {
      if (F_(k, j) == 1) {
        vn_neighbors_[j].push_back(k);
        rn_neighbors_[k].push_back(j);
      }
    }
    if (!seen.insert(vn_neighbors_[j]).second) {
      throw DimensionError("two users share an identical support");
    }
  }
}

const std::vector<int>& FactorGraph::rn_neighbors(int k) const {
  if (k < 0 || k >= resources()) throw IndexError("resource index out of range");
  return rn_neighbors_[k];
}

const std::vector<int>& FactorGraph::vn_neighbors(int j) const {
  if (j < 0 || j >= users()) throw IndexError("user index out of range");
  return vn_neighbors_[j];
}

bool FactorGraph::is_regular() const {
  const Eigen::VectorXi d = degrees();
  return (d.array() == d(0)).all();
}

bool FactorGraph::is_tree() const {
  // Union-find over K resource nodes followed by J user nodes; any edge
  // joining two already-connected nodes closes a cycle.
  std::vector<int> parent(resources() + users());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int j = 0; j < users(); ++j) {
    for (int k : vn_neighbors_[j]) {
      const int a = find(k);
      const int b = find(resources() + j);
      if (a == b) return false;
      parent[a] = b;
    }
  }
  return true;
}

FactorGraph build_factor_graph(int K, int J, int N) {
  if (K < 1 || N < 1 || N > K) throw DimensionError("need K >= N >= 1");
  const std::int64_t available = binomial(K, N);
  if (J < 1 || J > available) {
    std::ostringstream os;
    os << "J=" << J << " users exceed the C(" << K << "," << N << ")=" << available
       << " available support patterns";
    throw DimensionError(os.str());
  }
  std::vector<std::vector<int>> supports;
  if (K == 4 && N == 2) {
    supports = {{1, 3}, {0, 2}, {0, 1}, {2, 3}, {0, 3}, {1, 2}};
  } else {
    std::vector<int> pick(N);
    std::iota(pick.begin(), pick.end(), 0);
    while (static_cast<int>(supports.size()) < J) {
      supports.push_back(pick);
      int i = N - 1;
      while (i >= 0 && pick[i] == K - N + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int t = i + 1; t < N; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
  Eigen::MatrixXi F = Eigen::MatrixXi::Zero(K, J);
  for (int j = 0; j < J; ++j) {
    for (int k : supports[j]) F(k, j) = 1;
  }
  return FactorGraph(std::move(F));
}

MappingMatrix mapping_from_graph(const FactorGraph& graph, int j) {
  const auto& support = graph.vn_neighbors(j);
  MappingMatrix out{Eigen::MatrixXd::Zero(graph.resources(), graph.nonzeros())};
  for (int n = 0; n < static_cast<int>(support.size()); ++n) out.V(support[n], n) = 1.0;
  return out;
}

double power(const Codebook& book) {
  if (book.C.cols() == 0) return 0.0;
  return book.C.squaredNorm() / static_cast<double>(book.C.cols());
}

CodebookSet::CodebookSet(SystemParams params, FactorGraph graph, std::vector<Codebook> books,
                         std::vector<Eigen::VectorXd> gains, Labeling labeling)
    : params_(params),
      graph_(std::move(graph)),
      books_(std::move(books)),
      gains_(std::move(gains)),
      labeling_(labeling) {
  params_.validate();
  if (graph_.resources() != params_.K || graph_.users() != params_.J ||
      graph_.nonzeros() != params_.N) {
    throw DimensionError("factor graph shape does not match K, J, N");
  }
  if (static_cast<int>(books_.size()) != params_.J) {
    throw DimensionError("need exactly one codebook per user");
  }
  for (int j = 0; j < params_.J; ++j) {
    const auto& C = books_[j].C;
    if (C.rows() != params_.N || C.cols() != params_.M) {
      throw DimensionError("constellation matrices must be N x M");
    }
    if (!C.allFinite()) throw DomainError("constellation entries must be finite");
    if ((C.array() < 0.0).any()) throw DomainError("constellation entries must be nonnegative");
    books_[j].user_index = j;
  }
  if (gains_.empty()) {
    gains_.assign(params_.J, Eigen::VectorXd::Ones(params_.K));
  }
  if (static_cast<int>(gains_.size()) != params_.J) {
    throw DimensionError("need one gain vector per user");
  }
  for (const auto& h : gains_) {
    if (h.size() != params_.K) throw DimensionError("gain vectors must have length K");
    if (!h.allFinite() || (h.array() < 0.0).any()) {
      throw DomainError("channel gains must be finite and nonnegative");
    }
  }
  mappings_.reserve(params_.J);
  for (int j = 0; j < params_.J; ++j) mappings_.push_back(mapping_from_graph(graph_, j));
}

const Codebook& CodebookSet::book(int j) const {
  if (j < 0 || j >= params_.J) throw IndexError("user index out of range");
  return books_[j];
}

bool CodebookSet::unit_gains() const {
  return std::all_of(gains_.begin(), gains_.end(),
                     [](const Eigen::VectorXd& h) { return (h.array() == 1.0).all(); });
}

double CodebookSet::max_power() const {
  double p = 0.0;
  for (const auto& b : books_) p = std::max(p, power(b));
  return p;
}

CodebookSet CodebookSet::with_books(std::vector<Codebook> books) const {
  return CodebookSet(params_, graph_, std::move(books), gains_, labeling_);
}

CodebookSet CodebookSet::with_params(const SystemParams& params) const {
  if (params.K != params_.K || params.J != params_.J || params.M != params_.M ||
      params.N != params_.N) {
    throw DimensionError("with_params cannot change dimensions");
  }
  return CodebookSet(params, graph_, books_, gains_, labeling_);
}

Eigen::VectorXd codeword(const CodebookSet& set, int j, int m) {
  const Codebook& book = set.book(j);
  if (m < 0 || m >= set.params().M) throw IndexError("symbol index out of range");
  return set.mappings()[j].V * book.C.col(m);
}

std::uint64_t symbol_label(int m, int bits, Labeling labeling) {
  const auto value = static_cast<std::uint64_t>(m);
  const std::uint64_t mask = bits >= 64 ? ~0ULL : ((1ULL << bits) - 1);
  switch (labeling) {
    case Labeling::NaturalBinary:
      return value & mask;
    case Labeling::Gray:
      return (value ^ (value >> 1)) & mask;
  }
  return value & mask;
}

int SuperConstellation::bit(int i, int position) const {
  return static_cast<int>((labels[i] >> (bits_per_point - 1 - position)) & 1ULL);
}

std::int64_t tuple_index(const std::vector<int>& symbols, int M) {
  std::int64_t index = 0;
  for (int m : symbols) index = index * M + m;
  return index;
}

SuperConstellation enumerate_superimposed(const CodebookSet& set, std::int64_t max_points) {
  const SystemParams& p = set.params();
  const double count = std::pow(static_cast<double>(p.M), p.J);
  if (count > static_cast<double>(max_points)) {
    std::ostringstream os;
    os << "M^J = " << count << " superimposed points exceed the limit of " << max_points;
    throw CapacityError(os.str());
  }
  const auto P = static_cast<Eigen::Index>(count);
  const int b = p.bits_per_symbol();

  // Per-user channel-weighted codewords, K x M each.
  std::vector<Eigen::MatrixXd> weighted(p.J);
  for (int j = 0; j < p.J; ++j) {
    weighted[j] = set.gains()[j].asDiagonal() * (set.mappings()[j].V * set.book(j).C);
  }

  SuperConstellation out;
  out.points = Eigen::MatrixXd::Zero(P, p.K);
  out.index_tuples.resize(P, p.J);
  out.labels.resize(P);
  out.bits_per_point = p.J * b;
  for (Eigen::Index i = 0; i < P; ++i) {
    Eigen::Index rest = i;
    std::uint64_t label = 0;
    for (int j = p.J - 1; j >= 0; --j) {
      const int m = static_cast<int>(rest % p.M);
      rest /= p.M;
      out.index_tuples(i, j) = m;
    }
    for (int j = 0; j < p.J; ++j) {
      const int m = out.index_tuples(i, j);
      out.points.row(i) += weighted[j].col(m).transpose();
      label = (label << b) | symbol_label(m, b, set.labeling());
    }
    out.labels[i] = label;
  }
  out.covariances = (p.varsigma2 * p.sigma2 * out.points.array() + p.sigma2).matrix();
  return out;
}

CodebookSet scale_codebook_set(const CodebookSet& set, double target_pe) {
  if (!(target_pe > 0.0)) throw DomainError("target power must be > 0");
  const double design_power = set.max_power();
  if (!(design_power > 0.0)) throw DomainError("cannot rescale a set with zero power");
  const double alpha = std::sqrt(target_pe / design_power);
  std::vector<Codebook> books = set.books();
  for (auto& b : books) b.C *= alpha;
  SystemParams params = set.params();
  params.Pe = target_pe;
  return CodebookSet(params, set.graph(), std::move(books), set.gains(), set.labeling());
}

}  // namespace scma
