#pragma once

// Structural objects of an SCMA block: system parameters, the factor graph,
// per-user mapping matrices and constellations, and the superimposed
// constellation they generate.
//
// All user, symbol and resource indices are 0-based.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace scma {

enum class Labeling { NaturalBinary, Gray };

std::string to_string(Labeling labeling);
Labeling labeling_from_string(const std::string& name);

struct SystemParams {
  int K = 4;  ///< resource elements
  int J = 3;  ///< users
  int M = 4;  ///< codebook size
  int N = 2;  ///< nonzero entries per codeword
  double sigma2 = 0.01;    ///< thermal noise variance
  double varsigma2 = 0.0;  ///< shot-noise factor
  double Pe = 30.0;        ///< per-user average electrical power budget

  int bits_per_symbol() const;
  int bits_per_frame() const { return J * bits_per_symbol(); }

  /// Throws DimensionError or DomainError.
  void validate() const;
};

std::int64_t binomial(int n, int r);

/// K x J binary matrix F with F(k, j) = 1 iff user j is active on resource k.
class FactorGraph {
 public:
  /// Validates: binary entries, equal column weights, distinct columns.
  explicit FactorGraph(Eigen::MatrixXi F);

  const Eigen::MatrixXi& matrix() const { return F_; }
  int resources() const { return static_cast<int>(F_.rows()); }
  int users() const { return static_cast<int>(F_.cols()); }
  int nonzeros() const { return nonzeros_; }

  /// Users superimposed on resource k, ascending.
  const std::vector<int>& rn_neighbors(int k) const;
  /// Resources carrying user j, ascending.
  const std::vector<int>& vn_neighbors(int j) const;

  Eigen::VectorXi degrees() const { return F_.rowwise().sum(); }
  bool is_regular() const;
  /// True when the bipartite graph has no cycles.
  bool is_tree() const;

 private:
  Eigen::MatrixXi F_;
  int nonzeros_ = 0;
  std::vector<std::vector<int>> rn_neighbors_;
  std::vector<std::vector<int>> vn_neighbors_;
};

/// For K = 4, N = 2 the columns follow the reference 4x6 graph; any J <= 6
/// takes its first J columns. Other shapes enumerate supports
/// lexicographically. Throws DimensionError when J > C(K, N).
FactorGraph build_factor_graph(int K, int J, int N);

struct MappingMatrix {
  Eigen::MatrixXd V;  ///< K x N, one 1 per column
};

/// V_j with V(k, n) = 1 where k is the n-th resource of user j.
MappingMatrix mapping_from_graph(const FactorGraph& graph, int j);

struct Codebook {
  Eigen::MatrixXd C;  ///< N x M, column m is constellation point m
  int user_index = 0;
};

/// Average electrical power Tr(C^T C) / M.
double power(const Codebook& book);

class CodebookSet {
 public:
  /// Empty gains mean unit channels. Throws on any structural mismatch.
  CodebookSet(SystemParams params, FactorGraph graph, std::vector<Codebook> books,
              std::vector<Eigen::VectorXd> gains = {},
              Labeling labeling = Labeling::NaturalBinary);

  const SystemParams& params() const { return params_; }
  const FactorGraph& graph() const { return graph_; }
  const std::vector<MappingMatrix>& mappings() const { return mappings_; }
  const std::vector<Codebook>& books() const { return books_; }
  const std::vector<Eigen::VectorXd>& gains() const { return gains_; }
  Labeling labeling() const { return labeling_; }

  const Codebook& book(int j) const;
  bool unit_gains() const;
  double max_power() const;

  CodebookSet with_books(std::vector<Codebook> books) const;
  /// Replaces the scalar parameters; dimensions must be unchanged.
  CodebookSet with_params(const SystemParams& params) const;

 private:
  SystemParams params_;
  FactorGraph graph_;
  std::vector<MappingMatrix> mappings_;
  std::vector<Codebook> books_;
  std::vector<Eigen::VectorXd> gains_;
  Labeling labeling_;
};

/// x = V_j c_j^m, a K-vector with nonzeros on the support of user j.
Eigen::VectorXd codeword(const CodebookSet& set, int j, int m);

/// Bit label of symbol m on `bits` bits.
std::uint64_t symbol_label(int m, int bits, Labeling labeling);

struct SuperConstellation {
  Eigen::MatrixXd points;             ///< M^J x K, row i is s_i
  Eigen::MatrixXi index_tuples;       ///< M^J x J
  std::vector<std::uint64_t> labels;  ///< J*b bits, user 0 most significant
  Eigen::MatrixXd covariances;        ///< M^J x K, varsigma2*sigma2*s + sigma2
  int bits_per_point = 0;

  int size() const { return static_cast<int>(points.rows()); }
  /// Bit `position` (0 = most significant) of the label of point i.
  int bit(int i, int position) const;
};

inline constexpr std::int64_t kDefaultMaxPoints = 4096;

/// All M^J superimposed codewords sum_j diag(h_j) V_j c_j^{m_j}. Tuples are
/// enumerated as a mixed-radix counter with user 0 most significant.
/// Throws CapacityError above max_points.
SuperConstellation enumerate_superimposed(const CodebookSet& set,
                                          std::int64_t max_points = kDefaultMaxPoints);

/// Point index of a symbol tuple under the enumeration order above.
std::int64_t tuple_index(const std::vector<int>& symbols, int M);

/// Multiplies every constellation by sqrt(target_pe / max_j power(C_j))
/// and records target_pe as the power budget.
CodebookSet scale_codebook_set(const CodebookSet& set, double target_pe);

}  // namespace scma
