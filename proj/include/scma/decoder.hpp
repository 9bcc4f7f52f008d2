#pragma once

// Multi-user detection over the SCMA factor graph with a per-resource
// noise variance rho^2 = sigma2 + varsigma2 sigma2 sum_m h_km x_km.
//
//  * MaxLogMpaDecoder: log-domain message passing with max in place of
//    log-sum-exp; optional per-resource log-normalizer.
//  * mpa_linear: exponential-domain sum-product with the full Gaussian
//    likelihood.
//  * joint_map_bruteforce: exhaustive joint maximum-likelihood over all M^J
//    tuples, used as the oracle for both.

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "scma/model.hpp"

namespace scma {

/// Operation tallies of the resource-node update.
struct OpCounts {
  std::int64_t exponential = 0;
  std::int64_t multiplication = 0;
  std::int64_t addition = 0;
  std::int64_t comparison = 0;

  OpCounts& operator+=(const OpCounts& other);
  bool operator==(const OpCounts&) const = default;
};

enum class DecoderVariant { Mpa, MaxLog };

/// Closed-form RN-update cost for a regular graph of degree d_f:
///   MPA      exp (M^d K d N), mult (d+3)(M^d K d N), add (2d+2)(M^d K d N)
///   Max-Log  mult 4(M^d K d N), add (3d+1)(M^d K d^2 N), cmp (M^d K d N)
OpCounts op_counts(int M, int d_f, int K, int n_iters, DecoderVariant variant);

struct DecoderOptions {
  int n_iters = 6;
  /// Adds -1/2 log(2 pi rho^2) to every resource metric.
  bool include_log_det = false;
  /// Stop early on a message fixpoint; only applied to acyclic graphs.
  bool early_exit = true;
};

struct DecoderState {
  std::vector<std::pair<int, int>> edges;  ///< (k, j) for every F(k, j) = 1
  std::vector<Eigen::VectorXd> rn_to_vn;   ///< per edge, M log-domain values
  std::vector<Eigen::VectorXd> vn_to_rn;
  Eigen::MatrixXd beliefs;    ///< J x M, log I_j(x_j)
  Eigen::MatrixXd llrs;       ///< J x b
  Eigen::MatrixXi hard_bits;  ///< J x b, 0 iff llr > 0
  std::vector<int> symbols;   ///< per-user argmax of the belief
  int iterations = 0;

  /// Edge index of (k, j), or -1.
  int edge(int k, int j) const;
};

class MaxLogMpaDecoder {
 public:
  explicit MaxLogMpaDecoder(CodebookSet set, DecoderOptions options = {});

  /// Throws DimensionError when y has the wrong length.
  DecoderState decode(const Eigen::VectorXd& y, OpCounts* counts = nullptr) const;

  const CodebookSet& set() const { return set_; }
  const DecoderOptions& options() const { return options_; }

 private:
  struct Resource {
    std::vector<int> users;          // xi_k
    std::vector<int> edges;          // edge index per neighbor
    Eigen::MatrixXi digits;          // combos x d, symbol of each neighbor
    Eigen::VectorXd superimposed;    // sum of h x per combo
    Eigen::VectorXd inv_two_rho2;    // 1 / (2 rho^2)
    Eigen::VectorXd log_normalizer;  // -1/2 log(2 pi rho^2)
  };

  CodebookSet set_;
  DecoderOptions options_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> user_edges_;
  std::vector<Resource> resources_;
  std::vector<std::vector<int>> bit_masks_;  // per bit: symbols with that bit = 0
  bool tree_ = false;

  friend DecoderState mpa_linear(const Eigen::VectorXd&, const CodebookSet&, int, OpCounts*);
};

DecoderState max_log_mpa(const Eigen::VectorXd& y, const CodebookSet& set, int n_iters = 6,
                         bool include_log_det = false);

/// Sum-product in the exponential domain with per-resource max-shifting and
/// message normalization; n_iters = 0 returns the prior. Throws
/// UnderflowError if every belief of a user vanishes.
DecoderState mpa_linear(const Eigen::VectorXd& y, const CodebookSet& set, int n_iters = 6,
                        OpCounts* counts = nullptr);

struct JointDecision {
  std::vector<int> symbols;
  std::int64_t index = 0;
  std::uint64_t label = 0;
  Eigen::MatrixXi hard_bits;  ///< J x b
  double log_likelihood = 0.0;
  double runner_up = 0.0;  ///< second-best log-likelihood (-inf for M^J = 1)

  bool unique(double margin = 1e-9) const { return log_likelihood - runner_up > margin; }
};

/// argmax over all tuples of log f(y | s_i) with covariance
/// diag(varsigma2 sigma2 s_i + sigma2); ties resolve to the lowest index.
JointDecision joint_map_bruteforce(const Eigen::VectorXd& y, const CodebookSet& set,
                                   std::int64_t max_points = kDefaultMaxPoints);

/// Per-resource Gaussian log-likelihood with or without the log-normalizer.
double resource_log_likelihood(double y, double mean, double sigma2, double varsigma2,
                               bool include_log_det);

}  // namespace scma
