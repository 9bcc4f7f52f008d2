#pragma once

// Codebook design by beta-continuation minimization of the log-sum-exp
// soft-min objective under intensity-floor and per-user power constraints,
// with multiple random starts.

#include <cstdint>
#include <vector>

#include "scma/metrics.hpp"
#include "scma/model.hpp"

namespace scma {

struct DesignConfig {
  std::vector<double> beta_schedule = default_beta_schedule();
  double inner_tol = 1e-3;   ///< stop a beta stage when |f^t - f^{t-1}| falls below this
  int starts = 8;
  std::uint64_t seed = 0;    ///< start s uses seed + s
  double epsilon_floor = 0.01;
  int max_inner_iters = 500;

  /// beta_min, beta_min + 1, ..., beta_max. Stages below 10 are left out by
  /// default: solved to convergence they pull codewords of a user onto the
  /// floor corner and the later stages cannot recover.
  static std::vector<double> default_beta_schedule(double beta_max = 30.0, double beta_min = 10.0);
  void validate() const;
};

struct TraceEntry {
  int start = 0;
  double beta = 0.0;
  int iteration = 0;  ///< 0 is the warm-start evaluation of a stage
  double value = 0.0;
};

struct ActiveConstraints {
  std::vector<bool> power_tight;  ///< per user, power within 1e-6 of Pe
  int floor_tight = 0;            ///< entries within 1e-9 of the floor
};

struct DesignResult {
  CodebookSet set;
  std::vector<TraceEntry> objective_trace;
  std::vector<double> start_objectives;  ///< final-beta objective per start
  int best_start = 0;
  double final_objective = 0.0;
  double final_d_min = 0.0;
  ActiveConstraints active_constraints;
  double wall_time = 0.0;  ///< seconds
};

/// Euclidean projection of each user block onto
/// {x : x >= epsilon_floor, ||x||^2 / M <= Pe}. Equals "clamp to the floor,
/// then scale the block by sqrt(Pe / p)" whenever scaling keeps the floor.
/// Throws ConvergenceError when the set is empty (Pe < N * epsilon_floor^2).
Eigen::VectorXd project_feasible(const Eigen::VectorXd& L, const SystemParams& params,
                                 double epsilon_floor);
StackedVector project_feasible(const StackedVector& L, const SystemParams& params,
                               double epsilon_floor);

bool is_feasible(const Eigen::VectorXd& L, const SystemParams& params, double epsilon_floor,
                 double tolerance = 1e-6);

/// Layout for the default factor graph and unit gains of `params`.
std::shared_ptr<const StackedLayout> default_layout(const SystemParams& params);

/// Entries uniform on [epsilon_floor, sqrt(Pe)], then projected.
StackedVector random_init(std::shared_ptr<const StackedLayout> layout, std::uint64_t seed,
                          double epsilon_floor);
StackedVector random_init(const SystemParams& params, std::uint64_t seed, double epsilon_floor);

struct InnerResult {
  double value = 0.0;  ///< f_v at the returned point
  StackedVector L;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< f at the projected start, then every accepted step
};

/// Projected gradient descent with Barzilai-Borwein trial steps and an
/// Armijo backtracking line search. Every accepted iterate is feasible and
/// the value sequence is non-increasing.
InnerResult inner_solve(const StackedVector& L0, double beta, const SystemParams& params,
                        const DesignConfig& config);

/// Runs the beta schedule from `starts` random initializations and keeps the
/// start with the lowest final objective (ties within 1e-9: lowest index).
DesignResult design(const SystemParams& params, const DesignConfig& config);

}  // namespace scma
