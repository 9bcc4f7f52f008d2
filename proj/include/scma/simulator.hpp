#pragma once

// IDGN channel sampling, seeded Monte Carlo BER estimation and the
// union-bound BER of the superimposed constellation.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "scma/designer.hpp"
#include "scma/errors.hpp"
#include "scma/model.hpp"

namespace scma {

/// Deterministic deviate source for one block of trials. The engine is
/// mt19937_64 seeded from (seed, stream_id) through std::seed_seq.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t stream_id);

  double normal() { return normal_(engine_); }
  int uniform_int(int n);  ///< uniform on {0, ..., n-1}
  int coin() { return static_cast<int>(engine_() >> 63); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// y_k = s_k + sqrt(s_k) z1 + z0, z1 ~ N(0, varsigma2 sigma2), z0 ~ N(0, sigma2).
/// Throws DomainError on negative intensities or variances.
Eigen::VectorXd add_idgn(const Eigen::VectorXd& s, double sigma2, double varsigma2,
                         TrialStream& stream);

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Q(sqrt(sum_k (s_i,k - s_j,k)^2 / (2 nu_k))) with nu_k = varsigma2 sigma2 s_i,k + sigma2,
/// i.e. the variance at the transmitted point s_i (not symmetric in i, j).
template <typename A, typename B>
double pep_idgn(const Eigen::MatrixBase<A>& s_i, const Eigen::MatrixBase<B>& s_j, double sigma2,
                double varsigma2) {
  if (s_i.size() != s_j.size()) throw DimensionError("points must have equal length");
  using Scalar = typename A::Scalar;
  const auto nu = (Scalar(varsigma2 * sigma2) * s_i.array() + Scalar(sigma2)).eval();
  const auto diff2 = (s_i.array() - s_j.array()).square().eval();
  Scalar total = 0;
  for (Eigen::Index k = 0; k < diff2.size(); ++k) {
    if (diff2(k) != Scalar(0)) total += diff2(k) / (2 * nu(k));
  }
  return q_function(static_cast<double>(std::sqrt(total)));
}

/// Replaces the decoder; returns J x b hard bits for a received vector.
using Detector = std::function<Eigen::MatrixXi(const Eigen::VectorXd& y, TrialStream& stream)>;

struct SimulationConfig {
  int n_iters = 6;
  std::optional<std::int64_t> min_bit_errors = 200;
  std::optional<std::int64_t> max_frames = 2'000'000;
  std::uint64_t seed = 0;
  int block_frames = 1024;  ///< frames per TrialStream
  bool include_log_det = false;
  bool bypass_noise = false;
  bool with_analytical = true;  ///< fill ber_analytical when M^J fits the point limit
  Detector detector;            ///< empty: Max-Log-MPA

  void validate() const;
};

struct BerPoint {
  double pe = 0.0;
  std::int64_t frames = 0;
  std::int64_t bits_sent = 0;
  std::int64_t bit_errors = 0;
  double ber_sim = 0.0;
  double ber_analytical = std::nan("");
  std::vector<std::int64_t> per_user_errors;
  std::vector<double> per_user_ber;
  double ci95_halfwidth = 0.0;  ///< 1.96 sqrt(p (1 - p) / bits_sent)
};

/// Frames run in blocks of block_frames, block b drawing from
/// TrialStream(seed, b). The run stops after the first frame at which
/// min_bit_errors is reached, or at max_frames; either bound may be absent,
/// not both (ConfigError).
BerPoint simulate_ber(const CodebookSet& set, const SimulationConfig& config);

/// (1 / (J b)) sum_i M^-J sum_{i' != i} hamming(l_i, l_i') pep_idgn(s_i, s_i').
double analytical_ber(const CodebookSet& set, std::int64_t max_points = kDefaultMaxPoints);

enum class SweepMode { Scale, Redesign };

const char* to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& name);

/// Per P_e: scale `base` (Scale) or design afresh with the parameters of
/// `base` (Redesign), then simulate. pe_list must be nonempty, positive and
/// strictly increasing.
std::vector<BerPoint> sweep(const CodebookSet& base, const std::vector<double>& pe_list,
                            SweepMode mode, const SimulationConfig& sim,
                            const DesignConfig& design_config = {});
/// Redesign-only form driven by a parameter set.
std::vector<BerPoint> sweep(const SystemParams& params, const std::vector<double>& pe_list,
                            const SimulationConfig& sim, const DesignConfig& design_config = {});

}  // namespace scma
