#include "scma/simulator.hpp"

#include <bit>
#include <sstream>

#include "scma/decoder.hpp"

namespace scma {

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

int TrialStream::uniform_int(int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(engine_);
}

Eigen::VectorXd add_idgn(const Eigen::VectorXd& s, double sigma2, double varsigma2,
                         TrialStream& stream) {
  if (!(sigma2 >= 0.0) || !(varsigma2 >= 0.0)) throw DomainError("noise variances must be >= 0");
  if (s.size() > 0 && s.minCoeff() < 0.0) throw DomainError("intensities must be nonnegative");
  const double shot_sd = std::sqrt(varsigma2 * sigma2);
  const double thermal_sd = std::sqrt(sigma2);
  Eigen::VectorXd y(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double z1 = shot_sd * stream.normal();
    const double z0 = thermal_sd * stream.normal();
    y(k) = s(k) + std::sqrt(s(k)) * z1 + z0;
  }
  return y;
}

void SimulationConfig::validate() const {
  if (!min_bit_errors && !max_frames) throw ConfigError("need min_bit_errors or max_frames");
  if (min_bit_errors && *min_bit_errors < 1) throw ConfigError("min_bit_errors must be >= 1");
  if (max_frames && *max_frames < 1) throw ConfigError("max_frames must be >= 1");
  if (n_iters < 1) throw ConfigError("n_iters must be >= 1");
  if (block_frames < 1) throw ConfigError("block_frames must be >= 1");
}

BerPoint simulate_ber(const CodebookSet& set, const SimulationConfig& config) {
  config.validate();
  const SystemParams& p = set.params();
  const int b = p.bits_per_symbol();
  if (b == 0) throw DomainError("M = 1 carries no bits to count");

  // contributions[j][m]: K-vector of user j sending symbol m through its gains.
  std::vector<std::vector<Eigen::VectorXd>> contributions(p.J);
  for (int j = 0; j < p.J; ++j) {
    for (int m = 0; m < p.M; ++m) {
      contributions[j].push_back(set.gains()[j].cwiseProduct(codeword(set, j, m)));
    }
  }
  std::vector<std::uint64_t> labels(p.M);
  for (int m = 0; m < p.M; ++m) labels[m] = symbol_label(m, b, set.labeling());

  DecoderOptions options;
  options.n_iters = config.n_iters;
  options.include_log_det = config.include_log_det;
  const MaxLogMpaDecoder decoder(set, options);

  BerPoint point;
  point.pe = p.Pe;
  point.per_user_errors.assign(p.J, 0);
  std::vector<int> symbols(p.J);
  bool done = false;
  for (std::uint64_t block = 0; !done; ++block) {
    TrialStream stream(config.seed, block);
    for (int f = 0; f < config.block_frames; ++f) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(p.K);
      for (int j = 0; j < p.J; ++j) {
        symbols[j] = stream.uniform_int(p.M);
        s += contributions[j][symbols[j]];
      }
      const Eigen::VectorXd y =
          config.bypass_noise ? s : add_idgn(s, p.sigma2, p.varsigma2, stream);
      const Eigen::MatrixXi bits =
          config.detector ? config.detector(y, stream) : decoder.decode(y).hard_bits;
      for (int j = 0; j < p.J; ++j) {
        for (int kappa = 0; kappa < b; ++kappa) {
          const int sent = static_cast<int>((labels[symbols[j]] >> (b - 1 - kappa)) & 1ULL);
          if (bits(j, kappa) != sent) {
            ++point.per_user_errors[j];
            ++point.bit_errors;
          }
        }
      }
      ++point.frames;
      if ((config.min_bit_errors && point.bit_errors >= *config.min_bit_errors) ||
          (config.max_frames && point.frames >= *config.max_frames)) {
        done = true;
        break;
      }
    }
  }

  point.bits_sent = point.frames * p.J * b;
  point.ber_sim = static_cast<double>(point.bit_errors) / static_cast<double>(point.bits_sent);
  const double per_user_bits = static_cast<double>(point.frames) * b;
  for (int j = 0; j < p.J; ++j) {
    point.per_user_ber.push_back(static_cast<double>(point.per_user_errors[j]) / per_user_bits);
  }
  point.ci95_halfwidth =
      1.96 * std::sqrt(point.ber_sim * (1.0 - point.ber_sim) / static_cast<double>(point.bits_sent));
  if (config.with_analytical && std::pow(static_cast<double>(p.M), p.J) <= kDefaultMaxPoints) {
    point.ber_analytical = analytical_ber(set);
  }
  return point;
}

double analytical_ber(const CodebookSet& set, std::int64_t max_points) {
  const SystemParams& p = set.params();
  const SuperConstellation sc = enumerate_superimposed(set, max_points);
  if (p.bits_per_frame() == 0) return 0.0;
  const int P = sc.size();
  double total = 0.0;
  for (int i = 0; i < P; ++i) {
    const auto s_i = sc.points.row(i);
    double inner = 0.0;
    for (int t = 0; t < P; ++t) {
      if (t == i) continue;
      const int hamming = std::popcount(sc.labels[i] ^ sc.labels[t]);
      if (hamming == 0) continue;
      inner += hamming * pep_idgn(s_i, sc.points.row(t), p.sigma2, p.varsigma2);
    }
    total += inner;
  }
  return total / static_cast<double>(P) / static_cast<double>(p.bits_per_frame());
}

const char* to_string(SweepMode mode) { return mode == SweepMode::Scale ? "scale" : "redesign"; }

SweepMode sweep_mode_from_string(const std::string& name) {
  if (name == "scale") return SweepMode::Scale;
  if (name == "redesign") return SweepMode::Redesign;
  throw ConfigError("unknown sweep mode '" + name + "' (expected scale or redesign)");
}

namespace {

void check_pe_list(const std::vector<double>& pe_list) {
  if (pe_list.empty()) throw ConfigError("pe_list is empty");
  for (std::size_t i = 0; i < pe_list.size(); ++i) {
    if (!(pe_list[i] > 0.0)) throw ConfigError("pe values must be > 0");
    if (i > 0 && !(pe_list[i] > pe_list[i - 1])) {
      throw ConfigError("pe_list must be strictly increasing");
    }
  }
}

}  // namespace

std::vector<BerPoint> sweep(const CodebookSet& base, const std::vector<double>& pe_list,
                            SweepMode mode, const SimulationConfig& sim,
                            const DesignConfig& design_config) {
  check_pe_list(pe_list);
  sim.validate();
  if (mode == SweepMode::Redesign) return sweep(base.params(), pe_list, sim, design_config);
  std::vector<BerPoint> out;
  for (double pe : pe_list) out.push_back(simulate_ber(scale_codebook_set(base, pe), sim));
  return out;
}

std::vector<BerPoint> sweep(const SystemParams& params, const std::vector<double>& pe_list,
                            const SimulationConfig& sim, const DesignConfig& design_config) {
  check_pe_list(pe_list);
  sim.validate();
  std::vector<BerPoint> out;
  for (double pe : pe_list) {
    SystemParams at = params;
    at.Pe = pe;
    out.push_back(simulate_ber(design(at, design_config).set, sim));
  }
  return out;
}

}  // namespace scma
