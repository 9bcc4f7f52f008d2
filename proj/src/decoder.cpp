#include "scma/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scma/errors.hpp"

namespace scma {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

OpCounts& OpCounts::operator+=(const OpCounts& other) {
  exponential += other.exponential;
  multiplication += other.multiplication;
  addition += other.addition;
  comparison += other.comparison;
  return *this;
}

OpCounts op_counts(int M, int d_f, int K, int n_iters, DecoderVariant variant) {
  const std::int64_t terms = ipow(M, d_f) * K * d_f * n_iters;
  OpCounts c;
  if (variant == DecoderVariant::Mpa) {
    c.exponential = terms;
    c.multiplication = (d_f + 3) * terms;
    c.addition = (2 * d_f + 2) * terms;
  } else {
    c.multiplication = 4 * terms;
    c.addition = (3 * d_f + 1) * terms * d_f;
    c.comparison = terms;
  }
  return c;
}

double resource_log_likelihood(double y, double mean, double sigma2, double varsigma2,
                               bool include_log_det) {
  const double rho2 = sigma2 + varsigma2 * sigma2 * mean;
  if (!(rho2 > 0.0)) throw DomainError("resource variance must be positive");
  const double r = y - mean;
  double value = -(r * r) / (2.0 * rho2);
  if (include_log_det) value -= 0.5 * std::log(2.0 * std::numbers::pi * rho2);
  return value;
}

int DecoderState::edge(int k, int j) const {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].first == k && edges[e].second == j) return static_cast<int>(e);
  }
  return -1;
}

MaxLogMpaDecoder::MaxLogMpaDecoder(CodebookSet set, DecoderOptions options)
    : set_(std::move(set)), options_(options) {
  if (options_.n_iters < 1) throw ConfigError("Max-Log-MPA needs at least one iteration");
  const SystemParams& p = set_.params();
  const FactorGraph& graph = set_.graph();
  tree_ = graph.is_tree();

  user_edges_.assign(p.J, {});
  resources_.resize(p.K);
  for (int k = 0; k < p.K; ++k) {
    Resource& r = resources_[k];
    r.users = graph.rn_neighbors(k);
    for (int j : r.users) {
      r.edges.push_back(static_cast<int>(edges_.size()));
      user_edges_[j].push_back(static_cast<int>(edges_.size()));
      edges_.emplace_back(k, j);
    }
    const int d = static_cast<int>(r.users.size());
    const auto combos = static_cast<Eigen::Index>(ipow(p.M, d));
    r.digits.resize(combos, d);
    r.superimposed.resize(combos);
    for (Eigen::Index c = 0; c < combos; ++c) {
      Eigen::Index rest = c;
      for (int t = d - 1; t >= 0; --t) {
        r.digits(c, t) = static_cast<int>(rest % p.M);
        rest /= p.M;
      }
      double s = 0.0;
      for (int t = 0; t < d; ++t) {
        const int j = r.users[t];
        const auto& support = graph.vn_neighbors(j);
        const int n = static_cast<int>(std::find(support.begin(), support.end(), k) - support.begin());
        s += set_.gains()[j](k) * set_.book(j).C(n, r.digits(c, t));
      }
      r.superimposed(c) = s;
    }
    const Eigen::ArrayXd rho2 = p.sigma2 + p.varsigma2 * p.sigma2 * r.superimposed.array();
    if (combos > 0 && !(rho2.minCoeff() > 0.0)) {
      throw DomainError("resource variance must be positive");
    }
    r.inv_two_rho2 = (2.0 * rho2).inverse().matrix();
    r.log_normalizer = (-0.5 * (2.0 * std::numbers::pi * rho2).log()).matrix();
  }

  const int b = p.bits_per_symbol();
  bit_masks_.assign(b, {});
  for (int kappa = 0; kappa < b; ++kappa) {
    for (int m = 0; m < p.M; ++m) {
      const auto label = symbol_label(m, b, set_.labeling());
      if (((label >> (b - 1 - kappa)) & 1ULL) == 0) bit_masks_[kappa].push_back(m);
    }
  }
}

namespace {

// Beliefs, LLRs and hard decisions from log-domain final beliefs. `exact`
// selects log-sum-exp (sum-product) instead of max over each bit class.
void finish_state(DecoderState& state, const CodebookSet& set,
                  const std::vector<std::vector<int>>& bit_masks, bool exact) {
  const SystemParams& p = set.params();
  const int b = p.bits_per_symbol();
  state.llrs.resize(p.J, b);
  state.hard_bits.resize(p.J, b);
  state.symbols.assign(p.J, 0);
  for (int j = 0; j < p.J; ++j) {
    const auto row = state.beliefs.row(j);
    Eigen::Index best = 0;
    row.maxCoeff(&best);
    state.symbols[j] = static_cast<int>(best);
    for (int kappa = 0; kappa < b; ++kappa) {
      std::vector<bool> zero(p.M, false);
      for (int m : bit_masks[kappa]) zero[m] = true;
      double lo0 = kNegInf, lo1 = kNegInf;
      for (int m = 0; m < p.M; ++m) {
        double& acc = zero[m] ? lo0 : lo1;
        acc = std::max(acc, row(m));
      }
      if (exact) {
        double s0 = 0.0, s1 = 0.0;
        const double shift = std::max(lo0, lo1);
        for (int m = 0; m < p.M; ++m) (zero[m] ? s0 : s1) += std::exp(row(m) - shift);
        lo0 = std::log(s0);
        lo1 = std::log(s1);
      }
      const double llr = lo0 - lo1;
      state.llrs(j, kappa) = llr;
      state.hard_bits(j, kappa) = llr > 0.0 ? 0 : 1;
    }
  }
}

}  // namespace

DecoderState MaxLogMpaDecoder::decode(const Eigen::VectorXd& y, OpCounts* counts) const {
  const SystemParams& p = set_.params();
  if (y.size() != p.K) throw DimensionError("received vector must have length K");
  const double log_prior = -std::log(static_cast<double>(p.M));

  DecoderState state;
  state.edges = edges_;
  state.rn_to_vn.assign(edges_.size(), Eigen::VectorXd::Zero(p.M));
  state.vn_to_rn.assign(edges_.size(), Eigen::VectorXd::Constant(p.M, log_prior));

  std::vector<Eigen::VectorXd> metrics(p.K);
  for (int k = 0; k < p.K; ++k) {
    const Resource& r = resources_[k];
    metrics[k] = -((y(k) - r.superimposed.array()).square() * r.inv_two_rho2.array()).matrix();
    if (options_.include_log_det) metrics[k] += r.log_normalizer;
  }

  std::vector<Eigen::VectorXd> previous;
  const bool watch_fixpoint = options_.early_exit && tree_;
  Eigen::VectorXd out(p.M);
  for (int it = 1; it <= options_.n_iters; ++it) {
    if (watch_fixpoint) previous = state.rn_to_vn;

    for (int k = 0; k < p.K; ++k) {
      const Resource& r = resources_[k];
      const int d = static_cast<int>(r.users.size());
      const Eigen::Index combos = r.digits.rows();
      for (int t = 0; t < d; ++t) {
        out.setConstant(kNegInf);
        for (Eigen::Index c = 0; c < combos; ++c) {
          double value = metrics[k](c);
          for (int u = 0; u < d; ++u) {
            if (u != t) value += state.vn_to_rn[r.edges[u]](r.digits(c, u));
          }
          double& slot = out(r.digits(c, t));
          if (value > slot) slot = value;
        }
        state.rn_to_vn[r.edges[t]] = out;
        if (counts != nullptr) {
          // Per-term costs of the complexity model: 4 products for the
          // variance-weighted residual, (3d+1)d sums, one comparison.
          counts->comparison += combos;
          counts->multiplication += 4 * combos;
          counts->addition += static_cast<std::int64_t>(3 * d + 1) * d * combos;
        }
      }
    }

    for (int j = 0; j < p.J; ++j) {
      for (int e : user_edges_[j]) {
        Eigen::VectorXd msg = Eigen::VectorXd::Constant(p.M, log_prior);
        for (int other : user_edges_[j]) {
          if (other != e) msg += state.rn_to_vn[other];
        }
        state.vn_to_rn[e] = std::move(msg);
      }
    }
    state.iterations = it;
    if (watch_fixpoint && it > 1 && previous == state.rn_to_vn) break;
  }

  state.beliefs.resize(p.J, p.M);
  for (int j = 0; j < p.J; ++j) {
    Eigen::VectorXd belief = Eigen::VectorXd::Constant(p.M, log_prior);
    for (int e : user_edges_[j]) belief += state.rn_to_vn[e];
    state.beliefs.row(j) = belief.transpose();
  }
  finish_state(state, set_, bit_masks_, false);
  return state;
}

DecoderState max_log_mpa(const Eigen::VectorXd& y, const CodebookSet& set, int n_iters,
                         bool include_log_det) {
  DecoderOptions options;
  options.n_iters = n_iters;
  options.include_log_det = include_log_det;
  return MaxLogMpaDecoder(set, options).decode(y);
}

DecoderState mpa_linear(const Eigen::VectorXd& y, const CodebookSet& set, int n_iters,
                        OpCounts* counts) {
  if (n_iters < 0) throw ConfigError("iteration count must be >= 0");
  DecoderOptions options;
  options.include_log_det = true;
  const MaxLogMpaDecoder tables(set, options);
  const SystemParams& p = set.params();
  if (y.size() != p.K) throw DimensionError("received vector must have length K");

  const std::size_t n_edges = tables.edges_.size();
  const double prior = 1.0 / p.M;
  std::vector<Eigen::VectorXd> rn_to_vn(n_edges, Eigen::VectorXd::Constant(p.M, prior));
  std::vector<Eigen::VectorXd> vn_to_rn(n_edges, Eigen::VectorXd::Constant(p.M, prior));

  std::vector<Eigen::VectorXd> likelihood(p.K);
  for (int k = 0; k < p.K; ++k) {
    const auto& r = tables.resources_[k];
    if (r.digits.rows() == 0 || r.users.empty()) continue;
    Eigen::ArrayXd metric = -(y(k) - r.superimposed.array()).square() * r.inv_two_rho2.array() +
                            r.log_normalizer.array();
    likelihood[k] = (metric - metric.maxCoeff()).exp().matrix();
  }

  auto normalize = [](Eigen::VectorXd& v) {
    const double total = v.sum();
    if (!(total > 0.0)) throw UnderflowError("sum-product message vanished");
    v /= total;
  };

  for (int it = 1; it <= n_iters; ++it) {
    for (int k = 0; k < p.K; ++k) {
      const auto& r = tables.resources_[k];
      const int d = static_cast<int>(r.users.size());
      const Eigen::Index combos = r.digits.rows();
      for (int t = 0; t < d; ++t) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(p.M);
        for (Eigen::Index c = 0; c < combos; ++c) {
          double term = likelihood[k](c);
          for (int u = 0; u < d; ++u) {
            if (u != t) term *= vn_to_rn[r.edges[u]](r.digits(c, u));
          }
          out(r.digits(c, t)) += term;
        }
        normalize(out);
        rn_to_vn[r.edges[t]] = std::move(out);
        if (counts != nullptr) {
          counts->exponential += combos;
          counts->multiplication += static_cast<std::int64_t>(d + 3) * combos;
          counts->addition += static_cast<std::int64_t>(2 * d + 2) * combos;
        }
      }
    }
    for (int j = 0; j < p.J; ++j) {
      for (int e : tables.user_edges_[j]) {
        Eigen::VectorXd msg = Eigen::VectorXd::Constant(p.M, prior);
        for (int other : tables.user_edges_[j]) {
          if (other != e) msg.array() *= rn_to_vn[other].array();
        }
        normalize(msg);
        vn_to_rn[e] = std::move(msg);
      }
    }
  }

  DecoderState state;
  state.edges = tables.edges_;
  state.iterations = n_iters;
  state.rn_to_vn.resize(n_edges);
  state.vn_to_rn.resize(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    state.rn_to_vn[e] = rn_to_vn[e].array().log().matrix();
    state.vn_to_rn[e] = vn_to_rn[e].array().log().matrix();
  }
  state.beliefs.resize(p.J, p.M);
  for (int j = 0; j < p.J; ++j) {
    Eigen::VectorXd belief = Eigen::VectorXd::Constant(p.M, prior);
    for (int e : tables.user_edges_[j]) belief.array() *= rn_to_vn[e].array();
    const double total = belief.sum();
    if (!(total > 0.0)) throw UnderflowError("all beliefs of a user vanished");
    state.beliefs.row(j) = (belief / total).array().log().matrix().transpose();
  }
  finish_state(state, set, tables.bit_masks_, true);
  return state;
}

JointDecision joint_map_bruteforce(const Eigen::VectorXd& y, const CodebookSet& set,
                                   std::int64_t max_points) {
  const SystemParams& p = set.params();
  if (y.size() != p.K) throw DimensionError("received vector must have length K");
  const SuperConstellation sc = enumerate_superimposed(set, max_points);
  JointDecision best;
  best.log_likelihood = kNegInf;
  best.runner_up = kNegInf;
  for (int i = 0; i < sc.size(); ++i) {
    double ll = 0.0;
    for (int k = 0; k < p.K; ++k) {
      const double nu = sc.covariances(i, k);
      const double r = y(k) - sc.points(i, k);
      ll += -(r * r) / (2.0 * nu) - 0.5 * std::log(2.0 * std::numbers::pi * nu);
    }
    if (ll > best.log_likelihood) {
      best.runner_up = best.log_likelihood;
      best.log_likelihood = ll;
      best.index = i;
    } else if (ll > best.runner_up) {
      best.runner_up = ll;
    }
  }
  const int b = p.bits_per_symbol();
  best.label = sc.labels[best.index];
  best.symbols.resize(p.J);
  best.hard_bits.resize(p.J, b);
  for (int j = 0; j < p.J; ++j) {
    best.symbols[j] = sc.index_tuples(best.index, j);
    for (int kappa = 0; kappa < b; ++kappa) {
      best.hard_bits(j, kappa) = sc.bit(static_cast<int>(best.index), j * b + kappa);
    }
  }
  return best;
}

}  // namespace scma
