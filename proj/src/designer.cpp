#include "scma/designer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace scma {

std::vector<double> DesignConfig::default_beta_schedule(double beta_max, double beta_min) {
  std::vector<double> schedule;
  for (double beta = beta_min; beta <= beta_max + 1e-12; beta += 1.0) schedule.push_back(beta);
  return schedule;
}

void DesignConfig::validate() const {
  if (beta_schedule.empty()) throw ConfigError("beta schedule is empty");
  for (std::size_t i = 0; i < beta_schedule.size(); ++i) {
    if (!(beta_schedule[i] > 0.0)) throw ConfigError("beta values must be > 0");
    if (i > 0 && !(beta_schedule[i] > beta_schedule[i - 1])) {
      throw ConfigError("beta schedule must be strictly increasing");
    }
  }
  if (starts < 1) throw ConfigError("need at least one start");
  if (!(inner_tol > 0.0)) throw ConfigError("inner tolerance must be > 0");
  if (max_inner_iters < 1) throw ConfigError("max_inner_iters must be >= 1");
  if (!(epsilon_floor >= 0.0)) throw ConfigError("epsilon floor must be >= 0");
}

namespace {

// Projection of one user block z onto {x >= eps, ||x||^2 <= radius2}:
// x = max(eps, t z) with the largest t in (0, 1] meeting the power bound.
void project_block(Eigen::Ref<Eigen::VectorXd> z, double eps, double radius2) {
  z = z.cwiseMax(eps);
  if (z.squaredNorm() <= radius2) return;
  const Eigen::Index n = z.size();
  if (static_cast<double>(n) * eps * eps > radius2 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "power budget cannot accommodate the intensity floor " << eps;
    throw ConvergenceError(os.str());
  }
  // Grow the clamped set until the scale factor is consistent with it.
  std::vector<bool> clamped(n);
  for (Eigen::Index i = 0; i < n; ++i) clamped[i] = z(i) <= eps;
  double t = 1.0;
  for (;;) {
    double free_norm2 = 0.0;
    Eigen::Index n_clamped = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (clamped[i]) {
        ++n_clamped;
      } else {
        free_norm2 += z(i) * z(i);
      }
    }
    const double room = radius2 - static_cast<double>(n_clamped) * eps * eps;
    t = free_norm2 > 0.0 ? std::sqrt(std::max(room, 0.0) / free_norm2) : 0.0;
    bool grew = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!clamped[i] && t * z(i) < eps) {
        clamped[i] = true;
        grew = true;
      }
    }
    if (!grew) break;
  }
  for (Eigen::Index i = 0; i < n; ++i) z(i) = clamped[i] ? eps : std::max(eps, t * z(i));
  // Guard against the last ulp of rounding pushing the block over budget.
  const double norm2 = z.squaredNorm();
  if (norm2 > radius2) {
    const double shrink = std::sqrt(radius2 / norm2);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = std::max(eps, z(i) * shrink);
  }
}

// Codewords of one user that coincide exactly (typically both clamped to the
// floor corner) sit on a saddle of the objective: the distance between them
// is quadratic in their separation, so its gradient vanishes and projected
// descent never pulls them apart. Nudge the later copy off the tie.
bool split_ties(Eigen::VectorXd& L, const SystemParams& params, double step) {
  const Eigen::Index N = params.N;
  bool changed = false;
  for (int u = 0; u < params.J; ++u) {
    for (int m = 1; m < params.M; ++m) {
      for (int q = 0; q < m; ++q) {
        auto a = L.segment((static_cast<Eigen::Index>(u) * params.M + m) * N, N);
        const auto b = L.segment((static_cast<Eigen::Index>(u) * params.M + q) * N, N);
        if ((a - b).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) continue;
        a((m + q) % N) += step;
        changed = true;
      }
    }
  }
  return changed;
}

}  // namespace

Eigen::VectorXd project_feasible(const Eigen::VectorXd& L, const SystemParams& params,
                                 double epsilon_floor) {
  const Eigen::Index block = static_cast<Eigen::Index>(params.N) * params.M;
  if (L.size() != block * params.J) throw DimensionError("stacked vector length must be N*M*J");
  Eigen::VectorXd out = L;
  const double radius2 = params.M * params.Pe;
  for (int u = 0; u < params.J; ++u) project_block(out.segment(u * block, block), epsilon_floor, radius2);
  return out;
}

StackedVector project_feasible(const StackedVector& L, const SystemParams& params,
                               double epsilon_floor) {
  return {L.layout, project_feasible(L.values, params, epsilon_floor)};
}

bool is_feasible(const Eigen::VectorXd& L, const SystemParams& params, double epsilon_floor,
                 double tolerance) {
  const Eigen::Index block = static_cast<Eigen::Index>(params.N) * params.M;
  if (L.size() != block * params.J) return false;
  if (L.size() > 0 && L.minCoeff() < epsilon_floor - tolerance) return false;
  for (int u = 0; u < params.J; ++u) {
    if (L.segment(u * block, block).squaredNorm() / params.M > params.Pe + tolerance) return false;
  }
  return true;
}

std::shared_ptr<const StackedLayout> default_layout(const SystemParams& params) {
  params.validate();
  FactorGraph graph = build_factor_graph(params.K, params.J, params.N);
  std::vector<Codebook> books(params.J, Codebook{Eigen::MatrixXd::Zero(params.N, params.M), 0});
  return std::make_shared<const StackedLayout>(CodebookSet(params, std::move(graph), std::move(books)));
}

StackedVector random_init(std::shared_ptr<const StackedLayout> layout, std::uint64_t seed,
                          double epsilon_floor) {
  const SystemParams& params = layout->prototype().params();
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> uniform(epsilon_floor,
                                                 std::max(epsilon_floor, std::sqrt(params.Pe)));
  Eigen::VectorXd values(layout->size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = uniform(engine);
  return {std::move(layout), project_feasible(values, params, epsilon_floor)};
}

StackedVector random_init(const SystemParams& params, std::uint64_t seed, double epsilon_floor) {
  return random_init(default_layout(params), seed, epsilon_floor);
}

InnerResult inner_solve(const StackedVector& L0, double beta, const SystemParams& params,
                        const DesignConfig& config) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;
  const StackedLayout& layout = *L0.layout;
  const double varsigma2 = params.varsigma2;

  InnerResult result;
  Eigen::VectorXd x = project_feasible(L0.values, params, config.epsilon_floor);
  Eigen::MatrixXd points = layout.superimpose(x);
  SoftMinStats stats = softmin_stats(points, beta, varsigma2);
  Eigen::VectorXd grad = layout.pullback(softmin_point_gradient(points, beta, varsigma2, stats));
  double f = stats.value;
  result.trace.push_back(f);

  const double grad_inf = grad.size() > 0 ? grad.lpNorm<Eigen::Infinity>() : 0.0;
  double step = grad_inf > 0.0 ? 0.1 * std::sqrt(params.Pe) / grad_inf : 1.0;

  for (int it = 1; it <= config.max_inner_iters; ++it) {
    bool accepted = false;
    Eigen::VectorXd x_new;
    SoftMinStats trial;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      x_new = project_feasible(x - step * grad, params, config.epsilon_floor);
      const Eigen::VectorXd dx = x_new - x;
      if (dx.squaredNorm() == 0.0) break;  // projected-stationary
      points = layout.superimpose(x_new);
      trial = softmin_stats(points, beta, varsigma2);
      if (trial.value <= f + kArmijo * grad.dot(dx)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    const Eigen::VectorXd grad_new =
        layout.pullback(softmin_point_gradient(points, beta, varsigma2, trial));
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;
    step = std::clamp(step, 1e-12, 1e12);

    const double change = f - trial.value;
    x = std::move(x_new);
    grad = grad_new;
    f = trial.value;
    result.trace.push_back(f);
    result.iterations = it;
    if (std::abs(change) < config.inner_tol) {
      result.converged = true;
      break;
    }
  }
  result.value = f;
  result.L = {L0.layout, std::move(x)};
  return result;
}

DesignResult design(const SystemParams& params, const DesignConfig& config) {
  params.validate();
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  auto layout = default_layout(params);

  std::vector<TraceEntry> trace;
  std::vector<double> finals;
  std::vector<StackedVector> solutions;
  for (int s = 0; s < config.starts; ++s) {
    StackedVector L = random_init(layout, config.seed + static_cast<std::uint64_t>(s),
                                  config.epsilon_floor);
    double value = 0.0;
    for (double beta : config.beta_schedule) {
      if (split_ties(L.values, params, 1e-2 * std::sqrt(params.Pe))) {
        L.values = project_feasible(L.values, params, config.epsilon_floor);
      }
      InnerResult r = inner_solve(L, beta, params, config);
      for (std::size_t t = 0; t < r.trace.size(); ++t) {
        trace.push_back({s, beta, static_cast<int>(t), r.trace[t]});
      }
      value = r.value;
      L = std::move(r.L);
    }
    finals.push_back(value);
    solutions.push_back(std::move(L));
  }

  int best = 0;
  for (int s = 1; s < config.starts; ++s) {
    if (finals[s] < finals[best] - 1e-9) best = s;
  }

  const StackedVector& chosen = solutions[best];
  if (!is_feasible(chosen.values, params, config.epsilon_floor)) {
    throw ConvergenceError("no start produced a feasible codebook");
  }

  CodebookSet set = chosen.to_set();
  DesignResult result{std::move(set), std::move(trace), finals, best, finals[best], 0.0, {}, 0.0};
  result.final_d_min = pairwise_report(enumerate_superimposed(result.set), params.varsigma2).d_min;
  const Eigen::Index block = static_cast<Eigen::Index>(params.N) * params.M;
  for (int u = 0; u < params.J; ++u) {
    const double p = chosen.values.segment(u * block, block).squaredNorm() / params.M;
    result.active_constraints.power_tight.push_back(std::abs(p - params.Pe) <= 1e-6);
  }
  result.active_constraints.floor_tight =
      static_cast<int>((chosen.values.array() <= config.epsilon_floor + 1e-9).count());
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace scma
