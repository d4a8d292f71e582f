#include "rpspin/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rpspin/errors.hpp"
#include "rpspin/propagator.hpp"

namespace rpspin {

namespace {

constexpr double kMinJumpWeight = 1e-14;

void project_and_normalize(TrajectoryState& state, const Matrix& projector, std::string_view what) {
  state.scratch.noalias() = projector * state.psi;
  const double weight = state.scratch.squaredNorm();
  if (weight < kMinJumpWeight) {
    std::ostringstream os;
    os << "impossible " << what << " jump: subspace weight " << weight;
    throw ImpossibleJumpError(os.str());
  }
  state.psi = state.scratch / std::sqrt(weight);
}

// Per-block running statistics of <Q_S> over live trajectories, one slot per
// grid point (Welford within a block, Chan et al. pairwise merge across blocks).
struct BlockSums {
  std::vector<std::uint64_t> alive;
  std::vector<double> mean;
  std::vector<double> m2;
  std::array<std::uint64_t, kEventKindCount> events{};

  explicit BlockSums(std::size_t points) : alive(points, 0), mean(points, 0.0), m2(points, 0.0) {}

  void add(std::size_t k, double q) {
    const double n = static_cast<double>(++alive[k]);
    const double delta = q - mean[k];
    mean[k] += delta / n;
    m2[k] += delta * (q - mean[k]);
  }

  void merge(const BlockSums& other) {
    for (std::size_t k = 0; k < alive.size(); ++k) {
      if (other.alive[k] == 0) continue;
      const double na = static_cast<double>(alive[k]);
      const double nb = static_cast<double>(other.alive[k]);
      const double n = na + nb;
      const double delta = other.mean[k] - mean[k];
      mean[k] += delta * nb / n;
      m2[k] += other.m2[k] + delta * delta * na * nb / n;
      alive[k] += other.alive[k];
    }
    for (std::size_t e = 0; e < kEventKindCount; ++e) events[e] += other.events[e];
  }
};

void run_block(std::size_t block, const EnsembleConfig& config, const TrajectoryModel& model,
               const SpinSystem& system, BlockSums& sums) {
  const std::size_t first = block * kReductionBlock;
  const std::size_t last = std::min(config.n_trajectories, first + kReductionBlock);
  TrajectoryState state;
  for (std::size_t i = first; i < last; ++i) {
    StreamRng rng(config.seed, i);
    state.psi = initial_trajectory_state(config, system, i, rng);
    state.alive = true;
    state.recombination.reset();
    state.scratch.resize(state.psi.size());
    for (std::size_t k = 0;; ++k) {
      const double q = singlet_probability(state.psi, model, state.scratch);
      sums.add(k, q);
      if (k == config.steps) break;
      const EventKind e = step_trajectory(state, model, rng, static_cast<double>(k) * config.dt);
      ++sums.events[static_cast<std::size_t>(e)];
      if (!state.alive) break;
    }
  }
}

}  // namespace

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::RecombineS:
      return "RecombineS";
    case EventKind::RecombineT:
      return "RecombineT";
    case EventKind::JumpS:
      return "JumpS";
    case EventKind::JumpT:
      return "JumpT";
    case EventKind::Unitary:
      return "Unitary";
  }
  return "?";
}

TrajectoryModel TrajectoryModel::make(const Matrix& hamiltonian, const RateParams& rates,
                                      double dt, const Projectors& proj, bool recombination) {
  if (hamiltonian.rows() != proj.dimension) {
    throw DomainError("Hamiltonian does not match the spin system");
  }
  return {unitary_propagator(hamiltonian, dt), proj.singlet, rates, dt, recombination};
}

double singlet_probability(const Vector& psi, const TrajectoryModel& model, Vector& scratch) {
  scratch.noalias() = model.singlet * psi;
  return scratch.squaredNorm();
}

EventProbabilities event_probabilities(double singlet_probability, const TrajectoryModel& model) {
  const double qs = std::clamp(singlet_probability, 0.0, 1.0);
  const double qt = 1.0 - qs;
  EventProbabilities p;
  if (model.recombination) {
    p.recombine_s = model.rates.k_s * model.dt * qs;
    p.recombine_t = model.rates.k_t * model.dt * qt;
  }
  const double measure = 0.5 * model.rates.total() * model.dt;
  p.jump_s = measure * qs;
  p.jump_t = measure * qt;
  return p;
}

EventKind step_trajectory(TrajectoryState& state, const TrajectoryModel& model, double r,
                          double time) {
  if (!state.alive) throw DomainError("cannot step a recombined trajectory");
  if (state.scratch.size() != state.psi.size()) state.scratch.resize(state.psi.size());
  const double qs = singlet_probability(state.psi, model, state.scratch);
  const EventProbabilities p = event_probabilities(qs, model);

  double edge = p.recombine_s;
  if (r < edge) {
    state.alive = false;
    state.recombination = Recombination{time + model.dt, Channel::Singlet};
    return EventKind::RecombineS;
  }
  edge += p.recombine_t;
  if (r < edge) {
    state.alive = false;
    state.recombination = Recombination{time + model.dt, Channel::Triplet};
    return EventKind::RecombineT;
  }
  edge += p.jump_s;
  if (r < edge) {
    project_and_normalize(state, model.singlet, "singlet");
    return EventKind::JumpS;
  }
  edge += p.jump_t;
  if (r < edge) {
    // Q_T psi = psi - Q_S psi
    state.scratch.noalias() = model.singlet * state.psi;
    state.scratch = state.psi - state.scratch;
    const double weight = state.scratch.squaredNorm();
    if (weight < kMinJumpWeight) {
      std::ostringstream os;
      os << "impossible triplet jump: subspace weight " << weight;
      throw ImpossibleJumpError(os.str());
    }
    state.psi = state.scratch / std::sqrt(weight);
    return EventKind::JumpT;
  }
  state.scratch.noalias() = model.propagator * state.psi;
  state.psi.swap(state.scratch);
  state.psi /= state.psi.norm();
  return EventKind::Unitary;
}

void validate(const EnsembleConfig& config, const RateParams& rates) {
  if (config.n_trajectories == 0) throw DomainError("montecarlo.n_trajectories must be positive");
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    throw DomainError("grid.dt must be positive and finite");
  }
  if (config.steps == 0) throw DomainError("grid.steps must be positive");
  if (!(rates.k_s >= 0.0) || !(rates.k_t >= 0.0)) {
    throw DomainError("rates must be non-negative");
  }
  if (!(config.dt * rates.total() * 1.5 < 1.0)) {
    throw DomainError("grid.dt too large: event probabilities do not fit in [0, 1)");
  }
  if (config.steps >= std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("grid.steps too large");
  }
}

Vector initial_trajectory_state(const EnsembleConfig& config, const SpinSystem& system,
                                std::size_t index, StreamRng& rng) {
  const auto nd = static_cast<std::size_t>(system.nuclear_dimension());
  std::size_t nuclear = 0;
  switch (config.initial_state_policy) {
    case InitialStatePolicy::HalfSplit:
      nuclear = index * nd / std::max<std::size_t>(config.n_trajectories, 1);
      break;
    case InitialStatePolicy::UniformNuclearBasis:
      nuclear = static_cast<std::size_t>(rng.below(nd));
      break;
  }
  return product_state(system, singlet_electron_state(), static_cast<int>(nuclear));
}

TrajectoryRecord run_trajectory(const EnsembleConfig& config, const Matrix& hamiltonian,
                                const RateParams& rates, const SpinSystem& system,
                                std::size_t index) {
  validate(config, rates);
  if (index >= config.n_trajectories) throw DomainError("trajectory index out of range");
  const Projectors proj = Projectors::of(system);
  const TrajectoryModel model =
      TrajectoryModel::make(hamiltonian, rates, config.dt, proj, config.recombination);

  TrajectoryRecord rec;
  rec.index = index;
  StreamRng rng(config.seed, index);
  TrajectoryState state;
  state.psi = initial_trajectory_state(config, system, index, rng);
  state.scratch.resize(state.psi.size());
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    rec.t.push_back(t);
    rec.qs.push_back(singlet_probability(state.psi, model, state.scratch));
    if (k == config.steps) break;
    rec.events.push_back(step_trajectory(state, model, rng, t));
    if (!state.alive) break;
  }
  rec.recombination = state.recombination;
  return rec;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, const Matrix& hamiltonian,
                            const RateParams& rates, const SpinSystem& system) {
  validate(config, rates);
  const Projectors proj = Projectors::of(system);
  const TrajectoryModel model =
      TrajectoryModel::make(hamiltonian, rates, config.dt, proj, config.recombination);

  const std::size_t points = config.steps + 1;
  const std::size_t blocks = (config.n_trajectories + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::optional<BlockSums>> results(blocks);

  unsigned workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, blocks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t b = next++; b < blocks && !failed; b = next++) {
      try {
        BlockSums sums(points);
        run_block(b, config, model, system, sums);
        results[b].emplace(std::move(sums));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  // Reduce in block order.
  BlockSums total(points);
  for (const auto& r : results) total.merge(*r);

  const double n0 = static_cast<double>(config.n_trajectories);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EnsembleResult out;
  out.n_trajectories = config.n_trajectories;
  out.dt = config.dt;
  out.alive = total.alive;
  out.event_counts = total.events;
  for (std::size_t k = 0; k < points; ++k) {
    const double n = static_cast<double>(total.alive[k]);
    const double s = n / n0;
    out.t.push_back(static_cast<double>(k) * config.dt);
    out.survival.push_back(s);
    out.survival_se.push_back(n0 > 1 ? std::sqrt(s * (1.0 - s) / n0) : nan);

    // Over all N0 trajectories with dead ones contributing zero: pool the
    // live group (n, mean, m2) with n0 - n zeros.
    const double mean_all = n * total.mean[k] / n0;
    const double m2_all = total.m2[k] + n * (n0 - n) / n0 * total.mean[k] * total.mean[k];
    out.qs.push_back(mean_all);
    out.qs_se.push_back(n0 > 1 ? std::sqrt(m2_all / (n0 - 1.0) / n0) : nan);

    if (total.alive[k] == 0) {
      out.qs_norm.push_back(nan);
      out.qs_norm_se.push_back(nan);
      continue;
    }
    out.qs_norm.push_back(total.mean[k]);
    out.qs_norm_se.push_back(total.alive[k] < 2 ? nan
                                                : std::sqrt(total.m2[k] / (n - 1.0) / n));
  }
  return out;
}

}  // namespace rpspin
