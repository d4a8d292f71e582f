#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rpspin/dynamics.hpp"
#include "rpspin/linalg.hpp"
#include "rpspin/rng.hpp"
#include "rpspin/spin_core.hpp"

namespace rpspin {

/// What happened to one trajectory during one time step. The order is also
/// the order of the sub-intervals the uniform draw is compared against.
enum class EventKind : std::uint8_t { RecombineS, RecombineT, JumpS, JumpT, Unitary };

inline constexpr std::size_t kEventKindCount = 5;

std::string_view event_name(EventKind kind);

enum class Channel : std::uint8_t { Singlet, Triplet };

struct Recombination {
  double time = 0.0;
  Channel channel = Channel::Singlet;
};

/// A single radical pair. `psi` has unit norm while alive; after recombination
/// it is frozen.
struct TrajectoryState {
  Vector psi;
  bool alive = true;
  std::optional<Recombination> recombination;

  Vector scratch;  // workspace, contents meaningless between steps
};

/// Everything a step needs that does not change during a run.
struct TrajectoryModel {
  Matrix propagator;  // exp(-i H dt)
  Matrix singlet;     // Q_S
  RateParams rates;
  double dt = 0.0;
  bool recombination = true;

  static TrajectoryModel make(const Matrix& hamiltonian, const RateParams& rates, double dt,
                              const Projectors& proj, bool recombination = true);
};

/// Widths of the sub-intervals of [0, 1), evaluated at the current state.
struct EventProbabilities {
  double recombine_s = 0.0;  // k_S dt <Q_S>
  double recombine_t = 0.0;  // k_T dt <Q_T>
  double jump_s = 0.0;       // (k_S + k_T) dt / 2 <Q_S>
  double jump_t = 0.0;       // (k_S + k_T) dt / 2 <Q_T>

  double total() const { return recombine_s + recombine_t + jump_s + jump_t; }
};

/// <psi|Q_S|psi> for a unit-norm psi.
double singlet_probability(const Vector& psi, const TrajectoryModel& model, Vector& scratch);

EventProbabilities event_probabilities(double singlet_probability, const TrajectoryModel& model);

/// Advances a live trajectory by one dt using the uniform draw r in [0, 1).
/// [0, 1) is split in the fixed order
/// [recombine-S | recombine-T | jump-S | jump-T | unitary].
/// `time` is the time at the start of the step; a recombination is recorded
/// at time + dt.
EventKind step_trajectory(TrajectoryState& state, const TrajectoryModel& model, double r,
                          double time);

inline EventKind step_trajectory(TrajectoryState& state, const TrajectoryModel& model,
                                 StreamRng& rng, double time) {
  return step_trajectory(state, model, rng.uniform(), time);
}

enum class InitialStatePolicy {
  /// Contiguous equal blocks of trajectories start in |S> (x) |n> for each
  /// nuclear basis state n; with one spin-1/2 nucleus the first half starts
  /// in |S, up> and the second half in |S, down>.
  HalfSplit,
  /// Each trajectory draws its nuclear basis state uniformly from its own stream.
  UniformNuclearBasis,
};

struct EnsembleConfig {
  std::size_t n_trajectories = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  InitialStatePolicy initial_state_policy = InitialStatePolicy::HalfSplit;
  bool recombination = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Throws DomainError naming the offending field.
void validate(const EnsembleConfig& config, const RateParams& rates);

/// Initial pure state of trajectory `index`; consumes from `rng` only under
/// UniformNuclearBasis.
Vector initial_trajectory_state(const EnsembleConfig& config, const SpinSystem& system,
                                std::size_t index, StreamRng& rng);

struct TrajectoryRecord {
  std::size_t index = 0;
  std::vector<double> t;
  std::vector<double> qs;         // <psi|Q_S|psi>, recorded while alive
  std::vector<EventKind> events;  // events[k] took the state from t[k] to t[k] + dt
  std::optional<Recombination> recombination;
};

/// Replays trajectory `index` exactly as run_ensemble runs it.
TrajectoryRecord run_trajectory(const EnsembleConfig& config, const Matrix& hamiltonian,
                                const RateParams& rates, const SpinSystem& system,
                                std::size_t index);

/// Ensemble averages over N0 trajectories at t_k = k dt. rho_MC(t) is
/// (1/N0) sum over live trajectories of |psi><psi|.
struct EnsembleResult {
  std::size_t n_trajectories = 0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<std::uint64_t> alive;
  std::vector<double> survival;  // Tr{rho_MC}
  std::vector<double> survival_se;
  std::vector<double> qs;  // Tr{rho_MC Q_S}
  std::vector<double> qs_se;
  std::vector<double> qs_norm;     // Tr{rho_MC Q_S} / Tr{rho_MC}; NaN once nothing survives
  std::vector<double> qs_norm_se;  // NaN with fewer than two survivors
  std::array<std::uint64_t, kEventKindCount> event_counts{};

  std::uint64_t count(EventKind kind) const {
    return event_counts[static_cast<std::size_t>(kind)];
  }
  std::size_t size() const { return t.size(); }
};

/// Trajectories are processed in fixed blocks of kReductionBlock indices and
/// merged in index order, so the result is bit-identical for any thread count.
inline constexpr std::size_t kReductionBlock = 256;

EnsembleResult run_ensemble(const EnsembleConfig& config, const Matrix& hamiltonian,
                            const RateParams& rates, const SpinSystem& system);

}  // namespace rpspin
