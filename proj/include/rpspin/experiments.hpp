#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rpspin/coherence.hpp"
#include "rpspin/config.hpp"
#include "rpspin/csv.hpp"
#include "rpspin/dynamics.hpp"
#include "rpspin/montecarlo.hpp"

namespace rpspin {

/// Objects every run of a config needs: the spin system, projectors,
/// Hamiltonian, initial density and the coherence normalization.
struct ExperimentSetup {
  SpinSystem system;
  Projectors proj;
  Matrix hamiltonian;
  Matrix rho0;
  CoherenceContext ctx;

  static ExperimentSetup from(const ExperimentConfig& config);
};

std::vector<EvolutionResult> run_master_equations(const ExperimentConfig& config,
                                                  const ExperimentSetup& setup);
EnsembleResult run_montecarlo(const ExperimentConfig& config, const ExperimentSetup& setup);

/// Columns t, trace, qs, qs_norm, pcoh, C, n_S, n_T, Gamma_c, kappa, gamma_c.
CsvTable evolution_table(const EvolutionResult& result);
/// Columns t, survival, survival_se, qs, qs_se, qs_norm, stderr.
CsvTable ensemble_table(const EnsembleResult& result);
/// Columns t, qs, event (EventKind index of the step leaving t; -1 on the last row).
CsvTable trajectory_table(const TrajectoryRecord& record);

/// Master-equation <Q_S>/Tr versus the Monte-Carlo ensemble on a common grid.
struct Comparison {
  TheoryKind theory = TheoryKind::Retrodictive;
  double z_threshold = 3.0;
  std::size_t points = 0;    // grid points with a defined MC standard error
  std::size_t skipped = 0;   // points with fewer than two survivors
  std::size_t within = 0;    // points with |dev| <= z_threshold * se
  double max_abs_dev = 0.0;
  double rms_dev = 0.0;
  double max_abs_z = 0.0;    // over points with se > 0
  double mean_signed_dev = 0.0;
  /// Mean of (master - MC) over points whose p_coh is at or below / above the
  /// median p_coh of the compared points.
  double mean_signed_dev_low_pcoh = 0.0;
  double mean_signed_dev_high_pcoh = 0.0;
  std::vector<double> z;  // per grid point, NaN where undefined

  double fraction_within() const {
    return points == 0 ? 0.0 : static_cast<double>(within) / static_cast<double>(points);
  }
};

/// Compares qs_norm. `pcoh` supplies the coherence series used to split the
/// signed deviation into low and high coherence halves.
Comparison compare(const EvolutionResult& master, const EnsembleResult& mc,
                   const std::vector<double>& pcoh, double z_threshold = 3.0);

std::string format_comparison(const Comparison& c);

/// Per-theory gamma_c summary along a propagated evolution.
struct RateSummary {
  TheoryKind theory;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double gamma_mean = 0.0;
  double kappa_mean = 0.0;
  double max_block_residual = 0.0;  // coherent_block_rhs_check over the grid
};

/// Propagates `theory` over the config grid and summarizes gamma_c, kappa and
/// the coherent-block residual at every grid point.
RateSummary summarize_rates(TheoryKind theory, const ExperimentConfig& config,
                            const ExperimentSetup& setup, EvolutionResult* evolution = nullptr);

}  // namespace rpspin
