#pragma once

#include "rpspin/linalg.hpp"
#include "rpspin/spin_core.hpp"

namespace rpspin {

/// rho_xy = Q_x rho Q_y.
struct Partition {
  Matrix ss;
  Matrix tt;
  Matrix st;
  Matrix ts;

  Matrix incoherent() const { return ss + tt; }
  Matrix coherent() const { return st + ts; }
};

/// Guard below which p_coh counts as zero when distilling rho_coh.
inline constexpr double kPcohEpsilon = 1e-12;
/// Radicands of C(rho) down to -kRadicandTolerance are clamped to zero.
inline constexpr double kRadicandTolerance = 1e-14;

/// Normalization of the S-T coherence measure: the largest C reached by the
/// unitary reference evolution of one experiment.
struct CoherenceContext {
  double c_max = 0.0;
  double epsilon_cmax = 1e-12;
};

Partition partition(const Matrix& rho, const Projectors& proj);

/// C(rho) = sum_j sqrt(Tr{rho_ST P_Tj rho_TS}).
double coherence_C(const Matrix& rho, const Projectors& proj);

/// The earlier measure Tr{rho_ST rho_TS} / (Tr{rho_SS} Tr{rho_TT}). Scales
/// quadratically with the off-diagonal blocks; kept for comparison only.
double pcoh_old(const Matrix& rho, const Projectors& proj);

/// Evolves rho0 under -i[H, rho] on the grid t_k = k dt, k = 0..round(t_end/dt),
/// and records the maximum of C along the way.
CoherenceContext max_unitary_coherence(const Matrix& hamiltonian, const Matrix& rho0, double t_end,
                                       double dt, const Projectors& proj);

/// C(rho) / (Tr{rho} c_max) before clamping.
double pcoh_new_unclamped(const Matrix& rho, const CoherenceContext& ctx, const Projectors& proj);

/// Normalized S-T coherence in [0, 1]; 0 when c_max is below ctx.epsilon_cmax.
double pcoh_new(const Matrix& rho, const CoherenceContext& ctx, const Projectors& proj);

/// S-T coherence distillation: rho_SS + rho_TT + (rho_ST + rho_TS) / p.
Matrix rho_coh(const Matrix& rho, double p, const Projectors& proj);

/// rho_SS + rho_TT
Matrix rho_incoh(const Matrix& rho, const Projectors& proj);

/// Kraus channel {sqrt(1-lambda) Q_S, sqrt(1-lambda) Q_T, sqrt(lambda) 1}: keeps
/// the diagonal blocks and multiplies rho_ST, rho_TS by lambda.
Matrix kraus_dephase(const Matrix& rho, double lambda, const Projectors& proj);

}  // namespace rpspin
