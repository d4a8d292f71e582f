#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "rpspin/coherence.hpp"
#include "rpspin/linalg.hpp"
#include "rpspin/spin_core.hpp"

namespace rpspin {

/// Singlet and triplet recombination rates, in units of A.
struct RateParams {
  double k_s = 0.0;
  double k_t = 0.0;

  double total() const { return k_s + k_t; }
};

enum class TheoryKind { LindbladOnly, Retrodictive, Traditional, JonesHore };

std::string_view theory_name(TheoryKind theory);
std::optional<TheoryKind> parse_theory(std::string_view name);

/// Largest allowed dt (k_S + k_T) for fixed-step integration.
inline constexpr double kStabilityLimit = 0.1;
/// propagate aborts if the smallest eigenvalue of rho drops below this.
inline constexpr double kPositivityTolerance = 1e-6;

/// Trace-preserving S-T dephasing only:
/// -i[H, rho] - ((k_S + k_T) / 2)(Q_S rho + rho Q_S - 2 Q_S rho Q_S)
Matrix rhs_lindblad_only(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                         const Projectors& proj);

/// Retrodictive master equation in block form,
///   -i[H, rho] - ((k_S + k_T) / 2) rho_c - (1 - p)(k_S rho_SS + k_T rho_TT)
///   - (k_S Tr{rho_SS} + k_T Tr{rho_TT}) / Tr{rho} * (p rho_SS + p rho_TT + rho_c)
/// with p = pcoh_new(rho) and rho_c = rho_ST + rho_TS. The last bracket is
/// p * rho_coh written without the division by p.
Matrix rhs_retrodictive(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                        const CoherenceContext& ctx, const Projectors& proj);

/// Retrodictive equation with the retrodicted coherent weight fixed by the
/// caller instead of taken from p_coh(rho). The coherent preparation is
/// weight * rho_coh(rho, p_coh(rho)); weight = 0 removes it entirely, which
/// recovers the traditional equation. weight = p_coh(rho) reproduces
/// rhs_retrodictive. Throws SingularDecompositionError when weight > 0 and
/// p_coh(rho) is below kPcohEpsilon.
Matrix rhs_retrodictive_weighted(const Matrix& rho, const Matrix& hamiltonian,
                                 const RateParams& rates, double weight,
                                 const CoherenceContext& ctx, const Projectors& proj);

/// Haberkorn form: -i[H, rho] - k_S {Q_S, rho} / 2 - k_T {Q_T, rho} / 2
Matrix rhs_traditional(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                       const Projectors& proj);

/// -i[H, rho] - k_S (Q_S rho + rho Q_S - Q_S rho Q_S) - k_T (Q_T rho + rho Q_T - Q_T rho Q_T)
Matrix rhs_jones_hore(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                      const Projectors& proj);

/// Dispatches to the rhs of `theory`. ctx is only read by Retrodictive.
Matrix master_rhs(TheoryKind theory, const Matrix& rho, const Matrix& hamiltonian,
                  const RateParams& rates, const CoherenceContext& ctx, const Projectors& proj);

/// Decay rate of rho_c (Gamma_c), of Tr{rho} (kappa), and of rho_c / Tr{rho}
/// (gamma_c = Gamma_c - kappa).
struct DecayRates {
  double gamma_big = 0.0;  // Gamma_c
  double kappa = 0.0;
  double gamma = 0.0;  // gamma_c
};

DecayRates coherence_decay_rates(TheoryKind theory, const Matrix& rho, const RateParams& rates,
                                 const Projectors& proj);

/// max |(Q_S f Q_T + Q_T f Q_S) - (-i[H, rho]_c - Gamma_c rho_c)| where f is
/// the theory's rhs. Zero up to rounding when the coherent block obeys a
/// closed linear decay law.
double coherent_block_rhs_check(TheoryKind theory, const Matrix& rho, const Matrix& hamiltonian,
                                const RateParams& rates, const CoherenceContext& ctx,
                                const Projectors& proj);

/// Time series produced by propagate; entry k refers to t = k dt.
struct EvolutionResult {
  TheoryKind theory = TheoryKind::LindbladOnly;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> trace;
  std::vector<double> qs;       // Tr{rho Q_S}
  std::vector<double> qs_norm;  // Tr{rho Q_S} / Tr{rho}
  std::vector<double> pcoh;
  std::vector<double> coherence;  // C(rho)
  std::vector<double> n_s;
  std::vector<double> n_t;
  std::vector<double> gamma_big;
  std::vector<double> kappa;
  std::vector<double> gamma;

  Matrix final_rho;
  double min_eigenvalue = 0.0;  // over all recorded steps
  std::size_t pcoh_clamp_count = 0;

  std::size_t size() const { return t.size(); }
};

/// Called with (k, rho(t_k)) at every grid point.
using StepObserver = std::function<void(std::size_t, const Matrix&)>;

/// Fixed-step classical RK4 over the chosen rhs. For recombining theories the yields obey
/// dn_S/dt = k_S Tr{rho Q_S}, dn_T/dt = k_T Tr{rho Q_T} and are integrated
/// with the same stages as rho; LindbladOnly keeps them at zero. rho is
/// re-symmetrized after every step.
EvolutionResult propagate(TheoryKind theory, const Matrix& rho0, const Matrix& hamiltonian,
                          const RateParams& rates, double dt, std::size_t steps,
                          const CoherenceContext& ctx, const Projectors& proj,
                          const StepObserver& observer = {});

}  // namespace rpspin
