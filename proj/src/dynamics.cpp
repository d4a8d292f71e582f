#include "rpspin/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpspin/errors.hpp"

namespace rpspin {

namespace {

Matrix unitary_part(const Matrix& rho, const Matrix& hamiltonian) {
  return -kI * commutator(hamiltonian, rho);
}

void check_rates(const RateParams& rates) {
  if (!(rates.k_s >= 0.0) || !(rates.k_t >= 0.0) || !std::isfinite(rates.total())) {
    throw DomainError("recombination rates must be finite and non-negative");
  }
}

struct NormalizedPopulations {
  double singlet;
  double triplet;
};

NormalizedPopulations normalized_populations(const Matrix& rho, const Projectors& proj) {
  const double tr = real_trace(rho);
  if (!(tr > 0.0)) throw DomainError("decay rates need Tr{rho} > 0");
  const double s = trace_of_product(rho, proj.singlet).real() / tr;
  const double t = trace_of_product(rho, proj.triplet).real() / tr;
  return {s, t};
}

// Shared body of the retrodictive equation. `incoherent_weight` multiplies the
// incoherent reaction term; `coherent_part` is Lambda_2 = P(coh) * rho_coh.
Matrix retrodictive_from_parts(const Matrix& rho, const Matrix& hamiltonian,
                               const RateParams& rates, const Partition& parts,
                               double incoherent_weight, const Matrix& coherent_part) {
  const double tr = real_trace(rho);
  const double loss_rate =
      (rates.k_s * real_trace(parts.ss) + rates.k_t * real_trace(parts.tt)) / tr;
  return unitary_part(rho, hamiltonian) - (0.5 * rates.total()) * parts.coherent() -
         incoherent_weight * (rates.k_s * parts.ss + rates.k_t * parts.tt) -
         loss_rate * coherent_part;
}

}  // namespace

std::string_view theory_name(TheoryKind theory) {
  switch (theory) {
    case TheoryKind::LindbladOnly:
      return "LindbladOnly";
    case TheoryKind::Retrodictive:
      return "Retrodictive";
    case TheoryKind::Traditional:
      return "Traditional";
    case TheoryKind::JonesHore:
      return "JonesHore";
  }
  return "?";
}

std::optional<TheoryKind> parse_theory(std::string_view name) {
  for (TheoryKind k : {TheoryKind::LindbladOnly, TheoryKind::Retrodictive,
                       TheoryKind::Traditional, TheoryKind::JonesHore}) {
    if (name == theory_name(k)) return k;
  }
  return std::nullopt;
}

Matrix rhs_lindblad_only(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                         const Projectors& proj) {
  const Matrix qs_rho = proj.singlet * rho;
  const Matrix rho_qs = rho * proj.singlet;
  return unitary_part(rho, hamiltonian) -
         (0.5 * rates.total()) * (qs_rho + rho_qs - 2.0 * qs_rho * proj.singlet);
}

Matrix rhs_retrodictive(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                        const CoherenceContext& ctx, const Projectors& proj) {
  const double p = pcoh_new(rho, ctx, proj);
  const Partition parts = partition(rho, proj);
  const Matrix coherent_part = p * parts.incoherent() + parts.coherent();
  return retrodictive_from_parts(rho, hamiltonian, rates, parts, 1.0 - p, coherent_part);
}

Matrix rhs_retrodictive_weighted(const Matrix& rho, const Matrix& hamiltonian,
                                 const RateParams& rates, double weight,
                                 const CoherenceContext& ctx, const Projectors& proj) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw DomainError("retrodicted coherent weight must lie in [0, 1]");
  }
  const Partition parts = partition(rho, proj);
  Matrix coherent_part = Matrix::Zero(rho.rows(), rho.cols());
  if (weight > 0.0) {
    coherent_part = weight * rho_coh(rho, pcoh_new(rho, ctx, proj), proj);
  } else if (!(real_trace(rho) > 0.0)) {
    throw DomainError("retrodictive rhs needs Tr{rho} > 0");
  }
  return retrodictive_from_parts(rho, hamiltonian, rates, parts, 1.0 - weight, coherent_part);
}

Matrix rhs_traditional(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                       const Projectors& proj) {
  return unitary_part(rho, hamiltonian) -
         (0.5 * rates.k_s) * (proj.singlet * rho + rho * proj.singlet) -
         (0.5 * rates.k_t) * (proj.triplet * rho + rho * proj.triplet);
}

Matrix rhs_jones_hore(const Matrix& rho, const Matrix& hamiltonian, const RateParams& rates,
                      const Projectors& proj) {
  const Matrix qs_rho = proj.singlet * rho;
  const Matrix qt_rho = proj.triplet * rho;
  return unitary_part(rho, hamiltonian) -
         rates.k_s * (qs_rho + rho * proj.singlet - qs_rho * proj.singlet) -
         rates.k_t * (qt_rho + rho * proj.triplet - qt_rho * proj.triplet);
}

Matrix master_rhs(TheoryKind theory, const Matrix& rho, const Matrix& hamiltonian,
                  const RateParams& rates, const CoherenceContext& ctx, const Projectors& proj) {
  switch (theory) {
    case TheoryKind::LindbladOnly:
      return rhs_lindblad_only(rho, hamiltonian, rates, proj);
    case TheoryKind::Retrodictive:
      return rhs_retrodictive(rho, hamiltonian, rates, ctx, proj);
    case TheoryKind::Traditional:
      return rhs_traditional(rho, hamiltonian, rates, proj);
    case TheoryKind::JonesHore:
      return rhs_jones_hore(rho, hamiltonian, rates, proj);
  }
  throw DomainError("unknown theory");
}

DecayRates coherence_decay_rates(TheoryKind theory, const Matrix& rho, const RateParams& rates,
                                 const Projectors& proj) {
  const NormalizedPopulations pop = normalized_populations(rho, proj);
  DecayRates r;
  r.kappa = rates.k_s * pop.singlet + rates.k_t * pop.triplet;
  switch (theory) {
    case TheoryKind::LindbladOnly:
      r.gamma_big = 0.5 * rates.total();
      r.kappa = 0.0;
      break;
    case TheoryKind::Retrodictive:
      r.gamma_big = rates.k_s * (0.5 + pop.singlet) + rates.k_t * (0.5 + pop.triplet);
      break;
    case TheoryKind::Traditional:
      r.gamma_big = 0.5 * rates.total();
      break;
    case TheoryKind::JonesHore:
      r.gamma_big = rates.total();
      break;
  }
  r.gamma = r.gamma_big - r.kappa;
  return r;
}

double coherent_block_rhs_check(TheoryKind theory, const Matrix& rho, const Matrix& hamiltonian,
                                const RateParams& rates, const CoherenceContext& ctx,
                                const Projectors& proj) {
  const Matrix f = master_rhs(theory, rho, hamiltonian, rates, ctx, proj);
  const Matrix comm = commutator(hamiltonian, rho);
  const Matrix& qs = proj.singlet;
  const Matrix& qt = proj.triplet;
  const Matrix f_c = qs * f * qt + qt * f * qs;
  const Matrix comm_c = qs * comm * qt + qt * comm * qs;
  const Matrix rho_c = qs * rho * qt + qt * rho * qs;
  const DecayRates r = coherence_decay_rates(theory, rho, rates, proj);
  return max_abs(f_c - (-kI * comm_c - r.gamma_big * rho_c));
}

EvolutionResult propagate(TheoryKind theory, const Matrix& rho0, const Matrix& hamiltonian,
                          const RateParams& rates, double dt, std::size_t steps,
                          const CoherenceContext& ctx, const Projectors& proj,
                          const StepObserver& observer) {
  check_rates(rates);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive and finite");
  if (!(dt * rates.total() < kStabilityLimit)) {
    std::ostringstream os;
    os << "dt (k_S + k_T) = " << dt * rates.total() << " exceeds the stability limit "
       << kStabilityLimit;
    throw DomainError(os.str());
  }
  if (rho0.rows() != proj.dimension || hamiltonian.rows() != proj.dimension) {
    throw DomainError("initial state or Hamiltonian does not match the spin system");
  }

  EvolutionResult out;
  out.theory = theory;
  out.dt = dt;
  for (auto* v : {&out.t, &out.trace, &out.qs, &out.qs_norm, &out.pcoh, &out.coherence,
                  &out.n_s, &out.n_t, &out.gamma_big, &out.kappa, &out.gamma}) {
    v->reserve(steps + 1);
  }

  Matrix rho = hermitian_part(rho0);
  double n_s = 0.0;
  double n_t = 0.0;
  out.min_eigenvalue = min_eigenvalue(rho);

  auto record = [&](std::size_t k) {
    const double tr = real_trace(rho);
    const double qs = trace_of_product(rho, proj.singlet).real();
    const double raw_p = pcoh_new_unclamped(rho, ctx, proj);
    if (raw_p > 1.0) ++out.pcoh_clamp_count;
    const DecayRates r = coherence_decay_rates(theory, rho, rates, proj);
    out.t.push_back(static_cast<double>(k) * dt);
    out.trace.push_back(tr);
    out.qs.push_back(qs);
    out.qs_norm.push_back(qs / tr);
    out.pcoh.push_back(std::clamp(raw_p, 0.0, 1.0));
    out.coherence.push_back(coherence_C(rho, proj));
    out.n_s.push_back(n_s);
    out.n_t.push_back(n_t);
    out.gamma_big.push_back(r.gamma_big);
    out.kappa.push_back(r.kappa);
    out.gamma.push_back(r.gamma);
    if (observer) observer(k, rho);
  };

  auto f = [&](const Matrix& state) {
    return master_rhs(theory, state, hamiltonian, rates, ctx, proj);
  };
  // The dephasing-only equation has no product channels.
  const bool recombining = theory != TheoryKind::LindbladOnly;
  auto yield_rates = [&](const Matrix& state) {
    if (!recombining) return std::pair{0.0, 0.0};
    return std::pair{rates.k_s * trace_of_product(state, proj.singlet).real(),
                     rates.k_t * trace_of_product(state, proj.triplet).real()};
  };

  record(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const Matrix k1 = f(rho);
    const auto y1 = yield_rates(rho);
    const Matrix s2 = rho + (0.5 * dt) * k1;
    const Matrix k2 = f(s2);
    const auto y2 = yield_rates(s2);
    const Matrix s3 = rho + (0.5 * dt) * k2;
    const Matrix k3 = f(s3);
    const auto y3 = yield_rates(s3);
    const Matrix s4 = rho + dt * k3;
    const Matrix k4 = f(s4);
    const auto y4 = yield_rates(s4);

    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = hermitian_part(rho);
    n_s += (dt / 6.0) * (y1.first + 2.0 * y2.first + 2.0 * y3.first + y4.first);
    n_t += (dt / 6.0) * (y1.second + 2.0 * y2.second + 2.0 * y3.second + y4.second);

    if (!rho.allFinite()) {
      std::ostringstream os;
      os << "non-finite density matrix at step " << k;
      throw IntegrationFailure(os.str());
    }
    const double lo = min_eigenvalue(rho);
    if (lo < -kPositivityTolerance) {
      std::ostringstream os;
      os << "density matrix lost positivity at step " << k << " (eigenvalue " << lo << ")";
      throw IntegrationFailure(os.str());
    }
    out.min_eigenvalue = std::min(out.min_eigenvalue, lo);
    record(k);
  }
  out.final_rho = rho;
  return out;
}

}  // namespace rpspin
