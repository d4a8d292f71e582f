#include "rpspin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "rpspin/errors.hpp"

namespace rpspin {

namespace {

const char* kUnitsComment = "units: time in 1/A, rates in A (A = reference hyperfine constant)";

}  // namespace

ExperimentSetup ExperimentSetup::from(const ExperimentConfig& config) {
  SpinSystem system(config.nuclei);
  Projectors proj = Projectors::of(system);
  Matrix h = build_hamiltonian(system, config.hamiltonian);
  Matrix rho0 = singlet_initial_density(system);
  const double c_dt = config.coherence_dt.value_or(config.dt);
  const double c_horizon = config.coherence_horizon.value_or(config.horizon());
  CoherenceContext ctx = max_unitary_coherence(h, rho0, c_horizon, c_dt, proj);
  return {std::move(system), std::move(proj), std::move(h), std::move(rho0), ctx};
}

std::vector<EvolutionResult> run_master_equations(const ExperimentConfig& config,
                                                  const ExperimentSetup& setup) {
  std::vector<EvolutionResult> out;
  for (TheoryKind theory : config.theories) {
    out.push_back(propagate(theory, setup.rho0, setup.hamiltonian, config.rates, config.dt,
                            config.steps, setup.ctx, setup.proj));
  }
  return out;
}

EnsembleResult run_montecarlo(const ExperimentConfig& config, const ExperimentSetup& setup) {
  EnsembleConfig mc = config.montecarlo;
  mc.dt = config.dt;
  mc.steps = config.steps;
  return run_ensemble(mc, setup.hamiltonian, config.rates, setup.system);
}

CsvTable evolution_table(const EvolutionResult& r) {
  CsvTable table = CsvTable::from_columns(
      {"t", "trace", "qs", "qs_norm", "pcoh", "C", "n_S", "n_T", "Gamma_c", "kappa", "gamma_c"},
      {&r.t, &r.trace, &r.qs, &r.qs_norm, &r.pcoh, &r.coherence, &r.n_s, &r.n_t, &r.gamma_big,
       &r.kappa, &r.gamma});
  table.comments = {std::string("theory: ") + std::string(theory_name(r.theory)), kUnitsComment};
  return table;
}

CsvTable ensemble_table(const EnsembleResult& r) {
  CsvTable table = CsvTable::from_columns(
      {"t", "survival", "survival_se", "qs", "qs_se", "qs_norm", "stderr"},
      {&r.t, &r.survival, &r.survival_se, &r.qs, &r.qs_se, &r.qs_norm, &r.qs_norm_se});
  std::ostringstream counts;
  counts << "trajectories: " << r.n_trajectories << "; events:";
  for (std::size_t e = 0; e < kEventKindCount; ++e) {
    counts << ' ' << event_name(static_cast<EventKind>(e)) << '=' << r.event_counts[e];
  }
  table.comments = {"Monte-Carlo ensemble; stderr is the standard error of qs_norm", counts.str(),
                    kUnitsComment};
  return table;
}

CsvTable trajectory_table(const TrajectoryRecord& rec) {
  std::vector<double> events;
  events.reserve(rec.t.size());
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    events.push_back(k < rec.events.size() ? static_cast<double>(rec.events[k]) : -1.0);
  }
  CsvTable table = CsvTable::from_columns({"t", "qs", "event"}, {&rec.t, &rec.qs, &events});
  std::ostringstream legend;
  legend << "single trajectory " << rec.index << "; event codes:";
  for (std::size_t e = 0; e < kEventKindCount; ++e) {
    legend << ' ' << e << '=' << event_name(static_cast<EventKind>(e));
  }
  table.comments = {legend.str(), kUnitsComment};
  return table;
}

Comparison compare(const EvolutionResult& master, const EnsembleResult& mc,
                   const std::vector<double>& pcoh, double z_threshold) {
  if (master.size() != mc.size() || pcoh.size() != mc.size()) {
    throw DomainError("master equation, Monte-Carlo and p_coh series must share one grid");
  }
  Comparison c;
  c.theory = master.theory;
  c.z_threshold = z_threshold;
  c.z.assign(mc.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> used;
  double sum_sq = 0.0;
  double sum_signed = 0.0;
  for (std::size_t k = 0; k < mc.size(); ++k) {
    const double se = mc.qs_norm_se[k];
    if (!std::isfinite(se)) {
      ++c.skipped;
      continue;
    }
    const double dev = master.qs_norm[k] - mc.qs_norm[k];
    used.push_back(k);
    ++c.points;
    if (std::abs(dev) <= z_threshold * se) ++c.within;
    c.max_abs_dev = std::max(c.max_abs_dev, std::abs(dev));
    sum_sq += dev * dev;
    sum_signed += dev;
    if (se > 0.0) {
      c.z[k] = dev / se;
      c.max_abs_z = std::max(c.max_abs_z, std::abs(c.z[k]));
    }
  }
  if (used.empty()) return c;
  c.rms_dev = std::sqrt(sum_sq / static_cast<double>(used.size()));
  c.mean_signed_dev = sum_signed / static_cast<double>(used.size());

  std::vector<double> p;
  p.reserve(used.size());
  for (std::size_t k : used) p.push_back(pcoh[k]);
  std::vector<double> sorted = p;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  double low = 0.0, high = 0.0;
  std::size_t n_low = 0, n_high = 0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const double dev = master.qs_norm[used[i]] - mc.qs_norm[used[i]];
    if (p[i] <= median) {
      low += dev;
      ++n_low;
    } else {
      high += dev;
      ++n_high;
    }
  }
  c.mean_signed_dev_low_pcoh = n_low ? low / static_cast<double>(n_low) : 0.0;
  c.mean_signed_dev_high_pcoh = n_high ? high / static_cast<double>(n_high) : 0.0;
  return c;
}

std::string format_comparison(const Comparison& c) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "theory " << theory_name(c.theory) << '\n'
     << "  points compared            " << c.points << " (skipped " << c.skipped << ")\n"
     << "  within " << c.z_threshold << " sigma               " << c.within << " ("
     << 100.0 * c.fraction_within() << "%)\n"
     << "  max |dev|                  " << c.max_abs_dev << '\n'
     << "  rms dev                    " << c.rms_dev << '\n'
     << "  max |z|                    " << c.max_abs_z << '\n'
     << "  mean signed dev            " << c.mean_signed_dev << '\n'
     << "  mean signed dev, low pcoh  " << c.mean_signed_dev_low_pcoh << '\n'
     << "  mean signed dev, high pcoh " << c.mean_signed_dev_high_pcoh << '\n';
  return os.str();
}

RateSummary summarize_rates(TheoryKind theory, const ExperimentConfig& config,
                            const ExperimentSetup& setup, EvolutionResult* evolution) {
  RateSummary s{theory};
  EvolutionResult ev = propagate(
      theory, setup.rho0, setup.hamiltonian, config.rates, config.dt, config.steps, setup.ctx,
      setup.proj, [&](std::size_t, const Matrix& rho) {
        s.max_block_residual =
            std::max(s.max_block_residual,
                     coherent_block_rhs_check(theory, rho, setup.hamiltonian, config.rates,
                                              setup.ctx, setup.proj));
      });
  s.gamma_min = *std::min_element(ev.gamma.begin(), ev.gamma.end());
  s.gamma_max = *std::max_element(ev.gamma.begin(), ev.gamma.end());
  s.gamma_mean =
      std::accumulate(ev.gamma.begin(), ev.gamma.end(), 0.0) / static_cast<double>(ev.size());
  s.kappa_mean =
      std::accumulate(ev.kappa.begin(), ev.kappa.end(), 0.0) / static_cast<double>(ev.size());
  if (evolution) *evolution = std::move(ev);
  return s;
}

}  // namespace rpspin
