// Acceptance run: every criterion at its stated tolerance, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rpspin/coherence.hpp"
#include "rpspin/config.hpp"
#include "rpspin/dynamics.hpp"
#include "rpspin/experiments.hpp"
#include "rpspin/montecarlo.hpp"
#include "rpspin/spin_core.hpp"
#include "test_support.hpp"

using namespace rpspin;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

std::vector<SpinSystem> algebra_systems() {
  return {SpinSystem(), SpinSystem({NuclearSpinSpec{}}),
          SpinSystem({NuclearSpinSpec{0.5, Electron::Donor, 1.0},
                      NuclearSpinSpec{0.5, Electron::Acceptor, 0.5}})};
}

Outcome operator_algebra() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (const SpinSystem& sys : algebra_systems()) {
    const Matrix id = Matrix::Identity(sys.dimension(), sys.dimension());
    const Matrix qs = singlet_projector(sys);
    const Matrix qt = triplet_projector(sys);
    const auto t = triplet_state_projectors(sys);
    for (double d : {max_abs(qs + qt - id), max_abs(qs * qt), max_abs(qt * qs),
                     max_abs(qs * qs - qs), max_abs(qt * qt - qt),
                     max_abs(t.t0 + t.t_plus + t.t_minus - qt)})
      worst = std::max(worst, d);
    std::vector<Site> sites{Site::donor(), Site::acceptor()};
    for (std::size_t k = 0; k < sys.nucleus_count(); ++k) sites.push_back(Site::nucleus_at(k));
    for (Site s : sites) {
      const Matrix x = embed_spin_component(sys, s, Axis::X);
      const Matrix y = embed_spin_component(sys, s, Axis::Y);
      const Matrix z = embed_spin_component(sys, s, Axis::Z);
      worst = std::max({worst, max_abs(commutator(x, y) - kI * z),
                        max_abs(commutator(y, z) - kI * x), max_abs(commutator(z, x) - kI * y)});
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-12 && elapsed < 1.0,
          "max defect " + fmt(worst) + " (tol 1e-12), " + fmt(elapsed) + " s (limit 1 s)"};
}

Outcome dephasing_scaling() {
  SpinSystem sys({NuclearSpinSpec{}});
  Projectors proj = Projectors::of(sys);
  std::mt19937_64 gen(2024);
  double worst_c = 0.0, worst_old = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Matrix rho = testing::random_density(8, gen);
    const double c = coherence_C(rho, proj);
    const double old = pcoh_old(rho, proj);
    for (double lambda : {0.0, 0.3, 0.7, 1.0}) {
      const Matrix out = kraus_dephase(rho, lambda, proj);
      worst_c = std::max(worst_c, std::abs(coherence_C(out, proj) - lambda * c));
      worst_old = std::max(worst_old, std::abs(pcoh_old(out, proj) - lambda * lambda * old));
    }
  }
  return {worst_c <= 1e-12 && worst_old <= 1e-12,
          "linear defect " + fmt(worst_c) + ", quadratic defect " + fmt(worst_old) + " (tol 1e-12)"};
}

Outcome two_state_coherence() {
  SpinSystem sys({NuclearSpinSpec{}});
  Projectors proj = Projectors::of(sys);
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n;
  const Vector s_down = product_state(sys, singlet_electron_state(), 1);
  const Vector tm_up = product_state(sys, triplet_electron_state(-1), 0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Complex a(n(gen), n(gen)), b(n(gen), n(gen));
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    a /= norm;
    b /= norm;
    const Vector psi = a * s_down + b * tm_up;
    worst = std::max(worst, std::abs(coherence_C(psi * psi.adjoint(), proj) - std::abs(a * b)));
  }
  return {worst <= 1e-12, "max |C - |ab|| " + fmt(worst) + " (tol 1e-12)"};
}

Outcome theory_equivalences() {
  const auto start = Clock::now();
  SpinSystem sys({NuclearSpinSpec{}});
  Projectors proj = Projectors::of(sys);
  const Matrix h = build_hamiltonian(sys, {0.1, 0.0});
  const Matrix rho0 = singlet_initial_density(sys);
  const CoherenceContext ctx = max_unitary_coherence(h, rho0, 30.0, 0.003, proj);
  const double ctx_time = seconds_since(start);
  const auto t0 = Clock::now();
  std::mt19937_64 gen(99);
  double worst_jh = 0.0, worst_trad = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix rho = testing::random_density(8, gen);
    const RateParams equal{0.25, 0.25};
    worst_jh = std::max(worst_jh, max_abs(rhs_retrodictive(rho, h, equal, ctx, proj) -
                                          rhs_jones_hore(rho, h, equal, proj)));
    const RateParams asym{0.1, 0.4};
    worst_trad = std::max(worst_trad, max_abs(rhs_retrodictive_weighted(rho, h, asym, 0.0, ctx, proj) -
                                              rhs_traditional(rho, h, asym, proj)));
  }
  const double elapsed = seconds_since(t0);
  return {worst_jh <= 1e-12 && worst_trad <= 1e-12 && elapsed < 1.0,
          "k_S=k_T vs Jones-Hore " + fmt(worst_jh) + ", p=0 vs traditional " + fmt(worst_trad) +
              " (tol 1e-12), " + fmt(elapsed) + " s (limit 1 s; c_max setup " + fmt(ctx_time) +
              " s)"};
}

ExperimentConfig grid_config(RateParams rates) {
  ExperimentConfig c = preset("fig5");
  c.rates = rates;
  return c;
}

Outcome decay_rate_table() {
  const double k = 0.25;
  double worst = 0.0;
  double worst_residual = 0.0;
  auto rel = [&](double got, double want) {
    const double scale = std::max(std::abs(want), k);
    worst = std::max(worst, std::abs(got - want) / scale);
  };
  for (int case_b = 0; case_b < 2; ++case_b) {
    const RateParams rates = case_b ? RateParams{0.0, 2 * k} : RateParams{k, k};
    const ExperimentConfig config = grid_config(rates);
    const ExperimentSetup setup = ExperimentSetup::from(config);
    for (TheoryKind th : {TheoryKind::Retrodictive, TheoryKind::Traditional, TheoryKind::JonesHore}) {
      EvolutionResult ev;
      const RateSummary s = summarize_rates(th, config, setup, &ev);
      worst_residual = std::max(worst_residual, s.max_block_residual);
      for (std::size_t i = 0; i < ev.size(); ++i) {
        const double qt = 1.0 - ev.qs_norm[i];
        double want = 0.0;
        if (th == TheoryKind::Retrodictive) want = k;
        if (th == TheoryKind::Traditional) want = case_b ? k * (1 - 2 * qt) : 0.0;
        if (th == TheoryKind::JonesHore) want = case_b ? 2 * k * (1 - qt) : k;
        rel(ev.gamma[i], want);
      }
    }
  }
  return {worst <= 1e-9 && worst_residual <= 1e-12,
          "max relative gamma_c error " + fmt(worst) + " (tol 1e-9); coherent-block residual " +
              fmt(worst_residual)};
}

Outcome zeno_ordering() {
  const ExperimentConfig config = grid_config({0.0, 0.5});
  const ExperimentSetup setup = ExperimentSetup::from(config);
  auto run = [&](TheoryKind th) {
    return propagate(th, setup.rho0, setup.hamiltonian, config.rates, config.dt, config.steps,
                     setup.ctx, setup.proj);
  };
  const EvolutionResult jh = run(TheoryKind::JonesHore);
  const EvolutionResult re = run(TheoryKind::Retrodictive);
  const EvolutionResult tr = run(TheoryKind::Traditional);
  std::size_t checked = 0, violated = 0, degenerate = 0;
  for (std::size_t i = 0; i < jh.size(); ++i) {
    const bool below_half = 1.0 - jh.qs_norm[i] < 0.5 && 1.0 - re.qs_norm[i] < 0.5 &&
                            1.0 - tr.qs_norm[i] < 0.5;
    if (!below_half) continue;
    // At t = 0 the pair is a pure singlet and all three rates coincide at k.
    if (i == 0) {
      ++degenerate;
      continue;
    }
    ++checked;
    if (!(jh.gamma[i] > re.gamma[i] && re.gamma[i] > tr.gamma[i])) ++violated;
  }
  return {checked > 0 && violated == 0,
          std::to_string(violated) + " violations over " + std::to_string(checked) +
              " grid points with <Q_T> < 1/2 (t = 0 excluded: Q_T = 0 makes the rates equal)"};
}

Outcome exponential_survival() {
  const ExperimentConfig config = preset("survival");
  const ExperimentSetup setup = ExperimentSetup::from(config);
  double worst_me = 0.0;
  for (const EvolutionResult& ev : run_master_equations(config, setup)) {
    for (std::size_t i = 0; i < ev.size(); ++i)
      worst_me = std::max(worst_me, std::abs(ev.trace[i] - std::exp(-config.rates.k_s * ev.t[i])));
  }
  const EnsembleResult mc = run_montecarlo(config, setup);
  double worst_z = 0.0;
  for (double t = 2.0; t <= 20.0 + 1e-9; t += 2.0) {
    const auto k = static_cast<std::size_t>(std::llround(t / config.dt));
    const double p = std::exp(-config.rates.k_s * mc.t[k]);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(mc.n_trajectories));
    worst_z = std::max(worst_z, std::abs(mc.survival[k] - p) / se);
  }
  return {worst_me <= 1e-8 && worst_z <= 3.0,
          "master-equation |Tr - e^-kt| " + fmt(worst_me) + " (tol 1e-8); MC max |z| " +
              fmt(worst_z) + " at t = 2, 4, ..., 20 (N = " + std::to_string(mc.n_trajectories) +
              ")"};
}

Outcome dephasing_ensemble() {
  const auto start = Clock::now();
  const ExperimentConfig config = preset("fig3");
  const ExperimentSetup setup = ExperimentSetup::from(config);
  const EvolutionResult me = run_master_equations(config, setup).front();
  const EnsembleResult mc = run_montecarlo(config, setup);
  double worst = 0.0;
  for (std::size_t i = 0; i < me.size(); ++i) worst = std::max(worst, std::abs(mc.qs[i] - me.qs[i]));
  const double elapsed = seconds_since(start);
  return {worst <= 0.02, "N = " + std::to_string(mc.n_trajectories) + ", max |dev| " + fmt(worst) +
                             " (tol 0.02), runtime " + fmt(elapsed) + " s on " +
                             std::to_string(std::max(1u, std::thread::hardware_concurrency())) +
                             " hardware threads (target < 120 s on 4 cores)"};
}

struct ComparedRun {
  std::vector<EvolutionResult> master;
  EnsembleResult mc;
  Comparison of(TheoryKind th) const {
    for (const auto& m : master)
      if (m.theory == th) return compare(m, mc, m.pcoh);
    throw std::runtime_error("theory not run");
  }
};

ComparedRun compared(const std::string& name) {
  ExperimentConfig config = preset(name);
  config.theories = {TheoryKind::Retrodictive, TheoryKind::Traditional};
  const ExperimentSetup setup = ExperimentSetup::from(config);
  return {run_master_equations(config, setup), run_montecarlo(config, setup)};
}

std::string pct(double f) { return fmt(100.0 * f) + "%"; }

Outcome symmetric_agreement() {
  const ComparedRun run = compared("fig5");
  const Comparison re = run.of(TheoryKind::Retrodictive);
  const Comparison tr = run.of(TheoryKind::Traditional);
  const double tr_outside = 1.0 - tr.fraction_within();
  return {re.fraction_within() >= 0.99 && tr_outside > 0.05,
          "Retrodictive within 3 sigma at " + pct(re.fraction_within()) +
              " of points (need >= 99%, max |z| " + fmt(re.max_abs_z) +
              "); Traditional outside at " + pct(tr_outside) + " (need > 5%)"};
}

Outcome asymmetric_agreement() {
  const ComparedRun a = compared("fig6a");
  const Comparison ca = a.of(TheoryKind::Retrodictive);
  const ComparedRun b = compared("fig6b");
  const Comparison cb = b.of(TheoryKind::Retrodictive);
  const bool pass_a = ca.fraction_within() >= 0.95;
  const bool pass_b = cb.mean_signed_dev > 0.0 &&
                      cb.mean_signed_dev_low_pcoh > cb.mean_signed_dev_high_pcoh;
  return {pass_a && pass_b,
          std::string("(a) ") + (pass_a ? "pass" : "fail") + ": within 3 sigma at " +
              pct(ca.fraction_within()) + " (need >= 95%, max |dev| " + fmt(ca.max_abs_dev) +
              "); (b) " + (pass_b ? "pass" : "fail") + ": mean signed dev " +
              fmt(cb.mean_signed_dev) + ", low p_coh half " + fmt(cb.mean_signed_dev_low_pcoh) +
              " vs high half " + fmt(cb.mean_signed_dev_high_pcoh)};
}

Outcome integrator_order() {
  SpinSystem sys({NuclearSpinSpec{}});
  Projectors proj = Projectors::of(sys);
  const Matrix h = build_hamiltonian(sys, {0.1, 0.0});
  const Matrix rho0 = singlet_initial_density(sys);
  const CoherenceContext ctx = max_unitary_coherence(h, rho0, 30.0, 0.003, proj);
  const RateParams rates{0.0, 0.5};
  const double t_end = 30.0;
  const double dt = 0.05;
  std::string detail;
  bool pass = true;
  for (TheoryKind th : {TheoryKind::Retrodictive, TheoryKind::Traditional, TheoryKind::JonesHore}) {
    auto final_rho = [&](double step) {
      return propagate(th, rho0, h, rates, step, static_cast<std::size_t>(std::llround(t_end / step)),
                       ctx, proj)
          .final_rho;
    };
    const Matrix ref = final_rho(dt / 8);
    const double e1 = max_abs(final_rho(dt) - ref);
    const double e2 = max_abs(final_rho(dt / 2) - ref);
    const double ratio = e1 / e2;
    pass = pass && ratio >= 8.0 && ratio <= 32.0;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(theory_name(th)) + " " + fmt(ratio);
  }
  return {pass, "error ratio dt/(dt/2) with dt = " + fmt(dt) + ": " + detail + " (need 8..32)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& rpsim) {
  const auto base = std::filesystem::temp_directory_path() / "rpspin_acceptance";
  std::filesystem::remove_all(base);
  std::vector<std::string> outputs;
  for (int threads : {1, 4}) {
    const auto dir = base / ("threads" + std::to_string(threads));
    const std::string cmd = "\"" + rpsim + "\" --preset fig5 --threads " + std::to_string(threads) +
                            " --out \"" + dir.string() + "\" montecarlo > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "rpsim failed: " + cmd};
    outputs.push_back(slurp(dir / "ensemble.csv") + slurp(dir / "trajectory_0.csv"));
  }
  std::filesystem::remove_all(base);
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
  return {same, std::string("fig5 ensemble and trajectory CSVs, --threads 1 vs 4: ") +
                    (same ? "byte-identical" : "differ") + " (" + std::to_string(outputs[0].size()) +
                    " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path to rpsim>\n", argv[0]);
    return 2;
  }
  const std::string rpsim = argv[1];
  report(1, "operator algebra", operator_algebra);
  report(2, "dephasing scales C linearly and the old measure quadratically", dephasing_scaling);
  report(3, "C of a two-component S-T superposition", two_state_coherence);
  report(4, "theory equivalence identities", theory_equivalences);
  report(5, "gamma_c decay-rate table", decay_rate_table);
  report(6, "Zeno-regime rate ordering", zeno_ordering);
  report(7, "exponential singlet survival", exponential_survival);
  report(8, "dephasing-only ensemble vs Lindblad equation", dephasing_ensemble);
  report(9, "k_S = k_T ensemble vs retrodictive equation", symmetric_agreement);
  report(10, "asymmetric ensembles vs retrodictive equation", asymmetric_agreement);
  report(11, "integrator order", integrator_order);
  report(12, "thread-count determinism", [&] { return determinism(rpsim); });
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
