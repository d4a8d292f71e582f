// rpsim: command-line driver for radical-pair master-equation and
// quantum-trajectory experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpspin/config.hpp"
#include "rpspin/csv.hpp"
#include "rpspin/errors.hpp"
#include "rpspin/experiments.hpp"

namespace fs = std::filesystem;
using namespace rpspin;

namespace {

struct Options {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir;
  std::vector<std::string> theories;
  bool print_config = false;
};

ExperimentConfig resolve(const Options& o) {
  if (!o.config_path.empty() && !o.preset_name.empty()) {
    throw ConfigError("--config and --preset are mutually exclusive");
  }
  if (o.config_path.empty() && o.preset_name.empty()) {
    throw ConfigError("one of --config or --preset is required");
  }
  ExperimentConfig c =
      o.config_path.empty() ? preset(o.preset_name) : load_config_file(o.config_path);
  if (o.seed) c.montecarlo.seed = *o.seed;
  if (o.threads) c.montecarlo.threads = *o.threads;
  if (!o.out_dir.empty()) c.output = o.out_dir;
  if (!o.theories.empty()) {
    c.theories.clear();
    for (const auto& name : o.theories) {
      const auto t = parse_theory(name);
      if (!t) throw ConfigError("--theory: unknown theory '" + name + "'");
      c.theories.push_back(*t);
    }
  }
  return c;
}

fs::path prepare_output(const ExperimentConfig& c) {
  fs::path dir(c.output);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string theory_file(TheoryKind t, const std::string& suffix = "") {
  return std::string(theory_name(t)) + suffix + ".csv";
}

int cmd_simulate(const ExperimentConfig& c) {
  validate(c, true, false);
  const ExperimentSetup setup = ExperimentSetup::from(c);
  const fs::path dir = prepare_output(c);
  std::cout << "c_max = " << setup.ctx.c_max << '\n';
  for (const auto& r : run_master_equations(c, setup)) {
    const fs::path file = dir / theory_file(r.theory);
    write_csv_file(file, evolution_table(r));
    std::cout << theory_name(r.theory) << ": final trace " << r.trace.back() << ", n_S "
              << r.n_s.back() << ", n_T " << r.n_t.back() << ", p_coh clamps "
              << r.pcoh_clamp_count << " -> " << file.string() << '\n';
  }
  return 0;
}

int cmd_montecarlo(const ExperimentConfig& c) {
  validate(c, false, true);
  const ExperimentSetup setup = ExperimentSetup::from(c);
  const fs::path dir = prepare_output(c);
  const EnsembleResult mc = run_montecarlo(c, setup);
  write_csv_file(dir / "ensemble.csv", ensemble_table(mc));
  std::cout << "ensemble of " << mc.n_trajectories << " trajectories, final survival "
            << mc.survival.back() << " -> " << (dir / "ensemble.csv").string() << '\n';
  if (c.dump_trajectory) {
    EnsembleConfig mcfg = c.montecarlo;
    mcfg.dt = c.dt;
    mcfg.steps = c.steps;
    const auto rec =
        run_trajectory(mcfg, setup.hamiltonian, c.rates, setup.system, *c.dump_trajectory);
    const fs::path file = dir / ("trajectory_" + std::to_string(*c.dump_trajectory) + ".csv");
    write_csv_file(file, trajectory_table(rec));
    std::cout << "trajectory " << *c.dump_trajectory << " -> " << file.string() << '\n';
  }
  return 0;
}

int cmd_compare(const ExperimentConfig& c) {
  validate(c, true, true);
  const ExperimentSetup setup = ExperimentSetup::from(c);
  const fs::path dir = prepare_output(c);
  const EnsembleResult mc = run_montecarlo(c, setup);
  write_csv_file(dir / "ensemble.csv", ensemble_table(mc));
  const auto evolutions = run_master_equations(c, setup);

  // Coherence reference for the low/high split: the first retrodictive run if
  // any, else the first theory.
  const EvolutionResult* reference = &evolutions.front();
  for (const auto& r : evolutions) {
    if (r.theory == TheoryKind::Retrodictive) {
      reference = &r;
      break;
    }
  }

  std::ostringstream report;
  report << "experiment " << c.name << ": " << mc.n_trajectories << " trajectories, seed "
         << c.montecarlo.seed << ", dt " << c.dt << ", steps " << c.steps << '\n'
         << "c_max " << setup.ctx.c_max << '\n';
  for (const auto& r : evolutions) {
    write_csv_file(dir / theory_file(r.theory), evolution_table(r));
    const Comparison cmp = compare(r, mc, reference->pcoh);
    report << format_comparison(cmp);
    std::vector<double> mc_q = mc.qs_norm;
    CsvTable detail = CsvTable::from_columns(
        {"t", "master", "mc", "stderr", "z", "pcoh"},
        {&r.t, &r.qs_norm, &mc_q, &mc.qs_norm_se, &cmp.z, &reference->pcoh});
    detail.comments = {"master-equation minus Monte-Carlo, normalized <Q_S>"};
    write_csv_file(dir / theory_file(r.theory, "_compare"), detail);
  }
  write_text(dir / "compare.txt", report.str());
  std::cout << report.str();
  return 0;
}

int cmd_rates(const ExperimentConfig& c) {
  validate(c, true, false);
  const ExperimentSetup setup = ExperimentSetup::from(c);
  const fs::path dir = prepare_output(c);
  std::ostringstream report;
  report << std::setprecision(8) << "experiment " << c.name << ": k_S " << c.rates.k_s
         << ", k_T " << c.rates.k_t << '\n';
  for (TheoryKind theory : c.theories) {
    EvolutionResult ev;
    const RateSummary s = summarize_rates(theory, c, setup, &ev);
    std::vector<double> qt_norm;
    qt_norm.reserve(ev.size());
    for (std::size_t k = 0; k < ev.size(); ++k) {
      qt_norm.push_back((ev.trace[k] - ev.qs[k]) / ev.trace[k]);
    }
    CsvTable table = CsvTable::from_columns(
        {"t", "qs_norm", "qt_norm", "Gamma_c", "kappa", "gamma_c"},
        {&ev.t, &ev.qs_norm, &qt_norm, &ev.gamma_big, &ev.kappa, &ev.gamma});
    table.comments = {std::string("theory: ") + std::string(theory_name(theory))};
    write_csv_file(dir / theory_file(theory, "_rates"), table);
    report << theory_name(theory) << ": gamma_c in [" << s.gamma_min << ", " << s.gamma_max
           << "], mean " << s.gamma_mean << "; mean kappa " << s.kappa_mean
           << "; max coherent-block residual " << s.max_block_residual << '\n';
  }
  write_text(dir / "rates.txt", report.str());
  std::cout << report.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radical-pair spin dynamics: master equations and quantum trajectories"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Experiment config (JSON)");
  app.add_option("--preset", o.preset_name, "Built-in experiment preset")
      ->check(CLI::IsMember(preset_names()));
  app.add_option("--seed", o.seed, "Monte-Carlo master seed (overrides config)");
  app.add_option("--threads", o.threads, "Monte-Carlo worker threads, 0 = auto");
  app.add_option("--out", o.out_dir, "Output directory (overrides config)");
  app.add_option("--theory", o.theories, "Theories to run (overrides config)")->delimiter(',');
  app.add_flag("--print-config", o.print_config, "Print the resolved config as JSON and exit");
  app.fallthrough();

  auto* simulate = app.add_subcommand("simulate", "Integrate the master equations");
  auto* montecarlo = app.add_subcommand("montecarlo", "Run the quantum-trajectory ensemble");
  auto* comparison = app.add_subcommand("compare", "Compare master equations with Monte Carlo");
  auto* rates = app.add_subcommand("rates", "Coherence decay rates Gamma_c, kappa, gamma_c");
  auto* presets = app.add_subcommand("presets", "List built-in presets");

  CLI11_PARSE(app, argc, argv);

  if (presets->parsed()) {
    for (const auto& name : preset_names()) std::cout << name << '\n';
    return 0;
  }
  try {
    const ExperimentConfig c = resolve(o);
    if (o.print_config) {
      std::cout << to_json(c) << '\n';
      return 0;
    }
    if (simulate->parsed()) return cmd_simulate(c);
    if (montecarlo->parsed()) return cmd_montecarlo(c);
    if (comparison->parsed()) return cmd_compare(c);
    if (rates->parsed()) return cmd_rates(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
