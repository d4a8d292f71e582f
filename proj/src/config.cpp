#include "rpspin/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rpspin/errors.hpp"

namespace rpspin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> known) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.contains(it.key())) fail(path + "." + it.key(), "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  const std::string where = join(path, key);
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(where, "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "must be finite");
  return x;
}

std::uint64_t get_unsigned(const json& obj, const std::string& path, const std::string& key,
                           std::optional<std::uint64_t> fallback = std::nullopt) {
  const std::string where = join(path, key);
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(where, "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail(where, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  const std::string where = join(path, key);
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(where, "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string policy_name(InitialStatePolicy p) {
  return p == InitialStatePolicy::HalfSplit ? "half_split" : "uniform_nuclear_basis";
}

std::vector<NuclearSpinSpec> one_donor_proton() { return {{0.5, Electron::Donor, 1.0}}; }

// Shared parameters of the reference experiments: one spin-1/2 nucleus on the
// donor, omega = A/10, 10^4 steps over 30/A.
ExperimentConfig figure_base(std::string name) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.nuclei = one_donor_proton();
  c.hamiltonian = {0.1, 0.0};
  c.dt = 0.003;
  c.steps = 10000;
  c.montecarlo.n_trajectories = 10000;
  c.montecarlo.seed = 1;
  c.montecarlo.initial_state_policy = InitialStatePolicy::HalfSplit;
  c.montecarlo.recombination = true;
  c.dump_trajectory = 0;
  c.output = "out/" + c.name;
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"name", "system", "hamiltonian", "rates", "theories", "grid", "coherence",
                  "montecarlo", "output"});
  ExperimentConfig c;
  c.name = get_string(root, "", "name", std::string("experiment"));

  if (root.contains("system")) {
    const json& sys = root.at("system");
    reject_unknown(sys, "system", {"nuclei"});
    if (sys.contains("nuclei")) {
      const json& list = sys.at("nuclei");
      if (!list.is_array()) fail("system.nuclei", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "system.nuclei[" + std::to_string(i) + "]";
        const json& n = list.at(i);
        reject_unknown(n, where, {"spin", "electron", "hyperfine"});
        NuclearSpinSpec spec;
        spec.spin = get_number(n, where, "spin", 0.5);
        const double twice = 2.0 * spec.spin;
        if (spec.spin < 0.5 || std::abs(twice - std::round(twice)) > 1e-12) {
          fail(where + ".spin", "must be a positive multiple of 1/2");
        }
        const std::string e = get_string(n, where, "electron", std::string("donor"));
        if (e == "donor") {
          spec.coupled_to = Electron::Donor;
        } else if (e == "acceptor") {
          spec.coupled_to = Electron::Acceptor;
        } else {
          fail(where + ".electron", "must be \"donor\" or \"acceptor\"");
        }
        spec.hyperfine = get_number(n, where, "hyperfine", 1.0);
        c.nuclei.push_back(spec);
      }
    }
  }

  if (root.contains("hamiltonian")) {
    const json& h = root.at("hamiltonian");
    reject_unknown(h, "hamiltonian", {"larmor", "exchange"});
    c.hamiltonian.larmor = get_number(h, "hamiltonian", "larmor", 0.0);
    c.hamiltonian.exchange = get_number(h, "hamiltonian", "exchange", 0.0);
  }

  if (!root.contains("rates")) fail("rates", "missing");
  {
    const json& r = root.at("rates");
    reject_unknown(r, "rates", {"k_S", "k_T"});
    c.rates.k_s = get_number(r, "rates", "k_S");
    c.rates.k_t = get_number(r, "rates", "k_T");
  }

  if (root.contains("theories")) {
    const json& list = root.at("theories");
    if (!list.is_array()) fail("theories", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "theories[" + std::to_string(i) + "]";
      if (!list.at(i).is_string()) fail(where, "expected a string");
      const auto t = parse_theory(list.at(i).get<std::string>());
      if (!t) fail(where, "unknown theory (LindbladOnly, Retrodictive, Traditional, JonesHore)");
      c.theories.push_back(*t);
    }
  }

  if (!root.contains("grid")) fail("grid", "missing");
  {
    const json& g = root.at("grid");
    reject_unknown(g, "grid", {"dt", "steps", "horizon"});
    c.dt = get_number(g, "grid", "dt");
    if (!(c.dt > 0.0)) fail("grid.dt", "must be positive");
    if (g.contains("steps") && g.contains("horizon")) {
      fail("grid", "give either steps or horizon, not both");
    }
    if (g.contains("horizon")) {
      const double h = get_number(g, "grid", "horizon");
      if (!(h >= c.dt)) fail("grid.horizon", "must be at least grid.dt");
      c.steps = static_cast<std::size_t>(std::llround(h / c.dt));
    } else {
      c.steps = get_unsigned(g, "grid", "steps");
    }
  }

  if (root.contains("coherence")) {
    const json& co = root.at("coherence");
    reject_unknown(co, "coherence", {"horizon", "dt"});
    if (co.contains("horizon")) c.coherence_horizon = get_number(co, "coherence", "horizon");
    if (co.contains("dt")) c.coherence_dt = get_number(co, "coherence", "dt");
  }

  if (root.contains("montecarlo")) {
    const json& m = root.at("montecarlo");
    reject_unknown(m, "montecarlo",
                   {"n_trajectories", "seed", "initial_state", "recombination", "threads",
                    "dump_trajectory"});
    c.montecarlo.n_trajectories = get_unsigned(m, "montecarlo", "n_trajectories");
    c.montecarlo.seed = get_unsigned(m, "montecarlo", "seed", 1);
    const std::string policy =
        get_string(m, "montecarlo", "initial_state", std::string("half_split"));
    if (policy == "half_split") {
      c.montecarlo.initial_state_policy = InitialStatePolicy::HalfSplit;
    } else if (policy == "uniform_nuclear_basis") {
      c.montecarlo.initial_state_policy = InitialStatePolicy::UniformNuclearBasis;
    } else {
      fail("montecarlo.initial_state", "must be \"half_split\" or \"uniform_nuclear_basis\"");
    }
    c.montecarlo.recombination = get_bool(m, "montecarlo", "recombination", true);
    c.montecarlo.threads = static_cast<unsigned>(get_unsigned(m, "montecarlo", "threads", 0));
    if (m.contains("dump_trajectory")) {
      if (m.at("dump_trajectory").is_null()) {
        c.dump_trajectory.reset();
      } else {
        c.dump_trajectory = get_unsigned(m, "montecarlo", "dump_trajectory");
      }
    }
  }
  c.montecarlo.dt = c.dt;
  c.montecarlo.steps = c.steps;
  c.output = get_string(root, "", "output", std::string("out"));
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c) {
  json nuclei = json::array();
  for (const auto& n : c.nuclei) {
    nuclei.push_back({{"spin", n.spin},
                      {"electron", n.coupled_to == Electron::Donor ? "donor" : "acceptor"},
                      {"hyperfine", n.hyperfine}});
  }
  json theories = json::array();
  for (auto t : c.theories) theories.push_back(std::string(theory_name(t)));
  json root{{"name", c.name},
            {"system", {{"nuclei", nuclei}}},
            {"hamiltonian", {{"larmor", c.hamiltonian.larmor}, {"exchange", c.hamiltonian.exchange}}},
            {"rates", {{"k_S", c.rates.k_s}, {"k_T", c.rates.k_t}}},
            {"theories", theories},
            {"grid", {{"dt", c.dt}, {"steps", c.steps}}},
            {"output", c.output}};
  if (c.coherence_horizon || c.coherence_dt) {
    json co = json::object();
    if (c.coherence_horizon) co["horizon"] = *c.coherence_horizon;
    if (c.coherence_dt) co["dt"] = *c.coherence_dt;
    root["coherence"] = co;
  }
  if (c.montecarlo.n_trajectories > 0) {
    json m{{"n_trajectories", c.montecarlo.n_trajectories},
           {"seed", c.montecarlo.seed},
           {"initial_state", policy_name(c.montecarlo.initial_state_policy)},
           {"recombination", c.montecarlo.recombination},
           {"threads", c.montecarlo.threads}};
    if (c.dump_trajectory) m["dump_trajectory"] = *c.dump_trajectory;
    root["montecarlo"] = m;
  }
  return root.dump(2);
}

void validate(const ExperimentConfig& c, bool need_theories, bool need_montecarlo) {
  try {
    SpinSystem system(c.nuclei);
  } catch (const DomainError& e) {
    fail("system.nuclei", e.what());
  }
  if (!std::isfinite(c.hamiltonian.larmor) || !std::isfinite(c.hamiltonian.exchange)) {
    fail("hamiltonian", "parameters must be finite");
  }
  if (!(c.rates.k_s >= 0.0)) fail("rates.k_S", "must be >= 0");
  if (!(c.rates.k_t >= 0.0)) fail("rates.k_T", "must be >= 0");
  if (!(c.dt > 0.0)) fail("grid.dt", "must be positive");
  if (c.steps == 0) fail("grid.steps", "must be positive");
  if (!(c.dt * c.rates.total() < kStabilityLimit)) {
    std::ostringstream os;
    os << "dt (k_S + k_T) = " << c.dt * c.rates.total() << " must be below " << kStabilityLimit;
    fail("grid.dt", os.str());
  }
  if (c.coherence_dt && !(*c.coherence_dt > 0.0)) fail("coherence.dt", "must be positive");
  if (c.coherence_horizon && !(*c.coherence_horizon >= c.coherence_dt.value_or(c.dt))) {
    fail("coherence.horizon", "must be at least the coherence time step");
  }
  if (need_theories && c.theories.empty()) fail("theories", "at least one theory is required");
  if (need_montecarlo) {
    if (c.montecarlo.n_trajectories == 0) fail("montecarlo.n_trajectories", "must be positive");
    if (c.dump_trajectory && *c.dump_trajectory >= c.montecarlo.n_trajectories) {
      fail("montecarlo.dump_trajectory", "must be below n_trajectories");
    }
  }
}

std::vector<std::string> preset_names() {
  return {"fig3", "fig3-mc", "fig4", "fig5", "fig6a", "fig6b", "fig7", "survival"};
}

ExperimentConfig preset(std::string_view name) {
  if (name == "fig3" || name == "fig3-mc") {
    // S-T dephasing only, k_S = k_T = A/4, 20,000 trajectories without recombination.
    ExperimentConfig c = figure_base(std::string(name));
    c.rates = {0.25, 0.25};
    c.theories = {TheoryKind::LindbladOnly};
    c.montecarlo.n_trajectories = 20000;
    c.montecarlo.recombination = false;
    return c;
  }
  if (name == "fig4") {
    // Unitary S-T mixing only.
    ExperimentConfig c = figure_base("fig4");
    c.rates = {0.0, 0.0};
    c.theories = {TheoryKind::LindbladOnly};
    c.montecarlo.recombination = false;
    return c;
  }
  if (name == "fig5") {
    ExperimentConfig c = figure_base("fig5");
    c.rates = {0.25, 0.25};
    c.theories = {TheoryKind::Retrodictive, TheoryKind::Traditional, TheoryKind::JonesHore};
    return c;
  }
  if (name == "fig6a") {
    ExperimentConfig c = figure_base("fig6a");
    c.rates = {0.0, 0.25};
    c.theories = {TheoryKind::Retrodictive, TheoryKind::Traditional, TheoryKind::JonesHore};
    return c;
  }
  if (name == "fig6b" || name == "fig7") {
    ExperimentConfig c = figure_base(std::string(name));
    c.rates = {0.0, 0.5};
    c.theories = {TheoryKind::Retrodictive, TheoryKind::Traditional, TheoryKind::JonesHore};
    return c;
  }
  if (name == "survival") {
    // H = 0: a singlet population decays at exactly k_S.
    ExperimentConfig c = figure_base("survival");
    c.nuclei.front().hyperfine = 0.0;
    c.hamiltonian = {0.0, 0.0};
    c.rates = {0.25, 0.25};
    c.theories = {TheoryKind::Retrodictive, TheoryKind::Traditional, TheoryKind::JonesHore};
    return c;
  }
  throw ConfigError("preset: unknown preset '" + std::string(name) + "'");
}

}  // namespace rpspin
