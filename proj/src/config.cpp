#include "dce/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/spectrum.hpp"

namespace dce {

using nlohmann::json;

namespace {

const char* kCommandNames[] = {"spectrum", "sweep", "perturbative", "evolve", "evolve-lindblad", "preset"};

std::string chi_name(ChiMode m) { return m == ChiMode::Exact ? "exact" : "first_order"; }

ChiMode chi_from(const std::string& s) {
  if (s == "exact") return ChiMode::Exact;
  if (s == "first_order") return ChiMode::FirstOrder;
  throw ValidationError("chi_mode must be 'exact' or 'first_order' (got '" + s + "')");
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be rejected by name.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ValidationError(where_ + " must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(path(key) + ": " + e.what());
    }
  }

  void mark(const std::string& key) { seen_.insert(key); }

  const json& sub(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError("unknown configuration key '" + path(it.key()) + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json params_json(const SystemParams& p) {
  json j = json::object();
  for (const auto& name : param_names()) j[name] = get_param(p, name);
  return j;
}

SystemParams params_from(const json& j) {
  if (!j.is_object()) throw ValidationError("params must be a JSON object");
  SystemParams p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it->is_number()) throw ValidationError("params." + it.key() + " must be a number");
    try {
      set_param(p, it.key(), it->get<double>());
    } catch (const ValidationError&) {
      throw ValidationError("unknown configuration key 'params." + it.key() + "'");
    }
  }
  return p;
}

GridSpec grid_from(const json& j) {
  Reader r(j, "grid");
  GridSpec g;
  r.get("parameter", g.parameter);
  r.get("start", g.start);
  r.get("stop", g.stop);
  r.get("points", g.points);
  r.get("ks", g.ks);
  r.get("q", g.q);
  r.get("pin_eta", g.pin_eta);
  r.finish();
  return g;
}

EvolutionSpec evolution_from(const json& j) {
  Reader r(j, "evolution");
  EvolutionSpec e;
  r.get("t_final", e.t_final);
  r.get("samples", e.samples);
  r.get("rtol", e.rtol);
  r.get("atol", e.atol);
  r.get("max_step", e.max_step);
  r.get("stroboscopic", e.stroboscopic);
  r.get("converge", e.converge);
  r.get("unitary_reference", e.unitary_reference);
  r.finish();
  return e;
}

DissipationParams dissipation_from(const json& j) {
  Reader r(j, "dissipation");
  DissipationParams d;
  r.get("kappa", d.kappa);
  r.get("gamma", d.gamma);
  r.get("gamma_phi", d.gamma_phi);
  r.finish();
  return d;
}

// Parses the right-hand side of key=value: JSON if it parses, else a string.
json parse_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

}  // namespace

std::string to_string(Command c) { return kCommandNames[static_cast<int>(c)]; }

Command command_from_string(const std::string& name) {
  for (int i = 0; i < 6; ++i)
    if (name == kCommandNames[i]) return static_cast<Command>(i);
  throw ValidationError("unknown command '" + name +
                        "' (expected spectrum, sweep, perturbative, evolve, evolve-lindblad or preset)");
}

int resolved_n_max(const RunConfig& c) {
  if (c.n_max) return *c.n_max;
  return c.atom == AtomKind::Qubit ? 40 : 30;
}

BasisSpec basis_of(const RunConfig& c) { return {c.atom, resolved_n_max(c)}; }

SystemParams resolved_params(const RunConfig& c) {
  return c.dipole_modulation ? with_standard_dipole_modulation(c.params) : c.params;
}

double resolved_t_final(const RunConfig& c) {
  const double t = c.evolution ? c.evolution->t_final : EvolutionSpec{}.t_final;
  return c.params.eps > 0.0 ? t / c.params.eps : t / c.params.nu;
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["command"] = to_string(c.command);
  j["preset"] = c.preset;
  j["atom"] = c.atom == AtomKind::Qubit ? "qubit" : "qutrit";
  j["n_max"] = c.n_max ? json(*c.n_max) : json(nullptr);
  j["chi_mode"] = chi_name(c.chi_mode);
  j["dipole_modulation"] = c.dipole_modulation;
  j["params"] = params_json(c.params);
  j["initial"] = {{"level", c.initial.level}, {"photons", c.initial.photons}};
  if (c.grid) {
    const GridSpec& g = *c.grid;
    j["grid"] = {{"parameter", g.parameter}, {"start", g.start}, {"stop", g.stop}, {"points", g.points},
                 {"ks", g.ks},               {"q", g.q},         {"pin_eta", g.pin_eta}};
  } else {
    j["grid"] = nullptr;
  }
  j["perturbative_overlay"] = c.perturbative_overlay;
  if (c.evolution) {
    const EvolutionSpec& e = *c.evolution;
    j["evolution"] = {{"t_final", e.t_final},     {"samples", e.samples},
                      {"rtol", e.rtol},           {"atol", e.atol},
                      {"max_step", e.max_step},   {"stroboscopic", e.stroboscopic},
                      {"converge", e.converge},   {"unitary_reference", e.unitary_reference}};
  } else {
    j["evolution"] = nullptr;
  }
  if (c.dissipation)
    j["dissipation"] = {
        {"kappa", c.dissipation->kappa}, {"gamma", c.dissipation->gamma}, {"gamma_phi", c.dissipation->gamma_phi}};
  else
    j["dissipation"] = nullptr;
  j["output"] = c.output;
  j["threads"] = c.threads;
  return j;
}

RunConfig config_from_json(const json& j) {
  Reader r(j, "");
  RunConfig c;
  r.get("schema", c.schema);
  if (c.schema != kConfigSchema)
    throw ValidationError("unsupported config schema " + std::to_string(c.schema) + " (expected " +
                          std::to_string(kConfigSchema) + ")");
  std::string s = to_string(c.command);
  r.get("command", s);
  c.command = command_from_string(s);
  r.get("preset", c.preset);
  s = "qubit";
  r.get("atom", s);
  c.atom = atom_kind_from_string(s);
  r.mark("n_max");
  if (r.has("n_max")) {
    int n = 0;
    r.get("n_max", n);
    c.n_max = n;
  }
  s = chi_name(c.chi_mode);
  r.get("chi_mode", s);
  c.chi_mode = chi_from(s);
  r.get("dipole_modulation", c.dipole_modulation);
  if (r.has("params")) c.params = params_from(r.sub("params"));
  r.mark("params");
  if (r.has("initial")) {
    Reader ri(r.sub("initial"), "initial");
    ri.get("level", c.initial.level);
    ri.get("photons", c.initial.photons);
    ri.finish();
  }
  r.mark("initial");
  if (r.has("grid")) c.grid = grid_from(r.sub("grid"));
  r.mark("grid");
  r.get("perturbative_overlay", c.perturbative_overlay);
  if (r.has("evolution")) c.evolution = evolution_from(r.sub("evolution"));
  r.mark("evolution");
  if (r.has("dissipation")) c.dissipation = dissipation_from(r.sub("dissipation"));
  r.mark("dissipation");
  r.get("output", c.output);
  r.get("threads", c.threads);
  r.finish();
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config file '" + path + "' is not valid JSON");
  return config_from_json(j);
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value (got '" + assignment + "')");
  const std::string key = assignment.substr(0, eq);
  const json value = parse_value(assignment.substr(eq + 1));

  json j = to_json(c);
  const auto& names = param_names();
  std::vector<std::string> path;
  if (std::find(names.begin(), names.end(), key) != names.end()) {
    path = {"params", key};
  } else {
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) path.push_back(part);
  }
  // Optional sections come to life with defaults when first addressed.
  if (path.size() > 1 && j.contains(path[0]) && j[path[0]].is_null()) {
    RunConfig d;
    if (path[0] == "grid") d.grid = GridSpec{};
    if (path[0] == "evolution") d.evolution = EvolutionSpec{};
    if (path[0] == "dissipation") d.dissipation = DissipationParams{};
    j[path[0]] = to_json(d)[path[0]];
  }
  json* node = &j;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object() || !node->contains(path[i]))
      throw ValidationError("unknown configuration key '" + key + "'");
    node = &(*node)[path[i]];
  }
  if (!node->is_object() || !node->contains(path.back()))
    throw ValidationError("unknown configuration key '" + key + "'");
  (*node)[path.back()] = value;
  c = config_from_json(j);
}

void validate_config(const RunConfig& c) {
  if (c.n_max && *c.n_max < 4) throw ValidationError("n_max must be >= 4");
  validate_params(resolved_params(c), c.atom);
  const BasisSpec basis = basis_of(c);
  if (!basis.contains(c.initial)) throw ValidationError("initial state " + to_string(c.initial) + " is outside the basis");
  if (c.threads < 0) throw ValidationError("threads must be >= 0");
  if (c.grid) {
    const GridSpec& g = *c.grid;
    get_param(c.params, g.parameter);
    if (g.points < 2) throw ValidationError("grid.points must be >= 2");
    if (g.q != 4 && g.q != 5) throw ValidationError("grid.q must be 4 or 5");
    if (g.ks.empty()) throw ValidationError("grid.ks must not be empty");
    for (int k : g.ks)
      if (k < 0) throw ValidationError("grid.ks entries must be >= 0");
  }
  if (c.evolution) {
    const EvolutionSpec& e = *c.evolution;
    if (!(e.t_final > 0.0)) throw ValidationError("evolution.t_final must be > 0");
    if (e.samples < 2) throw ValidationError("evolution.samples must be >= 2");
    if (e.rtol < 0.0 || e.atol < 0.0 || e.max_step < 0.0)
      throw ValidationError("evolution tolerances must be >= 0");
  }
  if (c.dissipation) validate_dissipation(*c.dissipation);
  switch (c.command) {
    case Command::Sweep:
      if (!c.grid) throw ValidationError("sweep requires a grid");
      break;
    case Command::Perturbative:
      if (!c.grid) throw ValidationError("perturbative requires a grid");
      if (c.grid->parameter != "E1") throw ValidationError("perturbative sweeps E1 only");
      if (c.atom != AtomKind::Qubit) throw ValidationError("perturbative formulas are for the qubit");
      break;
    case Command::Evolve:
      if (!c.evolution) throw ValidationError("evolve requires an evolution section");
      break;
    case Command::EvolveLindblad:
      if (!c.evolution) throw ValidationError("evolve-lindblad requires an evolution section");
      if (!c.dissipation) throw ValidationError("evolve-lindblad requires a dissipation section");
      break;
    case Command::Preset:
      if (c.preset.empty()) throw ValidationError("preset command requires a preset id");
      break;
    case Command::Spectrum:
      break;
  }
  if (c.perturbative_overlay && (c.atom != AtomKind::Qubit || (c.grid && c.grid->parameter != "E1")))
    throw ValidationError("perturbative_overlay needs a qubit sweep over E1");
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b"};
  return ids;
}

RunConfig preset_config(const std::string& id) {
  RunConfig c;
  c.preset = id;
  c.output = "out/" + id;
  c.params.eps = 0.03;
  if (id == "fig1") {
    c.command = Command::Sweep;
    c.params.g = {0.08, 0.0, 0.0};
    c.grid = GridSpec{"E1", 2.0, 3.6, 201, {0, 4}, 4, false};
    c.perturbative_overlay = true;
  } else if (id == "fig2") {
    c.command = Command::EvolveLindblad;
    c.n_max = 30;
    c.params.E = {2.968, 0.0};
    c.params.eta = 3.9819;
    c.params.g = {0.08, 0.0, 0.0};
    c.evolution = EvolutionSpec{};
    c.evolution->t_final = 1000.0;
    c.evolution->unitary_reference = true;
    const double g1 = c.params.g[0];
    c.dissipation = DissipationParams{1e-4 * g1, 5e-4 * g1, 5e-4 * g1};
  } else if (id == "fig3") {
    c.command = Command::Evolve;
    c.params.E = {2.99, 0.0};
    c.params.eta = 3.9821;
    c.params.g = {0.08, 0.0, 0.0};
    c.evolution = EvolutionSpec{};
    c.evolution->t_final = 2500.0;
  } else if (id == "fig4a" || id == "fig4b") {
    c.command = Command::Sweep;
    c.atom = AtomKind::CyclicQutrit;
    c.params.E = {id == "fig4a" ? 3.105 : 2.2, 3.5};
    c.params.eta = 5.0;
    c.params.g = {0.06, 0.08, 0.04};
    c.grid = GridSpec{"E2", 2.5, 4.5, 201, {0, 5}, 5, false};
  } else if (id == "fig5a" || id == "fig5b") {
    c.command = Command::Evolve;
    c.atom = AtomKind::CyclicQutrit;
    c.params.g = {0.06, 0.08, 0.04};
    if (id == "fig5a") {
      c.params.E = {3.105, 4.08};
      c.params.eta = 4.9842;
    } else {
      c.params.E = {2.2, 3.05};
      c.params.eta = 4.9732;
    }
    c.evolution = EvolutionSpec{};
    c.evolution->t_final = id == "fig5a" ? 6000.0 : 8000.0;
  } else {
    throw ValidationError("unknown preset '" + id + "' (expected fig1, fig2, fig3, fig4a, fig4b, fig5a or fig5b)");
  }
  validate_config(c);
  return c;
}

}  // namespace dce
