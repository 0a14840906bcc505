#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dce/dynamics.hpp"
#include "dce/hilbert.hpp"
#include "dce/model.hpp"

namespace dce {

inline constexpr int kConfigSchema = 1;

enum class Command { Spectrum, Sweep, Perturbative, Evolve, EvolveLindblad, Preset };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

struct GridSpec {
  std::string parameter = "E1";
  double start = 2.0;
  double stop = 3.6;
  int points = 201;
  std::vector<int> ks{0};
  int q = 4;
  bool pin_eta = false;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct EvolutionSpec {
  double t_final = 100.0;  // units of 1/eps (1/nu when eps = 0)
  int samples = 2000;
  double rtol = 0.0;  // 0: integrator default
  double atol = 0.0;
  double max_step = 0.0;
  bool stroboscopic = true;
  bool converge = false;           // repeat with larger n_max until <n>(t_final) settles
  bool unitary_reference = false;  // evolve-lindblad: also write the unitary run

  friend bool operator==(const EvolutionSpec&, const EvolutionSpec&) = default;
};

struct RunConfig {
  int schema = kConfigSchema;
  Command command = Command::Spectrum;
  std::string preset;  // id this config was expanded from, if any
  AtomKind atom = AtomKind::Qubit;
  std::optional<int> n_max;  // default 40 (qubit) / 30 (qutrit)
  ChiMode chi_mode = ChiMode::Exact;
  // eps_tilde1 = g1 eps / 2 nu, phi1 = 0
  bool dipole_modulation = false;
  SystemParams params;
  BareLabel initial{0, 0};
  std::optional<GridSpec> grid;
  bool perturbative_overlay = false;  // sweep: also tabulate the closed forms
  std::optional<EvolutionSpec> evolution;
  std::optional<DissipationParams> dissipation;
  std::string output = "out";
  int threads = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

int resolved_n_max(const RunConfig& c);
BasisSpec basis_of(const RunConfig& c);
// Params with the dipole modulation applied when requested.
SystemParams resolved_params(const RunConfig& c);
// Absolute final time.
double resolved_t_final(const RunConfig& c);

nlohmann::json to_json(const RunConfig& c);
// Rejects unknown keys and wrong types; runs validate_config.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// "key=value". Bare physical parameter names (E1, g2, ...) address params;
// other keys are dotted paths into the JSON form ("evolution.t_final").
void apply_override(RunConfig& c, const std::string& assignment);

// Cross-field checks (command requirements, atom invariants, grid sanity).
void validate_config(const RunConfig& c);

const std::vector<std::string>& preset_ids();
RunConfig preset_config(const std::string& id);

}  // namespace dce
