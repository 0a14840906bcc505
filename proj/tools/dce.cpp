#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dce/config.hpp"
#include "dce/errors.hpp"
#include "dce/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string out;
  std::vector<std::string> sets;
  std::optional<int> nmax;
  std::optional<double> tol;
  int threads = -1;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--preset", f.preset, "figure preset (fig1, fig2, fig3, fig4a, fig4b, fig5a, fig5b)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--set", f.sets, "override key=value (repeatable)")->take_all();
  app->add_option("--nmax", f.nmax, "photon cutoff n_max");
  app->add_option("--tol", f.tol, "relative integrator tolerance");
  app->add_option("--threads", f.threads, "sweep worker threads (0: all cores)");
}

bool needs_evolution(dce::Command c) { return c == dce::Command::Evolve || c == dce::Command::EvolveLindblad; }

dce::RunConfig build(dce::Command command, const Flags& f, const std::string& positional) {
  using namespace dce;
  std::string preset = f.preset.empty() ? positional : f.preset;
  if (!f.preset.empty() && !positional.empty() && positional != f.preset)
    throw ValidationError("preset given twice ('" + positional + "' and '" + f.preset + "')");

  RunConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
    if (!preset.empty()) throw ValidationError("--config and --preset are mutually exclusive");
  } else if (!preset.empty()) {
    c = preset_config(preset);
  } else if (command == Command::Preset) {
    throw ValidationError("preset needs an id, one of fig1 fig2 fig3 fig4a fig4b fig5a fig5b");
  }
  if (command != Command::Preset) c.command = command;
  if (c.command == Command::Preset) c = expand_preset(c);

  for (const auto& s : f.sets) apply_override(c, s);
  if (f.nmax) c.n_max = *f.nmax;
  if (f.tol) {
    if (!needs_evolution(c.command)) throw ValidationError("--tol applies to evolve and evolve-lindblad only");
    if (!c.evolution) c.evolution = EvolutionSpec{};
    c.evolution->rtol = *f.tol;
  }
  if (!f.out.empty()) c.output = f.out;
  if (f.threads >= 0) c.threads = f.threads;
  validate_config(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-photon dynamical Casimir effect simulator"};
  app.require_subcommand(1);

  Flags flags;
  std::string positional;
  struct Sub {
    const char* name;
    const char* help;
    dce::Command command;
  };
  const Sub subs[] = {
      {"spectrum", "dressed spectrum and rates at one parameter point", dce::Command::Spectrum},
      {"sweep", "matrix elements, rates and fidelities on a parameter grid", dce::Command::Sweep},
      {"perturbative", "closed-form dispersive results on an E1 grid", dce::Command::Perturbative},
      {"evolve", "unitary evolution", dce::Command::Evolve},
      {"evolve-lindblad", "zero-temperature master equation", dce::Command::EvolveLindblad},
      {"preset", "run a figure preset", dce::Command::Preset},
  };
  std::vector<std::pair<CLI::App*, dce::Command>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, flags);
    if (s.command == dce::Command::Preset) sub->add_option("id", positional, "preset id");
    apps.emplace_back(sub, s.command);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    dce::Command command = dce::Command::Spectrum;
    for (const auto& [sub, cmd] : apps)
      if (sub->parsed()) command = cmd;
    const dce::RunConfig config = build(command, flags, positional);
    dce::prepare_output_dir(config.output);
    const dce::RunResult result = dce::execute(config);
    for (const auto& line : result.log) std::cerr << line << "\n";
    for (const auto& path : dce::write_outputs(result, config.output)) std::cout << path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
