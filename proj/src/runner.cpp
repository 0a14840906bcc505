#include "dce/runner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/perturbation.hpp"

namespace dce {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
std::optional<double> guarded(F&& f, std::string& note) {
  try {
    return f();
  } catch (const Error& e) {
    if (note.empty()) note = e.what();
    return std::nullopt;
  }
}

PerturbativeRow perturbative_row(const SystemParams& p, double E1, int k, const std::string& kind) {
  namespace pt = perturbation;
  const double nu = p.nu, g1 = p.g[0];
  PerturbativeRow r;
  r.kind = kind;
  r.E1 = E1;
  r.k = k;
  r.c4_far = guarded([&] { return pt::c4_far(nu, E1, g1, k); }, r.note);
  r.lambda_far = guarded([&] { return pt::lambda_far(nu, E1, g1, k); }, r.note);
  r.c_near = guarded([&] { return pt::c_near(nu, E1, g1, k); }, r.note);
  r.a_near = guarded([&] { return pt::a_near(nu, E1, g1, k); }, r.note);
  r.theta_near = guarded([&] { return pt::theta_near(nu, E1, g1, p.eps, k); }, r.note);
  r.detuning = pt::degeneracy_detuning(nu, E1, g1, k);
  if (kind == "degenerate") {
    const auto d = pt::degenerate_elements(nu, E1, g1, k);
    r.cavity_degenerate = d.cavity;
    r.dipole_degenerate = d.dipole;
  }
  r.theta_bound = pt::theta_max_bound(nu, g1, p.eps, k);
  r.lambda_dispersive = pt::lambda_dispersive(nu, g1, k);
  r.eta_near3nu = pt::eta_k_near3nu(nu, g1, k);
  if (k != 1 && k != 2) {
    std::string ignored;
    r.lambda_jc = guarded([&] { return pt::lambda_jc_branch(nu, E1, g1, k); }, ignored);
  }
  return r;
}

json sidecar(const RunConfig& c, const std::string& file) {
  json j;
  j["file"] = file;
  j["config"] = to_json(c);
  return j;
}

void add_trajectory(RunResult& out, const RunConfig& c, const std::string& stem, const Trajectory& traj,
                    const json& extra = json::object()) {
  json meta = sidecar(c, stem + ".csv");
  meta["trajectory"] = trajectory_meta_json(traj);
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = *it;
  out.files.push_back({stem + ".csv", trajectory_csv(traj)});
  out.files.push_back({stem + ".json", meta.dump(2) + "\n"});
  std::ostringstream msg;
  msg << stem << ": " << traj.meta.method << ", n_max " << traj.meta.n_max << ", max <n> " << traj.max_mean_n()
      << ", drift " << traj.meta.norm_drift;
  out.log.push_back(msg.str());
  for (const auto& w : traj.meta.warnings) out.log.push_back("warning: " + w);
}

void run_trajectory(RunResult& out, const RunConfig& c, EvolutionRequest req, const std::string& stem) {
  if (c.evolution->converge) {
    const ConvergedTrajectory conv = convergence_escalation(req);
    json extra;
    extra["convergence"] = {{"cutoffs", conv.cutoffs}, {"final_mean_n", conv.final_mean_n}, {"converged", conv.converged}};
    if (!conv.converged) out.log.push_back("warning: " + stem + " did not converge in n_max");
    add_trajectory(out, c, stem, conv.trajectory, extra);
  } else {
    add_trajectory(out, c, stem, run_evolution(req));
  }
}

void run_sweep(RunResult& out, const RunConfig& c) {
  const RateTable table = sweep(sweep_config(c));
  out.files.push_back({"rates.csv", rate_table_csv(table)});
  out.files.push_back({"rates.json", sidecar(c, "rates.csv").dump(2) + "\n"});
  std::size_t failed = 0;
  for (const auto& row : table.rows) failed += !row.ok;
  out.log.push_back("rates: " + std::to_string(table.rows.size()) + " rows, " + std::to_string(failed) + " flagged");
  if (c.perturbative_overlay) {
    const auto rows = perturbative_table(resolved_params(c), table.grid, c.grid->ks);
    out.files.push_back({"perturbative.csv", perturbative_csv(rows)});
    out.files.push_back({"perturbative.json", sidecar(c, "perturbative.csv").dump(2) + "\n"});
  }
}

void run_spectrum(RunResult& out, const RunConfig& c) {
  const HamiltonianModel model(basis_of(c), resolved_params(c), c.chi_mode);
  const DressedSpectrum s = dressed_spectrum(model);
  out.files.push_back({"spectrum.csv", spectrum_csv(s)});
  out.files.push_back({"spectrum.json", sidecar(c, "spectrum.csv").dump(2) + "\n"});

  SweepConfig sc = sweep_config(c);
  RateTable table;
  table.config = sc;
  table.grid = {get_param(model.params(), sc.parameter)};
  table.rows = {sweep_point(sc, table.grid[0])};
  out.files.push_back({"rates.csv", rate_table_csv(table)});
  out.files.push_back({"rates.json", sidecar(c, "rates.csv").dump(2) + "\n"});
  for (const auto& w : model.warnings()) out.log.push_back("warning: " + w);
}

}  // namespace

RunConfig expand_preset(const RunConfig& c) {
  if (c.command != Command::Preset) return c;
  RunConfig p = preset_config(c.preset);
  p.output = c.output;
  p.threads = c.threads;
  return p;
}

SweepConfig sweep_config(const RunConfig& c) {
  SweepConfig s;
  s.basis = basis_of(c);
  s.params = resolved_params(c);
  s.chi_mode = c.chi_mode;
  s.threads = c.threads;
  if (c.grid) {
    s.parameter = c.grid->parameter;
    s.start = c.grid->start;
    s.stop = c.grid->stop;
    s.points = c.grid->points;
    s.ks = c.grid->ks;
    s.q = c.grid->q;
    s.pin_eta = c.grid->pin_eta;
  } else {
    s.q = c.atom == AtomKind::Qubit ? 4 : 5;
  }
  return s;
}

EvolutionRequest evolution_request(const RunConfig& c) {
  if (!c.evolution) throw ValidationError("no evolution section in the configuration");
  EvolutionRequest r;
  r.basis = basis_of(c);
  r.params = resolved_params(c);
  r.chi_mode = c.chi_mode;
  r.initial = c.initial;
  const EvolutionSpec& e = *c.evolution;
  r.options.t_final = resolved_t_final(c);
  r.options.samples = e.samples;
  r.options.rtol = e.rtol;
  r.options.atol = e.atol;
  r.options.max_step = e.max_step;
  r.options.stroboscopic = e.stroboscopic;
  if (c.command == Command::EvolveLindblad) r.dissipation = c.dissipation;
  return r;
}

std::vector<PerturbativeRow> perturbative_table(const SystemParams& p, const std::vector<double>& E1s,
                                                const std::vector<int>& ks) {
  std::vector<PerturbativeRow> rows;
  for (int k : ks) {
    for (double E1 : E1s) rows.push_back(perturbative_row(p, E1, k, "grid"));
    if (E1s.empty()) continue;
    const auto [lo, hi] = std::minmax_element(E1s.begin(), E1s.end());
    try {
      const double Ed = perturbation::degenerate_E1(p.nu, p.g[0], k, *lo, *hi);
      rows.push_back(perturbative_row(p, Ed, k, "degenerate"));
    } catch (const Error&) {
      // no degeneracy inside the grid
    }
  }
  return rows;
}

RunResult execute(const RunConfig& config) {
  RunResult out;
  out.config = expand_preset(config);
  const RunConfig& c = out.config;
  validate_config(c);
  switch (c.command) {
    case Command::Spectrum:
      run_spectrum(out, c);
      break;
    case Command::Sweep:
      run_sweep(out, c);
      break;
    case Command::Perturbative: {
      const auto rows = perturbative_table(resolved_params(c), linspace(c.grid->start, c.grid->stop, c.grid->points),
                                           c.grid->ks);
      out.files.push_back({"perturbative.csv", perturbative_csv(rows)});
      out.files.push_back({"perturbative.json", sidecar(c, "perturbative.csv").dump(2) + "\n"});
      break;
    }
    case Command::Evolve:
      run_trajectory(out, c, evolution_request(c), "trajectory");
      break;
    case Command::EvolveLindblad: {
      const EvolutionRequest req = evolution_request(c);
      run_trajectory(out, c, req, "trajectory_lindblad");
      if (c.evolution->unitary_reference) {
        EvolutionRequest u = req;
        u.dissipation.reset();
        run_trajectory(out, c, u, "trajectory_unitary");
      }
      break;
    }
    case Command::Preset:
      throw ValidationError("preset was not expanded");
  }
  out.files.push_back({"config.json", to_json(c).dump(2) + "\n"});
  return out;
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ValidationError("output directory '" + dir.string() + "' is not usable");
  const fs::path probe = dir / ".dce-probe";
  {
    std::ofstream f(probe);
    if (!f) throw ValidationError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

std::vector<fs::path> write_outputs(const RunResult& result, const fs::path& dir) {
  prepare_output_dir(dir);
  std::vector<fs::path> staged, done;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
    for (const auto& p : done) fs::remove(p, ec);
  };
  try {
    for (const OutputFile& f : result.files) {
      const fs::path tmp = dir / ("." + f.name + ".tmp");
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary);
      out << f.content;
      out.close();
      if (!out) throw Error("failed to write " + tmp.string());
    }
    for (std::size_t i = 0; i < result.files.size(); ++i) {
      const fs::path dst = dir / result.files[i].name;
      fs::rename(staged[i], dst);
      done.push_back(dst);
    }
  } catch (const fs::filesystem_error& e) {
    cleanup();
    throw Error(std::string("writing outputs failed: ") + e.what());
  } catch (...) {
    cleanup();
    throw;
  }
  return done;
}

}  // namespace dce
