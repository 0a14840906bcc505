#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dce/config.hpp"
#include "dce/csv.hpp"
#include "dce/dynamics.hpp"
#include "dce/spectrum.hpp"

namespace dce {

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  RunConfig config;  // as executed (presets expanded)
  std::vector<OutputFile> files;
  std::vector<std::string> log;
};

// Replaces a `preset` command by the preset's own config, keeping output and threads.
RunConfig expand_preset(const RunConfig& c);

SweepConfig sweep_config(const RunConfig& c);
EvolutionRequest evolution_request(const RunConfig& c);

// Closed forms on an E1 grid for each k, plus one "degenerate" row per k at
// the E1 solving 4 nu = beta_{k+4} + beta_{k+2} when it lies inside the grid.
std::vector<PerturbativeRow> perturbative_table(const SystemParams& p, const std::vector<double>& E1s,
                                                const std::vector<int>& ks);

// Runs the command and renders every output file in memory.
RunResult execute(const RunConfig& c);

// Creates `dir` if needed and checks that it accepts files.
void prepare_output_dir(const std::filesystem::path& dir);

// All-or-nothing: files are staged under temporary names and renamed at the
// end; on failure nothing is left behind.
std::vector<std::filesystem::path> write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace dce
