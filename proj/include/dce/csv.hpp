#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dce/dynamics.hpp"
#include "dce/spectrum.hpp"

namespace dce {

// Shortest round-trip decimal form; "nan"/"inf" spelled out.
std::string format_number(double v);

// grid_value, then per k: C_re_k, C_im_k, C_abs_k, A{i}_re_k, A{i}_im_k,
// A{i}_abs_k, theta_re_k, theta_im_k, theta_abs_k, fidelity_lower_k,
// fidelity_k, eta_k, eta_resonant_k, degenerate_flag_k; then row_ok, error.
// Failed rows leave the per-k cells empty.
std::string rate_table_csv(const RateTable& table);

// t, mean_n, mandel_q, P_a_0.., p_0..p_{n_max}; undefined Q is an empty cell.
std::string trajectory_csv(const Trajectory& traj);
nlohmann::json trajectory_meta_json(const Trajectory& traj);

// level, photons, eigen_index, lambda, fidelity, degenerate_flag; one row per
// resolved label, sorted by eigenindex.
std::string spectrum_csv(const DressedSpectrum& s);

// Closed forms of the dispersive qubit at one (E1, k). Cells that hit a pole
// or a degeneracy are empty; `note` says why.
struct PerturbativeRow {
  std::string kind;  // "grid" or "degenerate"
  double E1 = 0.0;
  int k = 0;
  std::optional<double> c4_far, lambda_far, c_near, a_near, theta_near;
  double detuning = 0.0;  // 4 nu - beta_{k+4} - beta_{k+2}
  std::optional<double> cavity_degenerate, dipole_degenerate;
  double theta_bound = 0.0;
  double lambda_dispersive = 0.0;
  double eta_near3nu = 0.0;
  std::optional<double> lambda_jc;
  std::string note;
};

std::string perturbative_csv(const std::vector<PerturbativeRow>& rows);

// Splits one CSV line on commas (no quoting; the writers never quote).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace dce
