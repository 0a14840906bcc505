#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dce/hilbert.hpp"
#include "dce/model.hpp"

namespace dce {

struct DissipationParams {
  double kappa = 0.0;      // cavity relaxation
  double gamma = 0.0;      // atomic relaxation 1 -> 0
  double gamma_phi = 0.0;  // pure dephasing of the 0-1 pair

  bool any() const { return kappa != 0.0 || gamma != 0.0 || gamma_phi != 0.0; }
  friend bool operator==(const DissipationParams&, const DissipationParams&) = default;
};

void validate_dissipation(const DissipationParams& d);

struct EvolutionOptions {
  double t_final = 1.0;
  int samples = 2000;
  double rtol = 0.0;      // 0 selects 1e-9 for states, 1e-8 for density matrices
  double atol = 0.0;      // 0 selects 1e-3 * rtol
  double max_step = 0.0;  // 0 selects 2 pi / (50 eta)
  double truncation_tol = 1e-8;
  int max_truncation_retries = 2;
  int cutoff_increment = 10;
  // Driven unitary runs: propagate whole periods with the one-period
  // propagator and integrate only the remainder to each sample.
  bool stroboscopic = true;
  bool keep_states = false;
};

struct TrajectoryMeta {
  std::string method;
  int n_max = 0;
  int truncation_retries = 0;
  double rtol = 0.0;
  double atol = 0.0;
  double max_step = 0.0;
  double period_rtol = 0.0;  // stroboscopic path only
  // max over samples of | ||psi|| - 1 | or | tr rho - 1 |
  double norm_drift = 0.0;
  double hermiticity_drift = 0.0;
  double min_eigenvalue = 0.0;
  // max over samples of the population at photon number n_max
  double edge_population = 0.0;
  long steps = 0;
  long rhs_evals = 0;
  std::optional<DissipationParams> dissipation;
  std::vector<std::string> warnings;
};

struct Trajectory {
  BasisSpec basis;
  SystemParams params;
  ChiMode chi_mode = ChiMode::Exact;
  std::vector<double> t;
  std::vector<double> mean_n;
  std::vector<std::optional<double>> mandel_q;
  Eigen::MatrixXd atom_pop;  // samples x levels
  Eigen::MatrixXd fock;      // samples x (n_max + 1)
  std::vector<Eigen::VectorXcd> states;
  std::vector<Eigen::MatrixXcd> rhos;
  TrajectoryMeta meta;

  std::size_t size() const { return t.size(); }
  double max_mean_n() const;
};

Eigen::VectorXcd bare_state(const BasisSpec& basis, const BareLabel& label);
Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi);

// Copies a state into a basis with the same atom and a larger cutoff.
Eigen::VectorXcd embed(const Eigen::VectorXcd& psi, const BasisSpec& from, const BasisSpec& to);
Eigen::MatrixXcd embed(const Eigen::MatrixXcd& rho, const BasisSpec& from, const BasisSpec& to);

// Uniform sample grid over [0, t_final].
std::vector<double> sample_times(const EvolutionOptions& options);

// psi(t1) from psi(t0) by direct adaptive integration (either direction).
Eigen::VectorXcd propagate(const HamiltonianModel& model, const Eigen::VectorXcd& psi, double t0, double t1,
                           const EvolutionOptions& options);

// U(T, 0) over one modulation period T = 2 pi / eta.
Eigen::MatrixXcd period_propagator(const HamiltonianModel& model, double rtol, double atol);

// i dpsi/dt = H(t) psi. On truncation violations the run is repeated with a
// larger cutoff; the returned trajectory carries the basis actually used.
Trajectory evolve_schrodinger(const HamiltonianModel& model, const Eigen::VectorXcd& psi0,
                              const EvolutionOptions& options);

// drho/dt = -i[H, rho] + kappa L[a] + gamma L[sigma_01] + (gamma_phi / 2) L[sigma_z],
// with sigma_z = sigma_11 - sigma_00 (levels 0, 1 only for the qutrit).
Trajectory evolve_lindblad(const HamiltonianModel& model, const Eigen::MatrixXcd& rho0,
                           const DissipationParams& dissipation, const EvolutionOptions& options);

// ---- reduced amplitude model ---------------------------------------------

// Ladder of dressed levels m = 0..L-1 in increasing energy. rates[m] is
// Theta_{m;m+1}; detunings[m] = (lambda_{m+1} - lambda_m) - eta.
struct EffectiveModelSpec {
  std::vector<BareLabel> levels;
  std::vector<cplx> rates;
  std::vector<double> detunings;
};

struct AmplitudeTrajectory {
  std::vector<double> t;
  Eigen::MatrixXcd amplitudes;  // samples x levels
  Eigen::MatrixXd populations() const { return amplitudes.cwiseAbs2(); }
};

// db_m/dt = Theta*_{m-1;m} e^{i d_{m-1} t} b_{m-1} - Theta_{m;m+1} e^{-i d_m t} b_{m+1}.
AmplitudeTrajectory evolve_effective(const EffectiveModelSpec& spec, const Eigen::VectorXcd& b0, double t_final,
                                     int samples = 2000, double rtol = 1e-10);

// Levels (0, k0), (0, k0 + q), ... (`count` of them) with rates and
// detunings evaluated from the dressed spectrum at the model's eta.
EffectiveModelSpec effective_ladder(const HamiltonianModel& model, int k0, int q, int count);

// ---- convergence in the photon cutoff -------------------------------------

struct EvolutionRequest {
  BasisSpec basis;
  SystemParams params;
  ChiMode chi_mode = ChiMode::Exact;
  BareLabel initial{0, 0};
  EvolutionOptions options;
  std::optional<DissipationParams> dissipation;
  double convergence_rtol = 1e-4;
  int max_escalations = 3;
};

Trajectory run_evolution(const EvolutionRequest& request);

struct ConvergedTrajectory {
  Trajectory trajectory;  // run at the last cutoff tried
  std::vector<int> cutoffs;
  std::vector<double> final_mean_n;
  bool converged = false;
};

// Repeats the run with n_max + cutoff_increment until the final <n> changes by
// less than convergence_rtol (relative).
ConvergedTrajectory convergence_escalation(const EvolutionRequest& request);

}  // namespace dce
