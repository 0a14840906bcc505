#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dce/hilbert.hpp"
#include "dce/model.hpp"

namespace dce {

struct LabelOptions {
  // Top bare-state overlap below this flags a near-degenerate (hybridized) label.
  double degenerate_threshold = 0.55;
  // A label whose assigned eigenvector overlaps it less than this is unresolved.
  double min_overlap = 0.1;
};

// Sorted eigenpairs of H0 plus (optionally) bare-state labels.
//
// Eigenvectors are columns of `states`; each one is normalized and its
// largest-magnitude component is real and positive.
struct DressedSpectrum {
  BasisSpec basis;
  Eigen::VectorXd lambdas;
  Eigen::MatrixXcd states;

  bool labeled = false;
  // Indexed by bare-state index (BasisSpec::index).
  std::vector<int> eigen_index_of_label;
  Eigen::VectorXd fidelity;
  std::vector<bool> degenerate;
  // Indexed by eigenindex: the bare label assigned to it.
  std::vector<int> label_of_eigen_index;
  LabelOptions label_options;

  // Eigenindex carrying `label`; throws LabelError if unresolved.
  int eigen_index(const BareLabel& label) const;
  double eigenvalue(const BareLabel& label) const { return lambdas(eigen_index(label)); }
  Eigen::VectorXcd state(const BareLabel& label) const { return states.col(eigen_index(label)); }
  // |<label|phi_label>|^2.
  double fidelity_of(const BareLabel& label) const;
  bool is_degenerate(const BareLabel& label) const;
};

// Hermitian eigendecomposition; rejects inputs with max |H - H^dagger| > 1e-10.
DressedSpectrum diagonalize(const Eigen::MatrixXcd& h0, const BasisSpec& basis);

// Greedy max-overlap labeling. Bare/eigen pairs are visited in decreasing
// overlap order and assigned when both are still free, so every eigenindex
// carries exactly one label.
void label_states(DressedSpectrum& spectrum, const LabelOptions& options = {});

// Diagonalize + label the bare Hamiltonian of `model`.
DressedSpectrum dressed_spectrum(const HamiltonianModel& model, const LabelOptions& options = {});

// <phi_m| [n + (eta / 4 nu)(a^2 - a^dag^2)] |phi_n>.
cplx matrix_element_C(const DressedSpectrum& spectrum, const OperatorSet& ops, const BareLabel& m,
                      const BareLabel& n, double eta, double nu = 1.0);

// <phi_m| D_{k,l} |phi_n>.
cplx matrix_element_A(const DressedSpectrum& spectrum, const OperatorSet& ops, const BareLabel& m,
                      const BareLabel& n, int k, int l);

// Theta = (eps/2) [C + sum_i (eps_tilde_i e^{i phi_i} / eps) A_i], A indexed by
// coupling i = 1..3 (pairs (0,1), (1,2), (0,2)).
cplx transition_rate_theta(const SystemParams& params, cplx C, const std::array<cplx, 3>& A);

// lambda_{0,k+q} - lambda_{0,k}.
double resonant_modulation_frequency(const DressedSpectrum& spectrum, int k, int q);

// All rate-related quantities between |0,k> and |0,k+q> at one parameter point.
struct RateEntry {
  int k = 0;
  int q = 4;
  double eta = 0.0;  // modulation frequency used for C
  double eta_resonant = 0.0;
  cplx C{};
  std::array<cplx, 3> A{};
  cplx theta{};
  double fidelity_lower = 1.0;  // Phi_k
  double fidelity = 1.0;        // Phi_{k+q}
  bool degenerate = false;
};

// `eta` pins the modulation frequency; by default the local resonant value is used.
RateEntry compute_rates(const HamiltonianModel& model, const DressedSpectrum& spectrum, int k, int q,
                        std::optional<double> eta = std::nullopt);

// ---- parameter sweeps ------------------------------------------------------

struct SweepConfig {
  BasisSpec basis;
  SystemParams params;
  ChiMode chi_mode = ChiMode::Exact;
  CouplingForm coupling = CouplingForm::Full;
  std::string parameter = "E1";  // any key accepted by set_param()
  double start = 0.0;
  double stop = 1.0;
  int points = 2;
  std::vector<int> ks{0};
  int q = 4;
  bool pin_eta = false;
  // 0 -> hardware concurrency, capped by the CASIMIR_THREADS environment variable.
  int threads = 0;
  LabelOptions labels;
};

struct RateRow {
  double grid_value = 0.0;
  bool ok = true;
  std::string error;
  std::vector<RateEntry> entries;  // one per configured k
};

struct RateTable {
  SweepConfig config;
  std::vector<double> grid;
  std::vector<RateRow> rows;
};

std::vector<double> linspace(double start, double stop, int points);

// Rows are computed independently (possibly in parallel) and stored by grid
// index. Per-point failures are recorded in the row, never thrown.
RateTable sweep(const SweepConfig& config);

// Evaluates one sweep point (exposed for refinement searches).
RateRow sweep_point(const SweepConfig& config, double value);

// Golden-section search for the minimum of f on [lo, hi].
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double xtol = 1e-7);

// Number of worker threads honoring CASIMIR_THREADS.
int sweep_thread_count(int requested);

// Sets a named physical parameter (nu, eps, eta, E1, E2, g1..g3,
// eps_tilde1..3, phi1..3). Throws ValidationError for unknown names.
void set_param(SystemParams& p, const std::string& name, double value);
double get_param(const SystemParams& p, const std::string& name);
const std::vector<std::string>& param_names();

}  // namespace dce
