#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <string>
#include <vector>

#include "dce/hilbert.hpp"

namespace dce {

// Physical parameters in units where hbar = 1. Frequencies are usually given
// in units of nu (nu = 1), but nu is kept explicit in every formula.
struct SystemParams {
  double nu = 1.0;
  double eps = 0.0;                        // modulation depth of omega(t)
  double eta = 4.0;                        // modulation frequency
  std::array<double, 2> E{3.0, 0.0};       // E1, E2 (E0 = 0)
  std::array<double, 3> g{0.0, 0.0, 0.0};  // g1 <-> (0,1), g2 <-> (1,2), g3 <-> (0,2)
  std::array<double, 3> eps_tilde{0.0, 0.0, 0.0};
  std::array<double, 3> phi{0.0, 0.0, 0.0};

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

// Atomic pair (k, l), k < l, coupled by g_i for i = 1, 2, 3.
std::array<int, 2> coupling_pair(int i);

// Sets eps_tilde1 = g1 * eps / (2 nu) and phi1 = 0, the first-order coupling
// modulation of a dipole qubit whose coupling scales as sqrt(omega).
SystemParams with_standard_dipole_modulation(SystemParams p);

// Throws ValidationError on hard violations and returns soft warnings
// (eps / nu above 0.05).
std::vector<std::string> validate_params(const SystemParams& p, AtomKind atom);

enum class ChiMode { Exact, FirstOrder };

// Test-only switch: RotatingWave keeps a sigma_{l,k} + a^dagger sigma_{k,l}
// (k < l) in every coupling and drops the counter-rotating partners.
enum class CouplingForm { Full, RotatingWave };

double omega_of_t(const SystemParams& p, double t);
double chi_of_t(const SystemParams& p, double t, ChiMode mode);
double coupling_of_t(const SystemParams& p, int i, double t);

using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

class HamiltonianModel {
 public:
  HamiltonianModel(BasisSpec basis, SystemParams params, ChiMode chi_mode = ChiMode::Exact,
                   CouplingForm coupling = CouplingForm::Full);

  const BasisSpec& basis() const { return ops_.basis(); }
  const OperatorSet& ops() const { return ops_; }
  const SystemParams& params() const { return params_; }
  ChiMode chi_mode() const { return chi_mode_; }
  CouplingForm coupling_form() const { return coupling_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // H(t) / hbar = omega n + i chi (a^dag^2 - a^2) + sum_k E_k sigma_kk + sum G_kl(t) D_kl
  Eigen::MatrixXcd hamiltonian_at(double t) const;
  // H(t) with eps = chi = eps_tilde = 0.
  Eigen::MatrixXcd bare_hamiltonian() const;

  // True when H depends on time at all.
  bool is_driven() const;
  double period() const;

  // Fast path used by the integrators: H(t) = diag(static_diagonal)
  //   + (omega(t) - nu) diag(photon_numbers) + offdiag(t).
  const Eigen::VectorXd& static_diagonal() const { return static_diag_; }
  const Eigen::VectorXd& photon_numbers() const { return photons_; }
  // Writes the time-dependent off-diagonal part into `out` (fixed pattern).
  void offdiagonal_at(double t, SparseMatrixC& out) const;
  const SparseMatrixC& offdiagonal_pattern() const { return pattern_; }

  // out = H(t) x, for a vector or a matrix of column vectors.
  template <class Derived>
  Eigen::MatrixXcd apply(double t, const Eigen::MatrixBase<Derived>& x) const {
    SparseMatrixC off = pattern_;
    offdiagonal_at(t, off);
    const double dw = omega_of_t(params_, t) - params_.nu;
    Eigen::VectorXd diag = static_diag_ + dw * photons_;
    Eigen::MatrixXcd out = off * x;
    out.noalias() += diag.cast<cplx>().asDiagonal() * x;
    return out;
  }

 private:
  Eigen::MatrixXcd coupling_term(int i) const;

  OperatorSet ops_;
  SystemParams params_;
  ChiMode chi_mode_;
  CouplingForm coupling_;
  std::vector<std::string> warnings_;

  Eigen::VectorXd static_diag_;
  Eigen::VectorXd photons_;
  Eigen::MatrixXcd squeeze_;  // a^dag^2 - a^2
  std::array<Eigen::MatrixXcd, 3> couplings_;
  SparseMatrixC pattern_;
  // Values of each term on the pattern: [0] squeeze, [1..3] couplings.
  std::array<Eigen::VectorXcd, 4> term_values_;
};

}  // namespace dce
