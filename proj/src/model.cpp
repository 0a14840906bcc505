#include "dce/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dce/errors.hpp"

namespace dce {

std::array<int, 2> coupling_pair(int i) {
  switch (i) {
    case 1: return {0, 1};
    case 2: return {1, 2};
    case 3: return {0, 2};
    default: throw ValidationError("coupling index must be 1, 2 or 3, got " + std::to_string(i));
  }
}

SystemParams with_standard_dipole_modulation(SystemParams p) {
  p.eps_tilde[0] = p.g[0] * p.eps / (2.0 * p.nu);
  p.phi[0] = 0.0;
  return p;
}

std::vector<std::string> validate_params(const SystemParams& p, AtomKind atom) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.nu) || p.nu <= 0.0) throw ValidationError("nu must be a positive number");
  if (!finite(p.eps) || p.eps < 0.0) throw ValidationError("eps must be >= 0");
  if (!finite(p.eta) || p.eta < 0.0) throw ValidationError("eta must be >= 0");
  for (double e : p.E)
    if (!finite(e)) throw ValidationError("atomic energies must be finite");
  for (int i = 0; i < 3; ++i) {
    if (!finite(p.g[i]) || p.g[i] < 0.0)
      throw ValidationError("g" + std::to_string(i + 1) + " must be >= 0");
    if (!finite(p.eps_tilde[i]) || !finite(p.phi[i]))
      throw ValidationError("coupling modulation parameters must be finite");
  }
  if (atom == AtomKind::Qubit) {
    if (p.g[1] != 0.0 || p.g[2] != 0.0)
      throw ValidationError("qubit requires g2 = g3 = 0 (got g2=" + std::to_string(p.g[1]) +
                            ", g3=" + std::to_string(p.g[2]) + ")");
    if (p.eps_tilde[1] != 0.0 || p.eps_tilde[2] != 0.0)
      throw ValidationError("qubit requires eps_tilde2 = eps_tilde3 = 0");
  }
  const double ratio = p.eps / p.nu;
  if (ratio > 0.2)
    throw ValidationError("eps/nu = " + std::to_string(ratio) + " exceeds the weak-modulation limit 0.2");
  std::vector<std::string> warnings;
  if (ratio > 0.05)
    warnings.push_back("eps/nu = " + std::to_string(ratio) + " > 0.05: weak-modulation assumption is marginal");
  return warnings;
}

double omega_of_t(const SystemParams& p, double t) { return p.nu + p.eps * std::sin(p.eta * t); }

double chi_of_t(const SystemParams& p, double t, ChiMode mode) {
  const double num = p.eps * p.eta * std::cos(p.eta * t);
  if (mode == ChiMode::FirstOrder) return num / (4.0 * p.nu);
  return num / (4.0 * omega_of_t(p, t));
}

double coupling_of_t(const SystemParams& p, int i, double t) {
  coupling_pair(i);
  return p.g[i - 1] + p.eps_tilde[i - 1] * std::sin(p.eta * t + p.phi[i - 1]);
}

HamiltonianModel::HamiltonianModel(BasisSpec basis, SystemParams params, ChiMode chi_mode,
                                   CouplingForm coupling)
    : ops_(basis), params_(params), chi_mode_(chi_mode), coupling_(coupling) {
  warnings_ = validate_params(params_, basis.atom);
  const int dim = basis.dim();

  photons_.resize(dim);
  static_diag_.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const BareLabel l = basis.label(i);
    photons_(i) = l.photons;
    static_diag_(i) = params_.nu * l.photons + (l.level == 0 ? 0.0 : params_.E[l.level - 1]);
  }

  squeeze_ = ops_.a_dagger() * ops_.a_dagger() - ops_.a() * ops_.a();
  for (int i = 1; i <= 3; ++i) couplings_[i - 1] = coupling_term(i);

  // Union sparsity pattern of all off-diagonal terms.
  Eigen::MatrixXd mask = squeeze_.cwiseAbs();
  for (const auto& c : couplings_) mask += c.cwiseAbs();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (mask(r, c) != 0.0) trips.emplace_back(r, c, cplx{1.0, 0.0});
  pattern_.resize(dim, dim);
  pattern_.setFromTriplets(trips.begin(), trips.end());
  pattern_.makeCompressed();

  const Eigen::Index nnz = pattern_.nonZeros();
  for (auto& v : term_values_) v = Eigen::VectorXcd::Zero(nnz);
  for (int r = 0; r < dim; ++r) {
    for (auto k = pattern_.outerIndexPtr()[r]; k < pattern_.outerIndexPtr()[r + 1]; ++k) {
      const int c = pattern_.innerIndexPtr()[k];
      term_values_[0](k) = squeeze_(r, c);
      for (int i = 0; i < 3; ++i) term_values_[i + 1](k) = couplings_[i](r, c);
    }
  }
}

Eigen::MatrixXcd HamiltonianModel::coupling_term(int i) const {
  const int dim = basis().dim();
  const auto [k, l] = coupling_pair(i);
  if (l >= basis().levels()) return Eigen::MatrixXcd::Zero(dim, dim);
  if (params_.g[i - 1] == 0.0 && params_.eps_tilde[i - 1] == 0.0) return Eigen::MatrixXcd::Zero(dim, dim);
  if (coupling_ == CouplingForm::RotatingWave)
    return ops_.a() * ops_.sigma(l, k) + ops_.a_dagger() * ops_.sigma(k, l);
  return ops_.dipole(k, l);
}

Eigen::MatrixXcd HamiltonianModel::hamiltonian_at(double t) const {
  const double w = omega_of_t(params_, t);
  const double chi = chi_of_t(params_, t, chi_mode_);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(basis().dim(), basis().dim());
  h.diagonal() = (static_diag_ + (w - params_.nu) * photons_).cast<cplx>();
  h += cplx{0.0, chi} * squeeze_;
  for (int i = 1; i <= 3; ++i) h += coupling_of_t(params_, i, t) * couplings_[i - 1];
  return h;
}

Eigen::MatrixXcd HamiltonianModel::bare_hamiltonian() const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(basis().dim(), basis().dim());
  h.diagonal() = static_diag_.cast<cplx>();
  for (int i = 1; i <= 3; ++i) h += params_.g[i - 1] * couplings_[i - 1];
  return h;
}

bool HamiltonianModel::is_driven() const {
  if (params_.eta == 0.0) return false;
  if (params_.eps != 0.0) return true;
  for (double e : params_.eps_tilde)
    if (e != 0.0) return true;
  return false;
}

double HamiltonianModel::period() const {
  if (params_.eta == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi / params_.eta;
}

void HamiltonianModel::offdiagonal_at(double t, SparseMatrixC& out) const {
  const cplx c_sq{0.0, chi_of_t(params_, t, chi_mode_)};
  const double c1 = coupling_of_t(params_, 1, t);
  const double c2 = coupling_of_t(params_, 2, t);
  const double c3 = coupling_of_t(params_, 3, t);
  Eigen::Map<Eigen::VectorXcd> vals(out.valuePtr(), out.nonZeros());
  vals = c_sq * term_values_[0] + c1 * term_values_[1] + c2 * term_values_[2] + c3 * term_values_[3];
}

}  // namespace dce
