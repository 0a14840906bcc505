#include "dce/hilbert.hpp"

#include <cmath>

#include "dce/errors.hpp"

namespace dce {

int atom_levels(AtomKind kind) { return kind == AtomKind::Qubit ? 2 : 3; }

std::string to_string(AtomKind kind) { return kind == AtomKind::Qubit ? "qubit" : "qutrit"; }

AtomKind atom_kind_from_string(const std::string& name) {
  if (name == "qubit") return AtomKind::Qubit;
  if (name == "qutrit" || name == "cyclic_qutrit") return AtomKind::CyclicQutrit;
  throw ValidationError("unknown atom kind '" + name + "' (expected qubit or qutrit)");
}

std::string to_string(const BareLabel& label) {
  return "|" + std::to_string(label.level) + "," + std::to_string(label.photons) + ">";
}

Eigen::MatrixXd fock_annihilation(int n_max) {
  if (n_max < 1) throw ValidationError("fock_annihilation: n_max must be >= 1");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

namespace {

int pair_slot(int levels, int k, int l) { return k * levels + l; }

}  // namespace

OperatorSet::OperatorSet(const BasisSpec& basis) : basis_(basis) {
  if (basis.n_max < 4) {
    throw ValidationError("n_max = " + std::to_string(basis.n_max) +
                          " cannot represent a 4-photon transition (need n_max >= 4)");
  }
  const int levels = basis.levels();
  const int nf = basis.fock_dim();
  const Eigen::MatrixXcd a1 = fock_annihilation(basis.n_max).cast<cplx>();
  const Eigen::MatrixXcd id_field = Eigen::MatrixXcd::Identity(nf, nf);

  auto kron_atom = [&](const Eigen::MatrixXcd& atom, const Eigen::MatrixXcd& field) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
    for (int i = 0; i < levels; ++i)
      for (int j = 0; j < levels; ++j)
        if (atom(i, j) != cplx{}) out.block(i * nf, j * nf, nf, nf) = atom(i, j) * field;
    return out;
  };

  const Eigen::MatrixXcd id_atom = Eigen::MatrixXcd::Identity(levels, levels);
  a_ = kron_atom(id_atom, a1);
  a_dagger_ = a_.adjoint();
  n_hat_ = a_dagger_ * a_;

  sigma_.resize(levels * levels);
  for (int k = 0; k < levels; ++k)
    for (int l = 0; l < levels; ++l) {
      Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(levels, levels);
      proj(k, l) = 1.0;
      sigma_[pair_slot(levels, k, l)] = kron_atom(proj, id_field);
    }

  const Eigen::MatrixXcd x = a_ + a_dagger_;
  dipole_.resize(levels * levels);
  for (int k = 0; k < levels; ++k)
    for (int l = 0; l < levels; ++l)
      if (k != l) dipole_[pair_slot(levels, k, l)] = x * (sigma(l, k) + sigma(k, l));
}

const Eigen::MatrixXcd& OperatorSet::sigma(int k, int l) const {
  const int levels = basis_.levels();
  if (k < 0 || l < 0 || k >= levels || l >= levels)
    throw ValidationError("sigma index out of range for " + to_string(basis_.atom));
  return sigma_[pair_slot(levels, k, l)];
}

const Eigen::MatrixXcd& OperatorSet::dipole(int k, int l) const {
  const int levels = basis_.levels();
  if (k == l || k < 0 || l < 0 || k >= levels || l >= levels)
    throw ValidationError("invalid dipole pair (" + std::to_string(k) + "," + std::to_string(l) +
                          ") for " + to_string(basis_.atom));
  return dipole_[pair_slot(levels, k, l)];
}

OperatorSet build_operators(const BasisSpec& basis) { return OperatorSet(basis); }

}  // namespace dce
