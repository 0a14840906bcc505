#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace dce {

using cplx = std::complex<double>;

enum class AtomKind { Qubit, CyclicQutrit };

int atom_levels(AtomKind kind);
std::string to_string(AtomKind kind);
AtomKind atom_kind_from_string(const std::string& name);

// Bare product state |level, photons>.
struct BareLabel {
  int level = 0;
  int photons = 0;
  friend bool operator==(const BareLabel&, const BareLabel&) = default;
};

std::string to_string(const BareLabel& label);

// Truncated Fock x atom space.
//
// States are ordered atom-major, photon-minor:
//   index(level, n) = level * (n_max + 1) + n
// Every module shares this ordering.
struct BasisSpec {
  AtomKind atom = AtomKind::Qubit;
  int n_max = 40;

  int levels() const { return atom_levels(atom); }
  int fock_dim() const { return n_max + 1; }
  int dim() const { return levels() * fock_dim(); }
  int index(int level, int photons) const { return level * fock_dim() + photons; }
  int index(const BareLabel& l) const { return index(l.level, l.photons); }
  BareLabel label(int index) const { return {index / fock_dim(), index % fock_dim()}; }
  bool contains(const BareLabel& l) const {
    return l.level >= 0 && l.level < levels() && l.photons >= 0 && l.photons <= n_max;
  }
};

// Single-mode annihilation operator on span{|0>, ..., |n_max>}.
Eigen::MatrixXd fock_annihilation(int n_max);

// Dense operators on the full space. Immutable after construction.
class OperatorSet {
 public:
  explicit OperatorSet(const BasisSpec& basis);

  const BasisSpec& basis() const { return basis_; }
  const Eigen::MatrixXcd& a() const { return a_; }
  const Eigen::MatrixXcd& a_dagger() const { return a_dagger_; }
  const Eigen::MatrixXcd& n_hat() const { return n_hat_; }

  // sigma(k, l) = |k><l| (atom) x identity (field).
  const Eigen::MatrixXcd& sigma(int k, int l) const;
  // D_{k,l} = (a + a^dagger)(sigma_{l,k} + sigma_{k,l}), k != l.
  const Eigen::MatrixXcd& dipole(int k, int l) const;

 private:
  BasisSpec basis_;
  Eigen::MatrixXcd a_, a_dagger_, n_hat_;
  std::vector<Eigen::MatrixXcd> sigma_;
  std::vector<Eigen::MatrixXcd> dipole_;
};

// Validates n_max >= 4 and builds the operator set.
OperatorSet build_operators(const BasisSpec& basis);

}  // namespace dce
