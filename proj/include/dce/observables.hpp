#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "dce/hilbert.hpp"

namespace dce {

// Photon-number distribution p(m), m = 0..n_max, traced over the atom.
Eigen::VectorXd fock_probs(const BasisSpec& basis, const Eigen::VectorXcd& psi);
Eigen::VectorXd fock_probs(const BasisSpec& basis, const Eigen::MatrixXcd& rho);

// P_a(k) for every atomic level, traced over the field.
Eigen::VectorXd atom_populations(const BasisSpec& basis, const Eigen::VectorXcd& psi);
Eigen::VectorXd atom_populations(const BasisSpec& basis, const Eigen::MatrixXcd& rho);

// Population of each bare product state |level, photons>.
Eigen::VectorXd bare_populations(const Eigen::VectorXcd& psi);
Eigen::VectorXd bare_populations(const Eigen::MatrixXcd& rho);

double mean_n(const Eigen::VectorXd& fock);
// Mandel Q = (<(dn)^2> - <n>) / <n>; empty when <n> < 1e-12.
std::optional<double> mandel_q(const Eigen::VectorXd& fock);

template <class State>
double mean_n(const BasisSpec& basis, const State& s) {
  return mean_n(fock_probs(basis, s));
}
template <class State>
std::optional<double> mandel_q(const BasisSpec& basis, const State& s) {
  return mandel_q(fock_probs(basis, s));
}

// Index of the first local maximum of `values` that stands out: it is the
// largest value within +/- `half_window` samples and reaches at least
// `min_fraction` of the global maximum. Empty if none exists.
std::optional<std::size_t> first_prominent_maximum(std::span<const double> values, std::size_t half_window,
                                                   double min_fraction = 0.5);

}  // namespace dce
