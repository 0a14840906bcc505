#include "dce/observables.hpp"

#include <algorithm>

namespace dce {

Eigen::VectorXd bare_populations(const Eigen::VectorXcd& psi) { return psi.cwiseAbs2(); }

Eigen::VectorXd bare_populations(const Eigen::MatrixXcd& rho) { return rho.diagonal().real(); }

namespace {

Eigen::VectorXd fock_from_bare(const BasisSpec& basis, const Eigen::VectorXd& pop) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(basis.fock_dim());
  for (int s = 0; s < basis.levels(); ++s) p += pop.segment(s * basis.fock_dim(), basis.fock_dim());
  return p;
}

Eigen::VectorXd atom_from_bare(const BasisSpec& basis, const Eigen::VectorXd& pop) {
  Eigen::VectorXd p(basis.levels());
  for (int s = 0; s < basis.levels(); ++s) p(s) = pop.segment(s * basis.fock_dim(), basis.fock_dim()).sum();
  return p;
}

}  // namespace

Eigen::VectorXd fock_probs(const BasisSpec& basis, const Eigen::VectorXcd& psi) {
  return fock_from_bare(basis, bare_populations(psi));
}

Eigen::VectorXd fock_probs(const BasisSpec& basis, const Eigen::MatrixXcd& rho) {
  return fock_from_bare(basis, bare_populations(rho));
}

Eigen::VectorXd atom_populations(const BasisSpec& basis, const Eigen::VectorXcd& psi) {
  return atom_from_bare(basis, bare_populations(psi));
}

Eigen::VectorXd atom_populations(const BasisSpec& basis, const Eigen::MatrixXcd& rho) {
  return atom_from_bare(basis, bare_populations(rho));
}

double mean_n(const Eigen::VectorXd& fock) {
  double s = 0.0;
  for (Eigen::Index m = 0; m < fock.size(); ++m) s += static_cast<double>(m) * fock(m);
  return s;
}

std::optional<double> mandel_q(const Eigen::VectorXd& fock) {
  double n1 = 0.0, n2 = 0.0;
  for (Eigen::Index m = 0; m < fock.size(); ++m) {
    const double mm = static_cast<double>(m);
    n1 += mm * fock(m);
    n2 += mm * mm * fock(m);
  }
  if (n1 < 1e-12) return std::nullopt;
  return (n2 - n1 * n1 - n1) / n1;
}

std::optional<std::size_t> first_prominent_maximum(std::span<const double> values, std::size_t half_window,
                                                   double min_fraction) {
  if (values.empty()) return std::nullopt;
  const double global = *std::max_element(values.begin(), values.end());
  const double floor = min_fraction * global;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < floor) continue;
    const std::size_t lo = i > half_window ? i - half_window : 0;
    const std::size_t hi = std::min(values.size() - 1, i + half_window);
    bool is_max = true;
    for (std::size_t j = lo; j <= hi && is_max; ++j)
      if (values[j] > values[i]) is_max = false;
    if (is_max) return i;
  }
  return std::nullopt;
}

}  // namespace dce
