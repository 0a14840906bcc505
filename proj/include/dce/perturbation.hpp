#pragma once

// Closed-form perturbative results for the dispersive qubit (atom levels 0, 1,
// coupling g1). Frequencies in the same units as nu.

namespace dce::perturbation {

struct JCAuxiliaries {
  double beta = 0.0;
  double theta = 0.0;
  double s = 0.0;
  double c = 0.0;
};

// beta_k = sqrt((nu - E1)^2 + 4 g1^2 k), theta_k = arctan[(nu - E1 + beta_k) / (2 g1 sqrt(k))].
// The k = 0 (or g1 = 0) limit is pi/2 for E1 < nu and 0 for E1 > nu.
JCAuxiliaries aux(double nu, double E1, double g1, int k);

// Four-photon cavity element far from the three-photon resonance.
double c4_far(double nu, double E1, double g1, int k);

// Fourth-order dressed frequency lambda_{0,k} far from resonance.
double lambda_far(double nu, double E1, double g1, int k);

// 4 nu - beta_{k+4} - beta_{k+2}; vanishes at the three-photon degeneracy.
double degeneracy_detuning(double nu, double E1, double g1, int k);

// E1 solving degeneracy_detuning = 0, searched in [lo, hi].
double degenerate_E1(double nu, double g1, int k, double lo = 2.5, double hi = 3.5);

// Near-resonance (E1 ~ 3 nu) cavity element, dipole element and total rate
// of the standard dipole qubit.
double c_near(double nu, double E1, double g1, int k);
double a_near(double nu, double E1, double g1, int k);
double theta_near(double nu, double E1, double g1, double eps, int k);

struct DegenerateElements {
  double cavity = 0.0;  // |<phi_{0,k}| n + a^2 - a^dag^2 |phi^{+-}_{0,k+4}>|
  double dipole = 0.0;  // |<phi_{0,k}| D_{0,1} |phi^{+-}_{0,k+4}>|
};

// Values at the exact degeneracy. Throws DegeneracyError when
// |degeneracy_detuning| > tol.
DegenerateElements degenerate_elements(double nu, double E1, double g1, int k, double tol = 1e-3);

// 5 eps g1 sqrt(k+1) / (8 sqrt(2) nu).
double theta_max_bound(double nu, double g1, double eps, int k);

// lambda_{0,k} near E1 = 3 nu, and the resulting eta_k = lambda_{0,k+4} - lambda_{0,k}.
double lambda_dispersive(double nu, double g1, int k);
double eta_k_near3nu(double nu, double g1, int k);

// Second-order lambda_{0,k} in the Jaynes-Cummings basis; defined for k = 0
// and k > 2 only.
double lambda_jc_branch(double nu, double E1, double g1, int k);

// |nu - E1| > g1 sqrt(k_max).
bool is_strongly_dispersive(double nu, double E1, double g1, int k_max);

}  // namespace dce::perturbation
