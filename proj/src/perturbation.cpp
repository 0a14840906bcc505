#include "dce/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "dce/errors.hpp"

namespace dce::perturbation {

namespace {

void check_k(int k) {
  if (k < 0) throw ValidationError("Fock index k must be >= 0");
}

// sqrt((k+4)! / k!)
double ladder4(int k) { return std::sqrt((k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0)); }

double nonzero(double den, double scale, const char* what) {
  if (std::abs(den) <= 1e-12 * scale) throw SingularityError(std::string(what) + " evaluated at a pole");
  return den;
}

double pole_denominator(double nu, double E1, double g1, int k) {
  const double d = degeneracy_detuning(nu, E1, g1, k);
  if (std::abs(d) < 1e-9 * nu) {
    std::ostringstream msg;
    msg << "4 nu - beta_{k+4} - beta_{k+2} = " << d << " at E1 = " << E1 << ", k = " << k
        << ": use the degenerate elements";
    throw DegeneracyError(msg.str());
  }
  return d;
}

}  // namespace

JCAuxiliaries aux(double nu, double E1, double g1, int k) {
  check_k(k);
  const double d = nu - E1;
  JCAuxiliaries r;
  r.beta = std::sqrt(d * d + 4.0 * g1 * g1 * k);
  const double den = 2.0 * g1 * std::sqrt(static_cast<double>(k));
  if (den == 0.0) {
    if (d == 0.0) throw SingularityError("theta_k undefined for E1 = nu with vanishing 2 g1 sqrt(k)");
    r.theta = d > 0.0 ? std::numbers::pi / 2.0 : 0.0;
  } else {
    r.theta = std::atan((d + r.beta) / den);
  }
  r.s = std::sin(r.theta);
  r.c = std::cos(r.theta);
  return r;
}

double c4_far(double nu, double E1, double g1, int k) {
  check_k(k);
  const double den = nu * (nu - E1) * (nu + E1) * (3.0 * nu - E1) * (3.0 * nu + E1);
  nonzero(den, std::pow(nu, 5), "c4_far");
  return 3.0 * std::pow(g1, 4) * E1 * ladder4(k) / den;
}

double lambda_far(double nu, double E1, double g1, int k) {
  check_k(k);
  const double m = nonzero(nu - E1, nu, "lambda_far");
  const double p = nonzero(nu + E1, nu, "lambda_far");
  const double second = g1 * g1 * (k / m - (k + 1.0) / p);
  const double fourth =
      std::pow(g1, 4) * (k / (m * m) * ((k - 1.0) / (2.0 * nu) - k / m + (k + 1.0) / p) -
                         (k + 1.0) / (p * p) * ((k + 2.0) / (2.0 * nu) + k / m - (k + 1.0) / p));
  return k * nu + second + fourth;
}

double degeneracy_detuning(double nu, double E1, double g1, int k) {
  return 4.0 * nu - aux(nu, E1, g1, k + 4).beta - aux(nu, E1, g1, k + 2).beta;
}

double degenerate_E1(double nu, double g1, int k, double lo, double hi) {
  double flo = degeneracy_detuning(nu, lo, g1, k);
  const double fhi = degeneracy_detuning(nu, hi, g1, k);
  if (flo * fhi > 0.0) throw DegeneracyError("no degeneracy in the given E1 interval");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * nu; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = degeneracy_detuning(nu, mid, g1, k);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double c_near(double nu, double E1, double g1, int k) {
  check_k(k);
  const double d = nonzero(nu - E1, nu, "c_near");
  const double D = pole_denominator(nu, E1, g1, k);
  const double pre = std::pow(g1, 4) / (4.0 * nu * d * d) * ladder4(k);
  return pre * (2.0 * (1.0 + 8.0 * nu / d) / D - 3.0 / d - 2.0 / (3.0 * nu) - k / (4.0 * nu));
}

double a_near(double nu, double E1, double g1, int k) {
  check_k(k);
  const double d = nonzero(nu - E1, nu, "a_near");
  const double D = pole_denominator(nu, E1, g1, k);
  const double pre = std::pow(g1, 3) / (4.0 * nu * d * d) * ladder4(k);
  return pre * (1.0 - 8.0 * nu / D);
}

double theta_near(double nu, double E1, double g1, double eps, int k) {
  check_k(k);
  const double d = nonzero(nu - E1, nu, "theta_near");
  const double D = pole_denominator(nu, E1, g1, k);
  const double pre = eps * std::pow(g1, 4) / (8.0 * nu * d * d) * ladder4(k);
  return pre * (2.0 * (8.0 * nu / d - 1.0) / D - 3.0 / d - 1.0 / (6.0 * nu) - k / (4.0 * nu));
}

DegenerateElements degenerate_elements(double nu, double E1, double g1, int k, double tol) {
  check_k(k);
  const double d = degeneracy_detuning(nu, E1, g1, k);
  if (std::abs(d) > tol) {
    std::ostringstream msg;
    msg << "not at a degeneracy: 4 nu - beta_{k+4} - beta_{k+2} = " << d << " (tolerance " << tol << ")";
    throw DegeneracyError(msg.str());
  }
  const double r = std::sqrt(k + 1.0);
  return {3.0 * g1 * r / (4.0 * std::numbers::sqrt2 * nu), r / std::numbers::sqrt2};
}

double theta_max_bound(double nu, double g1, double eps, int k) {
  check_k(k);
  return 5.0 * eps * g1 * std::sqrt(k + 1.0) / (8.0 * std::numbers::sqrt2 * nu);
}

double lambda_dispersive(double nu, double g1, int k) {
  check_k(k);
  const double g2 = g1 * g1;
  return -g2 / (4.0 * nu) + nu * (1.0 - 3.0 * g2 / (4.0 * nu * nu)) * k + g2 * g2 * k * k / (8.0 * std::pow(nu, 3));
}

double eta_k_near3nu(double nu, double g1, int k) {
  check_k(k);
  const double g2 = g1 * g1;
  return 4.0 * nu * (1.0 - 3.0 * g2 / (4.0 * nu * nu) + g2 * g2 / (2.0 * std::pow(nu, 4))) +
         g2 * g2 * k / std::pow(nu, 3);
}

double lambda_jc_branch(double nu, double E1, double g1, int k) {
  check_k(k);
  if (k == 1 || k == 2) throw ValidationError("lambda_jc_branch is defined for k = 0 and k > 2 only");
  const double g2 = g1 * g1;
  if (k == 0) {
    const auto a2 = aux(nu, E1, g1, 2);
    return -2.0 * g2 *
           (a2.c * a2.c / (3.0 * nu + E1 + a2.beta) + a2.s * a2.s / (3.0 * nu + E1 - a2.beta));
  }
  const auto am = aux(nu, E1, g1, k - 2);
  const auto a0 = aux(nu, E1, g1, k);
  const auto ap = aux(nu, E1, g1, k + 2);
  const double lower = a0.s * a0.s * (k - 1.0) *
                       (am.c * am.c / (4.0 * nu - a0.beta + am.beta) + am.s * am.s / (4.0 * nu - a0.beta - am.beta));
  const double upper = a0.c * a0.c * (k + 1.0) *
                       (ap.c * ap.c / (4.0 * nu + a0.beta + ap.beta) + ap.s * ap.s / (4.0 * nu + a0.beta - ap.beta));
  return nu * (k - 0.5) + E1 / 2.0 - a0.beta / 2.0 + 2.0 * g2 * (lower - upper);
}

bool is_strongly_dispersive(double nu, double E1, double g1, int k_max) {
  return std::abs(nu - E1) > g1 * std::sqrt(static_cast<double>(std::max(k_max, 0)));
}

}  // namespace dce::perturbation
