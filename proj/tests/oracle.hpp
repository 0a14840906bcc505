#pragma once

// Independent reference implementations used by the tests. Nothing here
// calls into the library's numerics: matrices are assembled element by
// element from bare labels and ODEs are stepped with classical RK4.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "dce/hilbert.hpp"
#include "dce/model.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline int idx(const dce::BasisSpec& b, int level, int n) { return level * (b.n_max + 1) + n; }

inline Mat annihilation(int n_max) {
  Mat a = Mat::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// Full-space field operator a, by explicit loops.
inline Mat field_a(const dce::BasisSpec& b) {
  Mat a = Mat::Zero(b.dim(), b.dim());
  for (int lv = 0; lv < b.levels(); ++lv)
    for (int n = 1; n <= b.n_max; ++n) a(idx(b, lv, n - 1), idx(b, lv, n)) = std::sqrt(double(n));
  return a;
}

inline double chi(const dce::SystemParams& p, double t, bool exact) {
  const double num = p.eps * p.eta * std::cos(p.eta * t);
  return exact ? num / (4.0 * (p.nu + p.eps * std::sin(p.eta * t))) : num / (4.0 * p.nu);
}

// H(t) written out entry by entry.
inline Mat hamiltonian(const dce::BasisSpec& b, const dce::SystemParams& p, double t, bool exact_chi = true,
                       bool counter_rotating = true) {
  const int L = b.levels(), N = b.n_max;
  Mat h = Mat::Zero(b.dim(), b.dim());
  const double w = p.nu + p.eps * std::sin(p.eta * t);
  const double x = chi(p, t, exact_chi);
  const double energy[3] = {0.0, p.E[0], p.E[1]};
  for (int lv = 0; lv < L; ++lv)
    for (int n = 0; n <= N; ++n) {
      h(idx(b, lv, n), idx(b, lv, n)) += w * n + energy[lv];
      if (n + 2 <= N) {
        const double s = std::sqrt((n + 1.0) * (n + 2.0));
        h(idx(b, lv, n + 2), idx(b, lv, n)) += cplx(0, x * s);   // i chi a^dag^2
        h(idx(b, lv, n), idx(b, lv, n + 2)) += cplx(0, -x * s);  // -i chi a^2
      }
    }
  const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  for (int i = 0; i < 3; ++i) {
    const int k = pairs[i][0], l = pairs[i][1];
    if (l >= L) continue;
    const double G = p.g[i] + p.eps_tilde[i] * std::sin(p.eta * t + p.phi[i]);
    for (int n = 0; n < N; ++n) {
      const double s = std::sqrt(n + 1.0);
      // a^dag sigma_{k,l}: |k, n+1> <l, n| and a sigma_{l,k}: |l, n> <k, n+1|
      h(idx(b, k, n + 1), idx(b, l, n)) += G * s;
      h(idx(b, l, n), idx(b, k, n + 1)) += G * s;
      // counter-rotating: a sigma_{k,l} and a^dag sigma_{l,k}
      if (counter_rotating) {
        h(idx(b, k, n), idx(b, l, n + 1)) += G * s;
        h(idx(b, l, n + 1), idx(b, k, n)) += G * s;
      }
    }
  }
  return h;
}

// Classical RK4 with a fixed step.
template <class State, class F>
State rk4(F&& f, State y, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const State k1 = f(t, y);
    const State k2 = f(t + h / 2, State(y + (h / 2) * k1));
    const State k3 = f(t + h / 2, State(y + (h / 2) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return y;
}

inline Vec schrodinger(const dce::BasisSpec& b, const dce::SystemParams& p, Vec psi, double t0, double t1,
                       int steps) {
  auto f = [&](double t, const Vec& y) -> Vec { return cplx(0, -1) * (hamiltonian(b, p, t) * y); };
  return rk4(f, psi, t0, t1, steps);
}

// Lindblad equation on the vectorized density matrix (column stacking):
// vec(A X B) = (B^T kron A) vec(X).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct Jump {
  double rate;
  Mat op;
};

inline Mat liouvillian(const Mat& h, const std::vector<Jump>& jumps) {
  const Eigen::Index d = h.rows();
  const Mat id = Mat::Identity(d, d);
  Mat L = cplx(0, -1) * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& j : jumps) {
    const Mat odo = j.op.adjoint() * j.op;
    L += j.rate * (kron(j.op.conjugate(), j.op) - 0.5 * kron(id, odo) - 0.5 * kron(odo.transpose(), id));
  }
  return L;
}

inline Mat lindblad(const dce::BasisSpec& b, const dce::SystemParams& p, const std::vector<Jump>& jumps, Mat rho,
                    double t0, double t1, int steps) {
  const Eigen::Index d = rho.rows();
  Vec v = Eigen::Map<Vec>(rho.data(), d * d);
  auto f = [&](double t, const Vec& y) -> Vec { return liouvillian(hamiltonian(b, p, t), jumps) * y; };
  v = rk4(f, v, t0, t1, steps);
  return Eigen::Map<Mat>(v.data(), d, d);
}

// Jump operators of the zero-temperature master equation: a, sigma_{0,1},
// sigma_z = sigma_11 - sigma_00 with rate gamma_phi / 2.
inline std::vector<Jump> jumps(const dce::BasisSpec& b, double kappa, double gamma, double gamma_phi) {
  Mat s01 = Mat::Zero(b.dim(), b.dim()), sz = Mat::Zero(b.dim(), b.dim());
  for (int n = 0; n <= b.n_max; ++n) {
    s01(idx(b, 0, n), idx(b, 1, n)) = 1.0;
    sz(idx(b, 1, n), idx(b, 1, n)) = 1.0;
    sz(idx(b, 0, n), idx(b, 0, n)) = -1.0;
  }
  return {{kappa, field_a(b)}, {gamma, s01}, {gamma_phi / 2.0, sz}};
}

// Closed forms, typed in independently of the library.
inline double c4_far(double nu, double E1, double g, int k) {
  const double ladder = std::sqrt(std::tgamma(k + 5.0) / std::tgamma(k + 1.0));
  return 3.0 * std::pow(g, 4) * E1 * ladder /
         (nu * (nu * nu - E1 * E1) * (9.0 * nu * nu - E1 * E1));
}

// lambda_{0,k} to fourth order in g, away from the resonances.
inline double lambda_far4(double nu, double E1, double g, int k) {
  const double dm = nu - E1, dp = nu + E1, g2 = g * g;
  const double t2 = g2 * (k / dm - (k + 1) / dp);
  const double a = double(k) / (dm * dm) * ((k - 1) / (2 * nu) - k / dm + (k + 1) / dp);
  const double b = double(k + 1) / (dp * dp) * ((k + 2) / (2 * nu) + k / dm - (k + 1) / dp);
  return k * nu + t2 + g2 * g2 * (a - b);
}

inline double eta_near3nu(double nu, double g, int k) {
  const double r = g * g / (nu * nu);
  return 4.0 * nu - 3.0 * nu * r + 2.0 * nu * r * r + k * nu * r * r;
}

inline double beta(double nu, double E1, double g, int k) { return std::hypot(nu - E1, 2.0 * g * std::sqrt(double(k))); }

inline double ladder4(int k) { return std::sqrt(std::tgamma(k + 5.0) / std::tgamma(k + 1.0)); }

inline double pole(double nu, double E1, double g, int k) {
  return 4.0 * nu - beta(nu, E1, g, k + 4) - beta(nu, E1, g, k + 2);
}

inline double c_near(double nu, double E1, double g, int k) {
  const double d = nu - E1, D = pole(nu, E1, g, k);
  return std::pow(g, 4) / (4 * nu * d * d) * ladder4(k) *
         (2 * (1 + 8 * nu / d) / D - 3 / d - 2 / (3 * nu) - k / (4 * nu));
}

inline double a_near(double nu, double E1, double g, int k) {
  const double d = nu - E1, D = pole(nu, E1, g, k);
  return std::pow(g, 3) / (4 * nu * d * d) * ladder4(k) * (1 - 8 * nu / D);
}

inline double theta_near(double nu, double E1, double g, double eps, int k) {
  const double d = nu - E1, D = pole(nu, E1, g, k);
  return eps * std::pow(g, 4) / (8 * nu * d * d) * ladder4(k) *
         (2 * (8 * nu / d - 1) / D - 3 / d - 1 / (6 * nu) - k / (4 * nu));
}

// Two-level Rabi problem with coupling theta and detuning delta:
// peak transfer |theta|^2 / (|theta|^2 + delta^2 / 4).
inline double rabi_peak(double theta, double delta) {
  return theta * theta / (theta * theta + delta * delta / 4.0);
}

}  // namespace oracle
