#pragma once

// Adaptive Dormand-Prince 8(5,3) integrator for complex Eigen states.
//
// Coefficients and the step-size controller follow DOP853 by E. Hairer and
// G. Wanner (Solving Ordinary Differential Equations I, 2nd ed., Springer 1993).
// The state is any dense Eigen object (vector or matrix) with complex entries;
// the right-hand side is called as f(t, y, dydt).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dce/errors.hpp"

namespace dce::ode {

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000'000L;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

template <class State, class Rhs>
class Dop853 {
 public:
  Dop853(Rhs rhs, Tolerances tol) : rhs_(std::move(rhs)), tol_(tol) {}

  const Stats& stats() const { return stats_; }
  const Tolerances& tolerances() const { return tol_; }
  // Step size proposed for the next call (0 until the first step).
  double next_step() const { return h_; }

  // Advances (t, y) to t_end, landing exactly on t_end. Works in either time
  // direction. The last step proposal is kept for the next call.
  void integrate(double& t, State& y, double t_end) {
    if (t == t_end) return;
    const double dir = t_end > t ? 1.0 : -1.0;
    const double h_max = std::min(tol_.max_step, std::abs(t_end - t));
    k1_.resizeLike(y);
    rhs_(t, y, k1_);
    ++stats_.rhs_evals;
    if (h_ == 0.0 || (h_ > 0) != (dir > 0)) h_ = dir * initial_step(t, y, h_max, dir);

    double facold = 1e-4;
    bool reject = false;
    bool last = false;
    long steps = 0;
    while (true) {
      if (++steps > tol_.max_steps) throw IntegrationError("DOP853: step budget exhausted");
      double h = dir * std::min(std::abs(h_), tol_.max_step);
      if (0.1 * std::abs(h) <= std::abs(t) * std::numeric_limits<double>::epsilon()) {
        std::ostringstream msg;
        msg << "DOP853: step size underflow at t = " << t << " (h = " << h << ")";
        throw IntegrationError(msg.str());
      }
      if ((t + 1.01 * h - t_end) * dir > 0.0) {
        h = t_end - t;
        last = true;
      }
      const double err = step(t, y, h);
      const double fac11 = std::pow(err, kExpo);
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafe, 1.0 / kFac2, 1.0 / kFac1);
      double h_new = h / fac;
      if (err <= 1.0) {
        facold = std::max(err, 1e-4);
        ++stats_.accepted;
        y.swap(y_new_);
        t = last ? t_end : t + h;
        rhs_(t, y, k1_);
        ++stats_.rhs_evals;
        if (std::abs(h_new) > tol_.max_step) h_new = dir * tol_.max_step;
        if (reject) h_new = dir * std::min(std::abs(h_new), std::abs(h));
        reject = false;
        // Keep the controller's proposal unless the step was shortened only
        // to land on t_end.
        if (!last || std::abs(h_new) > std::abs(h_)) h_ = h_new;
        if (last) return;
      } else {
        h_new = h / std::min(1.0 / kFac1, fac11 / kSafe);
        reject = true;
        last = false;
        if (stats_.accepted >= 1) ++stats_.rejected;
        h_ = h_new;
      }
    }
  }

 private:
  static constexpr double kExpo = 1.0 / 8.0;
  static constexpr double kBeta = 0.0;
  static constexpr double kSafe = 0.9;
  static constexpr double kFac1 = 1.0 / 3.0;
  static constexpr double kFac2 = 6.0;

  double weighted_rms(const State& v, const State& scale_src) const {
    const auto w = (tol_.atol + tol_.rtol * scale_src.array().abs()).eval();
    return std::sqrt((v.array().abs() / w).square().sum() / static_cast<double>(v.size()));
  }

  double initial_step(double t, const State& y, double h_max, double dir) {
    const double d0 = weighted_rms(y, y);
    const double d1 = weighted_rms(k1_, y);
    double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, h_max);
    State y1 = y + dir * h0 * k1_;
    State f1;
    f1.resizeLike(y);
    rhs_(t + dir * h0, y1, f1);
    ++stats_.rhs_evals;
    const double d2 = weighted_rms((f1 - k1_).eval(), y) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 8.0);
    return std::min({100.0 * h0, h1, h_max});
  }

  // One DOP853 step of size h from (t, y); result in y_new_. Returns the
  // scaled error norm (accept if <= 1).
  double step(double t, const State& y, double h) {
    constexpr double c2 = 0.526001519587677318785587544488E-01,
                     c3 = 0.789002279381515978178381316732E-01,
                     c4 = 0.118350341907227396726757197510E+00,
                     c5 = 0.281649658092772603273242802490E+00,
                     c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                     c8 = 0.307692307692307692307692307692E+00,
                     c9 = 0.651282051282051282051282051282E+00, c10 = 0.6E+00,
                     c11 = 0.857142857142857142857142857142E+00;
    constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                     b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                     b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                     b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
    constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
                     a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
                     a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
                     a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
                     a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                     a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2,
                     a74 = 1.70252211019544039314978060272E-1, a75 = 6.02165389804559606850219397283E-2,
                     a76 = -1.7578125E-2;
    constexpr double a81 = 3.70920001185047927108779319836E-2, a84 = 1.70383925712239993810214054705E-1,
                     a85 = 1.07262030446373284651809199168E-1, a86 = -1.53194377486244017527936158236E-2,
                     a87 = 8.27378916381402288758473766002E-3, a91 = 6.24110958716075717114429577812E-1,
                     a94 = -3.36089262944694129406857109825E0, a95 = -8.68219346841726006818189891453E-1,
                     a96 = 2.75920996994467083049415600797E1, a97 = 2.01540675504778934086186788979E1,
                     a98 = -4.34898841810699588477366255144E1, a101 = 4.77662536438264365890433908527E-1,
                     a104 = -2.48811461997166764192642586468E0, a105 = -5.90290826836842996371446475743E-1,
                     a106 = 2.12300514481811942347288949897E1, a107 = 1.52792336328824235832596922938E1,
                     a108 = -3.32882109689848629194453265587E1, a109 = -2.03312017085086261358222928593E-2;
    constexpr double a111 = -9.3714243008598732571704021658E-1, a114 = 5.18637242884406370830023853209E0,
                     a115 = 1.09143734899672957818500254654E0, a116 = -8.14978701074692612513997267357E0,
                     a117 = -1.85200656599969598641566180701E1, a118 = 2.27394870993505042818970056734E1,
                     a119 = 2.49360555267965238987089396762E0, a1110 = -3.0467644718982195003823669022E0,
                     a121 = 2.27331014751653820792359768449E0, a124 = -1.05344954667372501984066689879E1,
                     a125 = -2.00087205822486249909675718444E0, a126 = -1.79589318631187989172765950534E1,
                     a127 = 2.79488845294199600508499808837E1, a128 = -2.85899827713502369474065508674E0,
                     a129 = -8.87285693353062954433549289258E0, a1210 = 1.23605671757943030647266201528E1,
                     a1211 = 6.43392746015763530355970484046E-1;
    constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                     bhh3 = 0.220588235294117647058823529412E-01;
    constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                     er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                     er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                     er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

    for (State* k : {&k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &k8_, &k9_, &k10_, &k11_, &k12_, &w_, &y_new_})
      k->resizeLike(y);

    auto eval = [&](double c, State& out) {
      rhs_(t + c * h, w_, out);
      ++stats_.rhs_evals;
    };
    w_ = y + h * a21 * k1_;
    eval(c2, k2_);
    w_ = y + h * (a31 * k1_ + a32 * k2_);
    eval(c3, k3_);
    w_ = y + h * (a41 * k1_ + a43 * k3_);
    eval(c4, k4_);
    w_ = y + h * (a51 * k1_ + a53 * k3_ + a54 * k4_);
    eval(c5, k5_);
    w_ = y + h * (a61 * k1_ + a64 * k4_ + a65 * k5_);
    eval(c6, k6_);
    w_ = y + h * (a71 * k1_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    eval(c7, k7_);
    w_ = y + h * (a81 * k1_ + a84 * k4_ + a85 * k5_ + a86 * k6_ + a87 * k7_);
    eval(c8, k8_);
    w_ = y + h * (a91 * k1_ + a94 * k4_ + a95 * k5_ + a96 * k6_ + a97 * k7_ + a98 * k8_);
    eval(c9, k9_);
    w_ = y + h * (a101 * k1_ + a104 * k4_ + a105 * k5_ + a106 * k6_ + a107 * k7_ + a108 * k8_ + a109 * k9_);
    eval(c10, k10_);
    w_ = y + h * (a111 * k1_ + a114 * k4_ + a115 * k5_ + a116 * k6_ + a117 * k7_ + a118 * k8_ +
                  a119 * k9_ + a1110 * k10_);
    eval(c11, k11_);
    w_ = y + h * (a121 * k1_ + a124 * k4_ + a125 * k5_ + a126 * k6_ + a127 * k7_ + a128 * k8_ +
                  a129 * k9_ + a1210 * k10_ + a1211 * k11_);
    eval(1.0, k12_);

    // k4_ is reused for the weighted increment.
    k4_ = b1 * k1_ + b6 * k6_ + b7 * k7_ + b8 * k8_ + b9 * k9_ + b10 * k10_ + b11 * k11_ + b12 * k12_;
    y_new_ = y + h * k4_;

    const auto scale = (tol_.atol + tol_.rtol * y.array().abs().max(y_new_.array().abs())).eval();
    const double err3 = ((k4_ - bhh1 * k1_ - bhh2 * k9_ - bhh3 * k12_).array().abs() / scale).square().sum();
    const double err5 = ((er1 * k1_ + er6 * k6_ + er7 * k7_ + er8 * k8_ + er9 * k9_ + er10 * k10_ +
                          er11 * k11_ + er12 * k12_)
                             .array()
                             .abs() /
                         scale)
                            .square()
                            .sum();
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err5 / std::sqrt(deno * static_cast<double>(y.size()));
  }

  Rhs rhs_;
  Tolerances tol_;
  Stats stats_;
  double h_ = 0.0;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, k11_, k12_, w_, y_new_;
};

template <class State, class Rhs>
Dop853<State, Rhs> make_dop853(Rhs rhs, Tolerances tol) {
  return Dop853<State, Rhs>(std::move(rhs), tol);
}

}  // namespace dce::ode
