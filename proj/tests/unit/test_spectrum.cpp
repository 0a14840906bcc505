#include "doctest.h"
#include "approx.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include "dce/errors.hpp"
#include "dce/spectrum.hpp"
#include "oracle.hpp"

using namespace dce;

namespace {

SystemParams qubit(double E1, double g1, double eps = 0.03) {
  SystemParams p;
  p.eps = eps;
  p.E = {E1, 0.0};
  p.g = {g1, 0.0, 0.0};
  return p;
}

SystemParams qutrit(double E1, double E2) {
  SystemParams p;
  p.eps = 0.03;
  p.eta = 5.0;
  p.E = {E1, E2};
  p.g = {0.06, 0.08, 0.04};
  return p;
}

const BasisSpec kQubit{AtomKind::Qubit, 40};

double abs_C(const SystemParams& p, int k, int q, const BasisSpec& b = kQubit) {
  const HamiltonianModel m(b, p);
  const DressedSpectrum s = dressed_spectrum(m);
  return std::abs(compute_rates(m, s, k, q).C);
}

}  // namespace

TEST_SUITE("spectrum") {
  TEST_CASE("decoupled qubit spectrum") {
    SystemParams p = qubit(2.5, 0.0);
    const BasisSpec b{AtomKind::Qubit, 6};
    const DressedSpectrum s = dressed_spectrum(HamiltonianModel(b, p));
    std::vector<double> expect;
    for (int k = 0; k <= 6; ++k) expect.insert(expect.end(), {double(k), 2.5 + k});
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < b.dim(); ++i) CHECK(std::abs(s.lambdas(i) - expect[i]) < 1e-12);
    for (int i = 0; i < b.dim(); ++i) CHECK(s.fidelity(i) == rel(1.0));
  }

  TEST_CASE("ground level is pushed down by the counter-rotating coupling") {
    // second order: lambda_00 = -g^2 / (nu + E1)
    const SystemParams p = qubit(2.968, 0.08);
    const DressedSpectrum s = dressed_spectrum(HamiltonianModel(kQubit, p));
    const double expect = -0.08 * 0.08 / (1.0 + 2.968);
    CHECK(s.lambdas(0) < 0.0);
    CHECK(s.eigenvalue({0, 0}) == rel(expect).epsilon(0.05));
  }

  TEST_CASE("trace, orthonormality, residuals and unique labels") {
    for (const SystemParams& p : {qubit(2.968, 0.08), qubit(2.2, 0.08), qutrit(3.105, 4.08)}) {
      const bool tri = p.g[1] != 0.0;
      const BasisSpec b{tri ? AtomKind::CyclicQutrit : AtomKind::Qubit, 30};
      const HamiltonianModel m(b, p);
      const Eigen::MatrixXcd h0 = m.bare_hamiltonian();
      const DressedSpectrum s = dressed_spectrum(m);
      CHECK(s.lambdas.sum() == rel(h0.trace().real()).epsilon(1e-12));
      CHECK((s.states.adjoint() * s.states - Eigen::MatrixXcd::Identity(b.dim(), b.dim())).norm() < 1e-10);
      for (int n = 0; n < b.dim(); ++n) {
        CHECK((h0 * s.states.col(n) - s.lambdas(n) * s.states.col(n)).norm() < 1e-10);
        Eigen::Index imax = 0;
        s.states.col(n).cwiseAbs().maxCoeff(&imax);
        CHECK(s.states(imax, n).imag() == 0.0);
        CHECK(s.states(imax, n).real() > 0.0);
      }
      for (int i = 1; i < b.dim(); ++i) CHECK(s.lambdas(i) >= s.lambdas(i - 1));
      std::vector<int> used = s.eigen_index_of_label;
      std::sort(used.begin(), used.end());
      CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
    }
  }

  TEST_CASE("non-Hermitian input is rejected") {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(10, 10);
    h(0, 1) = 1e-6;
    CHECK_THROWS_AS(diagonalize(h, {AtomKind::Qubit, 4}), ValidationError);
  }

  TEST_CASE("fidelity: hybridized at the three-photon resonance, bare far from it") {
    const double g1 = 0.08;
    auto phi4 = [&](double E1) {
      return dressed_spectrum(HamiltonianModel(kQubit, qubit(E1, g1))).fidelity_of({0, 4});
    };
    const double Emin = golden_section_minimize(phi4, 2.9, 3.05, 1e-7);
    CHECK(phi4(Emin) == rel(0.5).epsilon(0.1));
    CHECK(dressed_spectrum(HamiltonianModel(kQubit, qubit(Emin, g1))).is_degenerate({0, 4}));
    CHECK(phi4(2.3) > 0.95);
    CHECK(phi4(3.5) > 0.95);
  }

  TEST_CASE("label assignment is invariant under eigenvector phases") {
    const HamiltonianModel m({AtomKind::Qubit, 20}, qubit(2.98, 0.08));
    DressedSpectrum s = diagonalize(m.bare_hamiltonian(), m.basis());
    DressedSpectrum r = s;
    label_states(s);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    for (Eigen::Index c = 0; c < r.states.cols(); ++c) r.states.col(c) *= std::polar(1.0, u(rng));
    label_states(r);
    CHECK(r.eigen_index_of_label == s.eigen_index_of_label);
  }

  TEST_CASE("unresolved labels name the clash") {
    const HamiltonianModel m({AtomKind::Qubit, 20}, qubit(2.98, 0.08));
    DressedSpectrum s = diagonalize(m.bare_hamiltonian(), m.basis());
    label_states(s, LabelOptions{0.55, 0.9999});
    bool threw = false;
    for (int k = 0; k <= 20 && !threw; ++k) {
      try {
        s.eigen_index({0, k});
      } catch (const LabelError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("already assigned to") != std::string::npos);
      }
    }
    CHECK(threw);
    CHECK_THROWS_AS(s.eigen_index({0, 21}), LabelError);
    CHECK_THROWS_AS(diagonalize(m.bare_hamiltonian(), m.basis()).eigen_index({0, 0}), LabelError);
  }

  TEST_CASE("matrix elements vanish without coupling") {
    const HamiltonianModel m({AtomKind::Qubit, 12}, qubit(2.5, 0.0));
    const DressedSpectrum s = dressed_spectrum(m);
    CHECK(std::abs(matrix_element_C(s, m.ops(), {0, 0}, {0, 4}, 4.0)) == 0.0);
    CHECK(std::abs(matrix_element_A(s, m.ops(), {0, 0}, {0, 4}, 0, 1)) == 0.0);
  }

  TEST_CASE("C matches the far-resonance closed form") {
    CHECK(std::abs(oracle::c4_far(1.0, 2.5, 0.08, 0)) == rel(1.04e-4).epsilon(0.01));
    CHECK(abs_C(qubit(2.5, 0.08), 0, 4) == rel(std::abs(oracle::c4_far(1.0, 2.5, 0.08, 0))).epsilon(0.25));
    for (double g1 : {0.01, 0.02, 0.03})
      for (double E1 : {1.8, 2.0, 2.3, 2.5, 3.6, 4.0})
        for (int k : {0, 4}) {
          const double exact = abs_C(qubit(E1, g1), k, 4);
          CHECK(exact == rel(std::abs(oracle::c4_far(1.0, E1, g1, k))).epsilon(0.10));
        }
  }

  TEST_CASE("A and Theta track the near-resonance closed forms") {
    const double g1 = 0.08;
    // at g1 = 0.08 the closed forms hold to 25% up to E1 ~ 2.93; closer to the
    // crossing the exact elements run several times larger
    for (double E1 : {2.9, 2.91, 2.92}) {
      SystemParams p = with_standard_dipole_modulation(qubit(E1, g1));
      const HamiltonianModel m(kQubit, p);
      const DressedSpectrum s = dressed_spectrum(m);
      const RateEntry r = compute_rates(m, s, 0, 4);
      CHECK(std::abs(r.A[0]) == rel(std::abs(oracle::a_near(1.0, E1, g1, 0))).epsilon(0.25));
      CHECK(std::abs(r.theta) ==
            rel(std::abs(oracle::theta_near(1.0, E1, g1, 0.03, 0))).epsilon(0.25));
    }
  }

  TEST_CASE("dipole element at the exact degeneracy") {
    const double g1 = 0.08;
    for (int k : {0, 4}) {
      auto phi = [&](double E1) {
        return dressed_spectrum(HamiltonianModel(kQubit, qubit(E1, g1))).fidelity_of({0, k + 4});
      };
      const double Ed = golden_section_minimize(phi, 2.9, 3.02, 1e-8);
      const HamiltonianModel m(kQubit, qubit(Ed, g1));
      const DressedSpectrum s = dressed_spectrum(m);
      const double expect = std::sqrt(k + 1.0) / std::sqrt(2.0);
      CHECK(std::abs(matrix_element_A(s, m.ops(), {0, k}, {0, k + 4}, 0, 1)) == rel(expect).epsilon(0.1));
    }
  }

  TEST_CASE("Theta") {
    const SystemParams p = qubit(2.5, 0.08);
    const std::array<cplx, 3> A{cplx(0.3, 0.1), cplx(0.2, 0.0), cplx(0.0, 0.0)};
    const cplx C(1e-4, 2e-5);
    CHECK(std::abs(transition_rate_theta(p, C, A) - 0.015 * C) < 1e-18);
    SystemParams q = p;
    q.eps_tilde = {0.0012, 0.0, 0.0};
    q.phi = {0.5, 0.0, 0.0};
    const cplx expect = 0.5 * 0.03 * (C + (0.0012 * std::polar(1.0, 0.5) / 0.03) * A[0]);
    CHECK(std::abs(transition_rate_theta(q, C, A) - expect) < 1e-18);
    SystemParams z = q;
    z.eps = 0.0;
    CHECK_THROWS_AS(transition_rate_theta(z, C, A), ValidationError);
    z.eps_tilde = {0, 0, 0};
    CHECK(transition_rate_theta(z, C, A) == cplx(0.0, 0.0));
  }

  TEST_CASE("|A_mn| = |A_nm|") {
    const HamiltonianModel m({AtomKind::CyclicQutrit, 20}, qutrit(3.105, 4.08));
    const DressedSpectrum s = dressed_spectrum(m);
    for (auto [k, l] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}})
      for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 12; ++b)
          CHECK(std::abs(matrix_element_A(s, m.ops(), {0, a}, {0, b}, k, l)) ==
                rel(std::abs(matrix_element_A(s, m.ops(), {0, b}, {0, a}, k, l))).epsilon(1e-10));
  }

  TEST_CASE("resonant modulation frequencies") {
    const DressedSpectrum s0 = dressed_spectrum(HamiltonianModel({AtomKind::Qubit, 20}, qubit(2.968, 0.0)));
    CHECK(resonant_modulation_frequency(s0, 0, 4) == rel(4.0).epsilon(1e-14));
    CHECK(resonant_modulation_frequency(s0, 2, 5) == rel(5.0).epsilon(1e-14));
    CHECK_THROWS_AS(resonant_modulation_frequency(s0, 0, 3), ValidationError);

    const double g1 = 0.08, E1 = 2.99;
    const DressedSpectrum s = dressed_spectrum(HamiltonianModel(kQubit, qubit(E1, g1)));
    CHECK(std::abs(resonant_modulation_frequency(s, 0, 4) - oracle::eta_near3nu(1.0, g1, 0)) < 1e-3);
  }

  TEST_CASE("qutrit five-photon element needs all three couplings") {
    const BasisSpec b{AtomKind::CyclicQutrit, 30};
    const double full = abs_C(qutrit(3.105, 4.08), 0, 5, b);
    CHECK(full > 1e-5);
    for (int i = 0; i < 3; ++i) {
      std::vector<double> vals;
      for (double scale : {1e-1, 1e-2, 1e-3}) {
        SystemParams p = qutrit(3.105, 4.08);
        p.g[i] *= scale;
        vals.push_back(abs_C(p, 0, 5, b));
      }
      CHECK(vals[1] < vals[0]);
      CHECK(vals[2] < vals[1]);
      CHECK(vals[2] < 1e-2 * full);
      SystemParams p = qutrit(3.105, 4.08);
      p.g[i] = 0.0;
      CHECK(abs_C(p, 0, 5, b) < 1e-12);
    }
  }

  TEST_CASE("sweep: rows, determinism and flagged failures") {
    SweepConfig cfg;
    cfg.basis = {AtomKind::Qubit, 30};
    cfg.params = qubit(2.5, 0.08);
    cfg.parameter = "E1";
    cfg.start = 2.8;
    cfg.stop = 3.1;
    cfg.points = 31;
    cfg.ks = {0, 4};
    cfg.threads = 1;
    const RateTable a = sweep(cfg);
    cfg.threads = 3;
    const RateTable b = sweep(cfg);
    REQUIRE(a.rows.size() == 31);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].ok);
      CHECK(a.rows[i].grid_value == b.rows[i].grid_value);
      CHECK(a.rows[i].entries[0].C == b.rows[i].entries[0].C);
      CHECK(a.rows[i].entries[1].theta == b.rows[i].entries[1].theta);
    }
    // only rows next to the level crossings fall below 0.95
    cfg.labels.min_overlap = 0.95;
    const RateTable c = sweep(cfg);
    const auto bad = std::count_if(c.rows.begin(), c.rows.end(), [](const RateRow& r) { return !r.ok; });
    CHECK(bad > 0);
    CHECK(bad < 31);
    cfg.points = 1;
    CHECK_THROWS_AS(sweep(cfg), ValidationError);
    cfg.points = 5;
    cfg.parameter = "E3";
    CHECK_THROWS_AS(sweep(cfg), ValidationError);
  }

  TEST_CASE("sweep without coupling gives zero C") {
    SweepConfig cfg;
    cfg.basis = {AtomKind::CyclicQutrit, 16};
    cfg.params = qutrit(3.105, 4.0);
    cfg.params.g = {0, 0, 0};
    cfg.parameter = "E2";
    cfg.start = 2.5;
    cfg.stop = 4.5;
    cfg.points = 9;
    cfg.q = 5;
    for (const RateRow& r : sweep(cfg).rows) {
      REQUIRE(r.ok);
      CHECK(std::abs(r.entries[0].C) == 0.0);
    }
  }

  TEST_CASE("C4 peak sits at the fidelity dip") {
    SweepConfig cfg;
    cfg.basis = kQubit;
    cfg.params = qubit(2.5, 0.08);
    cfg.start = 2.0;
    cfg.stop = 3.6;
    cfg.points = 161;
    cfg.ks = {0};
    const RateTable t = sweep(cfg);
    std::size_t ipeak = 0, idip = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (std::abs(t.rows[i].entries[0].C) > std::abs(t.rows[ipeak].entries[0].C)) ipeak = i;
      if (t.rows[i].entries[0].fidelity < t.rows[idip].entries[0].fidelity) idip = i;
    }
    CHECK(std::abs(t.grid[ipeak] - t.grid[idip]) <= 0.02);
  }

  TEST_CASE("thread cap from the environment") {
    setenv("CASIMIR_THREADS", "2", 1);
    CHECK(sweep_thread_count(8) == 2);
    CHECK(sweep_thread_count(1) == 1);
    setenv("CASIMIR_THREADS", "junk", 1);
    CHECK(sweep_thread_count(8) == 8);
    unsetenv("CASIMIR_THREADS");
  }

  TEST_CASE("named parameters") {
    SystemParams p;
    for (const auto& n : param_names()) {
      set_param(p, n, 0.125);
      CHECK(get_param(p, n) == 0.125);
    }
    CHECK_THROWS_AS(set_param(p, "g4", 1.0), ValidationError);
  }
}
