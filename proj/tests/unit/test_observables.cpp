#include "doctest.h"
#include "approx.hpp"

#include <cmath>
#include <vector>

#include "dce/dynamics.hpp"
#include "dce/observables.hpp"

using namespace dce;

TEST_SUITE("observables") {
  TEST_CASE("Fock state statistics") {
    const BasisSpec b{AtomKind::Qubit, 10};
    for (int m = 1; m <= 10; ++m) {
      const Eigen::VectorXcd psi = bare_state(b, {1, m});
      CHECK(mean_n(b, psi) == rel(m));
      const auto q = mandel_q(b, psi);
      REQUIRE(q);
      CHECK(*q == rel(-1.0));
    }
    CHECK_FALSE(mandel_q(b, bare_state(b, {0, 0})).has_value());
    CHECK_FALSE(mandel_q(b, bare_state(b, {1, 0})).has_value());
  }

  TEST_CASE("Poisson and geometric distributions") {
    const int N = 80;
    Eigen::VectorXd poisson(N + 1), geometric(N + 1);
    const double mu = 3.0, x = 0.4;
    for (int m = 0; m <= N; ++m) {
      poisson(m) = std::exp(-mu + m * std::log(mu) - std::lgamma(m + 1.0));
      geometric(m) = (1 - x) * std::pow(x, m);
    }
    CHECK(mean_n(poisson) == rel(mu).epsilon(1e-12));
    CHECK(std::abs(*mandel_q(poisson)) < 1e-10);
    const double gm = x / (1 - x);
    CHECK(mean_n(geometric) == rel(gm).epsilon(1e-12));
    CHECK(*mandel_q(geometric) == rel(gm).epsilon(1e-10));
  }

  TEST_CASE("partial traces of a pure state and its density matrix agree") {
    const BasisSpec b{AtomKind::CyclicQutrit, 6};
    Eigen::VectorXcd psi(b.dim());
    for (int i = 0; i < b.dim(); ++i) psi(i) = std::polar(1.0 + 0.1 * i, 0.7 * i);
    psi.normalize();
    const Eigen::MatrixXcd rho = pure_density(psi);
    CHECK((fock_probs(b, psi) - fock_probs(b, rho)).norm() < 1e-14);
    CHECK((atom_populations(b, psi) - atom_populations(b, rho)).norm() < 1e-14);
    CHECK((bare_populations(psi) - bare_populations(rho)).norm() < 1e-14);
    CHECK(fock_probs(b, psi).sum() == rel(1.0));
    CHECK(atom_populations(b, psi).size() == 3);
    for (int n = 0; n <= 6; ++n) {
      double p = 0.0;
      for (int lv = 0; lv < 3; ++lv) p += std::norm(psi(b.index(lv, n)));
      CHECK(fock_probs(b, psi)(n) == rel(p));
    }
    for (int lv = 0; lv < 3; ++lv) {
      double p = 0.0;
      for (int n = 0; n <= 6; ++n) p += std::norm(psi(b.index(lv, n)));
      CHECK(atom_populations(b, psi)(lv) == rel(p));
    }
  }

  TEST_CASE("first prominent maximum") {
    const std::vector<double> v{0.0, 0.2, 0.1, 1.0, 3.0, 2.0, 1.0, 4.0, 1.0};
    CHECK(first_prominent_maximum(v, 1, 0.5) == std::optional<std::size_t>(4));
    // the small bump at 1 is below half of the global maximum
    CHECK(first_prominent_maximum(v, 1, 0.01) == std::optional<std::size_t>(1));
    CHECK(first_prominent_maximum(v, 4, 0.5) == std::optional<std::size_t>(7));
    CHECK_FALSE(first_prominent_maximum(std::vector<double>{}, 3).has_value());

    std::vector<double> wave;
    for (int i = 0; i < 400; ++i) wave.push_back(std::sin(0.05 * i) * std::sin(0.05 * i) * (1 + 0.001 * i));
    const auto first = first_prominent_maximum(wave, 10);
    REQUIRE(first);
    CHECK(std::abs(double(*first) - 31.4) <= 1.0);
  }
}
