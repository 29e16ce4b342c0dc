#include <doctest.h>

#include <cmath>

#include "ecsm/fisher.hpp"
#include "ecsm/metrology.hpp"

using namespace ecsm;

TEST_CASE("NOON states reach the Heisenberg limit") {
  for (int n = 2; n <= 6; ++n) {
    const QfiResult r = noon_qfi(n, 1.0);
    CHECK(std::abs(r.f_q - n * n) < 1e-6);
    CHECK(r.method == QfiMethod::kPureState);
  }
  CHECK(crb(4.0, 2.0 * 400 / 2) == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("lossy NOON keeps only the no-loss branch") {
  for (int n : {1, 2, 3})
    for (double eta : {0.6, 0.9}) {
      const QfiResult r = noon_qfi(n, eta);
      CHECK(r.method == QfiMethod::kSpectralSld);
      CHECK(r.f_q == doctest::Approx(std::pow(eta, n) * n * n).epsilon(1e-6));
    }
}

TEST_CASE("single photon") {
  CHECK(sp_qfi(1.0).f_q == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sp_qfi(0.8).f_q == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(crb(1.0, 800) == doctest::Approx(1.0 / std::sqrt(800.0)));
}

TEST_CASE("phase-independent families carry no information") {
  const PureState fixed = coherent_state(1.0);
  CHECK(std::abs(qfi_pure([&](double) { return fixed; }, 0.3).f_q) < 1e-10);
  const DensityMatrix rho = projector(fixed);
  CHECK(std::abs(qfi_mixed([&](double) { return rho; }, 0.3).f_q) < 1e-10);
}

TEST_CASE("spectral and pure-state QFI agree on pure families") {
  SchemeParams p;
  const auto state = [p](double phi) {
    SchemeParams q = p;
    q.phi = phi;
    return simulate_simple_scheme(q).branches.at(0).state;
  };
  const double pure = qfi_pure(state, 0.8).f_q;
  const double mixed = qfi_mixed([&](double phi) { return projector(state(phi)); }, 0.8).f_q;
  CHECK(pure == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(mixed == doctest::Approx(pure).epsilon(1e-6));
}

TEST_CASE("derivative step robustness") {
  const auto rho = [](double phi) { return to_density_matrix(simulate_noon(2, phi, 0.8)); };
  const double f1 = qfi_mixed(rho, 0.7, 1e-4).f_q;
  const double f2 = qfi_mixed(rho, 0.7, 5e-5).f_q;
  CHECK(std::abs(f1 - f2) / f1 < 1e-3);

  SchemeParams p;
  p.eta = 0.9;
  const auto ecs = [p](double phi) {
    SchemeParams q = p;
    q.phi = phi;
    return to_density_matrix(simulate_simple_scheme(q));
  };
  const double g1 = qfi_mixed(ecs, 0.5, 1e-4).f_q;
  const double g2 = qfi_mixed(ecs, 0.5, 5e-5).f_q;
  CHECK(std::abs(g1 - g2) / g1 < 1e-3);
}

TEST_CASE("lossy ECS degrades with loss") {
  SchemeParams p;
  double previous = ecs_qfi(p).f_q;
  for (double eta : {0.95, 0.9, 0.8, 0.6}) {
    p.eta = eta;
    const double f = ecs_qfi(p).f_q;
    CHECK(f < previous);
    previous = f;
  }
}

TEST_CASE("Cramer-Rao bound") {
  CHECK(crb(1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(crb(0.0, 10.0), ZeroInformation);
  CHECK(crb(2.0, 10.0) < crb(1.0, 10.0));
  CHECK(crb(1.0, 20.0) < crb(1.0, 10.0));
}

TEST_CASE("baselines") {
  SchemeParams p;
  CHECK(equivalent_noon_size(p) == 2);
  const BaselinePoint b = baseline_point(p, 400);
  CHECK(b.noon_n == 2);
  CHECK(b.mu_ecs == 400);
  CHECK(b.mu_noon == 400);
  CHECK(b.mu_sp == 800);
  CHECK(b.delta_phi_nf == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(b.delta_phi_sf == doctest::Approx(1.0 / std::sqrt(800.0)).epsilon(1e-9));
  CHECK(b.delta_phi_cf < b.delta_phi_nf);

  const auto rows = baseline_curves({1.0, 2.0}, {1.0, 0.8}, 400, kPi / 2, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].alpha0 == 1.0);
  CHECK(rows[1].eta == 0.8);
  CHECK(rows[2].alpha0 == 2.0);
}
