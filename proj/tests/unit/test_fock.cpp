#include <doctest.h>

#include <cmath>

#include "ecsm/fock.hpp"

using namespace ecsm;

TEST_CASE("coherent amplitudes") {
  const PureState s = coherent_amplitudes(std::sqrt(2.0), 30);
  CHECK(std::abs(s.amplitude(FockIndex{0}) - std::exp(-1.0)) < 1e-14);
  CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
  CHECK(std::abs(s.amplitude(FockIndex{2}) - std::exp(-1.0) * 2.0 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("default cutoff and tail budget") {
  CHECK(default_cutoff(std::sqrt(2.0)) == 37);
  CHECK(default_cutoff(0.0) == 20);
  CHECK_THROWS_AS(coherent_amplitudes(3.0, 5), CutoffTooSmall);
  PureState s(std::vector<int>{2});
  CHECK_THROWS_AS(s.add(FockIndex{3}, 1.0), CutoffTooSmall);
}

TEST_CASE("inner products and overlaps") {
  const PureState n1 = PureState::basis(FockIndex{1}, {4});
  const PureState n2 = PureState::basis(FockIndex{2}, {4});
  CHECK(std::abs(inner_product(n1, n2)) == 0.0);
  CHECK(std::abs(inner_product(n1, n1) - 1.0) < 1e-12);

  const PureState plus = coherent_amplitudes(1.0, 30);
  const PureState minus = coherent_amplitudes(-1.0, 30);
  CHECK(std::abs(inner_product(plus, minus) - std::exp(-2.0)) < 1e-10);
  CHECK(std::abs(coherent_overlap(1.0, -1.0) - std::exp(-2.0)) < 1e-15);

  const Complex a(0.7, -0.4), b(-0.2, 1.1);
  CHECK(std::abs(coherent_overlap(a, a) - 1.0) < 1e-15);
  CHECK(std::abs(coherent_overlap(0.0, b) - std::exp(-std::norm(b) / 2.0)) < 1e-15);
  CHECK(std::abs(inner_product(coherent_amplitudes(a, 40), coherent_amplitudes(b, 40)) -
                 coherent_overlap(a, b)) < 1e-8);
}

TEST_CASE("tensor product") {
  const PureState v = PureState::vacuum({3});
  const PureState vv = tensor(v, v);
  CHECK(std::abs(vv.amplitude(FockIndex{0, 0}) - 1.0) < 1e-15);

  const double a = 1.3;
  const PureState s = tensor(coherent_state(a), PureState::vacuum({2}));
  for (int n = 0; n < 6; ++n) {
    const double ref = std::exp(-a * a / 2.0) * std::pow(a, n) / std::sqrt(std::tgamma(n + 1.0));
    CHECK(std::abs(s.amplitude(FockIndex{n, 0}) - ref) < 1e-14);
  }
  const PureState half = coherent_state(0.5).scaled(std::sqrt(0.5));
  CHECK(std::abs(tensor(half, half).norm_squared() - 0.25) < 1e-12);
}

TEST_CASE("density matrices") {
  WeightedEnsemble mix;
  mix.branches.push_back({0.5, PureState::basis(FockIndex{0}, {1}), {}});
  mix.branches.push_back({0.5, PureState::basis(FockIndex{1}, {1}), {}});
  const DensityMatrix rho = to_density_matrix(mix);
  REQUIRE(rho.dimension() == 2);
  CHECK(std::abs(rho.matrix(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(rho.matrix(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(rho.matrix(0, 1)) < 1e-15);

  const DensityMatrix pure = to_density_matrix(pure_ensemble(coherent_state(1.0)));
  CHECK(std::abs(pure.trace() - 1.0) < 1e-10);
  CHECK(pure.hermiticity_error() < 1e-14);
  CHECK(pure.min_eigenvalue() > -1e-10);

  // Reduced state of (|0,1> + |1,0>)/sqrt2 on mode 0 is maximally mixed.
  PureState bell(std::vector<int>{1, 1});
  bell.add(FockIndex{0, 1}, 1.0 / std::sqrt(2.0));
  bell.add(FockIndex{1, 0}, 1.0 / std::sqrt(2.0));
  const std::size_t mode0[] = {0};
  const DensityMatrix red = to_density_matrix(pure_ensemble(bell), mode0);
  REQUIRE(red.dimension() == 2);
  CHECK(std::abs(red.matrix(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(red.matrix(0, 1)) < 1e-15);

  CHECK_THROWS_AS(to_density_matrix(pure_ensemble(coherent_state(1.0)), 4), BasisTooLarge);
  CHECK_THROWS_AS(embed(rho, {FockIndex{0}}), BasisMismatch);
}
