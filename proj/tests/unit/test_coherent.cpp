#include <doctest.h>

#include <cmath>
#include <map>

#include "ecsm/coherent.hpp"
#include "ecsm/long_arm_model.hpp"
#include "ecsm/optics.hpp"
#include "ecsm/schemes.hpp"

using namespace ecsm;

TEST_CASE("ECS normalization") {
  CHECK(ecs_normalization(std::sqrt(2.0), kPi / 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(ecs_normalization(std::sqrt(2.0), 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0)))));
  for (double theta : {0.0, kPi / 2.0, kPi})
    CHECK(entangled_coherent_state(1.0, theta).trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("product state Fock expansion") {
  const CoherentMixture m = CoherentMixture::product({Complex(0.9, 0.2)});
  const PureState f = m.to_fock(m.default_cutoffs());
  const PureState ref = coherent_state(Complex(0.9, 0.2));
  REQUIRE(f.cutoffs() == ref.cutoffs());
  CHECK(std::abs(std::abs(inner_product(f, ref)) - 1.0) < 1e-12);
}

TEST_CASE("loss on a single coherent term stays pure") {
  const CoherentMixture lossy = apply_loss(CoherentMixture::product({2.0, 0.0}), 0, 0.5).simplified();
  CHECK(lossy.is_pure());
  REQUIRE(lossy.terms().size() == 1);
  CHECK(std::abs(lossy.terms()[0].amplitudes[0] - std::sqrt(0.5) * 2.0) < 1e-14);
}

TEST_CASE("outcome probabilities sum to one") {
  SchemeParams p;
  p.alpha0 = 1.0;
  p.eta = 0.7;
  p.phi = 0.4;
  const Scheme s = simple_scheme(p);
  const CoherentMixture out = run_circuit(s.circuit, s.input);
  double total = 0.0;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) total += out.probability(FockIndex{a, b});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("long-arm branch decomposition") {
  SchemeParams p;
  p.eta = 0.8;
  p.phi = 0.3;
  for (double a : {1.0, std::sqrt(2.0), 2.0}) {
    p.alpha0 = a;
    p.alpha1 = 1.5 * a;
    const Scheme s = long_arm_scheme(p, long_arm_measurement(MeasurementStage::kQbsThenHomodyne));
    const CoherentMixture out = run_circuit(s.circuit, s.input);
    const auto ens = out.decompose();
    CHECK(std::abs(ens.branches.front().weight - std::exp(-a * a * 0.2)) < 1e-10);
    CHECK(std::abs(ens.total_weight() - out.trace()) < 1e-12);
    for (const auto& br : ens.branches) CHECK(br.state.trace() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("coherent model likelihoods and sampling") {
  SchemeParams p;
  p.alpha0 = 1.0;
  p.alpha1 = 1.5;
  p.ecs_theta = 0.0;
  p.eta = 0.8;
  const auto measurement = long_arm_measurement(MeasurementStage::kReferenceHomodyne);
  const MixtureFamily family = long_arm_family(p, measurement);
  const PhaseGrid grid = PhaseGrid::window(1.0, 1.0, 8);
  const CoherentModel model(family, grid);

  const FockIndex k{1, 0, 2, 1};
  std::vector<std::uint32_t> active(grid.size);
  for (std::uint32_t i = 0; i < grid.size; ++i) active[i] = i;
  std::vector<double> ll(grid.size);
  model.log_likelihood(k, active, ll);
  for (std::size_t i = 0; i < grid.size; ++i)
    CHECK(std::exp(ll[i]) == doctest::Approx(family(grid.at(i)).probability(k)).epsilon(1e-10));

  // Empirical frequencies of the rejection sampler.
  const auto sampler = model.sampler(grid.at(3));
  Rng rng = make_rng(7, 0);
  const int draws = 40000;
  std::map<FockIndex, int> counts;
  for (int i = 0; i < draws; ++i) ++counts[sampler->draw(rng)];
  int checked = 0;
  for (const auto& [outcome, c] : counts) {
    const double prob = sampler->probability(outcome);
    if (prob < 0.02) continue;
    const double sigma = std::sqrt(prob * (1 - prob) / draws);
    CHECK(std::abs(static_cast<double>(c) / draws - prob) < 5 * sigma);
    ++checked;
  }
  CHECK(checked >= 5);
}
