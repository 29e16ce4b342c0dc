#include <doctest.h>

#include <cmath>
#include <set>

#include "ecsm/metrology.hpp"
#include "ecsm/optics.hpp"
#include "ecsm/schemes.hpp"

using namespace ecsm;

namespace {

// |<a|b>|^2 over the common support; the operands may carry different cutoffs.
double fidelity(const PureState& a, const PureState& b) {
  Complex s{};
  for (const auto& [occ, x] : a.amplitudes()) s += std::conj(x) * b.amplitude(occ);
  return std::norm(s);
}

double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
  std::set<FockIndex> all(a.basis.begin(), a.basis.end());
  all.insert(b.basis.begin(), b.basis.end());
  const std::vector<FockIndex> basis(all.begin(), all.end());
  return (embed(a, basis).matrix - embed(b, basis).matrix).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("beam splitter") {
  SUBCASE("identity at T = 1") {
    const PureState in = tensor(coherent_state(0.8), coherent_state(Complex(0.0, 0.3)));
    const PureState out = apply_beam_splitter(in, 0, 1, 1.0);
    CHECK(fidelity(in, out) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Hong-Ou-Mandel") {
    const PureState out = apply_beam_splitter(PureState::basis(FockIndex{1, 1}, {1, 1}), 0, 1, 0.5);
    CHECK(std::abs(out.amplitude(FockIndex{1, 1})) < 1e-15);
    CHECK(std::abs(out.amplitude(FockIndex{2, 0}) - kI / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(out.amplitude(FockIndex{0, 2}) - kI / std::sqrt(2.0)) < 1e-14);
  }
  SUBCASE("coherent closure") {
    const double a = 1.2, t = 0.3;
    const PureState out = apply_beam_splitter(tensor(coherent_state(a), PureState::vacuum({0})), 0, 1, t);
    const PureState ref = tensor(coherent_amplitudes(std::sqrt(t) * a, out.cutoff(0)),
                                 coherent_amplitudes(kI * std::sqrt(1 - t) * a, out.cutoff(1)));
    CHECK(std::abs(fidelity(out, ref) - 1.0) < 1e-10);
  }
  SUBCASE("unitarity") {
    PureState s(std::vector<int>{5, 5, 5});
    s.add(FockIndex{2, 1, 0}, Complex(0.6, 0.0));
    s.add(FockIndex{0, 3, 4}, Complex(0.0, 0.48));
    s.add(FockIndex{5, 0, 1}, Complex(0.36, 0.0));
    s = s.normalized();
    for (double t : {0.0, 0.1, 0.5, 0.77})
      CHECK(std::abs(apply_beam_splitter(s, 2, 0, t).norm_squared() - 1.0) < 1e-12);
  }
}

TEST_CASE("quantum beam splitter") {
  const double r = 1.0 / std::sqrt(2.0);
  for (int n = 1; n <= 5; ++n) {
    const PureState in = PureState::basis(FockIndex{n, 0}, {n, n});
    const PureState once = apply_qbs(in, 0, 1);
    CHECK(std::abs(once.amplitude(FockIndex{n, 0}) - r) < 1e-15);
    CHECK(std::abs(once.amplitude(FockIndex{0, n}) - kI * r) < 1e-15);
    const PureState twice = apply_qbs(once, 0, 1);
    CHECK(std::abs(twice.amplitude(FockIndex{0, n}) - kI) < 1e-14);
    CHECK(std::abs(twice.amplitude(FockIndex{n, 0})) < 1e-14);
  }
  const PureState vac = apply_qbs(PureState::vacuum({1, 1}), 0, 1);
  CHECK(std::abs(vac.amplitude(FockIndex{0, 0}) - std::polar(1.0, kPi / 4.0)) < 1e-15);
  CHECK_THROWS_AS(apply_qbs(PureState::basis(FockIndex{1, 1}, {1, 1}), 0, 1), UnsupportedSector);

  // A coherent input becomes the theta = pi/2 ECS.
  const double a = std::sqrt(2.0);
  const std::vector<int> cut{40, 40};
  const PureState ecs = apply_qbs(tensor(coherent_amplitudes(a, 40), PureState::vacuum({40})), 0, 1);
  const PureState ref = entangled_coherent_state(a, kPi / 2.0).to_fock(cut);
  CHECK(std::abs(fidelity(ecs, ref) - 1.0) < 1e-10);
}

TEST_CASE("loss channel") {
  SUBCASE("eta = 1 keeps the state") {
    const PureState in = coherent_state(1.0);
    const WeightedEnsemble out = apply_loss(in, 0, 1.0);
    REQUIRE(out.branches.size() == 1);
    CHECK(out.branches[0].weight == doctest::Approx(1.0));
    CHECK(fidelity(in, out.branches[0].state) == doctest::Approx(1.0));
  }
  SUBCASE("single photon") {
    const double eta = 0.7;
    const WeightedEnsemble out = apply_loss(PureState::basis(FockIndex{1}, {1}), 0, eta);
    REQUIRE(out.branches.size() == 2);
    for (const auto& b : out.branches) {
      const bool kept = b.environment.at(0) == 0;
      CHECK(b.weight == doctest::Approx(kept ? eta : 1.0 - eta));
      CHECK(std::norm(b.state.amplitude(FockIndex{kept ? 1 : 0})) == doctest::Approx(1.0));
    }
  }
  SUBCASE("trace preserving") {
    for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0})
      CHECK(std::abs(apply_loss(coherent_state(1.5), 0, eta).total_weight() - 1.0) < 1e-10);
  }
  SUBCASE("coherent closure") {
    for (double a : {1.0, std::sqrt(2.0), 2.0})
      for (double eta : {0.5, 0.8}) {
        const PureState in = coherent_state(a);
        const DensityMatrix rho = to_density_matrix(apply_loss(in, 0, eta));
        const DensityMatrix ref = projector(coherent_amplitudes(std::sqrt(eta) * a, in.cutoff(0)));
        CHECK(max_abs_diff(rho, ref) < 1e-8);
        CHECK(rho.min_eigenvalue() > -1e-10);
      }
  }
  SUBCASE("commutes with phase") {
    const PureState in = apply_qbs(tensor(coherent_state(1.1), PureState::vacuum({31})), 0, 1);
    const WeightedEnsemble a = apply_loss(pure_ensemble(apply_phase(in, 0, 0.9)), 0, 0.6);
    WeightedEnsemble b = apply_loss(in, 0, 0.6);
    for (auto& br : b.branches) br.state = apply_phase(br.state, 0, 0.9);
    CHECK(max_abs_diff(to_density_matrix(a), to_density_matrix(b)) < 1e-9);
  }
}

TEST_CASE("circuits") {
  const double a = std::sqrt(2.0);
  const PureState in = tensor(coherent_amplitudes(a, 40), PureState::vacuum({40}));

  SUBCASE("empty circuit") {
    const WeightedEnsemble out = run_circuit(CircuitSpec{2, {}, "empty"}, in);
    REQUIRE(out.branches.size() == 1);
    CHECK(fidelity(out.branches[0].state, in) == doctest::Approx(1.0));
  }
  SUBCASE("QBS, phase, QBS fringes") {
    const double phi = 0.7;
    const CircuitSpec c{2, {QuantumBeamSplitter{0, 1}, PhaseShift{0, phi}, QuantumBeamSplitter{0, 1}}, ""};
    const PureState out = run_circuit(c, in).branches.at(0).state;
    const PureState coh = coherent_amplitudes(a, 40);
    for (int n = 1; n <= 6; ++n) {
      const double cn = std::abs(coh.amplitude(FockIndex{n}));
      CHECK(std::abs(out.amplitude(FockIndex{n, 0})) == doctest::Approx(cn * std::abs(std::sin(n * phi / 2))));
      CHECK(std::abs(out.amplitude(FockIndex{0, n})) == doctest::Approx(cn * std::abs(std::cos(n * phi / 2))));
    }
  }
  SUBCASE("total loss empties the probe mode") {
    const CircuitSpec c{2, {Loss{0, 0.0}}, ""};
    for (const auto& br : run_circuit(c, in).branches)
      for (const auto& [occ, amp] : br.state.amplitudes()) CHECK(occ[0] == 0);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS((CircuitSpec{2, {PhaseShift{2, 0.1}}, ""}.validate()), ModeOutOfRange);
    CHECK_THROWS_AS((CircuitSpec{2, {Loss{0, 1.5}}, ""}.validate()), InvalidParameter);
    CHECK_THROWS_AS((CircuitSpec{2, {BeamSplitter{1, 1, 0.5}}, ""}.validate()), Error);
  }
}

TEST_CASE("two-mode scheme outputs") {
  SchemeParams p;
  p.phi = 0.0;
  const OutcomeDistribution d = outcome_distribution(simulate_simple_scheme(p), 0.0);
  double bright = 0.0;
  for (const auto& [occ, prob] : d)
    if (occ[0] > 0) bright += prob;
  CHECK(bright < 1e-28);
  for (int n = 0; n < 8; ++n) {
    const auto it = d.find(FockIndex{0, n});
    REQUIRE(it != d.end());
    CHECK(it->second == doctest::Approx(std::exp(-2.0) * std::pow(2.0, n) / std::tgamma(n + 1.0)));
  }
  for (double phi : {0.0, kPi / 4.0, kPi / 2.0}) {
    p.phi = phi;
    const OutcomeDistribution dist = outcome_distribution(simulate_simple_scheme(p), 0.0);
    double both = 0.0;
    for (const auto& [occ, prob] : dist)
      if (occ[0] > 0 && occ[1] > 0) both += prob;
    CHECK(both == 0.0);
    CHECK(std::abs(total_probability(dist) - 1.0) < 1e-8);
  }
}

TEST_CASE("Fock and coherent backends agree") {
  SUBCASE("lossy two-mode scheme") {
    SchemeParams p;
    p.alpha0 = 1.0;
    p.eta = 0.8;
    p.phi = 0.6;
    const OutcomeDistribution fock = outcome_distribution(simulate_simple_scheme(p), 0.0);
    const Scheme s = simple_scheme(p);
    const CoherentMixture out = run_circuit(s.circuit, s.input);
    for (int n1 = 0; n1 <= 4; ++n1)
      for (int n2 = 0; n2 <= 4; ++n2) {
        const FockIndex k{n1, n2};
        const auto it = fock.find(k);
        const double pf = it == fock.end() ? 0.0 : it->second;
        CHECK(std::abs(pf - out.probability(k)) < 1e-10);
      }
  }
  SUBCASE("lossless long arm") {
    SchemeParams p;
    p.alpha0 = 0.3;
    p.alpha1 = 0.25;
    p.phi = 1.1;
    p.phi_ref = 0.4;
    for (MeasurementStage stage : {MeasurementStage::kReferenceHomodyne, MeasurementStage::kQbsThenHomodyne}) {
      const Scheme s = long_arm_scheme(p, long_arm_measurement(stage));
      const PureState fock_in = s.input.to_fock({6, 6, 6, 6});
      const OutcomeDistribution fock = outcome_distribution(run_circuit(s.circuit, fock_in), 0.0);
      const CoherentMixture out = run_circuit(s.circuit, s.input);
      double worst = 0.0;
      for (const auto& [k, pf] : fock)
        if (k.total() <= 3) worst = std::max(worst, std::abs(pf - out.probability(k)));
      CHECK(worst < 1e-9);
    }
  }
}
