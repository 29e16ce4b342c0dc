#include "ecsm/schemes.hpp"

#include <algorithm>
#include <cmath>

namespace ecsm {

void SchemeParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidParameter("SchemeParams: eta must lie in [0, 1]");
  if (cutoff_override < 0) throw InvalidParameter("SchemeParams: cutoff override must be >= 0");
  for (double v : {alpha0.real(), alpha0.imag(), alpha1.real(), alpha1.imag(), ecs_theta, phi, phi_ref})
    if (!std::isfinite(v)) throw InvalidParameter("SchemeParams: non-finite parameter");
}

bool qbs_prepared(double ecs_theta) {
  return std::abs(std::remainder(ecs_theta - kPi / 2.0, kTwoPi)) < 1e-12;
}

//------------------------------------------------------------------------------
// Simple scheme
//------------------------------------------------------------------------------

CircuitSpec build_simple_scheme(const SchemeParams& params) {
  params.validate();
  CircuitSpec c;
  c.mode_count = 2;
  c.label = "simple";
  if (qbs_prepared(params.ecs_theta)) c.elements.emplace_back(QuantumBeamSplitter{0, 1});
  c.elements.emplace_back(PhaseShift{0, params.phi});
  if (params.eta < 1.0) {
    c.elements.emplace_back(Loss{0, params.eta});
    c.elements.emplace_back(Loss{1, params.eta});
  }
  c.elements.emplace_back(QuantumBeamSplitter{0, 1});
  return c;
}

CoherentMixture simple_scheme_input(const SchemeParams& params) {
  if (qbs_prepared(params.ecs_theta)) return CoherentMixture::product({params.alpha0, 0.0});
  return entangled_coherent_state(params.alpha0, params.ecs_theta);
}

Scheme simple_scheme(const SchemeParams& params) {
  return {build_simple_scheme(params), simple_scheme_input(params)};
}

CircuitSpec build_mach_zehnder(double phi, double eta) {
  CircuitSpec c;
  c.mode_count = 2;
  c.label = "mach-zehnder";
  c.elements.emplace_back(BeamSplitter{0, 1, 0.5});
  c.elements.emplace_back(PhaseShift{0, phi});
  if (eta < 1.0) {
    c.elements.emplace_back(Loss{0, eta});
    c.elements.emplace_back(Loss{1, eta});
  }
  c.elements.emplace_back(BeamSplitter{0, 1, 0.5});
  c.validate();
  return c;
}

PureState single_photon_input() { return PureState::basis(FockIndex{1, 0}, {1, 1}); }

PureState noon_input(int n) {
  if (n < 1) throw InvalidParameter("noon_input: photon number must be positive");
  return PureState::basis(FockIndex{n, 0}, {n, n});
}

WeightedEnsemble simulate_simple_scheme(const SchemeParams& params) {
  const Scheme s = simple_scheme(params);
  int c = 0;
  for (int m : s.input.default_cutoffs()) c = std::max(c, m);
  if (params.cutoff_override > 0) c = params.cutoff_override;
  return run_circuit(s.circuit, s.input.to_fock({c, c}));
}

WeightedEnsemble simulate_single_photon(double phi, double eta) {
  return run_circuit(build_mach_zehnder(phi, eta), single_photon_input());
}

WeightedEnsemble simulate_noon(int n, double phi, double eta) {
  SchemeParams p;
  p.ecs_theta = kPi / 2.0;
  p.phi = phi;
  p.eta = eta;
  return run_circuit(build_simple_scheme(p), noon_input(n));
}

//------------------------------------------------------------------------------
// Long-arm scheme
//------------------------------------------------------------------------------

std::string to_string(MeasurementStage stage) {
  switch (stage) {
    case MeasurementStage::kReferenceHomodyne:
      return "reference_homodyne";
    case MeasurementStage::kQbsThenHomodyne:
      return "qbs_homodyne";
  }
  return "unknown";
}

MeasurementStage measurement_stage_from_string(const std::string& name) {
  if (name == "reference_homodyne") return MeasurementStage::kReferenceHomodyne;
  if (name == "qbs_homodyne") return MeasurementStage::kQbsThenHomodyne;
  throw InvalidParameter("unknown measurement stage '" + name + "'");
}

std::vector<Element> long_arm_measurement(MeasurementStage stage) {
  std::vector<Element> m;
  if (stage == MeasurementStage::kQbsThenHomodyne) m.emplace_back(QuantumBeamSplitter{1, 2});
  m.emplace_back(BeamSplitter{0, 1, 0.5});
  m.emplace_back(BeamSplitter{2, 3, 0.5});
  return m;
}

CircuitSpec build_long_arm_scheme(const SchemeParams& params,
                                  const std::vector<Element>& measurement) {
  params.validate();
  CircuitSpec c;
  c.mode_count = 4;
  c.label = "long-arm";
  if (qbs_prepared(params.ecs_theta)) c.elements.emplace_back(QuantumBeamSplitter{1, 2});
  c.elements.emplace_back(PhaseShift{1, params.phi});
  c.elements.emplace_back(PhaseShift{2, params.phi_ref});
  if (params.eta < 1.0)
    for (std::size_t m = 0; m < 4; ++m) c.elements.emplace_back(Loss{m, params.eta});
  c.elements.insert(c.elements.end(), measurement.begin(), measurement.end());
  c.validate();
  return c;
}

CircuitSpec build_long_arm_scheme(const SchemeParams& params, MeasurementStage stage) {
  return build_long_arm_scheme(params, long_arm_measurement(stage));
}

CoherentMixture long_arm_input(const SchemeParams& params) {
  const Complex a0 = params.alpha0;
  const Complex a1 = params.alpha1;
  if (qbs_prepared(params.ecs_theta)) return CoherentMixture::product({a1, a0, 0.0, a1});
  const double n = ecs_normalization(a0, params.ecs_theta);
  return CoherentMixture(
      4, {CoherentTerm{n, {a1, a0, 0.0, a1}, {}},
          CoherentTerm{n * std::polar(1.0, params.ecs_theta), {a1, 0.0, a0, a1}, {}}});
}

Scheme long_arm_scheme(const SchemeParams& params, const std::vector<Element>& measurement) {
  return {build_long_arm_scheme(params, measurement), long_arm_input(params)};
}

}  // namespace ecsm
