#pragma once

#include <string>
#include <vector>

#include "ecsm/coherent.hpp"
#include "ecsm/optics.hpp"

namespace ecsm {

struct SchemeParams {
  Complex alpha0{1.4142135623730951, 0.0};  // probe amplitude
  Complex alpha1{1.4142135623730951, 0.0};  // reference amplitude (long arm)
  double ecs_theta = kPi / 2.0;             // relative phase of the ECS
  double phi = kPi / 4.0;                   // unknown phase
  double phi_ref = 0.0;                     // lower-middle path phase (long arm)
  double eta = 1.0;                         // transmission probability
  int cutoff_override = 0;                  // Fock cutoff for the two-mode scheme; 0 = automatic

  void validate() const;
};

// A theta = pi/2 ECS is what a QBS makes from |alpha,0>; schemes then include
// that QBS in the circuit. Any other theta is prepared directly as the input.
bool qbs_prepared(double ecs_theta);

// Scheme = circuit plus the coherent input that feeds it.
struct Scheme {
  CircuitSpec circuit;
  CoherentMixture input;
};

//------------------------------------------------------------------------------
// Simple two-mode scheme
//------------------------------------------------------------------------------

// QBS, Phase(0, phi), Loss(0, eta), Loss(1, eta), QBS. Loss elements are
// omitted at eta = 1; the first QBS is omitted when the ECS is prepared directly.
CircuitSpec build_simple_scheme(const SchemeParams& params);
CoherentMixture simple_scheme_input(const SchemeParams& params);
Scheme simple_scheme(const SchemeParams& params);

// Mach-Zehnder with ordinary 50:50 beam splitters, for single photons.
CircuitSpec build_mach_zehnder(double phi, double eta);

PureState single_photon_input();
// |n,0>; the first QBS of build_simple_scheme turns it into a NOON state.
PureState noon_input(int n);

// Fock-basis outputs of the two-mode schemes. The ECS input is expanded with
// a common cutoff on both modes so the QBS sectors are never clipped.
// params.cutoff_override, when positive, replaces the automatic cutoff.
WeightedEnsemble simulate_simple_scheme(const SchemeParams& params);
WeightedEnsemble simulate_single_photon(double phi, double eta);
// |n,0> through build_simple_scheme at theta = pi/2, i.e. a NOON probe.
WeightedEnsemble simulate_noon(int n, double phi, double eta);

//------------------------------------------------------------------------------
// Long-arm four-mode scheme
//------------------------------------------------------------------------------

// Modes: 0 upper reference, 1 upper probe path, 2 lower probe path, 3 lower
// reference.
enum class MeasurementStage {
  // 50:50 beam splitters (0,1) and (2,3): each probe path beats against its
  // reference.
  kReferenceHomodyne,
  // QBS on (1,2), then the two reference beam splitters.
  kQbsThenHomodyne,
};

std::string to_string(MeasurementStage stage);
MeasurementStage measurement_stage_from_string(const std::string& name);

std::vector<Element> long_arm_measurement(MeasurementStage stage);

CircuitSpec build_long_arm_scheme(const SchemeParams& params,
                                  MeasurementStage stage = MeasurementStage::kReferenceHomodyne);
CircuitSpec build_long_arm_scheme(const SchemeParams& params,
                                  const std::vector<Element>& measurement);

// |alpha1, alpha0, 0, alpha1> when QBS-prepared, otherwise
// |alpha1> (x) ECS(alpha0, theta) (x) |alpha1>.
CoherentMixture long_arm_input(const SchemeParams& params);

Scheme long_arm_scheme(const SchemeParams& params,
                       const std::vector<Element>& measurement);

}  // namespace ecsm
