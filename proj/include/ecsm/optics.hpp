#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ecsm/coherent.hpp"
#include "ecsm/fock.hpp"

namespace ecsm {

//------------------------------------------------------------------------------
// Elements
//------------------------------------------------------------------------------

struct PhaseShift {
  std::size_t mode = 0;
  double phi = 0.0;
};

// Symmetric convention: a^dag -> sqrt(T) a^dag + i sqrt(1-T) b^dag,
//                       b^dag -> i sqrt(1-T) a^dag + sqrt(T) b^dag.
struct BeamSplitter {
  std::size_t mode_i = 0;
  std::size_t mode_j = 1;
  double transmissivity = 0.5;
};

// Sector-wise 50:50 splitter between |n,0> and |0,n>:
// |n,0> -> (|n,0> + i|0,n>)/sqrt2, |0,n> -> (i|n,0> + |0,n>)/sqrt2, |0,0> -> e^{i pi/4}|0,0>.
struct QuantumBeamSplitter {
  std::size_t mode_i = 0;
  std::size_t mode_j = 1;
};

// Fictional beam splitter of transmissivity eta into a vacuum environment that
// is traced out.
struct Loss {
  std::size_t mode = 0;
  double eta = 1.0;
};

using Element = std::variant<PhaseShift, BeamSplitter, QuantumBeamSplitter, Loss>;

struct CircuitSpec {
  std::size_t mode_count = 0;
  std::vector<Element> elements;
  std::string label;

  // Throws ModeOutOfRange or InvalidParameter.
  void validate() const;
};

//------------------------------------------------------------------------------
// Fock backend
//------------------------------------------------------------------------------

PureState apply_phase(const PureState& state, std::size_t mode, double phi);

// Output cutoffs of both modes are set to the sum of the input cutoffs, the most
// photons the pair can hold.
PureState apply_beam_splitter(const PureState& state, std::size_t mode_i, std::size_t mode_j,
                              double transmissivity);

// Throws UnsupportedSector when a ket has photons in both modes.
PureState apply_qbs(const PureState& state, std::size_t mode_i, std::size_t mode_j);

// One branch per environment photon count, weight = probability of that count.
WeightedEnsemble apply_loss(const PureState& state, std::size_t mode, double eta);
WeightedEnsemble apply_loss(const WeightedEnsemble& ensemble, std::size_t mode, double eta);

WeightedEnsemble run_circuit(const CircuitSpec& circuit, const PureState& input);
WeightedEnsemble run_circuit(const CircuitSpec& circuit, const WeightedEnsemble& input);

//------------------------------------------------------------------------------
// Coherent backend
//------------------------------------------------------------------------------

CoherentMixture apply_phase(const CoherentMixture& state, std::size_t mode, double phi);
CoherentMixture apply_beam_splitter(const CoherentMixture& state, std::size_t mode_i,
                                    std::size_t mode_j, double transmissivity);
CoherentMixture apply_qbs(const CoherentMixture& state, std::size_t mode_i, std::size_t mode_j);
CoherentMixture apply_loss(const CoherentMixture& state, std::size_t mode, double eta);

CoherentMixture run_circuit(const CircuitSpec& circuit, const CoherentMixture& input);

}  // namespace ecsm
