#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ecsm/fock.hpp"
#include "ecsm/types.hpp"

namespace ecsm {

struct CoherentTerm {
  Complex coeff;
  // One coherent amplitude per system mode.
  std::vector<Complex> amplitudes;
  // Amplitudes carried into traced-out loss modes, one per loss event.
  std::vector<Complex> environment;
};

/// Superposition (or environment-induced mixture) of coherent product states.
///
///   rho = sum_jk c_j c_k^* <env_k|env_j> |beta_j><beta_k|
///
/// Phase shifts and beam splitters keep every term a coherent product, the
/// quantum beam splitter splits a term in two, and loss moves part of each
/// amplitude into an environment that is traced out through the overlaps
/// above. This is the representation that scales to the long-arm scheme,
/// where the Fock basis of four bright modes would be far too large.
class CoherentMixture {
 public:
  CoherentMixture() = default;
  CoherentMixture(std::size_t mode_count, std::vector<CoherentTerm> terms);

  static CoherentMixture product(std::vector<Complex> amplitudes);

  std::size_t mode_count() const { return mode_count_; }
  const std::vector<CoherentTerm>& terms() const { return terms_; }
  std::size_t environment_size() const;
  bool is_pure() const { return environment_size() == 0; }

  // E_jk = <env_k|env_j>.
  Eigen::MatrixXcd environment_gram() const;
  // M_jk = c_j c_k^* E_jk, so rho = sum_jk M_jk |beta_j><beta_k|.
  Eigen::MatrixXcd mixing_matrix() const;

  double trace() const;
  double probability(const FockIndex& outcome) const;

  // Drops environment entries shared by all terms (they factor out with unit
  // overlap) and merges terms with identical amplitudes and environments.
  CoherentMixture simplified() const;

  // Exact ensemble decomposition. The first branch is the environment-vacuum
  // outcome; the rest diagonalize the remaining environment overlaps. Branch
  // states are pure and normalized; branch weights sum to trace().
  Ensemble<CoherentMixture> decompose() const;

  // Fock expansion of a pure mixture (no environment). Every mode must hold its
  // amplitudes within the given cutoffs up to `tail_budget`.
  PureState to_fock(const std::vector<int>& cutoffs,
                    double tail_budget = kDefaultTailBudget) const;
  WeightedEnsemble to_fock_ensemble(const std::vector<int>& cutoffs,
                                    double tail_budget = kDefaultTailBudget) const;

  // Cutoffs from default_cutoff() of the largest amplitude seen in each mode.
  std::vector<int> default_cutoffs() const;

 private:
  std::size_t mode_count_ = 0;
  std::vector<CoherentTerm> terms_;
};

// <n|beta> for a single mode, in log form: value = exp(log_magnitude) * e^{i phase}.
struct LogAmplitude {
  double log_magnitude = 0.0;
  double phase = 0.0;
  bool zero = false;
};

LogAmplitude coherent_log_amplitude(Complex beta, int n);

// N(|alpha,0> + e^{i theta}|0,alpha>), N = 1/sqrt(2 + 2 e^{-|alpha|^2} cos theta).
CoherentMixture entangled_coherent_state(Complex alpha, double theta);

// 1/sqrt(2 + 2 e^{-|alpha|^2} cos theta)
double ecs_normalization(Complex alpha, double theta);

}  // namespace ecsm
