#pragma once

#include <Eigen/Dense>

#include <map>
#include <span>
#include <vector>

#include "ecsm/types.hpp"

namespace ecsm {

// Default truncation-tail budget: the probability mass a cutoff may discard.
inline constexpr double kDefaultTailBudget = 1e-10;

// Per-mode cutoff for a mode carrying coherent amplitude alpha:
// ceil(|a|^2 + 10|a| + 20). Keeps the Poisson tail below 1e-10 for |a| <= 6.
int default_cutoff(Complex alpha);

//------------------------------------------------------------------------------
// PureState
//------------------------------------------------------------------------------

/// Sparse amplitude vector over a truncated multimode Fock basis.
///
/// Only nonzero amplitudes are stored. Iteration follows the lexicographic
/// order of FockIndex, so every derived quantity is deterministic.
class PureState {
 public:
  using AmplitudeMap = std::map<FockIndex, Complex>;

  PureState() = default;
  explicit PureState(std::vector<int> cutoffs);

  static PureState vacuum(std::vector<int> cutoffs);
  static PureState basis(const FockIndex& occupation, std::vector<int> cutoffs);

  std::size_t mode_count() const { return cutoffs_.size(); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  int cutoff(std::size_t mode) const;

  const AmplitudeMap& amplitudes() const { return amps_; }
  std::size_t support_size() const { return amps_.size(); }
  Complex amplitude(const FockIndex& occupation) const;

  // Accumulates into the amplitude at `occupation`. Throws CutoffTooSmall if
  // the occupation exceeds a mode cutoff.
  void add(const FockIndex& occupation, Complex value);

  double norm_squared() const;
  PureState normalized() const;
  PureState scaled(Complex factor) const;

 private:
  std::vector<int> cutoffs_;
  AmplitudeMap amps_;
};

// Single-mode coherent state |alpha> truncated at `cutoff`. Throws
// CutoffTooSmall when the discarded Poisson tail exceeds `tail_budget`.
PureState coherent_amplitudes(Complex alpha, int cutoff,
                              double tail_budget = kDefaultTailBudget);

// Same, with default_cutoff(alpha).
PureState coherent_state(Complex alpha, double tail_budget = kDefaultTailBudget);

Complex inner_product(const PureState& a, const PureState& b);

// <alpha|beta> in closed form.
Complex coherent_overlap(Complex alpha, Complex beta);

PureState tensor(std::span<const PureState> states);
PureState tensor(const PureState& a, const PureState& b);

// a*x + b*y. Both states must share mode count; cutoffs are taken elementwise max.
PureState linear_combination(Complex a, const PureState& x, Complex b,
                             const PureState& y);

//------------------------------------------------------------------------------
// Ensembles
//------------------------------------------------------------------------------

template <class State>
struct Branch {
  double weight = 0.0;
  State state;
  // Photon counts recorded by each environment that produced this branch.
  std::vector<int> environment;
};

/// rho = sum_k w_k |psi_k><psi_k| with normalized branch states.
template <class State>
struct Ensemble {
  std::vector<Branch<State>> branches;

  double total_weight() const {
    double w = 0.0;
    for (const auto& b : branches) w += b.weight;
    return w;
  }
};

using WeightedEnsemble = Ensemble<PureState>;

WeightedEnsemble pure_ensemble(PureState state);

//------------------------------------------------------------------------------
// DensityMatrix
//------------------------------------------------------------------------------

struct DensityMatrix {
  std::vector<FockIndex> basis;
  Eigen::MatrixXcd matrix;

  std::size_t dimension() const { return basis.size(); }
  double trace() const { return matrix.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
};

inline constexpr std::size_t kDefaultMaxBasis = 4096;

// Reduced density matrix on `modes` (in the given order). The basis is the
// sorted set of reduced occupations present in the ensemble.
DensityMatrix to_density_matrix(const WeightedEnsemble& ensemble,
                                std::span<const std::size_t> modes,
                                std::size_t max_dimension = kDefaultMaxBasis);

// Full-system density matrix.
DensityMatrix to_density_matrix(const WeightedEnsemble& ensemble,
                                std::size_t max_dimension = kDefaultMaxBasis);

DensityMatrix projector(const PureState& state);

// Re-expresses `rho` in a larger basis that contains its own.
DensityMatrix embed(const DensityMatrix& rho, const std::vector<FockIndex>& basis);

}  // namespace ecsm
