#pragma once

#include <functional>
#include <vector>

#include "ecsm/coherent.hpp"
#include "ecsm/metrology.hpp"
#include "ecsm/schemes.hpp"

namespace ecsm {

using MixtureFamily = std::function<CoherentMixture(double phi)>;

/// Phase model evaluated directly on coherent-state mixtures.
///
/// Each grid phase is compiled once into per-term log amplitudes and the
/// mixing matrix, so a likelihood evaluation costs O(K^2) for K terms and no
/// Fock basis is ever built. Sampling uses rejection from the mixture of the
/// terms' own Poisson statistics, which bounds P(#) by lambda_max(M) K q(#).
class CoherentModel final : public PhaseModel {
 public:
  CoherentModel(MixtureFamily family, const PhaseGrid& grid);

  const PhaseGrid& grid() const override { return grid_; }
  std::unique_ptr<OutcomeSampler> sampler(double phi) const override;
  void log_likelihood(const FockIndex& outcome, std::span<const std::uint32_t> active,
                      std::span<double> out) const override;

  struct Compiled {
    std::size_t terms = 0;
    std::size_t modes = 0;
    std::vector<double> log_r;   // terms x modes, -inf for a zero amplitude
    std::vector<double> angle;   // terms x modes
    std::vector<double> offset;  // -sum_m |beta_jm|^2 / 2
    std::vector<Complex> mix;    // terms x terms

    static Compiled from(const CoherentMixture& state);
    // log P(outcome); `log_factorials` = sum_m lgamma(n_m + 1).
    double log_probability(const FockIndex& outcome, double log_factorials) const;
  };

 private:
  MixtureFamily family_;
  PhaseGrid grid_;
  std::vector<Compiled> compiled_;
};

// Rejection sampler and exact outcome probabilities of one mixture.
std::unique_ptr<OutcomeSampler> make_coherent_sampler(const CoherentMixture& state);

// Output mixture of the long-arm scheme at phase phi (params.phi ignored).
MixtureFamily long_arm_family(const SchemeParams& params, std::vector<Element> measurement);

}  // namespace ecsm
