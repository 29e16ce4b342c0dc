#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ecsm/fock.hpp"
#include "ecsm/schemes.hpp"

namespace ecsm {

//------------------------------------------------------------------------------
// Outcome statistics
//------------------------------------------------------------------------------

using OutcomeDistribution = std::map<FockIndex, double>;

inline constexpr double kOutcomePruneFloor = 1e-15;

// P(#) = sum_k w_k |<#|psi_k>|^2, entries below `prune_below` dropped.
OutcomeDistribution outcome_distribution(const WeightedEnsemble& output,
                                         double prune_below = kOutcomePruneFloor);

double total_probability(const OutcomeDistribution& dist);

//------------------------------------------------------------------------------
// Random streams
//------------------------------------------------------------------------------

using Rng = std::mt19937_64;

// Independent stream for (seed, stream index); experiments and optimizer
// candidates each draw from their own.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Uniform in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);

FockIndex sample_outcome(const OutcomeDistribution& dist, Rng& rng);

//------------------------------------------------------------------------------
// Phase grid and posterior
//------------------------------------------------------------------------------

/// `size` equally spaced phases lo + k * width / size, k = 0..size-1. A full
/// circle is width 2 pi; narrower windows encode prior knowledge of the phase.
struct PhaseGrid {
  double lo = 0.0;
  double width = kTwoPi;
  std::size_t size = 1024;

  static PhaseGrid full_circle(std::size_t size);
  static PhaseGrid window(double center, double width, std::size_t size);

  double at(std::size_t k) const { return lo + width * static_cast<double>(k) / static_cast<double>(size); }
  void validate() const;
  bool operator==(const PhaseGrid&) const = default;
};

// Prior windows. Every likelihood here is even in phi, so a window never
// contains both phi and -phi. The two-mode scheme also has fringes of period
// 2 pi / n for n detected photons; its window spans about one fringe of the
// mean photon number (the regime where the Cramer-Rao bound is meaningful).

// [max(0, phi - h), min(pi, phi + h)] with h = pi / max(1, photons).
PhaseGrid fringe_window(double phi_true, double photons, std::size_t size);
// [phi_op - pi/2, phi_op + pi/2].
PhaseGrid half_circle_window(double phi_op, std::size_t size);

// Wraps to (-pi, pi].
double wrap_phase(double phi);

struct CircularMoments {
  double mean = 0.0;       // radians
  double resultant = 0.0;  // |E[e^{i phi}]|
  double std = 0.0;        // sqrt(-2 ln resultant)
};

CircularMoments circular_moments(std::span<const double> phases, std::span<const double> weights);

/// Discretized distribution over phase. Stored as log weights so hundreds of
/// updates cannot underflow.
class Posterior {
 public:
  static Posterior uniform(const PhaseGrid& grid);
  Posterior(const PhaseGrid& grid, std::span<const double> probs);

  const PhaseGrid& grid() const { return grid_; }
  std::vector<double> probs() const;
  std::span<const double> log_weights() const { return log_w_; }

  CircularMoments moments() const;
  double circular_mean() const { return moments().mean; }
  double circular_std() const { return moments().std; }

  // Adds `log_likelihood[k]` at every k in `active` (entries outside it must
  // already be -inf). Returns false and leaves the posterior unchanged when the
  // outcome has probability below 1e-300 at every active phase. Afterwards,
  // entries more than `prune_nats` below the maximum are set to -inf and
  // removed from `active`.
  bool update_log(std::span<const double> log_likelihood, std::vector<std::uint32_t>& active,
                  double prune_nats = std::numeric_limits<double>::infinity());

 private:
  PhaseGrid grid_;
  std::vector<double> log_w_;  // max entry kept at 0
};

struct UpdateOutcome {
  Posterior posterior;
  bool skipped = false;
};

// posterior ∝ prior x likelihood. If every product vanishes the prior is
// returned with `skipped` set.
UpdateOutcome bayesian_update(const Posterior& prior, std::span<const double> likelihood_row);

//------------------------------------------------------------------------------
// Phase models
//------------------------------------------------------------------------------

/// Detection statistics at one fixed phase.
class OutcomeSampler {
 public:
  virtual ~OutcomeSampler() = default;
  virtual FockIndex draw(Rng& rng) const = 0;
  virtual double probability(const FockIndex& outcome) const = 0;
};

/// An interferometer viewed as the family of outcome distributions P(#|phi).
class PhaseModel {
 public:
  virtual ~PhaseModel() = default;
  virtual const PhaseGrid& grid() const = 0;
  virtual std::unique_ptr<OutcomeSampler> sampler(double phi) const = 0;
  // out[k] = log P(outcome | grid.at(k)) for k in active; other entries untouched.
  virtual void log_likelihood(const FockIndex& outcome, std::span<const std::uint32_t> active,
                              std::span<double> out) const = 0;
};

/// Outcome x phase matrix of P(outcome | phi).
struct LikelihoodTable {
  PhaseGrid grid;
  std::vector<FockIndex> outcomes;
  std::vector<double> values;  // row-major, outcomes.size() x grid.size

  std::span<const double> row(std::size_t outcome_index) const;
  std::optional<std::size_t> index_of(const FockIndex& outcome) const;
  double column_sum(std::size_t k) const;
};

using DistributionFamily = std::function<OutcomeDistribution(double phi)>;

// Columns are the full distributions at each grid phase; the outcome alphabet
// keeps every outcome reaching kOutcomePruneFloor in some column.
LikelihoodTable likelihood_table(const DistributionFamily& family, const PhaseGrid& grid);

// Distribution family of a Fock-simulated experiment phi -> output ensemble.
DistributionFamily distribution_family(std::function<WeightedEnsemble(double phi)> experiment);

/// Model backed by a precomputed likelihood table. Suits schemes whose outcome
/// alphabet is small (two-mode schemes, single photons, NOON states).
class TabulatedModel final : public PhaseModel {
 public:
  TabulatedModel(DistributionFamily family, const PhaseGrid& grid);

  const PhaseGrid& grid() const override { return table_.grid; }
  std::unique_ptr<OutcomeSampler> sampler(double phi) const override;
  void log_likelihood(const FockIndex& outcome, std::span<const std::uint32_t> active,
                      std::span<double> out) const override;
  const LikelihoodTable& table() const { return table_; }

 private:
  DistributionFamily family_;
  LikelihoodTable table_;
  std::vector<double> log_values_;
};

// Sampler over an explicit distribution (inverse CDF).
std::unique_ptr<OutcomeSampler> make_distribution_sampler(OutcomeDistribution dist);

//------------------------------------------------------------------------------
// Experiments and precision
//------------------------------------------------------------------------------

enum class ProbeKind { kSingleParticle, kNoon, kEcs };

struct ResourceBudget {
  double photons = 400.0;  // R: mean photons through the phase over all runs
  ProbeKind kind = ProbeKind::kEcs;
  int noon_n = 0;
  std::size_t runs = 1;  // mu
};

// N^2 |alpha0|^2 with N the ECS normalization at params.ecs_theta.
double mean_photons_through_phase(const SchemeParams& params);

// SP: 2R, NOON(n): round(2R/n), ECS: round(R / nbar). Throws BudgetTooSmall
// when the result is below one run.
std::size_t runs_for_budget(ProbeKind kind, const SchemeParams& params, double photons,
                            int noon_n = 0);

ResourceBudget make_budget(ProbeKind kind, const SchemeParams& params, double photons,
                           int noon_n = 0);

// Posterior entries this many nats below the running maximum are dropped from
// later updates; their mass is below e^-80 of the peak.
inline constexpr double kPosteriorPruneNats = 80.0;

// Fraction of skipped (zero-likelihood) updates that fails a run.
inline constexpr double kMaxSkippedFraction = 0.01;

struct ExperimentResult {
  double estimate = 0.0;
  Posterior posterior = Posterior::uniform(PhaseGrid::full_circle(2));
  std::size_t skipped_updates = 0;
};

// `runs` detections at phi_true starting from a uniform prior over the model
// grid; estimate = circular posterior mean.
ExperimentResult run_experiment(const PhaseModel& model, const OutcomeSampler& truth,
                                std::size_t runs, Rng& rng,
                                double prune_nats = kPosteriorPruneNats);
ExperimentResult run_experiment(const PhaseModel& model, double phi_true, std::size_t runs,
                                Rng& rng, double prune_nats = kPosteriorPruneNats);

struct PrecisionResult {
  double delta_phi_rmse = 0.0;      // circular RMSE of the estimates
  double mean_posterior_std = 0.0;  // mean circular posterior spread
  std::size_t experiments = 0;
  ResourceBudget budget;
  SchemeParams params;
  std::uint64_t seed = 0;
};

struct PrecisionOptions {
  std::size_t experiments = 1000;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  double prune_nats = kPosteriorPruneNats;
};

// Runs `experiments` independent experiments (stream i uses make_rng(seed, i)).
PrecisionResult precision(const PhaseModel& model, double phi_true, const ResourceBudget& budget,
                          const PrecisionOptions& options, const SchemeParams& params = {});

// Monte Carlo estimate of the classical Fisher information of the detection at
// phi: mean of (d/dphi log P)^2 over outcomes drawn at phi.
using SamplerFactory = std::function<std::unique_ptr<OutcomeSampler>(double phi)>;

double classical_fisher_mc(const SamplerFactory& sampler_at, double phi, std::size_t samples,
                           Rng& rng, double step = 1e-4);
double classical_fisher_mc(const PhaseModel& model, double phi, std::size_t samples, Rng& rng,
                           double step = 1e-4);

}  // namespace ecsm
