#include "ecsm/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecsm/parallel.hpp"

namespace ecsm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogZeroGuard = std::log(1e-300);

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Inverse-CDF sampler over an explicit distribution.
class DistributionSampler final : public OutcomeSampler {
 public:
  explicit DistributionSampler(OutcomeDistribution dist) : dist_(std::move(dist)) {
    double acc = 0.0;
    for (const auto& [n, p] : dist_) {
      if (p <= 0.0) continue;
      acc += p;
      outcomes_.push_back(n);
      cdf_.push_back(acc);
    }
    if (outcomes_.empty()) throw EmptyDistribution("outcome distribution has no mass");
  }

  FockIndex draw(Rng& rng) const override {
    const double u = uniform01(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return outcomes_[static_cast<std::size_t>(it - cdf_.begin())];
  }

  double probability(const FockIndex& outcome) const override {
    auto it = dist_.find(outcome);
    return it == dist_.end() ? 0.0 : it->second;
  }

 private:
  OutcomeDistribution dist_;
  std::vector<FockIndex> outcomes_;
  std::vector<double> cdf_;
};

}  // namespace

//------------------------------------------------------------------------------
// Outcome statistics
//------------------------------------------------------------------------------

OutcomeDistribution outcome_distribution(const WeightedEnsemble& output, double prune_below) {
  OutcomeDistribution dist;
  for (const auto& br : output.branches)
    for (const auto& [occ, a] : br.state.amplitudes()) dist[occ] += br.weight * std::norm(a);
  std::erase_if(dist, [&](const auto& kv) { return kv.second < prune_below; });
  return dist;
}

double total_probability(const OutcomeDistribution& dist) {
  double t = 0.0;
  for (const auto& [n, p] : dist) t += p;
  return t;
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

FockIndex sample_outcome(const OutcomeDistribution& dist, Rng& rng) {
  return DistributionSampler(dist).draw(rng);
}

std::unique_ptr<OutcomeSampler> make_distribution_sampler(OutcomeDistribution dist) {
  return std::make_unique<DistributionSampler>(std::move(dist));
}

//------------------------------------------------------------------------------
// Phase grid and posterior
//------------------------------------------------------------------------------

PhaseGrid PhaseGrid::full_circle(std::size_t size) { return {0.0, kTwoPi, size}; }

PhaseGrid PhaseGrid::window(double center, double width, std::size_t size) {
  return {center - width / 2.0, width, size};
}

void PhaseGrid::validate() const {
  if (size < 2) throw InvalidParameter("PhaseGrid: need at least two points");
  if (!(width > 0.0 && width <= kTwoPi + 1e-12) || !std::isfinite(lo))
    throw InvalidParameter("PhaseGrid: width must lie in (0, 2pi]");
}

PhaseGrid fringe_window(double phi_true, double photons, std::size_t size) {
  const double h = kPi / std::max(1.0, photons);
  const double lo = std::max(0.0, phi_true - h);
  const double hi = std::min(kPi, phi_true + h);
  if (!(hi > lo)) throw InvalidParameter("fringe_window: true phase must lie in [0, pi]");
  return {lo, hi - lo, size};
}

PhaseGrid half_circle_window(double phi_op, std::size_t size) {
  return PhaseGrid::window(phi_op, kPi, size);
}

double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

CircularMoments circular_moments(std::span<const double> phases, std::span<const double> weights) {
  if (phases.size() != weights.size()) throw DimensionMismatch("circular_moments: size mismatch");
  double c = 0.0, s = 0.0, total = 0.0;
  for (std::size_t k = 0; k < phases.size(); ++k) {
    c += weights[k] * std::cos(phases[k]);
    s += weights[k] * std::sin(phases[k]);
    total += weights[k];
  }
  if (!(total > 0.0)) throw EmptyDistribution("circular_moments: no weight");
  CircularMoments m;
  m.mean = std::atan2(s, c);
  m.resultant = std::min(1.0, std::hypot(c, s) / total);
  m.std = m.resultant > 0.0 ? std::sqrt(-2.0 * std::log(m.resultant))
                            : std::numeric_limits<double>::infinity();
  return m;
}

Posterior Posterior::uniform(const PhaseGrid& grid) {
  grid.validate();
  std::vector<double> p(grid.size, 1.0);
  return Posterior(grid, p);
}

Posterior::Posterior(const PhaseGrid& grid, std::span<const double> probs) : grid_(grid) {
  grid.validate();
  if (probs.size() != grid.size) throw GridMismatch("Posterior: weights do not match grid");
  log_w_.resize(probs.size());
  double mx = kNegInf;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] < 0.0 || !std::isfinite(probs[k]))
      throw InvalidParameter("Posterior: weights must be finite and non-negative");
    log_w_[k] = safe_log(probs[k]);
    mx = std::max(mx, log_w_[k]);
  }
  if (mx == kNegInf) throw EmptyDistribution("Posterior: all weights are zero");
  for (double& v : log_w_) v -= mx;
}

std::vector<double> Posterior::probs() const {
  std::vector<double> p(log_w_.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) total += (p[k] = std::exp(log_w_[k]));
  for (double& v : p) v /= total;
  return p;
}

CircularMoments Posterior::moments() const {
  std::vector<double> phases(grid_.size);
  for (std::size_t k = 0; k < grid_.size; ++k) phases[k] = grid_.at(k);
  const auto p = probs();
  return circular_moments(phases, p);
}

bool Posterior::update_log(std::span<const double> log_likelihood,
                           std::vector<std::uint32_t>& active, double prune_nats) {
  if (log_likelihood.size() != log_w_.size()) throw GridMismatch("update: likelihood size");
  double best_ll = kNegInf, best = kNegInf;
  for (std::uint32_t k : active) {
    best_ll = std::max(best_ll, log_likelihood[k]);
    best = std::max(best, log_w_[k] + log_likelihood[k]);
  }
  if (best_ll < kLogZeroGuard || best == kNegInf) return false;
  const double floor = -prune_nats;
  std::size_t kept = 0;
  for (std::uint32_t k : active) {
    const double v = log_w_[k] + log_likelihood[k] - best;
    if (v >= floor) {
      log_w_[k] = v;
      active[kept++] = k;
    } else {
      log_w_[k] = kNegInf;
    }
  }
  active.resize(kept);
  return true;
}

UpdateOutcome bayesian_update(const Posterior& prior, std::span<const double> likelihood_row) {
  if (likelihood_row.size() != prior.grid().size)
    throw GridMismatch("bayesian_update: likelihood row does not match grid");
  std::vector<double> ll(likelihood_row.size());
  std::vector<std::uint32_t> active;
  for (std::size_t k = 0; k < ll.size(); ++k) {
    if (likelihood_row[k] < 0.0) throw InvalidParameter("bayesian_update: negative likelihood");
    ll[k] = safe_log(likelihood_row[k]);
    if (prior.log_weights()[k] > kNegInf) active.push_back(static_cast<std::uint32_t>(k));
  }
  UpdateOutcome out{prior, false};
  out.skipped = !out.posterior.update_log(ll, active);
  return out;
}

//------------------------------------------------------------------------------
// Likelihood tables
//------------------------------------------------------------------------------

std::span<const double> LikelihoodTable::row(std::size_t i) const {
  return std::span<const double>(values).subspan(i * grid.size, grid.size);
}

std::optional<std::size_t> LikelihoodTable::index_of(const FockIndex& outcome) const {
  auto it = std::lower_bound(outcomes.begin(), outcomes.end(), outcome);
  if (it == outcomes.end() || *it != outcome) return std::nullopt;
  return static_cast<std::size_t>(it - outcomes.begin());
}

double LikelihoodTable::column_sum(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) s += values[i * grid.size + k];
  return s;
}

LikelihoodTable likelihood_table(const DistributionFamily& family, const PhaseGrid& grid) {
  grid.validate();
  std::vector<OutcomeDistribution> columns(grid.size);
  for (std::size_t k = 0; k < grid.size; ++k) columns[k] = family(grid.at(k));

  OutcomeDistribution peak;
  for (const auto& col : columns)
    for (const auto& [n, p] : col) peak[n] = std::max(peak[n], p);

  LikelihoodTable t;
  t.grid = grid;
  for (const auto& [n, p] : peak)
    if (p >= kOutcomePruneFloor) t.outcomes.push_back(n);  // map order = sorted
  t.values.assign(t.outcomes.size() * grid.size, 0.0);
  for (std::size_t i = 0; i < t.outcomes.size(); ++i)
    for (std::size_t k = 0; k < grid.size; ++k) {
      auto it = columns[k].find(t.outcomes[i]);
      if (it != columns[k].end()) t.values[i * grid.size + k] = it->second;
    }
  return t;
}

DistributionFamily distribution_family(std::function<WeightedEnsemble(double phi)> experiment) {
  return [experiment = std::move(experiment)](double phi) {
    return outcome_distribution(experiment(phi), 0.0);
  };
}

TabulatedModel::TabulatedModel(DistributionFamily family, const PhaseGrid& grid)
    : family_(std::move(family)), table_(likelihood_table(family_, grid)) {
  log_values_.resize(table_.values.size());
  for (std::size_t i = 0; i < log_values_.size(); ++i) log_values_[i] = safe_log(table_.values[i]);
}

std::unique_ptr<OutcomeSampler> TabulatedModel::sampler(double phi) const {
  return make_distribution_sampler(family_(phi));
}

void TabulatedModel::log_likelihood(const FockIndex& outcome, std::span<const std::uint32_t> active,
                                    std::span<double> out) const {
  const auto idx = table_.index_of(outcome);
  if (!idx) {
    for (std::uint32_t k : active) out[k] = kNegInf;
    return;
  }
  const double* row = log_values_.data() + *idx * table_.grid.size;
  for (std::uint32_t k : active) out[k] = row[k];
}

//------------------------------------------------------------------------------
// Resources
//------------------------------------------------------------------------------

double mean_photons_through_phase(const SchemeParams& params) {
  const double n = ecs_normalization(params.alpha0, params.ecs_theta);
  return n * n * std::norm(params.alpha0);
}

std::size_t runs_for_budget(ProbeKind kind, const SchemeParams& params, double photons,
                            int noon_n) {
  if (!(photons > 0.0) || !std::isfinite(photons))
    throw InvalidParameter("runs_for_budget: photon budget must be positive");
  double runs = 0.0;
  switch (kind) {
    case ProbeKind::kSingleParticle:
      runs = 2.0 * photons;
      break;
    case ProbeKind::kNoon:
      if (noon_n < 1) throw InvalidParameter("runs_for_budget: NOON size must be positive");
      runs = std::round(2.0 * photons / noon_n);
      break;
    case ProbeKind::kEcs: {
      const double nbar = mean_photons_through_phase(params);
      if (!(nbar > 0.0)) throw InvalidParameter("runs_for_budget: probe sends no photons");
      runs = std::round(photons / nbar);
      break;
    }
  }
  if (runs < 1.0) throw BudgetTooSmall("photon budget buys less than one run");
  return static_cast<std::size_t>(runs);
}

ResourceBudget make_budget(ProbeKind kind, const SchemeParams& params, double photons,
                           int noon_n) {
  return {photons, kind, noon_n, runs_for_budget(kind, params, photons, noon_n)};
}

//------------------------------------------------------------------------------
// Experiments
//------------------------------------------------------------------------------

ExperimentResult run_experiment(const PhaseModel& model, const OutcomeSampler& truth,
                                std::size_t runs, Rng& rng, double prune_nats) {
  const PhaseGrid& grid = model.grid();
  Posterior post = Posterior::uniform(grid);
  std::vector<std::uint32_t> active(grid.size);
  for (std::size_t k = 0; k < grid.size; ++k) active[k] = static_cast<std::uint32_t>(k);
  std::vector<double> ll(grid.size, kNegInf);

  std::size_t skipped = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const FockIndex outcome = truth.draw(rng);
    model.log_likelihood(outcome, active, ll);
    if (!post.update_log(ll, active, prune_nats)) ++skipped;
  }
  if (static_cast<double>(skipped) > kMaxSkippedFraction * static_cast<double>(runs))
    throw EstimationFailure("too many zero-likelihood outcomes (" + std::to_string(skipped) +
                            " of " + std::to_string(runs) + ")");
  ExperimentResult res{post.circular_mean(), std::move(post), skipped};
  return res;
}

ExperimentResult run_experiment(const PhaseModel& model, double phi_true, std::size_t runs,
                                Rng& rng, double prune_nats) {
  const auto truth = model.sampler(phi_true);
  return run_experiment(model, *truth, runs, rng, prune_nats);
}

PrecisionResult precision(const PhaseModel& model, double phi_true, const ResourceBudget& budget,
                          const PrecisionOptions& options, const SchemeParams& params) {
  if (options.experiments == 0) throw InvalidParameter("precision: need at least one experiment");
  const auto truth = model.sampler(phi_true);
  std::vector<double> sq_err(options.experiments), spread(options.experiments);
  parallel_for(options.experiments, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, i);
    const auto res = run_experiment(model, *truth, budget.runs, rng, options.prune_nats);
    const double err = wrap_phase(res.estimate - phi_true);
    sq_err[i] = err * err;
    spread[i] = res.posterior.circular_std();
  });
  PrecisionResult out;
  double se = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < options.experiments; ++i) {
    se += sq_err[i];
    sp += spread[i];
  }
  const double m = static_cast<double>(options.experiments);
  out.delta_phi_rmse = std::sqrt(se / m);
  out.mean_posterior_std = sp / m;
  out.experiments = options.experiments;
  out.budget = budget;
  out.params = params;
  out.seed = options.seed;
  return out;
}

double classical_fisher_mc(const PhaseModel& model, double phi, std::size_t samples, Rng& rng,
                           double step) {
  return classical_fisher_mc([&](double p) { return model.sampler(p); }, phi, samples, rng, step);
}

double classical_fisher_mc(const SamplerFactory& sampler_at, double phi, std::size_t samples,
                           Rng& rng, double step) {
  if (samples == 0) throw InvalidParameter("classical_fisher_mc: need samples");
  const auto at = sampler_at(phi);
  const auto up = sampler_at(phi + step);
  const auto down = sampler_at(phi - step);
  double acc = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const FockIndex n = at->draw(rng);
    const double p = at->probability(n);
    if (!(p > 0.0)) continue;
    const double score = (up->probability(n) - down->probability(n)) / (2.0 * step * p);
    acc += score * score;
  }
  return acc / static_cast<double>(samples);
}

}  // namespace ecsm
