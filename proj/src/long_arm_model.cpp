#include "ecsm/long_arm_model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace ecsm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_factorials(const FockIndex& n) {
  double s = 0.0;
  for (std::size_t m = 0; m < n.size(); ++m) s += std::lgamma(n[m] + 1.0);
  return s;
}

// Unnormalized per-term amplitudes a_j = exp(z_j - top). Returns top, or -inf
// when every term vanishes on this outcome.
double term_amplitudes(const CoherentModel::Compiled& c, const FockIndex& n,
                       std::vector<Complex>& a) {
  thread_local std::vector<double> re, im;
  a.assign(c.terms, Complex{});
  re.assign(c.terms, kNegInf);
  im.assign(c.terms, 0.0);
  double top = kNegInf;
  for (std::size_t j = 0; j < c.terms; ++j) {
    double r = c.offset[j], phase = 0.0;
    for (std::size_t m = 0; m < c.modes; ++m) {
      const int k = n[m];
      if (k == 0) continue;
      const double lr = c.log_r[j * c.modes + m];
      if (lr == kNegInf) {
        r = kNegInf;
        break;
      }
      r += k * lr;
      phase += k * c.angle[j * c.modes + m];
    }
    re[j] = r;
    im[j] = phase;
    top = std::max(top, r);
  }
  if (top == kNegInf) return top;
  for (std::size_t j = 0; j < c.terms; ++j)
    if (re[j] != kNegInf) a[j] = std::polar(std::exp(re[j] - top), im[j]);
  return top;
}

double quadratic_form(const CoherentModel::Compiled& c, const std::vector<Complex>& a) {
  // sum_jl M_jl <#|beta_j> <#|beta_l>^*
  Complex s{};
  for (std::size_t j = 0; j < c.terms; ++j) {
    if (a[j] == Complex{}) continue;
    Complex row{};
    for (std::size_t l = 0; l < c.terms; ++l) row += c.mix[j * c.terms + l] * std::conj(a[l]);
    s += a[j] * row;
  }
  return s.real();
}

class CoherentSampler final : public OutcomeSampler {
 public:
  explicit CoherentSampler(const CoherentMixture& state)
      : c_(CoherentModel::Compiled::from(state)) {
    Eigen::MatrixXcd m(c_.terms, c_.terms);
    for (std::size_t j = 0; j < c_.terms; ++j)
      for (std::size_t l = 0; l < c_.terms; ++l)
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = c_.mix[j * c_.terms + l];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    lambda_ = es.eigenvalues().maxCoeff();
    if (!(lambda_ > 0.0)) throw EmptyDistribution("coherent mixture has no weight");
    for (const auto& t : state.terms()) {
      std::vector<double> means;
      for (Complex b : t.amplitudes) means.push_back(std::norm(b));
      means_.push_back(std::move(means));
    }
  }

  FockIndex draw(Rng& rng) const override {
    std::vector<Complex> a;
    for (int attempt = 0; attempt < 1000000; ++attempt) {
      const auto j = std::min(c_.terms - 1, static_cast<std::size_t>(uniform01(rng) * c_.terms));
      FockIndex n(c_.modes);
      for (std::size_t m = 0; m < c_.modes; ++m) {
        const double mean = means_[j][m];
        n.set(m, mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0);
      }
      if (term_amplitudes(c_, n, a) == kNegInf) continue;
      double q = 0.0;
      for (const Complex& x : a) q += std::norm(x);
      const double accept = quadratic_form(c_, a) / (lambda_ * q);
      if (uniform01(rng) < accept) return n;
    }
    throw EstimationFailure("coherent sampler: rejection sampling did not accept");
  }

  double probability(const FockIndex& outcome) const override {
    return std::exp(c_.log_probability(outcome, log_factorials(outcome)));
  }

 private:
  CoherentModel::Compiled c_;
  double lambda_ = 0.0;
  std::vector<std::vector<double>> means_;
};

}  // namespace

CoherentModel::Compiled CoherentModel::Compiled::from(const CoherentMixture& state) {
  Compiled c;
  c.terms = state.terms().size();
  c.modes = state.mode_count();
  c.log_r.resize(c.terms * c.modes);
  c.angle.resize(c.terms * c.modes);
  c.offset.resize(c.terms);
  for (std::size_t j = 0; j < c.terms; ++j) {
    double off = 0.0;
    for (std::size_t m = 0; m < c.modes; ++m) {
      const Complex b = state.terms()[j].amplitudes[m];
      const double r = std::abs(b);
      c.log_r[j * c.modes + m] = r > 0.0 ? std::log(r) : kNegInf;
      c.angle[j * c.modes + m] = std::arg(b);
      off -= 0.5 * r * r;
    }
    c.offset[j] = off;
  }
  const Eigen::MatrixXcd m = state.mixing_matrix();
  c.mix.resize(c.terms * c.terms);
  for (std::size_t j = 0; j < c.terms; ++j)
    for (std::size_t l = 0; l < c.terms; ++l)
      c.mix[j * c.terms + l] = m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
  return c;
}

double CoherentModel::Compiled::log_probability(const FockIndex& outcome,
                                                double log_facts) const {
  if (outcome.size() != modes) throw DimensionMismatch("CoherentModel: outcome mode count");
  thread_local std::vector<Complex> a;
  const double top = term_amplitudes(*this, outcome, a);
  if (top == kNegInf) return kNegInf;
  const double q = quadratic_form(*this, a);
  if (!(q > 0.0)) return kNegInf;
  return 2.0 * top - log_facts + std::log(q);
}

CoherentModel::CoherentModel(MixtureFamily family, const PhaseGrid& grid)
    : family_(std::move(family)), grid_(grid) {
  grid_.validate();
  compiled_.reserve(grid_.size);
  for (std::size_t k = 0; k < grid_.size; ++k)
    compiled_.push_back(Compiled::from(family_(grid_.at(k))));
}

std::unique_ptr<OutcomeSampler> CoherentModel::sampler(double phi) const {
  return make_coherent_sampler(family_(phi));
}

std::unique_ptr<OutcomeSampler> make_coherent_sampler(const CoherentMixture& state) {
  return std::make_unique<CoherentSampler>(state);
}

void CoherentModel::log_likelihood(const FockIndex& outcome, std::span<const std::uint32_t> active,
                                   std::span<double> out) const {
  const double lf = log_factorials(outcome);
  for (std::uint32_t k : active) out[k] = compiled_[k].log_probability(outcome, lf);
}

MixtureFamily long_arm_family(const SchemeParams& params, std::vector<Element> measurement) {
  params.validate();
  return [params, measurement = std::move(measurement)](double phi) {
    SchemeParams p = params;
    p.phi = phi;
    const Scheme s = long_arm_scheme(p, measurement);
    return run_circuit(s.circuit, s.input).simplified();
  };
}

}  // namespace ecsm
