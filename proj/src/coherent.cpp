#include "ecsm/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecsm {

namespace {

Complex product_overlap(const std::vector<Complex>& bra, const std::vector<Complex>& ket) {
  Complex s{1.0, 0.0};
  for (std::size_t m = 0; m < bra.size(); ++m) s *= coherent_overlap(bra[m], ket[m]);
  return s;
}

// Gram of the system kets: G_kj = <beta_k|beta_j>.
Eigen::MatrixXcd system_gram(const std::vector<CoherentTerm>& terms) {
  const auto k = static_cast<Eigen::Index>(terms.size());
  Eigen::MatrixXcd g(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      g(a, b) = product_overlap(terms[a].amplitudes, terms[b].amplitudes);
  return g;
}

}  // namespace

CoherentMixture::CoherentMixture(std::size_t mode_count, std::vector<CoherentTerm> terms)
    : mode_count_(mode_count), terms_(std::move(terms)) {
  if (mode_count_ > kMaxModes) throw DimensionMismatch("CoherentMixture: too many modes");
  const std::size_t env = terms_.empty() ? 0 : terms_.front().environment.size();
  for (const auto& t : terms_) {
    if (t.amplitudes.size() != mode_count_)
      throw DimensionMismatch("CoherentMixture: term has wrong mode count");
    if (t.environment.size() != env)
      throw DimensionMismatch("CoherentMixture: terms disagree on environment size");
  }
}

CoherentMixture CoherentMixture::product(std::vector<Complex> amplitudes) {
  const std::size_t modes = amplitudes.size();
  return CoherentMixture(modes, {CoherentTerm{1.0, std::move(amplitudes), {}}});
}

std::size_t CoherentMixture::environment_size() const {
  return terms_.empty() ? 0 : terms_.front().environment.size();
}

Eigen::MatrixXcd CoherentMixture::environment_gram() const {
  const auto k = static_cast<Eigen::Index>(terms_.size());
  Eigen::MatrixXcd e(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index l = 0; l < k; ++l)
      e(j, l) = product_overlap(terms_[l].environment, terms_[j].environment);
  return e;
}

Eigen::MatrixXcd CoherentMixture::mixing_matrix() const {
  Eigen::MatrixXcd m = environment_gram();
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index l = 0; l < m.cols(); ++l)
      m(j, l) *= terms_[j].coeff * std::conj(terms_[l].coeff);
  return m;
}

double CoherentMixture::trace() const {
  // Tr rho = sum_jk M_jk <beta_k|beta_j>
  const Eigen::MatrixXcd m = mixing_matrix();
  const Eigen::MatrixXcd g = system_gram(terms_);
  Complex t{};
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index l = 0; l < m.cols(); ++l) t += m(j, l) * g(l, j);
  return t.real();
}

LogAmplitude coherent_log_amplitude(Complex beta, int n) {
  const double r = std::abs(beta);
  if (r == 0.0) return {0.0, 0.0, n != 0};
  return {-0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0), n * std::arg(beta), false};
}

double CoherentMixture::probability(const FockIndex& outcome) const {
  if (outcome.size() != mode_count_)
    throw DimensionMismatch("CoherentMixture::probability: outcome has wrong mode count");
  const std::size_t k = terms_.size();
  std::vector<double> log_mag(k, 0.0);
  std::vector<double> phase(k, 0.0);
  std::vector<bool> zero(k, false);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t m = 0; m < mode_count_; ++m) {
      const LogAmplitude a = coherent_log_amplitude(terms_[j].amplitudes[m], outcome[m]);
      if (a.zero) {
        zero[j] = true;
        break;
      }
      log_mag[j] += a.log_magnitude;
      phase[j] += a.phase;
    }
    if (!zero[j]) top = std::max(top, log_mag[j]);
  }
  if (!std::isfinite(top)) return 0.0;

  std::vector<Complex> amp(k);
  for (std::size_t j = 0; j < k; ++j)
    amp[j] = zero[j] ? Complex{} : std::polar(std::exp(log_mag[j] - top), phase[j]);

  const Eigen::MatrixXcd mix = mixing_matrix();
  Complex s{};
  for (std::size_t j = 0; j < k; ++j) {
    if (zero[j]) continue;
    for (std::size_t l = 0; l < k; ++l) {
      if (zero[l]) continue;
      s += mix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) * amp[j] *
           std::conj(amp[l]);
    }
  }
  return std::max(0.0, s.real()) * std::exp(2.0 * top);
}

CoherentMixture CoherentMixture::simplified() const {
  if (terms_.empty()) return *this;
  const std::size_t env = environment_size();
  std::vector<std::size_t> keep;
  for (std::size_t e = 0; e < env; ++e) {
    bool shared = true;
    for (const auto& t : terms_)
      if (t.environment[e] != terms_.front().environment[e]) {
        shared = false;
        break;
      }
    if (!shared) keep.push_back(e);
  }

  std::vector<CoherentTerm> merged;
  for (const auto& t : terms_) {
    CoherentTerm reduced{t.coeff, t.amplitudes, {}};
    for (std::size_t e : keep) reduced.environment.push_back(t.environment[e]);
    auto same = std::find_if(merged.begin(), merged.end(), [&](const CoherentTerm& u) {
      return u.amplitudes == reduced.amplitudes && u.environment == reduced.environment;
    });
    if (same != merged.end())
      same->coeff += reduced.coeff;
    else
      merged.push_back(std::move(reduced));
  }
  std::erase_if(merged, [](const CoherentTerm& t) { return t.coeff == Complex{}; });
  return CoherentMixture(mode_count_, std::move(merged));
}

Ensemble<CoherentMixture> CoherentMixture::decompose() const {
  Ensemble<CoherentMixture> out;
  if (terms_.empty()) return out;
  const auto k = static_cast<Eigen::Index>(terms_.size());
  const Eigen::MatrixXcd gram = system_gram(terms_);

  auto emit = [&](const Eigen::VectorXcd& d, std::vector<int> env_record) {
    // weight = sum_jl d_j d_l^* <beta_l|beta_j>
    Complex w{};
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index l = 0; l < k; ++l) w += d(j) * std::conj(d(l)) * gram(l, j);
    const double weight = w.real();
    if (weight <= 1e-300) return;
    const double scale = 1.0 / std::sqrt(weight);
    std::vector<CoherentTerm> terms;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (d(j) == Complex{}) continue;
      terms.push_back({d(j) * scale, terms_[j].amplitudes, {}});
    }
    out.branches.push_back(
        {weight, CoherentMixture(mode_count_, std::move(terms)).simplified(), std::move(env_record)});
  };

  // Environment-vacuum projection: <0|env_j> = exp(-|env_j|^2 / 2).
  Eigen::VectorXd vac(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double s = 0.0;
    for (Complex g : terms_[j].environment) s += std::norm(g);
    vac(j) = std::exp(-0.5 * s);
  }
  Eigen::VectorXcd d0(k);
  for (Eigen::Index j = 0; j < k; ++j) d0(j) = terms_[j].coeff * vac(j);
  emit(d0, std::vector<int>(environment_size(), 0));
  if (environment_size() == 0) return out;

  // Remaining environment overlaps, E - v v^T, are positive semidefinite.
  Eigen::MatrixXcd residual = environment_gram();
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index l = 0; l < k; ++l) residual(j, l) -= vac(j) * vac(l);
  residual = 0.5 * (residual + residual.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(residual);
  for (Eigen::Index e = k - 1; e >= 0; --e) {
    const double lambda = solver.eigenvalues()(e);
    if (lambda <= 1e-15) continue;
    Eigen::VectorXcd d(k);
    for (Eigen::Index j = 0; j < k; ++j)
      d(j) = terms_[j].coeff * std::sqrt(lambda) * solver.eigenvectors()(j, e);
    emit(d, {-1});
  }
  return out;
}

PureState CoherentMixture::to_fock(const std::vector<int>& cutoffs, double tail_budget) const {
  if (!is_pure())
    throw InvalidParameter("CoherentMixture::to_fock: state has an environment; decompose first");
  if (cutoffs.size() != mode_count_) throw DimensionMismatch("to_fock: cutoff count");
  PureState out(cutoffs);
  for (const auto& t : terms_) {
    std::vector<PureState> factors;
    for (std::size_t m = 0; m < mode_count_; ++m)
      factors.push_back(coherent_amplitudes(t.amplitudes[m], cutoffs[m], tail_budget));
    const PureState prod = tensor(factors);
    for (const auto& [occ, a] : prod.amplitudes()) out.add(occ, t.coeff * a);
  }
  return out;
}

WeightedEnsemble CoherentMixture::to_fock_ensemble(const std::vector<int>& cutoffs,
                                                   double tail_budget) const {
  WeightedEnsemble out;
  for (const auto& br : decompose().branches) {
    PureState s = br.state.to_fock(cutoffs, tail_budget);
    out.branches.push_back({br.weight, s.normalized(), br.environment});
  }
  return out;
}

std::vector<int> CoherentMixture::default_cutoffs() const {
  std::vector<int> c(mode_count_, 0);
  for (const auto& t : terms_)
    for (std::size_t m = 0; m < mode_count_; ++m)
      c[m] = std::max(c[m], default_cutoff(t.amplitudes[m]));
  return c;
}

double ecs_normalization(Complex alpha, double theta) {
  return 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-std::norm(alpha)) * std::cos(theta));
}

CoherentMixture entangled_coherent_state(Complex alpha, double theta) {
  const double n = ecs_normalization(alpha, theta);
  return CoherentMixture(2, {CoherentTerm{n, {alpha, 0.0}, {}},
                             CoherentTerm{n * std::polar(1.0, theta), {0.0, alpha}, {}}});
}

}  // namespace ecsm
