#include "ecsm/fisher.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "ecsm/metrology.hpp"
#include "ecsm/parallel.hpp"

namespace ecsm {

namespace {

// Five-point first-derivative weights at offsets -2h, -h, +h, +2h.
constexpr std::array<double, 4> kOffsets{-2.0, -1.0, 1.0, 2.0};
constexpr std::array<double, 4> kWeights{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};

void check_norm(const PureState& s) {
  if (std::abs(s.norm_squared() - 1.0) > kNormTolerance)
    throw NormDrift("qfi_pure: state norm drifted from 1 by " +
                    std::to_string(std::abs(s.norm_squared() - 1.0)));
}

PureState single_branch(const WeightedEnsemble& e) {
  if (e.branches.size() != 1) throw InvalidParameter("expected a pure output");
  return e.branches.front().state;
}

double clamp_fq(double f) {
  if (f < 0.0 && f >= -1e-8) return 0.0;
  return f;
}

}  // namespace

std::string to_string(QfiMethod method) {
  switch (method) {
    case QfiMethod::kPureState:
      return "pure-state";
    case QfiMethod::kSpectralSld:
      return "spectral-SLD";
    case QfiMethod::kAnalytic:
      return "analytic";
  }
  return "unknown";
}

QfiResult qfi_pure(const PureFamily& state_fn, double phi0, double h) {
  if (!(h > 0.0)) throw InvalidParameter("qfi_pure: step must be positive");
  const PureState psi = state_fn(phi0);
  check_norm(psi);
  PureState d(psi.cutoffs());
  for (std::size_t s = 0; s < kOffsets.size(); ++s) {
    const PureState p = state_fn(phi0 + kOffsets[s] * h);
    check_norm(p);
    d = linear_combination(1.0, d, kWeights[s] / h, p);
  }
  const Complex overlap = inner_product(psi, d);
  const double f = 4.0 * (inner_product(d, d).real() - std::norm(overlap));
  return {clamp_fq(f), QfiMethod::kPureState, h};
}

QfiResult qfi_mixed(const MixedFamily& rho_fn, double phi0, double h) {
  if (!(h > 0.0)) throw InvalidParameter("qfi_mixed: step must be positive");
  std::vector<DensityMatrix> rhos;
  rhos.push_back(rho_fn(phi0));
  for (double o : kOffsets) rhos.push_back(rho_fn(phi0 + o * h));
  std::set<FockIndex> all;
  for (const auto& r : rhos) {
    if (r.matrix.rows() != static_cast<Eigen::Index>(r.basis.size()) ||
        r.matrix.cols() != r.matrix.rows())
      throw BasisMismatch("qfi_mixed: matrix does not match its basis");
    if (r.hermiticity_error() > 1e-8) throw NonHermitian("qfi_mixed: density matrix is not Hermitian");
    all.insert(r.basis.begin(), r.basis.end());
  }
  const std::vector<FockIndex> basis(all.begin(), all.end());
  for (auto& r : rhos) r = embed(r, basis);

  Eigen::MatrixXcd drho = Eigen::MatrixXcd::Zero(rhos[0].matrix.rows(), rhos[0].matrix.cols());
  for (std::size_t s = 0; s < kOffsets.size(); ++s) drho += (kWeights[s] / h) * rhos[s + 1].matrix;

  const Eigen::MatrixXcd rho0 = 0.5 * (rhos[0].matrix + rhos[0].matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  const Eigen::MatrixXcd dm = v.adjoint() * drho * v;

  double f = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
      const double s = lambda(i) + lambda(j);
      if (s > kEigenFloor) f += 2.0 * std::norm(dm(i, j)) / s;
    }
  return {clamp_fq(f), QfiMethod::kSpectralSld, h};
}

double crb(double f_q, double mu) {
  if (!(f_q > 0.0)) throw ZeroInformation("crb: Fisher information must be positive");
  if (!(mu >= 1.0)) throw InvalidParameter("crb: need at least one run");
  return 1.0 / std::sqrt(mu * f_q);
}

//------------------------------------------------------------------------------
// Baselines
//------------------------------------------------------------------------------

int equivalent_noon_size(const SchemeParams& params) {
  return std::max(1, static_cast<int>(std::lround(2.0 * mean_photons_through_phase(params))));
}

namespace {

QfiResult ensemble_qfi(const std::function<WeightedEnsemble(double)>& run, double phi, double eta) {
  if (eta >= 1.0) return qfi_pure([&](double p) { return single_branch(run(p)); }, phi);
  return qfi_mixed([&](double p) { return to_density_matrix(run(p)); }, phi);
}

}  // namespace

QfiResult noon_qfi(int n, double eta) {
  return ensemble_qfi([&](double p) { return simulate_noon(n, p, eta); }, kPi / 4.0, eta);
}

QfiResult sp_qfi(double eta) {
  return ensemble_qfi([&](double p) { return simulate_single_photon(p, eta); }, kPi / 4.0, eta);
}

QfiResult ecs_qfi(const SchemeParams& params) {
  return ensemble_qfi(
      [&](double p) {
        SchemeParams q = params;
        q.phi = p;
        return simulate_simple_scheme(q);
      },
      params.phi, params.eta);
}

BaselinePoint baseline_point(const SchemeParams& params, double photons) {
  params.validate();
  BaselinePoint b;
  b.alpha0 = std::abs(params.alpha0);
  b.eta = params.eta;
  b.nbar = mean_photons_through_phase(params);
  b.noon_n = equivalent_noon_size(params);
  b.f_ecs = ecs_qfi(params).f_q;
  b.f_noon = noon_qfi(b.noon_n, params.eta).f_q;
  b.f_sp = sp_qfi(params.eta).f_q;
  b.mu_ecs = runs_for_budget(ProbeKind::kEcs, params, photons);
  b.mu_noon = runs_for_budget(ProbeKind::kNoon, params, photons, b.noon_n);
  b.mu_sp = runs_for_budget(ProbeKind::kSingleParticle, params, photons);
  b.delta_phi_cf = crb(b.f_ecs, static_cast<double>(b.mu_ecs));
  b.delta_phi_nf = crb(b.f_noon, static_cast<double>(b.mu_noon));
  b.delta_phi_sf = crb(b.f_sp, static_cast<double>(b.mu_sp));
  return b;
}

std::vector<BaselinePoint> baseline_curves(const std::vector<double>& alphas,
                                           const std::vector<double>& etas, double photons,
                                           double ecs_theta, std::size_t threads) {
  if (alphas.empty() || etas.empty()) throw InvalidParameter("baseline_curves: empty range");
  std::vector<BaselinePoint> rows(alphas.size() * etas.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    SchemeParams p;
    p.alpha0 = alphas[i / etas.size()];
    p.eta = etas[i % etas.size()];
    p.ecs_theta = ecs_theta;
    rows[i] = baseline_point(p, photons);
  });
  return rows;
}

}  // namespace ecsm
