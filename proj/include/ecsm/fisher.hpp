#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ecsm/fock.hpp"
#include "ecsm/schemes.hpp"

namespace ecsm {

enum class QfiMethod { kPureState, kSpectralSld, kAnalytic };

std::string to_string(QfiMethod method);

struct QfiResult {
  double f_q = 0.0;
  QfiMethod method = QfiMethod::kPureState;
  double derivative_step = 0.0;  // 0 for analytic values
};

inline constexpr double kQfiStep = 1e-4;
inline constexpr double kEigenFloor = 1e-12;
inline constexpr double kNormTolerance = 1e-8;

using PureFamily = std::function<PureState(double phi)>;
using MixedFamily = std::function<DensityMatrix(double phi)>;

// 4 (<d psi|d psi> - |<psi|d psi>|^2), derivative from the five-point stencil
// (error O(h^4); a plain central difference is too coarse for n = 6 NOON
// states at h = 1e-4).
QfiResult qfi_pure(const PureFamily& state_fn, double phi0, double h = kQfiStep);

// sum_{ij} 2 |<i|d rho|j>|^2 / (l_i + l_j) over eigenpairs with l_i + l_j > kEigenFloor.
// Matrices at the stencil points are embedded into the union of their bases.
QfiResult qfi_mixed(const MixedFamily& rho_fn, double phi0, double h = kQfiStep);

// 1 / sqrt(mu F_Q).
double crb(double f_q, double mu);

//------------------------------------------------------------------------------
// Probe baselines
//------------------------------------------------------------------------------

// NOON size matching the ECS photons through the phase per run: round(2 nbar), at least 1.
int equivalent_noon_size(const SchemeParams& params);

// Numerical QFI of the lossy probes. Loss acts on both arms at transmission eta.
QfiResult noon_qfi(int n, double eta);
QfiResult sp_qfi(double eta);
// ECS(alpha0, ecs_theta) in the two-mode scheme; params.phi is the evaluation point.
QfiResult ecs_qfi(const SchemeParams& params);

struct BaselinePoint {
  double alpha0 = 0.0;
  double eta = 1.0;
  double nbar = 0.0;
  int noon_n = 0;
  double f_ecs = 0.0, f_noon = 0.0, f_sp = 0.0;
  std::size_t mu_ecs = 0, mu_noon = 0, mu_sp = 0;
  double delta_phi_cf = 0.0;  // ECS
  double delta_phi_nf = 0.0;  // NOON of equivalent size
  double delta_phi_sf = 0.0;  // single photons
};

// QFI bounds for one (alpha0, eta) at photon budget R; mu per probe from runs_for_budget.
BaselinePoint baseline_point(const SchemeParams& params, double photons);

// Rows in (alpha, eta) order, alpha outermost.
std::vector<BaselinePoint> baseline_curves(const std::vector<double>& alphas,
                                           const std::vector<double>& etas, double photons,
                                           double ecs_theta = kPi / 2.0, std::size_t threads = 0);

}  // namespace ecsm
