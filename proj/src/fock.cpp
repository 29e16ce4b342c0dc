#include "ecsm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace ecsm {

namespace {

// Amplitudes with |a|^2 below this are not stored.
constexpr double kNormFloor = 1e-40;

void check_same_modes(const PureState& a, const PureState& b, const char* what) {
  if (a.mode_count() != b.mode_count())
    throw DimensionMismatch(std::string(what) + ": mode counts differ");
}

}  // namespace

int default_cutoff(Complex alpha) {
  const double r = std::abs(alpha);
  return static_cast<int>(std::ceil(r * r + 10.0 * r + 20.0));
}

//------------------------------------------------------------------------------
// PureState
//------------------------------------------------------------------------------

PureState::PureState(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
  if (cutoffs_.size() > kMaxModes) throw DimensionMismatch("PureState: too many modes");
  for (int c : cutoffs_)
    if (c < 0) throw InvalidParameter("PureState: negative cutoff");
}

PureState PureState::vacuum(std::vector<int> cutoffs) {
  PureState s(std::move(cutoffs));
  s.add(FockIndex(s.mode_count()), 1.0);
  return s;
}

PureState PureState::basis(const FockIndex& occupation, std::vector<int> cutoffs) {
  PureState s(std::move(cutoffs));
  s.add(occupation, 1.0);
  return s;
}

int PureState::cutoff(std::size_t mode) const {
  if (mode >= cutoffs_.size()) throw ModeOutOfRange("PureState: mode out of range");
  return cutoffs_[mode];
}

Complex PureState::amplitude(const FockIndex& occupation) const {
  auto it = amps_.find(occupation);
  return it == amps_.end() ? Complex{} : it->second;
}

void PureState::add(const FockIndex& occupation, Complex value) {
  if (occupation.size() != cutoffs_.size())
    throw DimensionMismatch("PureState::add: occupation has wrong mode count");
  for (std::size_t m = 0; m < cutoffs_.size(); ++m)
    if (occupation[m] > cutoffs_[m])
      throw CutoffTooSmall("PureState::add: occupation " + occupation.to_string() +
                           " exceeds cutoff of mode " + std::to_string(m));
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw InvalidParameter("PureState::add: non-finite amplitude");
  auto [it, inserted] = amps_.try_emplace(occupation, value);
  if (!inserted) it->second += value;
  if (std::norm(it->second) < kNormFloor) amps_.erase(it);
}

double PureState::norm_squared() const {
  double s = 0.0;
  for (const auto& [occ, a] : amps_) s += std::norm(a);
  return s;
}

PureState PureState::normalized() const {
  const double n2 = norm_squared();
  if (n2 <= 0.0) throw InvalidParameter("PureState::normalized: zero state");
  return scaled(1.0 / std::sqrt(n2));
}

PureState PureState::scaled(Complex factor) const {
  PureState out(cutoffs_);
  for (const auto& [occ, a] : amps_) out.add(occ, factor * a);
  return out;
}

//------------------------------------------------------------------------------
// Constructors and algebra
//------------------------------------------------------------------------------

PureState coherent_amplitudes(Complex alpha, int cutoff, double tail_budget) {
  if (cutoff < 0) throw InvalidParameter("coherent_amplitudes: negative cutoff");
  PureState s({cutoff});
  const double r = std::abs(alpha);
  const double theta = std::arg(alpha);
  double kept = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    Complex a;
    if (r == 0.0) {
      a = n == 0 ? 1.0 : 0.0;
    } else {
      const double log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
      a = std::polar(std::exp(log_mag), n * theta);
    }
    kept += std::norm(a);
    if (a != Complex{}) s.add(FockIndex{n}, a);
  }
  if (1.0 - kept > tail_budget)
    throw CutoffTooSmall("coherent_amplitudes: tail mass " + std::to_string(1.0 - kept) +
                         " beyond cutoff " + std::to_string(cutoff));
  return s;
}

PureState coherent_state(Complex alpha, double tail_budget) {
  return coherent_amplitudes(alpha, default_cutoff(alpha), tail_budget);
}

Complex inner_product(const PureState& a, const PureState& b) {
  check_same_modes(a, b, "inner_product");
  if (a.cutoffs() != b.cutoffs()) throw DimensionMismatch("inner_product: cutoffs differ");
  const auto& small = a.support_size() <= b.support_size() ? a : b;
  const auto& large = &small == &a ? b : a;
  Complex s{};
  for (const auto& [occ, x] : small.amplitudes()) {
    const Complex y = large.amplitude(occ);
    if (y == Complex{}) continue;
    s += &small == &a ? std::conj(x) * y : std::conj(y) * x;
  }
  return s;
}

Complex coherent_overlap(Complex alpha, Complex beta) {
  return std::exp(-0.5 * std::norm(alpha) + std::conj(alpha) * beta - 0.5 * std::norm(beta));
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<int> cutoffs = a.cutoffs();
  cutoffs.insert(cutoffs.end(), b.cutoffs().begin(), b.cutoffs().end());
  PureState out(std::move(cutoffs));
  for (const auto& [oa, xa] : a.amplitudes()) {
    for (const auto& [ob, xb] : b.amplitudes()) {
      FockIndex occ = oa;
      for (std::size_t m = 0; m < ob.size(); ++m) occ = occ.appended(ob[m]);
      out.add(occ, xa * xb);
    }
  }
  return out;
}

PureState tensor(std::span<const PureState> states) {
  if (states.empty()) throw InvalidParameter("tensor: no states");
  PureState out = states.front();
  for (std::size_t i = 1; i < states.size(); ++i) out = tensor(out, states[i]);
  return out;
}

PureState linear_combination(Complex a, const PureState& x, Complex b, const PureState& y) {
  check_same_modes(x, y, "linear_combination");
  std::vector<int> cutoffs(x.mode_count());
  for (std::size_t m = 0; m < cutoffs.size(); ++m)
    cutoffs[m] = std::max(x.cutoffs()[m], y.cutoffs()[m]);
  PureState out(std::move(cutoffs));
  for (const auto& [occ, v] : x.amplitudes()) out.add(occ, a * v);
  for (const auto& [occ, v] : y.amplitudes()) out.add(occ, b * v);
  return out;
}

WeightedEnsemble pure_ensemble(PureState state) {
  WeightedEnsemble e;
  const double w = state.norm_squared();
  e.branches.push_back({w, state.normalized(), {}});
  return e;
}

//------------------------------------------------------------------------------
// DensityMatrix
//------------------------------------------------------------------------------

double DensityMatrix::hermiticity_error() const {
  if (matrix.size() == 0) return 0.0;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  if (matrix.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix to_density_matrix(const WeightedEnsemble& ensemble,
                                std::span<const std::size_t> modes,
                                std::size_t max_dimension) {
  if (ensemble.branches.empty()) return {};
  const std::size_t total_modes = ensemble.branches.front().state.mode_count();
  std::vector<bool> kept(total_modes, false);
  for (std::size_t m : modes) {
    if (m >= total_modes) throw ModeOutOfRange("to_density_matrix: mode out of range");
    if (kept[m]) throw InvalidParameter("to_density_matrix: repeated mode");
    kept[m] = true;
  }

  auto split = [&](const FockIndex& occ) {
    FockIndex sub(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) sub.set(i, occ[modes[i]]);
    FockIndex rest(total_modes - modes.size());
    for (std::size_t m = 0, k = 0; m < total_modes; ++m)
      if (!kept[m]) rest.set(k++, occ[m]);
    return std::pair{sub, rest};
  };

  std::set<FockIndex> basis_set;
  for (const auto& br : ensemble.branches) {
    if (br.state.mode_count() != total_modes)
      throw DimensionMismatch("to_density_matrix: branch mode counts differ");
    for (const auto& [occ, a] : br.state.amplitudes()) {
      basis_set.insert(split(occ).first);
      if (basis_set.size() > max_dimension)
        throw BasisTooLarge("to_density_matrix: reduced basis exceeds " +
                            std::to_string(max_dimension));
    }
  }

  DensityMatrix rho;
  rho.basis.assign(basis_set.begin(), basis_set.end());
  std::map<FockIndex, Eigen::Index> index;
  for (std::size_t i = 0; i < rho.basis.size(); ++i)
    index.emplace(rho.basis[i], static_cast<Eigen::Index>(i));
  const auto dim = static_cast<Eigen::Index>(rho.basis.size());
  rho.matrix = Eigen::MatrixXcd::Zero(dim, dim);

  for (const auto& br : ensemble.branches) {
    std::map<FockIndex, std::vector<std::pair<Eigen::Index, Complex>>> by_rest;
    for (const auto& [occ, a] : br.state.amplitudes()) {
      auto [sub, rest] = split(occ);
      by_rest[rest].emplace_back(index.at(sub), a);
    }
    for (const auto& [rest, column] : by_rest)
      for (const auto& [i, ai] : column)
        for (const auto& [j, aj] : column) rho.matrix(i, j) += br.weight * ai * std::conj(aj);
  }
  return rho;
}

DensityMatrix to_density_matrix(const WeightedEnsemble& ensemble, std::size_t max_dimension) {
  if (ensemble.branches.empty()) return {};
  std::vector<std::size_t> modes(ensemble.branches.front().state.mode_count());
  for (std::size_t m = 0; m < modes.size(); ++m) modes[m] = m;
  return to_density_matrix(ensemble, modes, max_dimension);
}

DensityMatrix projector(const PureState& state) {
  WeightedEnsemble e;
  e.branches.push_back({1.0, state, {}});
  return to_density_matrix(e);
}

DensityMatrix embed(const DensityMatrix& rho, const std::vector<FockIndex>& basis) {
  std::map<FockIndex, Eigen::Index> index;
  for (std::size_t i = 0; i < basis.size(); ++i)
    index.emplace(basis[i], static_cast<Eigen::Index>(i));
  std::vector<Eigen::Index> where(rho.basis.size());
  for (std::size_t i = 0; i < rho.basis.size(); ++i) {
    auto it = index.find(rho.basis[i]);
    if (it == index.end()) throw BasisMismatch("embed: target basis is missing a state");
    where[i] = it->second;
  }
  DensityMatrix out;
  out.basis = basis;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  out.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < where.size(); ++i)
    for (std::size_t j = 0; j < where.size(); ++j)
      out.matrix(where[i], where[j]) = rho.matrix(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace ecsm
