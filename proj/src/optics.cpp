#include "ecsm/optics.hpp"

#include <cmath>
#include <map>
#include <string>

namespace ecsm {

namespace {

// Branches lighter than this are dropped by loss channels.
constexpr double kBranchFloor = 1e-20;

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_mode(std::size_t mode, std::size_t modes, const char* what) {
  if (mode >= modes)
    throw ModeOutOfRange(std::string(what) + ": mode " + std::to_string(mode) + " out of range");
}

void check_pair(std::size_t i, std::size_t j, std::size_t modes, const char* what) {
  check_mode(i, modes, what);
  check_mode(j, modes, what);
  if (i == j) throw InvalidParameter(std::string(what) + ": modes must be distinct");
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameter(std::string(what) + ": value must lie in [0, 1]");
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Amplitudes <m, N-m| U |p, q> for m = 0..N of the symmetric beam splitter.
std::vector<Complex> beam_splitter_column(int p, int q, double t, double r) {
  const int total = p + q;
  std::vector<Complex> out(total + 1);
  const double log_t = t > 0.0 ? std::log(t) : -INFINITY;
  const double log_r = r > 0.0 ? std::log(r) : -INFINITY;
  for (int m = 0; m <= total; ++m) {
    const double norm = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(total - m + 1.0) -
                               std::lgamma(p + 1.0) - std::lgamma(q + 1.0));
    double sum = 0.0;
    // k photons of the first input go to the first output, m-k of the second.
    for (int k = std::max(0, m - q); k <= std::min(p, m); ++k) {
      const int t_power = k + q - (m - k);
      const int r_power = (p - k) + (m - k);
      double log_term = log_binomial(p, k) + log_binomial(q, m - k) + norm;
      log_term += t_power == 0 ? 0.0 : t_power * log_t;
      log_term += r_power == 0 ? 0.0 : r_power * log_r;
      if (!std::isfinite(log_term)) continue;
      // i^{r_power} = i^{p+m} (-1)^k
      sum += ((k % 2) ? -1.0 : 1.0) * std::exp(log_term);
    }
    Complex phase{1.0, 0.0};
    for (int s = 0; s < (p + m) % 4; ++s) phase *= kI;
    out[m] = sum * phase;
  }
  return out;
}

}  // namespace

void CircuitSpec::validate() const {
  if (mode_count == 0 || mode_count > kMaxModes)
    throw InvalidParameter("CircuitSpec: mode count must lie in [1, " +
                           std::to_string(kMaxModes) + "]");
  for (const auto& element : elements) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, PhaseShift>) {
            check_mode(e.mode, mode_count, "PhaseShift");
            if (!std::isfinite(e.phi)) throw InvalidParameter("PhaseShift: non-finite phase");
          } else if constexpr (std::is_same_v<T, BeamSplitter>) {
            check_pair(e.mode_i, e.mode_j, mode_count, "BeamSplitter");
            check_probability(e.transmissivity, "BeamSplitter");
          } else if constexpr (std::is_same_v<T, QuantumBeamSplitter>) {
            check_pair(e.mode_i, e.mode_j, mode_count, "QuantumBeamSplitter");
          } else {
            check_mode(e.mode, mode_count, "Loss");
            check_probability(e.eta, "Loss");
          }
        },
        element);
  }
}

//------------------------------------------------------------------------------
// Fock backend
//------------------------------------------------------------------------------

PureState apply_phase(const PureState& state, std::size_t mode, double phi) {
  check_mode(mode, state.mode_count(), "apply_phase");
  PureState out(state.cutoffs());
  for (const auto& [occ, a] : state.amplitudes()) out.add(occ, a * std::polar(1.0, occ[mode] * phi));
  return out;
}

PureState apply_beam_splitter(const PureState& state, std::size_t mode_i, std::size_t mode_j,
                              double transmissivity) {
  check_pair(mode_i, mode_j, state.mode_count(), "apply_beam_splitter");
  check_probability(transmissivity, "apply_beam_splitter");
  std::vector<int> cutoffs = state.cutoffs();
  const int pair_cutoff = cutoffs[mode_i] + cutoffs[mode_j];
  if (pair_cutoff > 0xFFFF) throw CutoffTooSmall("apply_beam_splitter: photon count too large");
  cutoffs[mode_i] = cutoffs[mode_j] = pair_cutoff;

  const double t = std::sqrt(transmissivity);
  const double r = std::sqrt(1.0 - transmissivity);
  std::map<std::pair<int, int>, std::vector<Complex>> columns;
  PureState out(std::move(cutoffs));
  for (const auto& [occ, a] : state.amplitudes()) {
    const int p = occ[mode_i];
    const int q = occ[mode_j];
    auto it = columns.find({p, q});
    if (it == columns.end()) it = columns.emplace(std::pair{p, q}, beam_splitter_column(p, q, t, r)).first;
    for (int m = 0; m <= p + q; ++m) {
      const Complex u = it->second[m];
      if (u == Complex{}) continue;
      out.add(occ.with(mode_i, m).with(mode_j, p + q - m), a * u);
    }
  }
  return out;
}

PureState apply_qbs(const PureState& state, std::size_t mode_i, std::size_t mode_j) {
  check_pair(mode_i, mode_j, state.mode_count(), "apply_qbs");
  std::vector<int> cutoffs = state.cutoffs();
  cutoffs[mode_i] = cutoffs[mode_j] = std::max(cutoffs[mode_i], cutoffs[mode_j]);
  PureState out(std::move(cutoffs));
  const Complex vacuum_phase = std::polar(1.0, kPi / 4.0);
  for (const auto& [occ, a] : state.amplitudes()) {
    const int ni = occ[mode_i];
    const int nj = occ[mode_j];
    if (ni > 0 && nj > 0)
      throw UnsupportedSector("apply_qbs: ket " + occ.to_string() +
                              " has photons in both modes");
    if (ni == 0 && nj == 0) {
      out.add(occ, vacuum_phase * a);
      continue;
    }
    const int n = ni + nj;
    const FockIndex left = occ.with(mode_i, n).with(mode_j, 0);
    const FockIndex right = occ.with(mode_i, 0).with(mode_j, n);
    if (ni > 0) {
      out.add(left, kInvSqrt2 * a);
      out.add(right, kI * kInvSqrt2 * a);
    } else {
      out.add(left, kI * kInvSqrt2 * a);
      out.add(right, kInvSqrt2 * a);
    }
  }
  return out;
}

WeightedEnsemble apply_loss(const PureState& state, std::size_t mode, double eta) {
  check_mode(mode, state.mode_count(), "apply_loss");
  check_probability(eta, "apply_loss");
  const double input_weight = state.norm_squared();
  WeightedEnsemble out;
  if (eta == 1.0) {
    out.branches.push_back({input_weight, state.normalized(), {0}});
    return out;
  }
  // Beam splitter into a vacuum environment, then projection on the
  // environment count e: amplitude sqrt(C(n,e)) eta^{(n-e)/2} (i sqrt(1-eta))^e.
  std::map<int, PureState> by_count;
  const double log_eta = eta > 0.0 ? std::log(eta) : -INFINITY;
  const double log_lost = std::log1p(-eta);
  for (const auto& [occ, a] : state.amplitudes()) {
    const int n = occ[mode];
    for (int e = 0; e <= n; ++e) {
      const int kept = n - e;
      double log_mag = 0.5 * log_binomial(n, e);
      log_mag += kept == 0 ? 0.0 : 0.5 * kept * log_eta;
      log_mag += e == 0 ? 0.0 : 0.5 * e * log_lost;
      if (!std::isfinite(log_mag)) continue;
      Complex phase{1.0, 0.0};
      for (int s = 0; s < e % 4; ++s) phase *= kI;
      auto it = by_count.try_emplace(e, state.cutoffs()).first;
      it->second.add(occ.with(mode, kept), a * phase * std::exp(log_mag));
    }
  }
  for (auto& [e, s] : by_count) {
    const double w = s.norm_squared();
    if (w < kBranchFloor) continue;
    out.branches.push_back({w, s.scaled(1.0 / std::sqrt(w)), {e}});
  }
  return out;
}

WeightedEnsemble apply_loss(const WeightedEnsemble& ensemble, std::size_t mode, double eta) {
  WeightedEnsemble out;
  for (const auto& br : ensemble.branches) {
    for (auto& sub : apply_loss(br.state, mode, eta).branches) {
      const double w = br.weight * sub.weight;
      if (w < kBranchFloor) continue;
      std::vector<int> env = br.environment;
      env.insert(env.end(), sub.environment.begin(), sub.environment.end());
      out.branches.push_back({w, std::move(sub.state), std::move(env)});
    }
  }
  return out;
}

WeightedEnsemble run_circuit(const CircuitSpec& circuit, const WeightedEnsemble& input) {
  circuit.validate();
  WeightedEnsemble current = input;
  for (const auto& br : current.branches)
    if (br.state.mode_count() != circuit.mode_count)
      throw DimensionMismatch("run_circuit: input mode count does not match circuit");
  for (const auto& element : circuit.elements) {
    if (const auto* loss = std::get_if<Loss>(&element)) {
      current = apply_loss(current, loss->mode, loss->eta);
      continue;
    }
    for (auto& br : current.branches) {
      br.state = std::visit(
          [&](const auto& e) -> PureState {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, PhaseShift>)
              return apply_phase(br.state, e.mode, e.phi);
            else if constexpr (std::is_same_v<T, BeamSplitter>)
              return apply_beam_splitter(br.state, e.mode_i, e.mode_j, e.transmissivity);
            else if constexpr (std::is_same_v<T, QuantumBeamSplitter>)
              return apply_qbs(br.state, e.mode_i, e.mode_j);
            else
              return br.state;
          },
          element);
    }
  }
  return current;
}

WeightedEnsemble run_circuit(const CircuitSpec& circuit, const PureState& input) {
  WeightedEnsemble e;
  e.branches.push_back({input.norm_squared(), input.normalized(), {}});
  return run_circuit(circuit, e);
}

//------------------------------------------------------------------------------
// Coherent backend
//------------------------------------------------------------------------------

CoherentMixture apply_phase(const CoherentMixture& state, std::size_t mode, double phi) {
  check_mode(mode, state.mode_count(), "apply_phase");
  std::vector<CoherentTerm> terms = state.terms();
  for (auto& t : terms) t.amplitudes[mode] *= std::polar(1.0, phi);
  return CoherentMixture(state.mode_count(), std::move(terms));
}

CoherentMixture apply_beam_splitter(const CoherentMixture& state, std::size_t mode_i,
                                    std::size_t mode_j, double transmissivity) {
  check_pair(mode_i, mode_j, state.mode_count(), "apply_beam_splitter");
  check_probability(transmissivity, "apply_beam_splitter");
  const double t = std::sqrt(transmissivity);
  const Complex ir = kI * std::sqrt(1.0 - transmissivity);
  std::vector<CoherentTerm> terms = state.terms();
  for (auto& term : terms) {
    const Complex a = term.amplitudes[mode_i];
    const Complex b = term.amplitudes[mode_j];
    term.amplitudes[mode_i] = t * a + ir * b;
    term.amplitudes[mode_j] = ir * a + t * b;
  }
  return CoherentMixture(state.mode_count(), std::move(terms));
}

CoherentMixture apply_qbs(const CoherentMixture& state, std::size_t mode_i, std::size_t mode_j) {
  check_pair(mode_i, mode_j, state.mode_count(), "apply_qbs");
  std::vector<CoherentTerm> terms;
  for (const auto& term : state.terms()) {
    const Complex a = term.amplitudes[mode_i];
    const Complex b = term.amplitudes[mode_j];
    if (a != Complex{} && b != Complex{})
      throw UnsupportedSector("apply_qbs: coherent term occupies both modes");
    if (a == Complex{} && b == Complex{}) {
      terms.push_back({term.coeff * std::polar(1.0, kPi / 4.0), term.amplitudes, term.environment});
      continue;
    }
    const Complex x = a != Complex{} ? a : b;
    CoherentTerm left = term;
    left.amplitudes[mode_i] = x;
    left.amplitudes[mode_j] = 0.0;
    CoherentTerm right = term;
    right.amplitudes[mode_i] = 0.0;
    right.amplitudes[mode_j] = x;
    left.coeff = term.coeff * kInvSqrt2 * (a != Complex{} ? Complex{1.0} : kI);
    right.coeff = term.coeff * kInvSqrt2 * (a != Complex{} ? kI : Complex{1.0});
    terms.push_back(std::move(left));
    terms.push_back(std::move(right));
  }
  return CoherentMixture(state.mode_count(), std::move(terms)).simplified();
}

CoherentMixture apply_loss(const CoherentMixture& state, std::size_t mode, double eta) {
  check_mode(mode, state.mode_count(), "apply_loss");
  check_probability(eta, "apply_loss");
  if (eta == 1.0) return state;
  const double kept = std::sqrt(eta);
  const Complex lost = kI * std::sqrt(1.0 - eta);
  std::vector<CoherentTerm> terms = state.terms();
  for (auto& t : terms) {
    t.environment.push_back(lost * t.amplitudes[mode]);
    t.amplitudes[mode] *= kept;
  }
  return CoherentMixture(state.mode_count(), std::move(terms)).simplified();
}

CoherentMixture run_circuit(const CircuitSpec& circuit, const CoherentMixture& input) {
  circuit.validate();
  if (input.mode_count() != circuit.mode_count)
    throw DimensionMismatch("run_circuit: input mode count does not match circuit");
  CoherentMixture current = input;
  for (const auto& element : circuit.elements) {
    current = std::visit(
        [&](const auto& e) -> CoherentMixture {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, PhaseShift>)
            return apply_phase(current, e.mode, e.phi);
          else if constexpr (std::is_same_v<T, BeamSplitter>)
            return apply_beam_splitter(current, e.mode_i, e.mode_j, e.transmissivity);
          else if constexpr (std::is_same_v<T, QuantumBeamSplitter>)
            return apply_qbs(current, e.mode_i, e.mode_j);
          else
            return apply_loss(current, e.mode, e.eta);
        },
        element);
  }
  return current;
}

}  // namespace ecsm
