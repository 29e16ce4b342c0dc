// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "ecsm/experiments.hpp"
#include "ecsm/fisher.hpp"
#include "ecsm/metrology.hpp"
#include "ecsm/optics.hpp"
#include "ecsm/schemes.hpp"

using namespace ecsm;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double sp_precision(double photons, std::size_t experiments, std::uint64_t seed) {
  const double phi = kPi / 4.0;
  TabulatedModel model(distribution_family([](double p) { return simulate_single_photon(p, 1.0); }),
                       fringe_window(phi, 1.0, 1024));
  PrecisionOptions opts;
  opts.experiments = experiments;
  opts.seed = seed;
  return precision(model, phi, make_budget(ProbeKind::kSingleParticle, {}, photons), opts)
      .delta_phi_rmse;
}

double no_loss_weight(const WeightedEnsemble& ens) {
  double w = 0.0;
  for (const auto& br : ens.branches)
    if (std::all_of(br.environment.begin(), br.environment.end(), [](int n) { return n == 0; }))
      w += br.weight;
  return w;
}

Verdict ac1() {
  const double d = sp_precision(400, 2000, 42);
  return {d >= 0.0336 && d <= 0.0372, fmt("SP delta_phi %.5f, target [0.0336, 0.0372]", d)};
}

Verdict ac2() {
  double err = 0.0;
  for (int n = 2; n <= 6; ++n) err = std::max(err, std::abs(noon_qfi(n, 1.0).f_q - n * n));
  const std::size_t mu = runs_for_budget(ProbeKind::kNoon, {}, 400, 2);
  const double bound = crb(noon_qfi(2, 1.0).f_q, static_cast<double>(mu));
  const bool ok = err < 1e-6 && std::abs(bound - 0.025) < 1e-12;
  return {ok, fmt("max |F_Q - n^2| = %.2e, crb(n=2, mu=%zu) = %.15f", err, mu, bound)};
}

Verdict ac3() {
  double e_simple = 0.0, e_long = 0.0;
  for (double a : {1.0, std::sqrt(2.0), 2.0})
    for (double eta : {0.5, 0.8}) {
      SchemeParams p;
      p.alpha0 = a;
      p.alpha1 = a;
      p.eta = eta;
      p.phi = 0.3;
      e_simple = std::max(e_simple, std::abs(no_loss_weight(simulate_simple_scheme(p)) -
                                             std::exp(a * a * (eta - 1.0))));
      const Scheme s = long_arm_scheme(p, long_arm_measurement(MeasurementStage::kQbsThenHomodyne));
      const double w = run_circuit(s.circuit, s.input).decompose().branches.front().weight;
      e_long = std::max(e_long, std::abs(w - std::exp(-a * a * (1.0 - eta))));
    }
  return {e_simple < 1e-10 && e_long < 1e-10,
          fmt("two-mode c1 error %.2e, long-arm c1 error %.2e", e_simple, e_long)};
}

Verdict ac4() {
  double err = 0.0;
  for (double a : {1.0, std::sqrt(2.0), 2.0})
    for (double eta : {0.5, 0.8}) {
      const PureState in = coherent_state(a);
      const DensityMatrix rho = to_density_matrix(apply_loss(in, 0, eta));
      const DensityMatrix ref = projector(coherent_amplitudes(std::sqrt(eta) * a, in.cutoff(0)));
      std::set<FockIndex> all(rho.basis.begin(), rho.basis.end());
      all.insert(ref.basis.begin(), ref.basis.end());
      const std::vector<FockIndex> basis(all.begin(), all.end());
      err = std::max(err, (embed(rho, basis).matrix - embed(ref, basis).matrix).cwiseAbs().maxCoeff());
    }
  return {err < 1e-8, fmt("max |rho - |sqrt(eta) a><sqrt(eta) a|| = %.2e", err)};
}

Verdict ac5() {
  double both = 0.0, norm_err = 0.0;
  for (double phi : {0.0, kPi / 4.0, kPi / 2.0}) {
    SchemeParams p;
    p.phi = phi;
    const OutcomeDistribution d = outcome_distribution(simulate_simple_scheme(p), 0.0);
    for (const auto& [k, prob] : d)
      if (k[0] > 0 && k[1] > 0) both += prob;
    norm_err = std::max(norm_err, std::abs(total_probability(d) - 1.0));
  }
  return {both == 0.0 && norm_err < 1e-8,
          fmt("P(both outputs lit) = %g, max |sum P - 1| = %.2e", both, norm_err)};
}

Verdict ac6() {
  RunConfig cfg = default_config("fig2");
  cfg.alpha_grid = {std::sqrt(2.0), 4.0, 4.5, 5.0};
  const auto rows = sweep_alpha_noloss(cfg);
  bool ok = rows[0].delta_phi_ecs < rows[0].delta_phi_noon_qfi;
  std::string detail = fmt("a=%.3f CM %.5f vs NF %.5f", rows[0].alpha0, rows[0].delta_phi_ecs,
                           rows[0].delta_phi_noon_qfi);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i].delta_phi_ecs / rows[i].delta_phi_ecs_qfi;
    ok = ok && std::abs(ratio - 1.0) <= 0.10;
    detail += fmt("; a=%.1f CM/CF %.3f", rows[i].alpha0, ratio);
  }
  return {ok, detail};
}

Verdict ac7() {
  const auto rows = sweep_eta_simple(default_config("fig4"));  // eta ascending
  // eta* = smallest eta from which ECS stays ahead of NOON.
  std::size_t first_win = rows.size();
  for (std::size_t i = rows.size(); i-- > 0;) {
    if (rows[i].delta_phi_ecs < rows[i].delta_phi_noon_qfi)
      first_win = i;
    else
      break;
  }
  bool below = first_win > 0 && first_win < rows.size();
  for (std::size_t i = 0; i < first_win && below; ++i)
    below = rows[i].delta_phi_ecs > rows[i].delta_phi_noon_qfi;
  std::string detail;
  for (const auto& r : rows) detail += fmt("%s%.2f:%.4f/%.4f", detail.empty() ? "" : " ", r.eta,
                                           r.delta_phi_ecs, r.delta_phi_noon_qfi);
  if (below) detail = fmt("eta* = %.2f; ", rows[first_win].eta) + detail;
  return {below, "eta:CM/NF " + detail};
}

Verdict ac8() {
  RunConfig cfg = default_config("fig5");
  cfg.eta_grid = {0.6, 0.7, 0.8, 0.9, 1.0};
  const auto rows = optimize_long_arm(cfg);
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const double best_other = std::min(r.delta_phi_noon_qfi, r.delta_phi_sp_qfi);
    ok = ok && r.delta_phi_ecs <= best_other;
    detail += fmt("%s%.2f:%.4f/%.4f", detail.empty() ? "" : " ", r.eta, r.delta_phi_ecs, best_other);
  }
  return {ok, "eta:ECS/min(NF,SF) " + detail};
}

Verdict ac9() {
  bool ok = true;
  std::string detail;
  for (const char* fig : {"fig6", "fig7"}) {
    const auto rows = optimize_long_arm(default_config(fig));
    std::size_t ecs_wins = 0, noon_wins = 0;
    std::string wins;
    for (const auto& r : rows) {
      if (r.delta_phi_ecs < std::min(r.delta_phi_noon_qfi, r.delta_phi_sp_qfi)) {
        ++ecs_wins;
        wins += fmt(" %.2f", r.eta);
      }
      if (r.delta_phi_noon_qfi < r.delta_phi_ecs) ++noon_wins;
    }
    ok = ok && 2 * ecs_wins > rows.size() && noon_wins >= 1;
    detail += fmt("%s%s ECS wins %zu/%zu (eta%s), NOON better at %zu", detail.empty() ? "" : "; ",
                  fig, ecs_wins, rows.size(), wins.c_str(), noon_wins);
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict ac10() {
  const double d800 = sp_precision(400, 2000, 42);
  const double d200 = sp_precision(100, 2000, 42);
  const double ratio = d800 / d200;

  RunConfig cfg = default_config("fig2");
  cfg.alpha_grid = {1.0, std::sqrt(2.0), 2.0};
  cfg.experiments = 200;
  const auto dir = std::filesystem::temp_directory_path() / "ecsm_acceptance";
  std::filesystem::create_directories(dir);
  cfg.output_path = (dir / "run1.csv").string();
  reproduce_figure("fig2", cfg);
  cfg.output_path = (dir / "run2.csv").string();
  reproduce_figure("fig2", cfg);
  const std::string a = slurp(dir / "run1.csv"), b = slurp(dir / "run2.csv");
  std::filesystem::remove_all(dir);
  const bool same = !a.empty() && a == b;
  return {std::abs(ratio - 0.5) <= 0.05 && same,
          fmt("SP mu=800/mu=200 ratio %.4f (%.5f/%.5f); CSV byte-identical: %s", ratio, d800, d200,
              same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"AC1 single-photon baseline", ac1},    {"AC2 NOON Heisenberg limit", ac2},
      {"AC3 branch weights", ac3},            {"AC4 coherent-loss closure", ac4},
      {"AC5 exclusion and normalization", ac5}, {"AC6 alpha sweep dominance", ac6},
      {"AC7 loss crossover", ac7},            {"AC8 long arm beats NOON and SP", ac8},
      {"AC9 long arm majority", ac9},         {"AC10 scaling and reproducibility", ac10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", name, secs, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
