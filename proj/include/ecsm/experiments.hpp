#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecsm/fisher.hpp"
#include "ecsm/metrology.hpp"
#include "ecsm/schemes.hpp"

namespace ecsm {

//------------------------------------------------------------------------------
// Configuration
//------------------------------------------------------------------------------

// `steps` evenly spaced values from lo to hi inclusive; steps = 1 gives {lo}.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  std::vector<double> values() const;
  double spacing() const { return steps > 1 ? (hi - lo) / (steps - 1) : 0.0; }
};

struct RunConfig {
  std::string figure_id = "fig2";
  double alpha0 = 1.4142135623730951;
  double ecs_theta = kPi / 2.0;
  std::vector<double> eta_grid{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0};
  // Probe amplitudes for the lossless alpha sweep.
  std::vector<double> alpha_grid{0.5, 1.0, 1.4142135623730951, 1.5, 2.0, 2.5,
                                 3.0, 3.5, 4.0, 4.5, 5.0};
  double resource = 400.0;  // R, photons through the phase
  std::size_t experiments = 1000;
  std::size_t grid = 1024;
  std::uint64_t seed = 42;
  Range alpha1_range{1.0, 3.0, 13};  // in units of alpha0
  Range phi_op_range{0.0, kTwoPi * 15.0 / 16.0, 16};
  std::vector<double> phi_ref_values{0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
  std::vector<std::string> measurement_stages{"reference_homodyne", "qbs_homodyne"};
  int cutoff_override = 0;  // 0 = automatic
  std::string output_path;
  double phi_true = kPi / 4.0;  // two-mode scheme benchmarks
  std::size_t screening_samples = 2000;
  std::size_t confirm_samples = 20000;
  std::size_t confirm_candidates = 8;  // per measurement stage
  std::size_t top_candidates = 2;      // per measurement stage
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool svg = false;

  // Throws ConfigError.
  void validate() const;
};

// Paper parameters per figure; throws UnknownFigure.
RunConfig default_config(const std::string& figure_id);

// Overlays a JSON document on `base`. Unknown keys and type errors throw ConfigError.
RunConfig parse_config(const std::string& text, RunConfig base);
RunConfig load_config(const std::string& path, RunConfig base);

//------------------------------------------------------------------------------
// Sweeps
//------------------------------------------------------------------------------

struct SweepRow {
  double eta = 1.0;
  double alpha0 = 0.0;
  std::optional<double> alpha1_opt;
  std::optional<double> phi_op;
  double delta_phi_ecs = 0.0;
  double delta_phi_ecs_qfi = 0.0;
  double delta_phi_noon_qfi = 0.0;
  double delta_phi_sp_qfi = 0.0;
  std::size_t mu = 0;
  std::uint64_t seed = 0;
};

std::string csv_header();
std::string to_csv(const std::vector<SweepRow>& rows);

// Two-mode scheme at eta = 1 over cfg.alpha_grid (rows sorted by alpha).
std::vector<SweepRow> sweep_alpha_noloss(const RunConfig& cfg);
// Two-mode scheme at cfg.alpha0 over cfg.eta_grid.
std::vector<SweepRow> sweep_eta_simple(const RunConfig& cfg);

struct CandidateRecord {
  MeasurementStage stage = MeasurementStage::kReferenceHomodyne;
  double alpha1 = 0.0;
  double phi_op = 0.0;
  double phi_ref = 0.0;
  double screening_fisher = 0.0;
  std::optional<double> confirmed_fisher;
  std::optional<double> delta_phi;
};

struct LongArmPoint {
  SweepRow row;
  CandidateRecord best;
  std::vector<CandidateRecord> candidates;  // every screened candidate
};

// Long-arm optimization at one eta:
//  1. screen the (stage, alpha1, phi_op, phi_ref) grid by Monte Carlo
//     classical Fisher information,
//  2. refine 3x finer around the best screened point,
//  3. per measurement stage, re-screen the leading candidates with a fresh
//     stream and more samples,
//  4. run the full Bayesian precision on each stage's top few; report the
//     smallest.
// All candidates share random streams.
LongArmPoint optimize_long_arm_point(const RunConfig& cfg, double eta);
std::vector<SweepRow> optimize_long_arm(const RunConfig& cfg,
                                        std::vector<LongArmPoint>* details = nullptr);

//------------------------------------------------------------------------------
// Figures and self-check
//------------------------------------------------------------------------------

struct FigureOutput {
  std::vector<SweepRow> rows;
  std::vector<LongArmPoint> long_arm;  // filled for fig5..fig7
  std::string csv;
  std::string svg;  // empty unless cfg.svg
};

// Dispatches on figure_id: fig2 alpha sweep, fig4 eta sweep, fig5..fig7 the
// long-arm optimization. Writes cfg.output_path (and a sibling .svg) when set.
FigureOutput reproduce_figure(const std::string& figure_id, const RunConfig& cfg);

// Minimal line chart of the four precision columns against alpha or eta.
std::string render_svg(const std::vector<SweepRow>& rows, bool x_is_alpha,
                       const std::string& title);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> selfcheck();

}  // namespace ecsm
