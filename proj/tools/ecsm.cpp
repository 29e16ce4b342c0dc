// ecsm: reproduce the precision curves and run the self-check.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "ecsm/experiments.hpp"

using namespace ecsm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSelfcheck = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool svg = false;
  std::optional<std::size_t> experiments;
  std::optional<double> resource;
  std::optional<std::size_t> threads;
};

RunConfig make_config(const std::string& figure_id, const Flags& f) {
  RunConfig c = default_config(figure_id);
  if (!f.config.empty()) c = load_config(f.config, c);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output_path = f.out;
  if (f.svg) c.svg = true;
  if (f.experiments) c.experiments = *f.experiments;
  if (f.resource) c.resource = *f.resource;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

void report_long_arm(const FigureOutput& fig) {
  for (const auto& p : fig.long_arm) {
    const auto& b = p.best;
    std::fprintf(stderr,
                 "eta=%.3g stage=%s alpha1=%.4g phi_op=%.4g phi_ref=%.4g fisher=%.4g "
                 "delta_phi=%.5g (candidates screened: %zu)\n",
                 p.row.eta, to_string(b.stage).c_str(), b.alpha1, b.phi_op, b.phi_ref,
                 b.confirmed_fisher.value_or(b.screening_fisher), *b.delta_phi, p.candidates.size());
  }
}

int run_figure(const std::string& figure_id, const Flags& flags) {
  const RunConfig cfg = make_config(figure_id, flags);
  const FigureOutput fig = reproduce_figure(figure_id, cfg);
  report_long_arm(fig);
  if (cfg.output_path.empty()) std::cout << fig.csv;
  else std::fprintf(stderr, "wrote %s\n", cfg.output_path.c_str());
  return kExitOk;
}

int run_selfcheck(const Flags& flags) {
  if (!flags.config.empty()) make_config("fig2", flags);
  bool ok = true;
  std::printf("%-36s %-6s %s\n", "check", "result", "detail");
  for (const auto& r : selfcheck()) {
    std::printf("%-36s %-6s %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled coherent state phase metrology simulator"};
  app.require_subcommand(1);
  Flags flags;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--out", flags.out, "CSV output path (stdout if omitted)");
    sub->add_flag("--svg", flags.svg, "also write an SVG chart next to the CSV");
    sub->add_option("--experiments", flags.experiments, "experiments per precision estimate");
    sub->add_option("--resource", flags.resource, "photon budget R");
    sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
  };

  std::string figure_id;
  auto* reproduce = app.add_subcommand("reproduce", "reproduce a figure as CSV");
  reproduce->add_option("figure_id", figure_id, "fig2, fig4, fig5, fig6 or fig7")->required();
  add_flags(reproduce);
  auto* sweep_alpha = app.add_subcommand("sweep-alpha", "lossless two-mode scheme over alpha");
  add_flags(sweep_alpha);
  auto* sweep_eta = app.add_subcommand("sweep-eta", "two-mode scheme over transmission");
  add_flags(sweep_eta);
  auto* optimize = app.add_subcommand("optimize", "long-arm scheme optimized at each eta");
  add_flags(optimize);
  auto* check = app.add_subcommand("selfcheck", "fast invariant checks");
  add_flags(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*reproduce) return run_figure(figure_id, flags);
    if (*sweep_alpha) return run_figure("fig2", flags);
    if (*sweep_eta) return run_figure("fig4", flags);
    if (*optimize) {
      // The figure's alpha0 comes from the config; fig5 supplies the defaults.
      return run_figure("fig5", flags);
    }
    if (*check) return run_selfcheck(flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const UnknownFigure& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
