#include "ecsm/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ecsm/long_arm_model.hpp"
#include "ecsm/parallel.hpp"

namespace ecsm {

using nlohmann::json;

//------------------------------------------------------------------------------
// Configuration
//------------------------------------------------------------------------------

std::vector<double> Range::values() const {
  std::vector<double> v;
  if (steps <= 1) return {lo};
  for (int k = 0; k < steps; ++k) v.push_back(lo + (hi - lo) * k / (steps - 1));
  return v;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) fail("alpha0 must be positive");
  if (!std::isfinite(ecs_theta)) fail("ecs_theta must be finite");
  if (eta_grid.empty()) fail("eta_grid must be nonempty");
  for (double e : eta_grid)
    if (!(e > 0.0 && e <= 1.0)) fail("eta_grid values must lie in (0, 1], got " + std::to_string(e));
  if (alpha_grid.empty()) fail("alpha_grid must be nonempty");
  for (double a : alpha_grid)
    if (!(a > 0.0) || !std::isfinite(a)) fail("alpha_grid values must be positive");
  if (!(resource >= 1.0) || !std::isfinite(resource)) fail("R must be at least 1");
  if (experiments < 1) fail("experiments must be at least 1");
  if (grid < 2) fail("grid must have at least two points");
  for (const auto* r : {&alpha1_range, &phi_op_range}) {
    if (!(r->lo <= r->hi) || !std::isfinite(r->lo) || !std::isfinite(r->hi))
      fail("ranges need lo <= hi");
    if (r->steps < 1) fail("ranges need steps >= 1");
  }
  if (!(alpha1_range.lo > 0.0)) fail("alpha1_range must be positive");
  if (phi_ref_values.empty()) fail("phi_ref_values must be nonempty");
  if (measurement_stages.empty()) fail("measurement_stages must be nonempty");
  for (const auto& s : measurement_stages) {
    try {
      measurement_stage_from_string(s);
    } catch (const InvalidParameter& e) {
      fail(e.what());
    }
  }
  if (cutoff_override < 0) fail("cutoff_override must be >= 0");
  if (!(phi_true > 0.0 && phi_true < kPi)) fail("phi_true must lie in (0, pi)");
  if (screening_samples < 1 || confirm_samples < 1) fail("sample counts must be positive");
  if (confirm_candidates < 1 || top_candidates < 1) fail("candidate counts must be positive");
}

RunConfig default_config(const std::string& figure_id) {
  RunConfig c;
  c.figure_id = figure_id;
  if (figure_id == "fig2" || figure_id == "fig4") return c;
  c.ecs_theta = 0.0;
  if (figure_id == "fig5") {
    c.alpha0 = std::sqrt(2.0);
  } else if (figure_id == "fig6") {
    c.alpha0 = 2.0;
  } else if (figure_id == "fig7") {
    c.alpha0 = 5.0;
  } else {
    throw UnknownFigure("unknown figure '" + figure_id + "' (expected fig2, fig4, fig5, fig6, fig7)");
  }
  return c;
}

namespace {

Range parse_range(const json& j, const std::string& key) {
  Range r;
  if (j.is_array() && j.size() == 3) {
    r.lo = j[0].get<double>();
    r.hi = j[1].get<double>();
    r.steps = j[2].get<int>();
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      if (k != "lo" && k != "hi" && k != "steps") throw ConfigError(key + ": unknown key '" + k + "'");
    r.lo = j.at("lo").get<double>();
    r.hi = j.at("hi").get<double>();
    r.steps = j.at("steps").get<int>();
  } else {
    throw ConfigError(key + ": expected [lo, hi, steps]");
  }
  return r;
}

template <class T>
std::size_t count_of(const json& v) {
  const auto n = v.get<T>();
  if (n < 0) throw ConfigError("counts must be non-negative");
  return static_cast<std::size_t>(n);
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "figure_id") c.figure_id = v.get<std::string>();
      else if (k == "alpha0") c.alpha0 = v.get<double>();
      else if (k == "ecs_theta") c.ecs_theta = v.get<double>();
      else if (k == "eta_grid") c.eta_grid = v.get<std::vector<double>>();
      else if (k == "alpha_grid") c.alpha_grid = v.get<std::vector<double>>();
      else if (k == "R") c.resource = v.get<double>();
      else if (k == "experiments") c.experiments = count_of<long long>(v);
      else if (k == "grid") c.grid = count_of<long long>(v);
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "alpha1_range") c.alpha1_range = parse_range(v, k);
      else if (k == "phi_op_range") c.phi_op_range = parse_range(v, k);
      else if (k == "phi_ref_values") c.phi_ref_values = v.get<std::vector<double>>();
      else if (k == "measurement_stages") c.measurement_stages = v.get<std::vector<std::string>>();
      else if (k == "cutoff_override") c.cutoff_override = v.is_null() ? 0 : v.get<int>();
      else if (k == "output_path") c.output_path = v.get<std::string>();
      else if (k == "phi_true") c.phi_true = v.get<double>();
      else if (k == "screening_samples") c.screening_samples = count_of<long long>(v);
      else if (k == "confirm_samples") c.confirm_samples = count_of<long long>(v);
      else if (k == "confirm_candidates") c.confirm_candidates = count_of<long long>(v);
      else if (k == "top_candidates") c.top_candidates = count_of<long long>(v);
      else if (k == "threads") c.threads = count_of<long long>(v);
      else if (k == "svg") c.svg = v.get<bool>();
      else throw ConfigError("unknown config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

//------------------------------------------------------------------------------
// CSV
//------------------------------------------------------------------------------

std::string csv_header() {
  return "eta,alpha0,alpha1_opt,phi_op,delta_phi_ecs,delta_phi_ecs_qfi,delta_phi_noon_qfi,"
         "delta_phi_sp_qfi,mu,seed";
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += num(r.eta) + "," + num(r.alpha0) + "," + num(r.alpha1_opt) + "," + num(r.phi_op) + "," +
           num(r.delta_phi_ecs) + "," + num(r.delta_phi_ecs_qfi) + "," +
           num(r.delta_phi_noon_qfi) + "," + num(r.delta_phi_sp_qfi) + "," +
           std::to_string(r.mu) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

//------------------------------------------------------------------------------
// Two-mode sweeps
//------------------------------------------------------------------------------

namespace {

SweepRow simple_point(const RunConfig& cfg, double alpha, double eta) {
  SchemeParams p;
  p.alpha0 = alpha;
  p.ecs_theta = cfg.ecs_theta;
  p.eta = eta;
  p.phi = cfg.phi_true;
  p.cutoff_override = cfg.cutoff_override;
  p.validate();

  TabulatedModel model(distribution_family([p](double phi) {
                         SchemeParams q = p;
                         q.phi = phi;
                         return simulate_simple_scheme(q);
                       }),
                       fringe_window(cfg.phi_true, std::norm(p.alpha0), cfg.grid));
  const ResourceBudget budget = make_budget(ProbeKind::kEcs, p, cfg.resource);
  PrecisionOptions opts;
  opts.experiments = cfg.experiments;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  const PrecisionResult res = precision(model, cfg.phi_true, budget, opts, p);
  const BaselinePoint b = baseline_point(p, cfg.resource);

  SweepRow row;
  row.eta = eta;
  row.alpha0 = alpha;
  row.delta_phi_ecs = res.delta_phi_rmse;
  row.delta_phi_ecs_qfi = b.delta_phi_cf;
  row.delta_phi_noon_qfi = b.delta_phi_nf;
  row.delta_phi_sp_qfi = b.delta_phi_sf;
  row.mu = budget.runs;
  row.seed = cfg.seed;
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_alpha_noloss(const RunConfig& cfg) {
  cfg.validate();
  std::vector<double> alphas = cfg.alpha_grid;
  std::sort(alphas.begin(), alphas.end());
  std::vector<SweepRow> rows;
  for (double a : alphas) rows.push_back(simple_point(cfg, a, 1.0));
  return rows;
}

std::vector<SweepRow> sweep_eta_simple(const RunConfig& cfg) {
  cfg.validate();
  std::vector<double> etas = cfg.eta_grid;
  std::sort(etas.begin(), etas.end());
  std::vector<SweepRow> rows;
  for (double e : etas) rows.push_back(simple_point(cfg, cfg.alpha0, e));
  return rows;
}

//------------------------------------------------------------------------------
// Long-arm optimization
//------------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kScreenStream = 0x5c7ee11ULL << 32;
constexpr std::uint64_t kConfirmStream = 0xc0f1e7ULL << 32;

SchemeParams candidate_params(const SchemeParams& base, const CandidateRecord& c) {
  SchemeParams p = base;
  p.alpha1 = c.alpha1;
  p.phi_ref = c.phi_ref;
  p.phi = c.phi_op;
  return p;
}

double screen(const SchemeParams& base, const CandidateRecord& c, std::size_t samples,
              std::uint64_t seed, std::uint64_t stream) {
  const MixtureFamily family =
      long_arm_family(candidate_params(base, c), long_arm_measurement(c.stage));
  Rng rng = make_rng(seed, stream);
  return classical_fisher_mc([&](double phi) { return make_coherent_sampler(family(phi)); },
                             c.phi_op, samples, rng);
}

// Indices ordered by `score` (descending), skipping exact mirror images:
// candidates whose scores agree to 1e-12 relative came from identical
// outcome statistics on the shared stream.
std::vector<std::size_t> distinct_leaders(const std::vector<double>& score, std::size_t count) {
  std::vector<std::size_t> order(score.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<std::size_t> out;
  for (std::size_t i : order) {
    if (out.size() >= count) break;
    bool dup = false;
    for (std::size_t j : out)
      if (std::abs(score[i] - score[j]) <= 1e-12 * std::max(1.0, std::abs(score[j]))) dup = true;
    if (!dup) out.push_back(i);
  }
  return out;
}

}  // namespace

LongArmPoint optimize_long_arm_point(const RunConfig& cfg, double eta) {
  cfg.validate();
  SchemeParams base;
  base.alpha0 = cfg.alpha0;
  base.ecs_theta = cfg.ecs_theta;
  base.eta = eta;
  base.validate();

  std::vector<CandidateRecord> cands;
  for (const auto& name : cfg.measurement_stages)
    for (double r : cfg.alpha1_range.values())
      for (double phi : cfg.phi_op_range.values())
        for (double ref : cfg.phi_ref_values)
          cands.push_back({measurement_stage_from_string(name), r * cfg.alpha0, phi, ref, 0.0, {}, {}});

  parallel_for(cands.size(), cfg.threads, [&](std::size_t i) {
    cands[i].screening_fisher = screen(base, cands[i], cfg.screening_samples, cfg.seed, kScreenStream);
  });

  // Refinement: 3x finer steps around the best screened point.
  {
    const auto top = std::max_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return a.screening_fisher < b.screening_fisher;
    });
    const CandidateRecord inc = *top;
    const double da = cfg.alpha1_range.spacing() * cfg.alpha0 / 3.0;
    const double dp = cfg.phi_op_range.spacing() / 3.0;
    const double a_lo = cfg.alpha1_range.lo * cfg.alpha0, a_hi = cfg.alpha1_range.hi * cfg.alpha0;
    std::vector<CandidateRecord> fine;
    for (int ia = -2; ia <= 2; ++ia)
      for (int ip = -2; ip <= 2; ++ip) {
        if ((ia == 0 && ip == 0) || (da == 0.0 && ia != 0) || (dp == 0.0 && ip != 0)) continue;
        const double a = inc.alpha1 + ia * da;
        if (a < a_lo - 1e-12 || a > a_hi + 1e-12) continue;
        CandidateRecord c = inc;
        c.alpha1 = a;
        c.phi_op = inc.phi_op + ip * dp;
        fine.push_back(c);
      }
    parallel_for(fine.size(), cfg.threads, [&](std::size_t i) {
      fine[i].screening_fisher = screen(base, fine[i], cfg.screening_samples, cfg.seed, kScreenStream);
    });
    cands.insert(cands.end(), fine.begin(), fine.end());
  }

  // Confirmation on a fresh stream (the first screen's maxima are biased
  // upward), then full Bayesian precision on the leaders. Each measurement
  // stage keeps its own finalists: a high Fisher score does not guarantee a
  // likelihood the posterior can resolve at this budget.
  PrecisionOptions opts;
  opts.experiments = cfg.experiments;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  const ResourceBudget budget = make_budget(ProbeKind::kEcs, base, cfg.resource);
  std::optional<std::size_t> best;
  std::set<MeasurementStage> seen;
  for (const auto& name : cfg.measurement_stages) {
    const MeasurementStage stage = measurement_stage_from_string(name);
    if (!seen.insert(stage).second) continue;
    std::vector<std::size_t> members;
    std::vector<double> score;
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (cands[i].stage == stage) {
        members.push_back(i);
        score.push_back(cands[i].screening_fisher);
      }
    std::vector<std::size_t> leaders;
    for (std::size_t k : distinct_leaders(score, cfg.confirm_candidates)) leaders.push_back(members[k]);
    std::vector<double> confirmed(leaders.size());
    parallel_for(leaders.size(), cfg.threads, [&](std::size_t i) {
      confirmed[i] = screen(base, cands[leaders[i]], cfg.confirm_samples, cfg.seed, kConfirmStream);
    });
    for (std::size_t i = 0; i < leaders.size(); ++i) cands[leaders[i]].confirmed_fisher = confirmed[i];

    for (std::size_t f : distinct_leaders(confirmed, cfg.top_candidates)) {
      CandidateRecord& c = cands[leaders[f]];
      const SchemeParams p = candidate_params(base, c);
      CoherentModel model(long_arm_family(p, long_arm_measurement(c.stage)),
                          half_circle_window(c.phi_op, cfg.grid));
      c.delta_phi = precision(model, c.phi_op, budget, opts, p).delta_phi_rmse;
      if (!best || *c.delta_phi < *cands[*best].delta_phi) best = leaders[f];
    }
  }
  for (const auto& c : cands)
    if (c.delta_phi && *c.delta_phi < *cands[*best].delta_phi)
      throw EstimationFailure("optimizer: reported optimum is not the minimum");

  const BaselinePoint b = baseline_point(base, cfg.resource);
  LongArmPoint out;
  out.best = cands[*best];
  out.row.eta = eta;
  out.row.alpha0 = cfg.alpha0;
  out.row.alpha1_opt = out.best.alpha1;
  out.row.phi_op = out.best.phi_op;
  out.row.delta_phi_ecs = *out.best.delta_phi;
  out.row.delta_phi_ecs_qfi = b.delta_phi_cf;
  out.row.delta_phi_noon_qfi = b.delta_phi_nf;
  out.row.delta_phi_sp_qfi = b.delta_phi_sf;
  out.row.mu = budget.runs;
  out.row.seed = cfg.seed;
  out.candidates = std::move(cands);
  return out;
}

std::vector<SweepRow> optimize_long_arm(const RunConfig& cfg, std::vector<LongArmPoint>* details) {
  cfg.validate();
  std::vector<double> etas = cfg.eta_grid;
  std::sort(etas.begin(), etas.end());
  std::vector<SweepRow> rows;
  for (double e : etas) {
    LongArmPoint p = optimize_long_arm_point(cfg, e);
    rows.push_back(p.row);
    if (details) details->push_back(std::move(p));
  }
  return rows;
}

//------------------------------------------------------------------------------
// Figures
//------------------------------------------------------------------------------

std::string render_svg(const std::vector<SweepRow>& rows, bool x_is_alpha,
                       const std::string& title) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  struct Series {
    const char* name;
    const char* color;
    double SweepRow::*field;
  };
  const Series series[] = {{"ECS measured", "#1f77b4", &SweepRow::delta_phi_ecs},
                           {"ECS QFI", "#2ca02c", &SweepRow::delta_phi_ecs_qfi},
                           {"NOON QFI", "#d62728", &SweepRow::delta_phi_noon_qfi},
                           {"SP QFI", "#7f7f7f", &SweepRow::delta_phi_sp_qfi}};
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& r : rows) {
    const double x = x_is_alpha ? r.alpha0 : r.eta;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    for (const auto& s : series) {
      y0 = std::min(y0, r.*s.field);
      y1 = std::max(y1, r.*s.field);
    }
  }
  if (rows.empty()) x0 = y0 = 0, x1 = y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  y0 = 0.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << num(std::round(xv * 1000) / 1000) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << num(std::round(yv * 10000) / 10000) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << (x_is_alpha ? "alpha" : "eta") << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\" text-anchor=\"middle\">delta phi</text>\n";
  int li = 0;
  for (const auto& s : series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) o << px(x_is_alpha ? r.alpha0 : r.eta) << "," << py(r.*s.field) << " ";
    o << "\"/>\n";
    const double ly = T + 10 + 18 * li++;
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << s.name
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

FigureOutput reproduce_figure(const std::string& figure_id, const RunConfig& cfg) {
  default_config(figure_id);  // rejects unknown ids
  cfg.validate();
  FigureOutput out;
  bool x_is_alpha = false;
  if (figure_id == "fig2") {
    out.rows = sweep_alpha_noloss(cfg);
    x_is_alpha = true;
  } else if (figure_id == "fig4") {
    out.rows = sweep_eta_simple(cfg);
  } else {
    out.rows = optimize_long_arm(cfg, &out.long_arm);
  }
  out.csv = to_csv(out.rows);
  if (cfg.svg) out.svg = render_svg(out.rows, x_is_alpha, figure_id);

  if (!cfg.output_path.empty()) {
    auto write = [](const std::filesystem::path& path, const std::string& text) {
      if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
      }
      std::ofstream f(path, std::ios::binary);
      if (!f || !(f << text) || !f.flush()) throw IoError("cannot write '" + path.string() + "'");
    };
    write(cfg.output_path, out.csv);
    if (cfg.svg) {
      std::filesystem::path svg = cfg.output_path;
      svg.replace_extension(".svg");
      write(svg, out.svg);
    }
  }
  return out;
}

//------------------------------------------------------------------------------
// Self-check
//------------------------------------------------------------------------------

namespace {

CheckResult check(const std::string& name, double err, double tol) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "error %.3g (tol %.1g)", err, tol);
  return {name, std::isfinite(err) && err <= tol, buf};
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::vector<CheckResult> selfcheck() {
  std::vector<CheckResult> out;
  auto run = [&](const std::string& name, auto&& body) {
    try {
      out.push_back(body());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };

  run("beam splitter unitarity", [] {
    PureState s(std::vector<int>{6, 6});
    s.add(FockIndex{2, 1}, Complex(0.6, 0.0));
    s.add(FockIndex{0, 3}, Complex(0.0, 0.8));
    const PureState o = apply_beam_splitter(s, 0, 1, 0.3);
    return check("beam splitter unitarity", std::abs(o.norm_squared() - 1.0), 1e-12);
  });

  run("QBS action on |3,0>", [] {
    const PureState o = apply_qbs(PureState::basis(FockIndex{3, 0}, {3, 3}), 0, 1);
    const double err = std::max(std::abs(o.amplitude(FockIndex{3, 0}) - 1.0 / std::sqrt(2.0)),
                                std::abs(o.amplitude(FockIndex{0, 3}) - kI / std::sqrt(2.0)));
    return check("QBS action on |3,0>", err, 1e-14);
  });

  run("two-mode scheme normalization", [] {
    double err = 0.0;
    for (double phi : {0.0, kPi / 4.0, kPi / 2.0}) {
      SchemeParams p;
      p.phi = phi;
      err = std::max(err, std::abs(total_probability(outcome_distribution(simulate_simple_scheme(p), 0.0)) - 1.0));
    }
    return check("two-mode scheme normalization", err, 1e-8);
  });

  run("coherent-loss closure", [] {
    double err = 0.0;
    for (double a : {1.0, std::sqrt(2.0), 2.0})
      for (double eta : {0.5, 0.8}) {
        const PureState in = coherent_state(a);
        const DensityMatrix rho = to_density_matrix(apply_loss(in, 0, eta));
        const DensityMatrix ref = projector(coherent_amplitudes(std::sqrt(eta) * a, in.cutoff(0)));
        std::set<FockIndex> all(rho.basis.begin(), rho.basis.end());
        all.insert(ref.basis.begin(), ref.basis.end());
        const std::vector<FockIndex> basis(all.begin(), all.end());
        err = std::max(err, max_abs(embed(rho, basis).matrix - embed(ref, basis).matrix));
      }
    return check("coherent-loss closure", err, 1e-8);
  });

  run("no-loss branch weight (two-mode)", [] {
    double err = 0.0;
    for (double a : {1.0, std::sqrt(2.0), 2.0})
      for (double eta : {0.5, 0.8}) {
        SchemeParams p;
        p.alpha0 = a;
        p.eta = eta;
        double w = 0.0;
        for (const auto& br : simulate_simple_scheme(p).branches)
          if (std::all_of(br.environment.begin(), br.environment.end(), [](int n) { return n == 0; }))
            w += br.weight;
        err = std::max(err, std::abs(w - std::exp(a * a * (eta - 1.0))));
      }
    return check("no-loss branch weight (two-mode)", err, 1e-10);
  });

  run("coherent branch weight (long arm)", [] {
    double err = 0.0;
    for (double a : {1.0, std::sqrt(2.0), 2.0})
      for (double eta : {0.5, 0.8}) {
        SchemeParams p;
        p.alpha0 = a;
        p.alpha1 = a;
        p.eta = eta;
        p.phi = 0.3;
        const Scheme s = long_arm_scheme(p, long_arm_measurement(MeasurementStage::kReferenceHomodyne));
        const auto ens = run_circuit(s.circuit, s.input).decompose();
        err = std::max(err, std::abs(ens.branches.front().weight - std::exp(-a * a * (1.0 - eta))));
      }
    return check("coherent branch weight (long arm)", err, 1e-10);
  });

  run("c1 at alpha=sqrt2, eta=0.8", [] {
    SchemeParams p;
    p.eta = 0.8;
    double w = 0.0;
    for (const auto& br : simulate_simple_scheme(p).branches)
      if (std::all_of(br.environment.begin(), br.environment.end(), [](int n) { return n == 0; }))
        w += br.weight;
    return check("c1 at alpha=sqrt2, eta=0.8", std::abs(w - std::exp(-0.4)), 1e-10);
  });

  run("NOON QFI = n^2", [] {
    double err = 0.0;
    for (int n = 2; n <= 6; ++n) err = std::max(err, std::abs(noon_qfi(n, 1.0).f_q - n * n));
    return check("NOON QFI = n^2", err, 1e-6);
  });

  return out;
}

}  // namespace ecsm
