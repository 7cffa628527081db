// wpd: experiment runner. Every subcommand reads an optional JSON config,
// lets flags override it, echoes the effective config into --out and writes
// reports.json plus CSV data. Exit codes: 0 all reports pass, 2 a report
// failed, 1 usage or config error.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wpd/cone.hpp"
#include "wpd/map_fluct.hpp"
#include "wpd/parallel.hpp"
#include "wpd/quadrature.hpp"
#include "wpd/report.hpp"
#include "wpd/stable_cond.hpp"
#include "wpd/suite.hpp"
#include "wpd/williams.hpp"

namespace fs = std::filesystem;
using wpd::Vec;
using wpd::sampling::SeedSpec;
using Reports = std::vector<wpd::stats::TestReport>;

namespace {

constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Param {
  std::string name;
  CLI::Option* opt = nullptr;
  std::function<void(const nlohmann::json&)> load;
  std::function<nlohmann::ordered_json()> dump;
  bool required = false;
  bool from_config = false;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<Param> params;
  std::string config;
  std::string out = "out";
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::function<void()> resolve;  // fills model-dependent defaults, validates
  std::function<Reports(const fs::path&)> run;
};

template <class T>
void add(Command& c, const std::string& name, T& var, const std::string& help, bool required = false) {
  Param p;
  p.name = name;
  if constexpr (std::is_same_v<T, bool>) {
    p.opt = c.app->add_flag("--" + name, var, help);
  } else {
    p.opt = c.app->add_option("--" + name, var, help);
    if (!required) p.opt->capture_default_str();
  }
  if constexpr (std::is_same_v<T, Vec> || std::is_same_v<T, std::vector<std::string>>) p.opt->delimiter(',');
  p.load = [&var](const nlohmann::json& j) { var = j.get<T>(); };
  p.dump = [&var] { return nlohmann::ordered_json(var); };
  p.required = required;
  c.params.push_back(std::move(p));
}

void add_common(Command& c) {
  c.app->add_option("--config", c.config, "JSON config; flags override its values");
  add(c, "out", c.out, "output directory");
  add(c, "threads", c.threads, "worker threads (0 = all cores)");
  add(c, "seed", c.seed, "master seed");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : f_(path) {
    if (!f_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << '\n';
  }
  void row(const Vec& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << fmt(cells[i]);
    f_ << '\n';
  }

 private:
  std::ofstream f_;
};

bool has(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

void check_names(const std::vector<std::string>& list, const std::vector<std::string>& allowed, const char* what) {
  for (const auto& s : list)
    if (!has(allowed, s)) throw UsageError(std::string("unknown ") + what + ": " + s);
}

void load_config(Command& c) {
  if (c.config.empty()) return;
  std::ifstream in(c.config);
  if (!in) throw UsageError("cannot read config " + c.config);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  nlohmann::json j;
  try {
    j = text.find_first_not_of(" \t\r\n") == std::string::npos ? nlohmann::json::object() : nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw UsageError(c.config + ":" + std::to_string(line) + ":" + std::to_string(col) + ": parse error: " + e.what());
  }
  if (!j.is_object()) throw UsageError(c.config + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto it = std::find_if(c.params.begin(), c.params.end(), [&](const Param& p) { return p.name == key; });
    if (it == c.params.end()) throw UsageError(c.config + ": unknown key '" + key + "'");
    it->from_config = true;
    if (it->opt->count() > 0) continue;  // the flag wins
    try {
      it->load(value);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(c.config + ": bad value for '" + key + "': " + e.what());
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

// --- map-fluct --------------------------------------------------------------

struct MapFluctArgs {
  std::string model = "bm";
  double mu = 0.5, sigma = 1.0;
  std::string q_matrix;
  Vec rates, drifts, sigmas;
  std::size_t initial_state = 0;
  std::size_t paths = 20000;
  double horizon = 50.0, dt = 1e-3, margin = 8.0;
  std::vector<std::string> checks{"depth", "occupation", "reversal"};
  std::size_t occupation_paths = 2000;
  double reversal_time = 1.0;
  double ks_threshold = 0.02, rel_tol = 0.05;
};

// Whitespace or comma separated, n rows of n entries.
Vec read_q_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read q-matrix " + path);
  Vec q;
  std::string tok;
  while (in >> tok) {
    std::stringstream ss(tok);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      try {
        std::size_t used = 0;
        q.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw UsageError(path + ": bad number '" + part + "'");
      }
    }
  }
  return q;
}

wpd::mapf::MapModel map_model(const MapFluctArgs& a) {
  if (a.model == "bm") return wpd::mapf::MapModel::bm_drift(a.mu, a.sigma);
  const Vec rates = a.q_matrix.empty() ? a.rates : read_q_matrix(a.q_matrix);
  const std::size_t n = a.drifts.size();
  if (n == 0 || rates.size() != n * n || a.sigmas.size() != n)
    throw UsageError("mmbm needs n drifts, n sigmas and an n x n generator");
  return wpd::mapf::MapModel::mmbm(wpd::sampling::RateMatrix(n, rates), a.drifts, a.sigmas);
}

void setup_map_fluct(Command& c, MapFluctArgs& a) {
  add(c, "model", a.model, "bm | mmbm");
  add(c, "mu", a.mu, "BM drift");
  add(c, "sigma", a.sigma, "BM volatility");
  add(c, "q-matrix", a.q_matrix, "file with the MMBM generator (n rows of n entries)");
  add(c, "rates", a.rates, "MMBM generator inline, row-major (ignored with --q-matrix)");
  add(c, "drifts", a.drifts, "MMBM drifts per state");
  add(c, "sigmas", a.sigmas, "MMBM volatilities per state");
  add(c, "initial-state", a.initial_state, "MMBM start state");
  add(c, "paths", a.paths, "paths for the ladder and reversal checks");
  add(c, "horizon", a.horizon, "simulation horizon T");
  add(c, "dt", a.dt, "grid step");
  add(c, "margin", a.margin, "margin rule for the global minimum");
  add(c, "checks", a.checks, "depth,occupation,reversal");
  add(c, "occupation-paths", a.occupation_paths, "paths for the occupation identity");
  add(c, "reversal-time", a.reversal_time, "fixed time t of the duality check");
  add(c, "ks-threshold", a.ks_threshold, "KS gate");
  add(c, "rel-tol", a.rel_tol, "relative tolerance of the occupation identity");
  c.resolve = [&c, &a] {
    if (a.model != "bm" && a.model != "mmbm") throw UsageError("--model must be bm or mmbm");
    check_names(a.checks, {"depth", "occupation", "reversal"}, "check");
    (void)map_model(a);
    if (a.paths == 0 || a.occupation_paths == 0 || !(a.horizon > 0.0) || !(a.dt > 0.0) || !(a.margin > 0.0))
      throw UsageError("paths, horizon, dt and margin must be positive");
    if (a.model == "mmbm" && (has(a.checks, "occupation") || has(a.checks, "reversal")))
      throw UsageError("occupation and reversal checks need --model bm");
    if (has(a.checks, "occupation") && !(a.mu > 0.0)) throw UsageError("occupation check needs mu > 0");
    (void)c;
  };
  c.run = [&c, &a](const fs::path& out) {
    Reports reps;
    const auto model = map_model(a);
    if (has(a.checks, "depth")) {
      Vec edges;
      for (int i = 0; i <= 20; ++i) edges.push_back(0.25 * i);
      const auto h = wpd::mapf::estimate_ladder_marginal(model, a.paths, a.horizon, a.dt, a.margin, {c.seed, 1},
                                                         edges, a.initial_state);
      Csv d(out / "depths.csv", {"depth", "angle_index"});
      for (std::size_t i = 0; i < h.depths.size(); ++i) d.row({fmt(h.depths[i]), std::to_string(h.angle_index[i])});
      Csv p(out / "plot_data.csv", {"depth_lo", "depth_hi", "angle_bin", "mass"});
      for (std::size_t b = 0; b + 1 <= h.depth_edges.size(); ++b)
        for (std::size_t k = 0; k < h.angle_bins; ++k) {
          const double hi = b + 1 < h.depth_edges.size() ? h.depth_edges[b + 1] : INFINITY;
          p.row(Vec{h.depth_edges[b], hi, static_cast<double>(k), h.mass(b, k)});
        }
      if (model.is_bm() && a.mu > 0.0) {
        const auto r = wpd::mapf::depth_law_reports(h, a.mu, a.sigma, c.seed, a.ks_threshold);
        reps.insert(reps.end(), r.begin(), r.end());
      }
    }
    if (has(a.checks, "occupation")) {
      auto e = wpd::mapf::check_levy_occupation_identity(a.mu, [](double y) { return std::exp(-y); },
                                                         a.occupation_paths, a.horizon, a.dt, {c.seed, 3}, a.rel_tol);
      auto one = wpd::mapf::check_levy_occupation_identity(a.mu, [](double) { return 1.0; }, a.occupation_paths,
                                                           a.horizon, a.dt, SeedSpec{c.seed, 3}.child(1), a.rel_tol);
      for (auto& r : e) r.name += "_g_exp";
      for (auto& r : one) r.name += "_g_one";
      reps.insert(reps.end(), e.begin(), e.end());
      reps.insert(reps.end(), one.begin(), one.end());
    }
    if (has(a.checks, "reversal")) {
      const auto r = wpd::mapf::check_time_reversal(model, a.reversal_time, a.paths, a.dt, {c.seed, 4}, a.ks_threshold);
      reps.insert(reps.end(), r.begin(), r.end());
    }
    return reps;
  };
}

// --- stable -----------------------------------------------------------------

struct StableArgs {
  double alpha = 1.0;
  std::size_t dim = 2;
  Vec start{3.0, 0.5};
  std::string kind = "up";
  std::string target = "point:1.5707963267948966";
  double barrier = 0.0;
  std::vector<std::string> checks{"pocr", "martingale", "harmonicity", "ensemble"};
  // closest-reach law
  std::size_t pocr_paths = 10000, bins = 20;
  double step_factor = 5e-4, margin = 7.0, p_floor = 0.01;
  // Doob martingale
  Vec checkpoints{0.2, 0.4, 0.6, 0.8, 1.0};
  double martingale_dt = 1e-3;
  std::size_t martingale_paths = 20000;
  // h-down invariance
  double shell_inner = 1.01, shell_outer = 2.0, harmonic_step = 2e-3, r_max = 1e3, rel_tol = 0.05;
  std::size_t harmonic_paths = 20000;
  // weighted ensemble
  std::size_t paths = 1000, record_every = 10;
  double horizon = 1.0, dt = 1e-3, t_resample = 0.1;
};

// "point:theta" (d = 2 angle, or d coordinates normalized), "patch:a,b" (d = 2
// arc) or "sphere".
wpd::stable::Target parse_target(const std::string& s, std::size_t d) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  Vec v;
  if (colon != std::string::npos) {
    std::stringstream ss(s.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UsageError("bad number in --target: " + tok);
      }
    }
  }
  if (kind == "sphere" && v.empty()) return wpd::stable::Target::sphere();
  if (kind == "patch") {
    if (d != 2 || v.size() != 2 || !(v[0] < v[1])) throw UsageError("--target patch:a,b needs d = 2 and a < b");
    return wpd::stable::Target::arc(v[0], v[1]);
  }
  if (kind == "point") {
    if (d == 2 && v.size() == 1) return wpd::stable::Target::at(Vec{std::cos(v[0]), std::sin(v[0])});
    if (v.size() == d && wpd::norm(v) > 0.0) {
      const double r = wpd::norm(v);
      for (double& x : v) x /= r;
      return wpd::stable::Target::at(v);
    }
    throw UsageError("--target point: needs an angle (d = 2) or d coordinates");
  }
  throw UsageError("--target must be patch:a,b, point:theta or sphere");
}

void setup_stable(Command& c, StableArgs& a) {
  add(c, "alpha", a.alpha, "stability index");
  add(c, "dim", a.dim, "dimension");
  add(c, "start", a.start, "start point x1,...,xd");
  add(c, "kind", a.kind, "conditioning of the weighted ensemble (and martingale check): up | down");
  add(c, "target", a.target, "down target: patch:a,b | point:theta | sphere");
  add(c, "barrier", a.barrier, "log-radius y of the barrier sphere");
  add(c, "checks", a.checks, "pocr,martingale,harmonicity,ensemble");
  add(c, "pocr-paths", a.pocr_paths, "direct paths for the closest-reach law");
  add(c, "bins", a.bins, "radius bins for the chi-square fit");
  add(c, "step-factor", a.step_factor, "Lamperti step factor (dt = h |X|^alpha) of the closest-reach walk");
  add(c, "margin", a.margin, "log-radius margin rule");
  add(c, "p-floor", a.p_floor, "p-value floor");
  add(c, "checkpoints", a.checkpoints, "martingale checkpoint times");
  add(c, "martingale-dt", a.martingale_dt, "martingale grid step");
  add(c, "martingale-paths", a.martingale_paths, "martingale paths");
  add(c, "shell-inner", a.shell_inner, "inner radius of the stopping shell, in barrier units");
  add(c, "shell-outer", a.shell_outer, "outer radius of the stopping shell, in barrier units");
  add(c, "harmonic-step", a.harmonic_step, "Lamperti step factor for harmonicity");
  add(c, "r-max", a.r_max, "escape radius for harmonicity, in barrier units");
  add(c, "harmonic-paths", a.harmonic_paths, "harmonicity paths");
  add(c, "rel-tol", a.rel_tol, "relative tolerance for harmonicity");
  add(c, "paths", a.paths, "paths of the weighted ensemble");
  add(c, "horizon", a.horizon, "ensemble horizon T");
  add(c, "dt", a.dt, "ensemble grid step");
  add(c, "t-resample", a.t_resample, "resampling interval (0 disables)");
  add(c, "record-every", a.record_every, "keep every k-th grid point in ensemble.csv");
  c.resolve = [&a] {
    wpd::stable::StableParams{a.alpha, a.dim}.validate();
    check_names(a.checks, {"pocr", "martingale", "harmonicity", "ensemble"}, "check");
    if (a.kind != "up" && a.kind != "down") throw UsageError("--kind must be up or down");
    // Under the downward conditioning the weight mean is the survival
    // probability of the conditioned process, so only up is a martingale.
    if (a.kind == "down" && has(a.checks, "martingale"))
      throw UsageError("the martingale check needs --kind up (drop it from --checks for down)");
    (void)parse_target(a.target, a.dim);
    if (a.start.size() != a.dim) throw UsageError("--start must have dim coordinates");
    if (!(wpd::norm(a.start) > std::exp(a.barrier))) throw UsageError("--start must lie outside the barrier sphere");
    if (has(a.checks, "pocr") && ((a.dim != 2 && a.dim != 3) || a.alpha == 2.0))
      throw UsageError("the closest-reach check needs dim 2 or 3 and alpha < 2");
    if (a.pocr_paths == 0 || a.bins == 0 || !(a.step_factor > 0.0) || !(a.margin > 0.0))
      throw UsageError("bad closest-reach parameters");
    const double r = wpd::norm(a.start) * std::exp(-a.barrier);
    if (has(a.checks, "harmonicity") && !(a.shell_inner > 1.0 && a.shell_outer > a.shell_inner && r > a.shell_outer))
      throw UsageError("harmonicity needs 1 < shell-inner < shell-outer < |start| (barrier units)");
    if (a.paths == 0 || a.record_every == 0 || !(a.horizon > 0.0) || !(a.dt > 0.0) || a.t_resample < 0.0)
      throw UsageError("bad ensemble parameters");
  };
  c.run = [&c, &a](const fs::path& out) {
    Reports reps;
    const wpd::stable::StableParams p{a.alpha, a.dim};
    const auto target = parse_target(a.target, a.dim);
    const auto cond =
        a.kind == "up" ? wpd::stable::Conditioning::up() : wpd::stable::Conditioning::down(target);
    Csv pd(out / "plot_data.csv", {"series", "x", "y"});
    if (has(a.checks, "pocr")) {
      const double r0 = wpd::norm(a.start);
      std::vector<std::optional<wpd::stable::RadialMinimum>> mins(a.pocr_paths);
      wpd::parallel_for(a.pocr_paths, [&](std::size_t i) {
        wpd::sampling::Rng rng(SeedSpec{c.seed, 5}.child(i));
        mins[i] = wpd::stable::draw_radial_minimum(p, a.start, a.step_factor, a.margin, rng);
      });
      Vec ratios;
      std::size_t lost = 0;
      std::vector<std::string> header;
      for (std::size_t k = 0; k < a.dim; ++k) header.push_back("x_" + std::to_string(k + 1));
      header.insert(header.end(), {"radius_ratio", "time"});
      Csv s(out / "pocr_samples.csv", header);
      for (const auto& m : mins) {
        if (!m) {
          ++lost;
          continue;
        }
        Vec row(m->point);
        ratios.push_back(wpd::norm(m->point) / r0);
        row.push_back(ratios.back());
        row.push_back(m->time);
        s.row(row);
      }
      Vec edges, probs;
      for (std::size_t k = 0; k <= a.bins; ++k) edges.push_back(static_cast<double>(k) / static_cast<double>(a.bins));
      for (std::size_t k = 0; k < a.bins; ++k)
        probs.push_back(wpd::quad::integrate_singular([&](double u) { return wpd::stable::pocr_radial_density(u, p); },
                                                      edges[k], edges[k + 1], 1e-9));
      const auto chi = wpd::stats::chi_square_fit(ratios, edges, probs);
      auto r = wpd::stats::make_pvalue_report("pocr_radius_chi_square", chi.statistic, "pocr_density radial marginal",
                                              chi.p_value, a.p_floor, ratios.size(), c.seed);
      r.notes.push_back("horizon_fails=" + std::to_string(lost));
      reps.push_back(r);
      const double mass = wpd::stable::pocr_total_mass(p);
      reps.push_back(wpd::stats::make_threshold_report("pocr_total_mass", std::abs(mass - 1.0), 1.0, 1e-3, 0, c.seed));
      Vec counts(a.bins, 0.0);
      for (double u : ratios) counts[std::min(a.bins - 1, static_cast<std::size_t>(u * static_cast<double>(a.bins)))] += 1.0;
      const double total = static_cast<double>(std::max<std::size_t>(1, ratios.size()));
      for (std::size_t k = 0; k < a.bins; ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        pd.row({"pocr_radius_empirical", fmt(mid), fmt(counts[k] / total)});
        pd.row({"pocr_radius_quadrature", fmt(mid), fmt(probs[k])});
      }
    }
    if (has(a.checks, "martingale")) {
      const auto r = wpd::stable::check_doob_martingale(a.start, cond, a.barrier, p, a.checkpoints, a.martingale_dt,
                                                        a.martingale_paths, {c.seed, 6});
      reps.insert(reps.end(), r.begin(), r.end());
    }
    if (has(a.checks, "harmonicity")) {
      Vec x0(a.start);
      for (double& v : x0) v *= std::exp(-a.barrier);
      reps.push_back(wpd::stable::check_harmonicity_hdown(p, target, x0, {a.shell_inner, a.shell_outer},
                                                          a.harmonic_paths, {c.seed, 7}, a.harmonic_step, a.r_max,
                                                          a.rel_tol));
    }
    if (has(a.checks, "ensemble")) {
      wpd::stable::ConditionedOptions opt;
      opt.t_resample = a.t_resample;
      opt.record_every = a.record_every;
      const auto e = wpd::stable::simulate_conditioned(a.start, cond, a.barrier, p, a.horizon, a.dt, a.paths,
                                                       {c.seed, 11}, opt);
      for (const auto& w : e.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::vector<std::string> header{"path", "weight", "t"};
      for (std::size_t k = 0; k < a.dim; ++k) header.push_back("x_" + std::to_string(k + 1));
      Csv s(out / "ensemble.csv", header);
      std::size_t len = 0;
      for (std::size_t i = 0; i < e.paths.size(); ++i) {
        const auto& path = e.paths[i];
        len = std::max(len, path.size());
        for (std::size_t k = 0; k < path.size(); ++k) {
          Vec row{static_cast<double>(i), e.weights[i], path.times()[k]};
          for (double x : path.point(k)) row.push_back(x);
          s.row(row);
        }
      }
      // Weighted mean radius on the recorded grid; paths that stopped early
      // carry zero weight.
      for (std::size_t k = 0; k < len; ++k) {
        double num = 0.0, den = 0.0, t = 0.0;
        for (std::size_t i = 0; i < e.paths.size(); ++i) {
          if (k >= e.paths[i].size()) continue;
          t = e.paths[i].times()[k];
          num += e.weights[i] * wpd::norm(e.paths[i].point(k));
          den += e.weights[i];
        }
        if (den > 0.0) pd.row({"ensemble_weighted_mean_radius", fmt(t), fmt(num / den)});
      }
    }
    return reps;
  };
}

// --- cone -------------------------------------------------------------------

struct ConeArgs {
  double phi0 = kPi / 2;
  std::size_t terms = 1;
  Vec start{1.0, 0.0};  // (r, phi)
  std::size_t paths = 20000;
  double dt = 2e-3;
  std::string method = "weighted";
  std::vector<std::string> references{"series", "closest-reach"};
  std::size_t ny = 20, ntheta = 12;
  double y_max = 3.0, tv_threshold = 0.05;
  std::vector<std::string> checks{"ladder", "survival", "martingale"};
  double survival_time = 0.5, survival_dt = 1e-3, survival_tol = 0.01;
  std::size_t survival_paths = 100000;
  Vec checkpoints{0.2, 0.4, 0.6, 0.8, 1.0};
  double martingale_dt = 1e-3;
  std::size_t martingale_paths = 20000;
  std::size_t table_ny = 61, table_ntheta = 49;
};

void setup_cone(Command& c, ConeArgs& a) {
  add(c, "phi0", a.phi0, "half-angle of the cone");
  add(c, "terms", a.terms, "minimum series terms K (the tail rule may add more)");
  add(c, "start", a.start, "start in polar form r,phi");
  add(c, "paths", a.paths, "paths for the closest-reach law");
  add(c, "dt", a.dt, "grid step in Lamperti time");
  add(c, "method", a.method, "weighted | taboo");
  add(c, "references", a.references, "series,closest-reach");
  add(c, "ny", a.ny, "depth rows (last row holds the tail)");
  add(c, "ntheta", a.ntheta, "angle columns");
  add(c, "y-max", a.y_max, "start of the tail row");
  add(c, "tv-threshold", a.tv_threshold, "total variation gate");
  add(c, "checks", a.checks, "ladder,survival,martingale");
  add(c, "survival-time", a.survival_time, "time s of the exit survival check");
  add(c, "survival-dt", a.survival_dt, "grid step of the exit survival check");
  add(c, "survival-tol", a.survival_tol, "relative tolerance of the exit survival check");
  add(c, "survival-paths", a.survival_paths, "paths of the exit survival check");
  add(c, "checkpoints", a.checkpoints, "martingale checkpoint times");
  add(c, "martingale-dt", a.martingale_dt, "martingale grid step");
  add(c, "martingale-paths", a.martingale_paths, "martingale paths");
  add(c, "table-ny", a.table_ny, "depth points of the density tables");
  add(c, "table-ntheta", a.table_ntheta, "angle points of the density tables");
  c.resolve = [&a] {
    wpd::cone::ConeParams{a.phi0, a.terms}.validate();
    if (a.start.size() != 2 || !(a.start[0] > 0.0) || !(std::abs(a.start[1]) < a.phi0))
      throw UsageError("--start must be r,phi with r > 0 and |phi| < phi0");
    if (a.method != "weighted" && a.method != "taboo") throw UsageError("--method must be weighted or taboo");
    check_names(a.references, {"series", "closest-reach"}, "reference");
    check_names(a.checks, {"ladder", "survival", "martingale"}, "check");
    if (a.paths == 0 || !(a.dt > 0.0) || a.ny < 2 || a.ntheta == 0 || !(a.y_max > 0.0) || a.table_ny < 2 ||
        a.table_ntheta < 2)
      throw UsageError("bad sampling or grid parameters");
  };
  c.run = [&c, &a](const fs::path& out) {
    Reports reps;
    const wpd::cone::ConeParams cp{a.phi0, a.terms};
    const double phi = a.start[1];
    // Density tables on an interior grid (the series is not defined at y = 0 or on the edges).
    {
      Vec ys, ths;
      for (std::size_t i = 0; i < a.table_ny; ++i)
        ys.push_back(a.y_max * static_cast<double>(i + 1) / static_cast<double>(a.table_ny));
      for (std::size_t j = 0; j < a.table_ntheta; ++j)
        ths.push_back(-a.phi0 + 2.0 * a.phi0 * (static_cast<double>(j) + 0.5) / static_cast<double>(a.table_ntheta));
      const auto series = wpd::cone::ladder_density_table(ys, ths, phi, cp);
      const auto law = wpd::cone::ladder_density_table(ys, ths, phi, cp, true);
      Csv s(out / "ladder_density.csv", {"y", "theta", "value"});
      Csv l(out / "closest_reach_density.csv", {"y", "theta", "value"});
      for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = 0; j < ths.size(); ++j) {
          s.row(Vec{ys[i], ths[j], series[i * ths.size() + j]});
          l.row(Vec{ys[i], ths[j], law[i * ths.size() + j]});
        }
    }
    if (has(a.checks, "ladder")) {
      const auto method = a.method == "taboo" ? wpd::cone::LadderMethod::Taboo : wpd::cone::LadderMethod::Weighted;
      const auto sample = wpd::cone::sample_closest_reach(phi, cp, a.paths, a.dt, SeedSpec{c.seed, 8}.child(0), method);
      Csv s(out / "ladder_samples.csv", {"y", "theta", "weight"});
      for (const auto& x : sample) s.row(Vec{x.y, x.theta, x.weight});
      const wpd::cone::LadderGrid grid{a.ny, a.ntheta, a.y_max};
      const Vec hist = wpd::cone::ladder_histogram(sample, cp, grid);
      const Vec law = wpd::cone::ladder_reference_cells(phi, cp, wpd::cone::LadderReference::ClosestReach, grid);
      const Vec series = wpd::cone::ladder_reference_cells(phi, cp, wpd::cone::LadderReference::Series, grid);
      Csv pd(out / "plot_data.csv", {"y_lo", "y_hi", "theta_lo", "theta_hi", "empirical", "closest_reach", "series"});
      const double dy = a.y_max / static_cast<double>(a.ny - 1), dth = 2.0 * a.phi0 / static_cast<double>(a.ntheta);
      for (std::size_t i = 0; i < a.ny; ++i)
        for (std::size_t j = 0; j < a.ntheta; ++j) {
          const std::size_t k = i * a.ntheta + j;
          const double y0 = dy * static_cast<double>(i), t0 = -a.phi0 + dth * static_cast<double>(j);
          pd.row(Vec{y0, i + 1 == a.ny ? INFINITY : y0 + dy, t0, t0 + dth, hist[k], law[k], series[k]});
        }
      if (has(a.references, "series"))
        reps.push_back(wpd::cone::ladder_law_report(sample, phi, cp, wpd::cone::LadderReference::Series, grid,
                                                    a.tv_threshold, c.seed));
      if (has(a.references, "closest-reach"))
        reps.push_back(wpd::cone::ladder_law_report(sample, phi, cp, wpd::cone::LadderReference::ClosestReach, grid,
                                                    a.tv_threshold, c.seed));
    }
    if (has(a.checks, "survival"))
      reps.push_back(wpd::cone::check_taboo_survival(phi, a.survival_time, cp, a.survival_paths, a.survival_dt,
                                                     SeedSpec{c.seed, 8}.child(1), a.survival_tol));
    if (has(a.checks, "martingale")) {
      const Vec x{a.start[0] * std::cos(phi), a.start[0] * std::sin(phi)};
      const auto r = wpd::cone::check_cone_martingale(x, cp, a.checkpoints, a.martingale_dt, a.martingale_paths,
                                                      SeedSpec{c.seed, 6}.child(1));
      reps.insert(reps.end(), r.begin(), r.end());
    }
    return reps;
  };
}

// --- williams ---------------------------------------------------------------

struct WilliamsArgs {
  std::string model;
  double mu = 0.5, alpha = 1.0;
  std::size_t dim = 2;
  Vec start{1.0, 0.0};
  std::size_t paths = 10000;
  double dt = 0.0, direct_dt = 0.0;  // 0 = model default
  double horizon = 10.0, delta = 1e-3, margin = 8.0;
  std::vector<std::string> functionals;
  double ks_threshold = 0.0, depth_ks_threshold = 0.02, angle_p_floor = 0.01, z = 3.0;
  std::size_t particles = 64, post_particles = 64;
  double eps_hit = 1e-3;
  bool flip_drift = false, delta_stability = false;
};

void write_ensemble(const fs::path& path, const wpd::williams::Ensemble& e) {
  Csv f(path, {"radial_minimum", "value_at_T", "time_of_minimum", "angle_at_minimum", "half_depth_time", "post_gain"});
  for (const auto& x : e.items)
    f.row(Vec{x.radial_minimum, x.value_at_T, x.time_of_minimum, x.angle_at_minimum, x.half_depth_time, x.post_gain});
}

void setup_williams(Command& c, WilliamsArgs& a) {
  add(c, "model", a.model, "bm | stable", true);
  add(c, "mu", a.mu, "BM drift");
  add(c, "alpha", a.alpha, "stability index");
  add(c, "dim", a.dim, "dimension");
  add(c, "start", a.start, "stable start point");
  add(c, "paths", a.paths, "paths per ensemble");
  add(c, "dt", a.dt, "grid step (bm) or construction Lamperti factor (stable); 0 = default");
  add(c, "direct-dt", a.direct_dt, "direct-simulation step or Lamperti factor; 0 = default");
  add(c, "horizon", a.horizon, "fixed time T for X_T");
  add(c, "delta", a.delta, "post-minimum start offset");
  add(c, "margin", a.margin, "margin rule of the direct simulation");
  add(c, "functionals", a.functionals, "functionals compared by KS (default: all for the model)");
  add(c, "ks-threshold", a.ks_threshold, "two-sample KS gate; 0 = 0.03 (bm) or 0.05 (stable)");
  add(c, "depth-ks-threshold", a.depth_ks_threshold, "one-sample KS gate of the depth law (bm)");
  add(c, "angle-p-floor", a.angle_p_floor, "p-value floor of the angle chi-square");
  add(c, "z", a.z, "gate of the conditional independence statistic");
  add(c, "particles", a.particles, "pre-minimum ensemble size (stable)");
  add(c, "post-particles", a.post_particles, "post-minimum ensemble size (stable)");
  add(c, "eps-hit", a.eps_hit, "pre-minimum stop radius relative to |x*| (stable)");
  add(c, "flip-drift", a.flip_drift, "negative control: first phase with drift +mu (bm)");
  add(c, "delta-stability", a.delta_stability, "also build at delta/2 and report the KS change");
  c.resolve = [&a] {
    const bool bm = a.model == "bm";
    if (!bm && a.model != "stable") throw UsageError("--model must be bm or stable");
    if (a.dt == 0.0) a.dt = bm ? 1e-3 : 0.05;
    if (a.direct_dt == 0.0) a.direct_dt = bm ? a.dt : 5e-4;
    if (a.ks_threshold == 0.0) a.ks_threshold = bm ? 0.03 : 0.05;
    if (a.functionals.empty())
      a.functionals = bm ? std::vector<std::string>{"radial_minimum", "value_at_T", "time_of_minimum"}
                         : wpd::williams::kAllFunctionals;
    check_names(a.functionals,
                {"radial_minimum", "value_at_T", "time_of_minimum", "angle_at_minimum", "half_depth_time", "post_gain"},
                "functional");
    if (a.flip_drift && !bm) throw UsageError("--flip-drift applies to --model bm");
    if (a.delta_stability && bm) throw UsageError("--delta-stability applies to --model stable");
    wpd::williams::DecompositionSpec s;
    if (bm) {
      s.model = wpd::williams::ClassicalBm{a.mu};
    } else {
      s.model = wpd::stable::StableParams{a.alpha, a.dim};
      s.start = a.start;
    }
    s.T = a.horizon;
    s.dt = a.dt;
    s.n = a.paths;
    s.delta_offset = a.delta;
    s.margin = a.margin;
    s.validate();
    if (!(a.direct_dt > 0.0)) throw UsageError("--direct-dt must be positive");
  };
  c.run = [&c, &a](const fs::path& out) {
    Reports reps;
    const bool bm = a.model == "bm";
    wpd::williams::DecompositionSpec s;
    if (bm) {
      s.model = wpd::williams::ClassicalBm{a.mu};
    } else {
      s.model = wpd::stable::StableParams{a.alpha, a.dim};
      s.start = a.start;
    }
    s.T = a.horizon;
    s.dt = a.dt;
    s.n = a.paths;
    s.delta_offset = a.delta;
    s.margin = a.margin;
    s.seed = SeedSpec{c.seed, 10}.child(0);
    auto ds = s;
    ds.dt = a.direct_dt;
    ds.seed = SeedSpec{c.seed, 10}.child(1);
    wpd::williams::StableConstructionOptions opt;
    opt.particles = a.particles;
    opt.post_particles = a.post_particles;
    opt.eps_hit = a.eps_hit;
    opt.keep_path = false;
    const auto built = wpd::williams::constructed_ensemble(s, a.flip_drift, opt);
    const auto direct = wpd::williams::direct_ensemble(ds);
    write_ensemble(out / "constructed.csv", built);
    write_ensemble(out / "direct.csv", direct);
    reps = wpd::williams::verify_decomposition(direct, built, a.functionals, a.ks_threshold, c.seed, a.angle_p_floor);
    if (bm) {
      const double rate = 2.0 * a.mu;
      const auto cdf = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
      for (const auto* e : {&direct, &built}) {
        const auto k = wpd::stats::ks_one_sample(e->column("radial_minimum"), cdf);
        reps.push_back(wpd::stats::make_threshold_report(
            std::string("depth_ks_exp_") + (e == &direct ? "direct" : "constructed"), k.statistic,
            "Exp(" + fmt(rate) + ")", a.depth_ks_threshold, e->items.size(), c.seed, k.p_value));
      }
    }
    reps.push_back(wpd::williams::conditional_independence(built, c.seed, a.z));
    if (a.delta_stability) {
      auto half = s;
      half.delta_offset = 0.5 * a.delta;
      const auto built_half = wpd::williams::constructed_ensemble(half, a.flip_drift, opt);
      for (const auto& f : a.functionals)
        if (f != "angle_at_minimum") reps.push_back(wpd::williams::delta_stability(direct, built, built_half, f, c.seed));
    }
    // Empirical CDFs on a pooled quantile grid, one block per functional.
    Csv pd(out / "plot_data.csv", {"functional", "x", "ecdf_direct", "ecdf_constructed"});
    for (const auto& f : a.functionals) {
      Vec x = direct.column(f), y = built.column(f);
      std::erase_if(x, [](double v) { return std::isnan(v); });
      std::erase_if(y, [](double v) { return std::isnan(v); });
      if (x.empty() || y.empty()) continue;
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      Vec pooled(x);
      pooled.insert(pooled.end(), y.begin(), y.end());
      std::sort(pooled.begin(), pooled.end());
      const auto ecdf = [](const Vec& v, double t) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin()) / static_cast<double>(v.size());
      };
      for (int q = 0; q <= 100; ++q) {
        const double t = pooled[static_cast<std::size_t>(q * (pooled.size() - 1) / 100)];
        pd.row({f, fmt(t), fmt(ecdf(x, t)), fmt(ecdf(y, t))});
      }
    }
    return reps;
  };
}

// --- selftest ---------------------------------------------------------------

struct SelftestArgs {
  double scale = 0.1;
  std::vector<int> criteria;
};

void setup_selftest(Command& c, SelftestArgs& a) {
  add(c, "scale", a.scale, "fraction of the acceptance sample sizes");
  add(c, "criteria", a.criteria, "subset of criteria (default all)");
  c.app->get_option("--criteria")->delimiter(',');
  c.resolve = [&a] {
    if (!(a.scale > 0.0 && a.scale <= 1.0)) throw UsageError("--scale must lie in (0, 1]");
    for (int k : a.criteria)
      if (k < 1 || k > wpd::suite::kCriteria) throw UsageError("criteria are numbered 1.." + std::to_string(wpd::suite::kCriteria));
  };
  c.run = [&c, &a](const fs::path& out) {
    wpd::suite::SuiteOptions o;
    o.master_seed = c.seed;
    o.scale = a.scale;
    o.determinism_scale = std::min(o.determinism_scale, a.scale);
    Reports reps;
    std::string json = "[\n";
    bool first = true;
    for (int k = 1; k <= wpd::suite::kCriteria; ++k) {
      if (!a.criteria.empty() && std::find(a.criteria.begin(), a.criteria.end(), k) == a.criteria.end()) continue;
      const auto r = wpd::suite::run_criterion(k, o);
      std::printf("criterion %2d %s  %s\n", k, r.pass ? "PASS" : "FAIL", r.title.c_str());
      std::fflush(stdout);
      json += (first ? "" : ",\n") + wpd::suite::to_json_string(r);
      first = false;
      for (auto x : r.reports) {
        x.name = "c" + std::to_string(k) + "." + x.name;
        reps.push_back(std::move(x));
      }
    }
    write_text(out / "selftest.json", json + "]\n");
    return reps;
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Williams path decomposition experiments"};
  app.require_subcommand(1);
  std::vector<Command> commands(5);
  MapFluctArgs mf;
  StableArgs st;
  ConeArgs co;
  WilliamsArgs wi;
  SelftestArgs se;
  const std::vector<std::pair<const char*, const char*>> names{
      {"map-fluct", "ladder depth law, occupation identity and time reversal for MAPs"},
      {"stable", "closest-reach law, h-up martingale and h-down harmonicity"},
      {"cone", "planar cone: ladder law, taboo survival, cone martingale"},
      {"williams", "constructed vs direct ensembles"},
      {"selftest", "acceptance suite at reduced sample sizes"}};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    commands[i].app = app.add_subcommand(names[i].first, names[i].second);
    add_common(commands[i]);
  }
  setup_map_fluct(commands[0], mf);
  setup_stable(commands[1], st);
  setup_cone(commands[2], co);
  setup_williams(commands[3], wi);
  setup_selftest(commands[4], se);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  Command* cmd = nullptr;
  for (auto& c : commands)
    if (c.app->parsed()) cmd = &c;

  try {
    load_config(*cmd);
    for (const auto& p : cmd->params)
      if (p.required && p.opt->count() == 0 && !p.from_config)
        throw UsageError("missing required option --" + p.name);
    cmd->resolve();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << cmd->app->help();
    return 1;
  } catch (const wpd::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  wpd::worker_count() = cmd->threads;
  const fs::path out(cmd->out);
  Reports reps;
  try {
    fs::create_directories(out);
    nlohmann::ordered_json echo;
    echo["subcommand"] = cmd->app->get_name();
    for (const auto& p : cmd->params) echo[p.name] = p.dump();
    write_text(out / "config.json", echo.dump(2) + "\n");
    reps = cmd->run(out);
    write_text(out / "reports.json", wpd::stats::to_json_string(reps));
  } catch (const wpd::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  bool pass = true;
  for (const auto& r : reps) {
    std::printf("%-4s %s statistic=%.6g threshold=%.6g\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.statistic,
                r.threshold);
    pass = pass && r.pass;
  }
  return pass ? 0 : 2;
}
