#include "wpd/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wpd/cone.hpp"
#include "wpd/lamperti_kiu.hpp"
#include "wpd/map_fluct.hpp"
#include "wpd/parallel.hpp"
#include "wpd/quadrature.hpp"
#include "wpd/report.hpp"
#include "wpd/stable_cond.hpp"
#include "wpd/williams.hpp"

namespace wpd::suite {

using sampling::Rng;
using sampling::SeedSpec;

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t scaled(std::size_t n, const SuiteOptions& o) {
  return std::max<std::size_t>(20, static_cast<std::size_t>(std::llround(static_cast<double>(n) * o.scale)));
}

double relax(double threshold, const SuiteOptions& o) {
  return o.scale < 1.0 ? threshold / std::sqrt(o.scale) : threshold;
}

void suffix(std::vector<stats::TestReport>& rs, const std::string& s) {
  for (auto& r : rs) r.name += s;
}

void classical_depth(CriterionResult& out, const SuiteOptions& o) {
  Vec edges;
  for (int i = 0; i <= 20; ++i) edges.push_back(0.25 * i);
  const auto h = mapf::estimate_ladder_marginal(mapf::MapModel::bm_drift(0.5, 1.0), scaled(20000, o), 50.0, 1e-3,
                                                8.0, {o.master_seed, 1}, edges);
  auto reps = mapf::depth_law_reports(h, 0.5, 1.0, o.master_seed, relax(0.02, o));
  out.reports.push_back(reps.at(0));
  out.info.assign(reps.begin() + 1, reps.end());
}

void classical_decomposition(CriterionResult& out, const SuiteOptions& o) {
  williams::DecompositionSpec spec;
  spec.model = williams::ClassicalBm{0.5};
  spec.T = 10.0;
  spec.dt = 1e-3;
  spec.n = scaled(10000, o);
  spec.seed = SeedSpec{o.master_seed, 2}.child(0);
  auto dspec = spec;
  dspec.seed = SeedSpec{o.master_seed, 2}.child(1);
  const auto built = williams::constructed_ensemble(spec);
  const auto flipped = williams::constructed_ensemble(spec, true);
  const auto direct = williams::direct_ensemble(dspec);
  out.reports = williams::verify_decomposition(direct, built, {"radial_minimum", "value_at_T", "time_of_minimum"},
                                               relax(0.03, o), o.master_seed);
  const auto neg = williams::verify_decomposition(direct, flipped, {"radial_minimum"}, 0.1, o.master_seed).at(0);
  out.reports.push_back(
      stats::make_floor_report("negative_control_ks", neg.statistic, "flipped drift", 0.1, spec.n, o.master_seed));
  out.info.push_back(williams::conditional_independence(built, o.master_seed));
}

void occupation(CriterionResult& out, const SuiteOptions& o) {
  const std::size_t n = scaled(2000, o);
  auto a = mapf::check_levy_occupation_identity(0.5, [](double y) { return std::exp(-y); }, n, 50.0, 1e-3,
                                                {o.master_seed, 3}, relax(0.05, o));
  auto b = mapf::check_levy_occupation_identity(0.5, [](double) { return 1.0; }, n, 50.0, 1e-3,
                                                SeedSpec{o.master_seed, 3}.child(1), relax(0.05, o));
  suffix(a, "_g_exp");
  suffix(b, "_g_one");
  out.reports = a;
  out.reports.insert(out.reports.end(), b.begin(), b.end());
}

void reversal(CriterionResult& out, const SuiteOptions& o) {
  for (double mu : {0.0, 0.5}) {
    auto r = mapf::check_time_reversal(mapf::MapModel::bm_drift(mu, 1.0), 1.0, scaled(20000, o), 1e-3,
                                       SeedSpec{o.master_seed, 4}.child(mu == 0.0 ? 0 : 1), relax(0.02, o));
    suffix(r, mu == 0.0 ? "_mu0" : "_mu0.5");
    out.reports.insert(out.reports.end(), r.begin(), r.end());
  }
}

void pocr_law(CriterionResult& out, const SuiteOptions& o) {
  const stable::StableParams p{1.0, 2};
  const Vec x0{1.0, 0.0};
  const std::size_t n = scaled(10000, o);
  Vec radii(n, NAN);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(SeedSpec{o.master_seed, 5}.child(i));
    if (const auto m = stable::draw_radial_minimum(p, x0, 5e-4, 7.0, rng)) radii[i] = norm(m->point);
  });
  const std::size_t lost = static_cast<std::size_t>(std::count_if(radii.begin(), radii.end(), [](double r) { return std::isnan(r); }));
  radii.erase(std::remove_if(radii.begin(), radii.end(), [](double r) { return std::isnan(r); }), radii.end());
  Vec edges, probs;
  for (int k = 0; k <= 20; ++k) edges.push_back(k / 20.0);
  for (int k = 0; k < 20; ++k)
    probs.push_back(quad::integrate_singular([&](double u) { return stable::pocr_radial_density(u, p); }, edges[k],
                                             edges[k + 1], 1e-9));
  const auto chi = stats::chi_square_fit(radii, edges, probs);
  auto r = stats::make_pvalue_report("pocr_radius_chi_square", chi.statistic, "pocr_density radial marginal",
                                     chi.p_value, 0.01, radii.size(), o.master_seed);
  r.notes.push_back("bins_used=" + std::to_string(chi.bins_used) + " horizon_fails=" + std::to_string(lost));
  out.reports.push_back(r);
  const double mass = stable::pocr_total_mass(p);
  out.reports.push_back(
      stats::make_threshold_report("pocr_total_mass", std::abs(mass - 1.0), 1.0, 1e-3, 0, o.master_seed));
  out.reports.back().notes = {"mass=" + std::to_string(mass)};
}

void martingales(CriterionResult& out, const SuiteOptions& o) {
  const Vec checkpoints{0.2, 0.4, 0.6, 0.8, 1.0};
  const std::size_t n = scaled(20000, o);
  const Vec x_up{2.0, 0.0};
  auto up = stable::check_doob_martingale(x_up, stable::Conditioning::up(), 0.0, {1.0, 2}, checkpoints, 1e-3, n,
                                          SeedSpec{o.master_seed, 6}.child(0));
  suffix(up, "_hup");
  const Vec x_cone{1.0, 0.0};
  auto cone = cone::check_cone_martingale(x_cone, cone::ConeParams{kPi / 2, 1}, checkpoints, 1e-3, n,
                                          SeedSpec{o.master_seed, 6}.child(1));
  out.reports = up;
  out.reports.insert(out.reports.end(), cone.begin(), cone.end());
}

void harmonicity(CriterionResult& out, const SuiteOptions& o) {
  const Vec x0{3.0, 0.5}, theta{0.0, 1.0};
  out.reports.push_back(stable::check_harmonicity_hdown({1.0, 2}, stable::Target::at(theta), x0, {1.01, 2.0},
                                                        scaled(20000, o), {o.master_seed, 7}, 2e-3, 1e3,
                                                        relax(0.05, o)));
}

void cone_ladder(CriterionResult& out, const SuiteOptions& o) {
  const cone::ConeParams c{kPi / 2, 1};
  const auto sample = cone::sample_closest_reach(0.0, c, scaled(20000, o), 2e-3, SeedSpec{o.master_seed, 8}.child(0));
  out.reports.push_back(
      cone::ladder_law_report(sample, 0.0, c, cone::LadderReference::Series, {}, relax(0.05, o), o.master_seed));
  out.info.push_back(
      cone::ladder_law_report(sample, 0.0, c, cone::LadderReference::ClosestReach, {}, relax(0.05, o), o.master_seed));
  const double s = cone::survival_ladder(1.0, cone::ConeParams{kPi, 1});
  auto spot = stats::make_threshold_report("survival_ladder_phi0_pi_y1", std::abs(s - std::exp(-1.0)), std::exp(-1.0),
                                           0.0, 0, o.master_seed);
  spot.notes.push_back("value=" + std::to_string(s));
  out.reports.push_back(spot);
  out.reports.push_back(
      cone::check_taboo_survival(0.0, 0.5, c, scaled(100000, o), 1e-3, SeedSpec{o.master_seed, 8}.child(1),
                                 relax(0.01, o)));
}

MapPath random_step_map(Rng& rng, std::size_t n) {
  Vec t{0.0}, xi, th;
  for (std::size_t i = 1; i < n; ++i) t.push_back(t.back() + 0.05 + 0.35 * rng.uniform());
  for (std::size_t i = 0; i < n; ++i) {
    xi.push_back(-1.5 + 3.0 * rng.uniform());
    const double a = -3.0 + 6.0 * rng.uniform();
    th.push_back(std::cos(a));
    th.push_back(std::sin(a));
  }
  return MapPath(std::move(t), std::move(xi), std::move(th), 2);
}

void round_trip(CriterionResult& out, const SuiteOptions& o) {
  double worst = 0.0;
  Rng rng(SeedSpec{o.master_seed, 9}.child(0));
  for (int i = 0; i < 20; ++i) worst = std::max(worst, lk::knot_round_trip_error(random_step_map(rng, 40), 0.5 + 0.07 * i));
  out.reports.push_back(stats::make_threshold_report("round_trip_step_paths_sup", worst, 0.0, 1e-9, 20, o.master_seed));
  const std::size_t paths = o.scale >= 0.1 ? 200 : 40;
  Vec coarse(paths), fine(paths);
  parallel_for(paths, [&](std::size_t i) {
    const auto p = mapf::simulate_map(mapf::MapModel::bm_drift(0.0, 1.0), 1.0, 1e-5,
                                      SeedSpec{o.master_seed, 9}.child(1).child(i));
    const double horizon = 0.5 * lk::build_clock(p, 1.0).lifetime();
    coarse[i] = lk::clock_round_trip_error(p, 1.0, 1e-2, horizon);
    fine[i] = lk::clock_round_trip_error(p, 1.0, 5e-3, horizon);
  });
  const double ec = stats::mean(coarse), ef = stats::mean(fine);
  auto r = stats::make_floor_report("clock_error_ratio_dt_halving", ec / ef, 2.0, 1.8, paths, o.master_seed);
  r.notes.push_back("mean_sup_error_dt=" + std::to_string(ec) + " dt/2=" + std::to_string(ef));
  out.reports.push_back(r);
}

void stable_williams(CriterionResult& out, const SuiteOptions& o) {
  williams::DecompositionSpec spec;
  spec.model = stable::StableParams{1.0, 2};
  spec.start = {1.0, 0.0};
  spec.T = 10.0;
  spec.n = scaled(5000, o);
  spec.dt = 0.05;
  spec.delta_offset = 1e-3;
  spec.seed = SeedSpec{o.master_seed, 10}.child(0);
  auto half = spec;
  half.delta_offset = 5e-4;
  auto dspec = spec;
  dspec.dt = 5e-4;
  dspec.seed = SeedSpec{o.master_seed, 10}.child(1);
  williams::StableConstructionOptions opt;
  opt.keep_path = false;
  const auto built = williams::constructed_ensemble(spec, false, opt);
  const auto built_half = williams::constructed_ensemble(half, false, opt);
  const auto direct = williams::direct_ensemble(dspec);
  out.reports = williams::verify_decomposition(direct, built, {"radial_minimum", "value_at_T"}, relax(0.05, o),
                                               o.master_seed);
  for (const char* f : {"radial_minimum", "value_at_T"})
    out.reports.push_back(williams::delta_stability(direct, built, built_half, f, o.master_seed));
  out.info = williams::verify_decomposition(direct, built, {"time_of_minimum", "angle_at_minimum"}, relax(0.05, o),
                                            o.master_seed);
  out.info.push_back(williams::conditional_independence(built, o.master_seed));
}

void determinism(CriterionResult& out, const SuiteOptions& o) {
  SuiteOptions small = o;
  small.scale = o.determinism_scale;
  auto& workers = worker_count();
  const unsigned saved = workers.load();
  std::size_t mismatches = 0;
  std::string which;
  for (int id = 1; id < kCriteria; ++id) {
    workers = 1;
    const std::string a = to_json_string(run_criterion(id, small));
    workers = 2;
    const std::string b = to_json_string(run_criterion(id, small));
    if (a != b) {
      ++mismatches;
      which += " " + std::to_string(id);
    }
  }
  workers = saved;
  auto r = stats::make_threshold_report("byte_identical_reports", static_cast<double>(mismatches), 0.0, 0.0,
                                        kCriteria - 1, o.master_seed);
  r.notes.push_back("criteria 1-10 rerun at scale " + std::to_string(small.scale) + " with 1 and 2 workers");
  if (!which.empty()) r.notes.push_back("mismatch:" + which);
  out.reports.push_back(r);
}

}  // namespace

std::string criterion_title(int id) {
  switch (id) {
    case 1: return "classical Williams depth law";
    case 2: return "classical Williams decomposition";
    case 3: return "occupation identity (Levy)";
    case 4: return "time-reversal duality";
    case 5: return "stable point of closest reach";
    case 6: return "Doob martingales (h-up, cone)";
    case 7: return "harmonicity of h-down";
    case 8: return "cone ladder law";
    case 9: return "Lamperti-Kiu round trip";
    case 10: return "stable Williams decomposition";
    case 11: return "determinism";
    default: throw DomainError("criterion id must be 1..11");
  }
}

CriterionResult run_criterion(int id, const SuiteOptions& o) {
  if (!(o.scale > 0.0 && o.scale <= 1.0)) throw DomainError("suite: scale must lie in (0, 1]");
  CriterionResult out;
  out.id = id;
  out.title = criterion_title(id);
  const auto t0 = std::chrono::steady_clock::now();
  switch (id) {
    case 1: classical_depth(out, o); break;
    case 2: classical_decomposition(out, o); break;
    case 3: occupation(out, o); break;
    case 4: reversal(out, o); break;
    case 5: pocr_law(out, o); break;
    case 6: martingales(out, o); break;
    case 7: harmonicity(out, o); break;
    case 8: cone_ladder(out, o); break;
    case 9: round_trip(out, o); break;
    case 10: stable_williams(out, o); break;
    case 11: determinism(out, o); break;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.pass = !out.reports.empty() &&
             std::all_of(out.reports.begin(), out.reports.end(), [](const auto& r) { return r.pass; });
  return out;
}

std::string to_json_string(const CriterionResult& r) {
  nlohmann::ordered_json j;
  j["criterion"] = r.id;
  j["title"] = r.title;
  j["pass"] = r.pass;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& x : r.reports) j["reports"].push_back(stats::to_json(x));
  j["info"] = nlohmann::ordered_json::array();
  for (const auto& x : r.info) j["info"].push_back(stats::to_json(x));
  return j.dump(2) + "\n";
}

}  // namespace wpd::suite
