#include "scclab/experiments.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"
#include "scclab/common.hpp"
#include "scclab/fuchsian.hpp"
#include "scclab/hyperbolic.hpp"
#include "scclab/margulis.hpp"
#include "scclab/model.hpp"
#include "scclab/nets.hpp"
#include "scclab/stats.hpp"
#include "scclab/walk.hpp"
#include "scclab/witness.hpp"

namespace scclab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

struct Run {
  const Config& cfg;
  const RunContext& ctx;
  ResultRecord& rec;

  void criterion(int id, bool pass, const std::string& detail) {
    rec.criteria.push_back({id, id ? criterion_name(id) : std::string("auxiliary"), pass, detail});
  }
  void aux(const std::string& name, bool pass, const std::string& detail) {
    rec.criteria.push_back({0, name, pass, detail});
  }
  std::string side_path(const std::string& file) const {
    if (ctx.out_dir.empty()) return {};
    std::filesystem::create_directories(ctx.out_dir);
    return (std::filesystem::path(ctx.out_dir) / file).string();
  }
};

// lattice point growth and the concave subset for PSL(2,Z)
void lattice_count(Run& r) {
  const auto& c = r.cfg;
  const double y0 = c.get_positive("lattice.basepoint_y", 1.0);
  const auto radii = c.get_radii("lattice.radii", linspace_step(6, 12, 0.5));
  const double max_seconds = c.get_positive("lattice.max_seconds", 60);
  const HalfPlanePoint p{0, y0};
  GroupPresentation G = modular_group();

  auto t0 = Clock::now();
  EnumerationOptions eo;
  eo.workers = 1;  // the runtime bound is for a single thread
  OrbitEnumeration orbit = enumerate_orbit(G, p, radii.back(), eo);
  ExponentEstimate e = estimate_critical_exponent(orbit, radii);
  double t_enum = seconds_since(t0);
  r.rec.timings["enumeration"] = t_enum;
  r.rec.metrics["lattice_exponent"] = e.value;
  r.rec.metrics["lattice_exponent_lo"] = e.lo;
  r.rec.metrics["lattice_exponent_hi"] = e.hi;
  r.rec.metrics["elements"] = double(orbit.count(radii.back()));
  r.rec.series["radii"] = radii;
  r.rec.series["log_lattice_count"] = e.log_counts;
  bool in_band = e.value >= c.get_double("lattice.exponent_lo", 0.85) && e.value <= c.get_double("lattice.exponent_hi", 1.15);
  r.criterion(1, in_band && t_enum < max_seconds,
              "slope " + fmt(e.value) + " in [0.85, 1.15], single-thread time " + fmt(t_enum, 3) + " s");

  ConcaveOptions co;
  co.epsilon = c.get_positive("concave.eps", 0.5);
  co.spacing = c.get_positive("concave.spacing", 0.05);
  co.thick_diameter = c.get_double("concave.thick_diameter", -1);
  co.workers = r.ctx.workers;
  const auto cradii = c.get_radii("concave.radii", radii);
  t0 = Clock::now();
  ConcaveCount cc = count_concave_lattice_points(G, orbit, cradii, co);
  r.rec.timings["concave"] = seconds_since(t0);
  std::vector<double> logm;
  for (auto m : cc.concave) logm.push_back(m > 0 ? std::log(double(m)) : -1.0);
  r.rec.series["concave_radii"] = cradii;
  r.rec.series["log_concave_count"] = logm;
  r.rec.metrics["concave_s"] = cc.s;
  if (!cc.exponent) {
    r.rec.warnings.push_back("concave exponent not estimable");
    r.criterion(3, false, "concave exponent not estimable");
    return;
  }
  double gap = e.value - *cc.exponent;
  r.rec.metrics["concave_exponent"] = *cc.exponent;
  r.rec.metrics["convexity_gap"] = gap;
  r.criterion(3, gap >= c.get_double("concave.min_gap", 0.2),
              "concave exponent " + fmt(*cc.exponent) + ", gap " + fmt(gap) + " >= 0.2");
}

// net points inside the horoball {y > 1} and the rectangle integral
void horoball_exponent(Run& r) {
  const auto& c = r.cfg;
  const auto radii = c.get_radii("horoball.radii", linspace_step(6, 20, 1));
  const double eps_n = c.get_positive("horoball.eps_n", 1.0);
  const double level = c.get_positive("horoball.level", 1.0);
  const HalfPlanePoint p{0, level};
  auto t0 = Clock::now();
  HoroballBallRegion region(p, radii.back(), level);
  NetOptions no;
  no.oversample = c.get_positive("nets.oversample", 10);
  HalfPlaneNet net = build_net(region, eps_n, r.ctx.seed, no);
  std::vector<std::size_t> counts;
  for (double R : radii) counts.push_back(net.count(p, R));
  EntropyEstimate e = fit_entropy(radii, counts, "h_NP");
  r.rec.timings["net"] = seconds_since(t0);
  r.rec.metrics["net_points"] = double(net.size());
  r.rec.metrics["probe_covering_radius"] = net.probe_covering_radius;
  r.rec.metrics["horoball_exponent"] = e.slope;
  r.rec.series["radii"] = radii;
  r.rec.series["log_net_count"] = e.log_counts;
  for (const auto& w : net.warnings) r.rec.warnings.push_back(w);

  // closed form against adaptive quadrature of dx dy / y^2
  double worst = 0;
  for (double R : {2.0, 6.0, 12.0, 20.0}) {
    double X = std::exp(R / 2), Y = std::exp(R);
    auto inner = [](double y) { return 1.0 / (y * y); };
    // substitute y = e^t so the integrand is smooth on a short interval
    auto g = [&](double t) { return inner(std::exp(t)) * std::exp(t); };
    double q = 2 * X * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::log(Y), 20, 1e-14);
    double cf = rectangle_integral(X, Y);
    worst = std::max(worst, std::abs(q - cf) / std::max(1.0, std::abs(cf)));
  }
  r.rec.metrics["rectangle_integral_error"] = worst;
  bool ok = e.slope >= 0.4 && e.slope <= 0.6 && worst <= 1e-8;
  r.criterion(2, ok, "net exponent " + fmt(e.slope) + " in [0.4, 0.6], rectangle integral error " + fmt(worst, 3));
}

// test points spanning the three regions of the drift argument
std::vector<ModelPoint> drift_points(const ModelSpace& X, double tau, double eps, std::size_t per_region,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double thin = std::exp(tau) / eps;  // thin on the whole ball above this
  const double cap = 1.0 / X.eps_t;
  auto point = [&](double y1, double y2) {
    ModelPoint p;
    if (U(rng) < 0.5) std::swap(y1, y2);
    p.c = {{U(rng) * 4 - 2, y1}, {U(rng) * 4 - 2, y2}, {0, std::exp(U(rng) * std::log(cap))}};
    validate(X, p);
    return p;
  };
  std::vector<ModelPoint> pts;
  for (std::size_t k = 0; k < per_region; ++k) {
    double y1 = thin * std::exp(0.2 + 6 * U(rng));
    double y2 = std::min(y1 * std::exp(-2 * tau), thin) * std::exp(-3 * U(rng));
    pts.push_back(point(y1, y2));
  }
  for (std::size_t k = 0; k < per_region; ++k) {
    double y1 = thin * std::exp(0.2 + 6 * U(rng));
    double y2 = k % 2 ? thin * std::exp(0.2 + 6 * U(rng)) : y1 * std::exp(-2 * tau * U(rng));
    pts.push_back(point(y1, y2));
  }
  for (std::size_t k = 0; k < per_region; ++k) {
    double y1 = std::exp(std::log(thin) * U(rng)), y2 = std::exp(std::log(thin) * U(rng) - 2 * U(rng));
    pts.push_back(point(y1, y2));
  }
  return pts;
}

void drift(Run& r) {
  const auto& c = r.cfg;
  const double tau = c.get_positive("drift.tau", 3.0);
  const double eps = c.get_positive("drift.eps", 0.5);
  const double eps_t = c.get_positive("model.eps_t", 0.1);
  ModelSpace X({plane_factor(), plane_factor(), line_factor()}, eps_t);
  NorburyModelMeasure mu(X);
  MargulisFn f(X, c.get_positive("drift.lower_bound", 0.5));
  DriftOptions opt;
  opt.eps = eps;
  opt.samples = static_cast<std::size_t>(c.get_int("drift.samples", 20000));
  opt.seed = r.ctx.seed;
  opt.workers = r.ctx.workers;
  auto pts = drift_points(X, tau, eps, static_cast<std::size_t>(c.get_int("drift.points_per_region", 40)),
                          derive_seed(r.ctx.seed, 101));
  auto t0 = Clock::now();
  DriftReport rep = verify_drift(f, mu, pts, tau, opt);
  r.rec.timings["drift"] = seconds_since(t0);
  if (auto path = r.side_path("drift.csv"); !path.empty()) {
    std::ofstream os(path);
    rep.write_csv(os);
  }
  r.rec.metrics["points"] = double(rep.rows.size());
  r.rec.metrics["R1"] = double(rep.count(DriftRegion::R1));
  r.rec.metrics["R2"] = double(rep.count(DriftRegion::R2));
  r.rec.metrics["R3"] = double(rep.count(DriftRegion::R3));
  r.rec.metrics["counterexamples"] = double(rep.counterexamples());
  r.rec.metrics["bound_B"] = rep.bound_B;
  r.rec.metrics["max_thick_average"] = rep.max_thick_average;

  // decay of c(tau) at a deep single plane point
  ModelSpace Y({plane_factor()}, eps_t);
  NorburyModelMeasure muY(Y);
  MargulisFn fY(Y);
  const auto taus = c.get_radii("drift.decay_taus", {2, 3, 4, 5, 6});
  const double depth = c.get_double("drift.decay_log_y", 8.0);
  ModelPoint deep{{{0, std::exp(depth)}}};
  std::vector<double> ratios, exact;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    BallAverage a = ball_average([&](const ModelPoint& q) { return fY(q); }, muY, deep, taus[k],
                                 static_cast<std::size_t>(c.get_int("drift.decay_samples", 200000)),
                                 derive_seed(r.ctx.seed, 1000 + k), r.ctx.workers);
    ratios.push_back(a.value / fY(deep));
    exact.push_back(ball_average_ratio(taus[k]));
  }
  DecayFit d = fit_decay(taus, ratios);
  r.rec.series["decay_taus"] = taus;
  r.rec.series["decay_ratio"] = ratios;
  r.rec.series["decay_ratio_quadrature"] = exact;
  r.rec.metrics["decay_exponent"] = d.exponent;
  r.rec.metrics["decay_raw_slope"] = d.raw_slope;
  bool spans = rep.count(DriftRegion::R1) && rep.count(DriftRegion::R2) && rep.count(DriftRegion::R3);
  bool ok = rep.rows.size() >= 100 && spans && rep.counterexamples() == 0 && d.exponent <= -0.4 && d.strictly_decreasing;
  r.criterion(4, ok,
              std::to_string(rep.rows.size()) + " points, " + std::to_string(rep.counterexamples()) +
                  " counterexamples at 3 sigma, decay exponent " + fmt(d.exponent) + " <= -0.4");
}

// symmetric walk on a single line factor in log coordinates, with and
// without the systole cap; no pass/fail, it only illustrates the tails
void line_factor_demo(Run& r) {
  const double tau = r.cfg.get_positive("walk.line_demo_tau", 1.0);
  const double cap = std::log(1.0 / r.cfg.get_positive("model.eps_t", 0.1));
  const int steps = static_cast<int>(r.cfg.get_int("walk.line_demo_steps", 200));
  const int runs = static_cast<int>(r.cfg.get_int("walk.line_demo_runs", 10000));
  std::mt19937_64 rng(derive_seed(r.ctx.seed, 77));
  std::uniform_real_distribution<double> U(-tau, tau);
  long far_capped = 0, far_free = 0, total = 0;
  for (int k = 0; k < runs; ++k) {
    double a = 0, b = 0;
    for (int s = 0; s < steps; ++s) {
      double du = U(rng);
      a = std::min(a + du, cap);
      b += du;
      // "far" means more than 4 tau below the start in log u, i.e. long curves
      far_capped += a < -4 * tau;
      far_free += std::abs(b) > 4 * tau;
      ++total;
    }
  }
  r.rec.metrics["line_demo_far_fraction_capped"] = double(far_capped) / double(total);
  r.rec.metrics["line_demo_far_fraction_free"] = double(far_free) / double(total);
}

void walk(Run& r) {
  const auto& c = r.cfg;
  WalkConfig cfg;
  cfg.tau = c.get_positive("walk.tau", 5.0);
  cfg.eps = c.get_double("walk.eps", 0.5);
  cfg.mode = parse_thin_mode(c.get_string("walk.mode", "strict"));
  cfg.thick_diameter = c.get_double("walk.thick_diameter", 4.0);
  cfg.trajectories = static_cast<std::size_t>(c.get_int("walk.trajectories", 1000000));
  cfg.seed = r.ctx.seed;
  cfg.workers = r.ctx.workers;
  cfg.log_trajectories = static_cast<std::size_t>(c.get_int("walk.log_trajectories", 0));
  const double eps_n = c.get_positive("walk.eps_n", 0.5);
  const double max_seconds = c.get_positive("walk.max_seconds", 300);
  auto t0 = Clock::now();
  EquivariantNet net(genus2_surface_group(), eps_n, cfg.tau, derive_seed(r.ctx.seed, 5));
  r.rec.timings["net"] = seconds_since(t0);
  r.rec.metrics["net_seeds"] = double(net.seeds().size());
  r.rec.metrics["net_separation"] = net.separation();
  r.rec.metrics["degree_min"] = double(net.min_degree());
  r.rec.metrics["degree_max"] = double(net.max_degree());
  auto t1 = Clock::now();
  WalkResult res = run_and_count_concave(net, cfg);
  double t_walk = seconds_since(t1);
  r.rec.timings["walk"] = t_walk;
  if (auto path = r.side_path("trajectories.jsonl"); !path.empty() && !res.logged.empty()) {
    std::ofstream os(path);
    for (const auto& t : res.logged) t.write_json(os);
  }
  std::vector<double> ns(res.steps.begin(), res.steps.end()), hits(res.concave.begin(), res.concave.end());
  r.rec.series["steps"] = ns;
  r.rec.series["concave"] = hits;
  r.rec.series["fraction"] = res.fractions;
  r.rec.metrics["s"] = res.s;
  r.rec.metrics["trajectories"] = double(res.trajectories);
  for (const auto& w : res.warnings) r.rec.warnings.push_back(w);
  if (c.get_bool("walk.line_demo", true)) line_factor_demo(r);
  if (!res.fitted) {
    r.criterion(5, false, "decay not estimable");
    return;
  }
  r.rec.metrics["per_step_exponent"] = res.fit.slope;
  r.rec.metrics["per_step_exponent_stderr"] = res.fit.slope_stderr;
  bool ok = res.fit.slope <= -0.5 && res.trajectories >= 100000 && seconds_since(t0) < max_seconds;
  r.criterion(5, ok,
              "per-step exponent " + fmt(res.fit.slope) + " <= -0.5 over n in [" + std::to_string(2 * res.s + 1) +
                  ", " + std::to_string(2 * res.s + 8) + "], " + std::to_string(res.trajectories) + " trajectories, " +
                  fmt(seconds_since(t0), 3) + " s");
}

void weak_convexity(Run& r) {
  const auto& c = r.cfg;
  const double eps_t = c.get_positive("model.eps_t", 0.1);
  const double delta = c.get_positive("weak.delta", 1.0);
  const double injected = c.get_double("weak.injected_error", 0.01);
  const double min_length = c.get_positive("weak.min_length", 5.0);
  const int n = static_cast<int>(c.get_int("weak.segments", 1000));
  ModelSpace mixed({plane_factor(), line_factor(), line_factor()}, eps_t);
  ModelSpace lines({line_factor(), line_factor()}, eps_t);
  std::mt19937_64 rng(derive_seed(r.ctx.seed, 3));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double lcap = std::log(1.0 / eps_t);
  auto random_point = [&](const ModelSpace& X, bool inside) {
    ModelPoint p;
    for (const auto& f : X.factors) {
      if (f.kind == FactorKind::plane)
        p.c.push_back({8 * U(rng) - 4, std::exp(6 * U(rng) - 3)});
      else
        p.c.push_back({0, std::exp(inside ? lcap - 6 * U(rng) : lcap + 3 * U(rng) - 1)});
    }
    return p;
  };
  double worst_mixed = 0, worst_line = 0;
  int outside = 0, modified = 0, tested = 0;
  for (int k = 0; k < n; ++k) {
    bool pure = k % 4 == 3;
    const ModelSpace& X = pure ? lines : mixed;
    ModelPath path;
    for (int tries = 0; tries < 100; ++tries) {
      path.points = {random_point(X, true)};
      int inner = 1 + static_cast<int>(3 * U(rng));
      for (int i = 0; i < inner; ++i) path.points.push_back(random_point(X, false));
      path.points.push_back(random_point(X, true));
      if (path.length(X) >= min_length) break;
    }
    if (path.length(X) < min_length) continue;
    ++tested;
    HomotopyResult h = weak_convexity_homotope(X, path, delta, eps_t, pure ? 0.0 : injected);
    modified += h.modified > 0;
    // the pieces are coordinatewise geodesics, monotone in log u, so the
    // vertices decide membership
    for (const auto& p : h.path.points)
      if (!is_in_systole_set(X, p, eps_t * (1 - 1e-12))) ++outside;
    (pure ? worst_line : worst_mixed) = std::max(pure ? worst_line : worst_mixed, h.ratio);
  }
  r.rec.metrics["segments"] = tested;
  r.rec.metrics["modified"] = modified;
  r.rec.metrics["points_outside"] = outside;
  r.rec.metrics["max_ratio"] = worst_mixed;
  r.rec.metrics["max_ratio_pure_line"] = worst_line;
  bool ok = tested >= n && outside == 0 && worst_mixed <= 1.05 && worst_line <= 1.0 + 1e-12;
  r.criterion(6, ok,
              std::to_string(tested) + " paths, " + std::to_string(outside) + " points outside, max ratio " +
                  fmt(worst_mixed, 5) + ", pure line max ratio " + fmt(worst_line, 15));
}

void projection_contrast(Run& r) {
  const auto& c = r.cfg;
  const int n = static_cast<int>(c.get_int("projection.balls", 100));
  const double bound = c.get_positive("projection.bound", 5.0);
  std::mt19937_64 rng(derive_seed(r.ctx.seed, 4));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Geodesic axis = Geodesic::imaginary_axis();
  double worst = 0, worst_oracle_gap = 0;
  for (int k = 0; k < n; ++k) {
    // centre at distance d from the axis, radius below d
    double d = 0.2 + 8 * U(rng), rad = d * (0.05 + 0.9 * U(rng));
    HalfPlanePoint on = axis.at(20 * U(rng) - 10);
    // move perpendicular to the axis: rotate by 90 degrees about the foot
    HalfPlanePoint ctr = circle_point(on, d, U(rng) < 0.5 ? M_PI / 2 : -M_PI / 2);
    if (!(distance_to_geodesic(ctr, axis) > rad)) continue;
    double exact = ball_projection_diameter(ctr, rad, axis);
    // sampled oracle: coarse scan of the circle, then Brent refinement of
    // the two extreme projection parameters
    // the extremes are peaks of angular width about e^-rad
    const int m = std::max(720, static_cast<int>(20 * std::exp(rad)));
    auto par = [&](double th) { return axis.parameter(circle_point(ctr, rad, th)); };
    int jmax = 0, jmin = 0;
    std::vector<double> vals(m);
    for (int j = 0; j < m; ++j) {
      vals[j] = par(2 * M_PI * j / m);
      if (vals[j] > vals[jmax]) jmax = j;
      if (vals[j] < vals[jmin]) jmin = j;
    }
    const double step = 2 * M_PI / m;
    auto hi = boost::math::tools::brent_find_minima([&](double th) { return -par(th); }, 2 * M_PI * jmax / m - step,
                                                    2 * M_PI * jmax / m + step, 52);
    auto lo = boost::math::tools::brent_find_minima(par, 2 * M_PI * jmin / m - step, 2 * M_PI * jmin / m + step, 52);
    double sampled = std::max(vals[jmax], -hi.second) - std::min(vals[jmin], lo.second);
    worst_oracle_gap = std::max(worst_oracle_gap, std::abs(sampled - exact));
    worst = std::max(worst, exact);
  }
  std::vector<double> Rs = c.get_radii("projection.twist_radii", {4, 6, 8});
  std::vector<double> diam;
  bool linear = true;
  for (double R : Rs) {
    TwistProjection t = dehn_twist_axis_projection_experiment(R, c.get_positive("projection.eps", 0.5));
    diam.push_back(t.diameter);
    if (!(t.disjoint && t.diameter >= 1.5 * R)) linear = false;
  }
  r.rec.metrics["max_ball_projection"] = worst;
  r.rec.metrics["oracle_gap"] = worst_oracle_gap;
  r.rec.series["twist_radii"] = Rs;
  r.rec.series["twist_diameter"] = diam;
  bool grows = diam.size() >= 2 && diam.back() > diam.front() + 2;
  bool ok = worst <= bound && worst_oracle_gap <= 1e-6 && linear && grows;
  r.criterion(7, ok,
              "max ball projection " + fmt(worst) + " <= 5 (oracle gap " + fmt(worst_oracle_gap, 3) +
                  "), twist diameters " + fmt(diam.front()) + " .. " + fmt(diam.back()));
}

WitnessGraph random_witness_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(1, 6), num(1, 40), den(1, 8), sv(0, 30);
  WitnessGraph g;
  int n = nv(rng);
  for (int i = 0; i < n; ++i) g.add_vertex(double(num(rng)) / den(rng), sv(rng));
  return g;
}

void witness_count(Run& r) {
  const auto& c = r.cfg;
  const auto H = c.get_doubles("witness.H", {1, 2});
  const auto rs = c.get_radii("witness.budgets", {10, 20, 30, 40, 50, 60, 70, 80});
  const int k = static_cast<int>(c.get_int("witness.max_vertices", 3));
  std::vector<double> lr, lc;
  for (double b : rs) {
    lr.push_back(std::log(b));
    lc.push_back(std::log(double(count_combinatorial_types(k, b, H))));
  }
  LinearFit fit = linear_fit(lr, lc);
  r.rec.series["budgets"] = rs;
  r.rec.series["log_type_count"] = lc;
  r.rec.metrics["type_count_loglog_slope"] = fit.slope;

  const double eps_r = c.get_positive("witness.eps_r", 0.1);
  const int graphs = static_cast<int>(c.get_int("witness.graphs", 1000));
  std::mt19937_64 rng(derive_seed(r.ctx.seed, 8));
  int violations = 0;
  for (int i = 0; i < graphs; ++i)
    if (!check_count_bound(random_witness_graph(rng), eps_r).holds) ++violations;
  r.rec.metrics["count_bound_violations"] = violations;
  bool poly = fit.slope <= 3.0 * double(H.size());
  r.criterion(8, poly && violations == 0,
              "type count slope " + fmt(fit.slope) + " <= " + fmt(3.0 * H.size()) + ", " + std::to_string(violations) +
                  " count bound violations in " + std::to_string(graphs) + " graphs");

  const double eps_b = c.get_double("witness.eps_b", 0.2);
  const int lists = static_cast<int>(c.get_int("witness.segment_lists", 1000));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0;
  int not_holding = 0;
  for (int i = 0; i < lists; ++i) {
    double h = 1.5 + 4.5 * U(rng), R = 5 + 95 * U(rng);
    std::vector<Segment> segs;
    auto split = [&](double total, double e) {
      int m = 1 + static_cast<int>(4 * U(rng));
      std::vector<double> w(m);
      double sw = 0;
      for (double& x : w) sw += (x = 0.1 + U(rng));
      for (double x : w) segs.push_back({total * x / sw, e});
    };
    split((1 - eps_b) * R, h);
    split(eps_b * R, h - 1);
    GapResult g = linear_gap_check(segs, h, eps_b, h - 1);
    if (g.verdict != GapVerdict::holds) ++not_holding;
    worst = std::max(worst, std::abs(g.achieved_c - g.required_c));
  }
  r.rec.metrics["linear_gap_max_error"] = worst;
  r.rec.metrics["linear_gap_not_holding"] = not_holding;
  r.criterion(9, worst <= 1e-9 && not_holding == 0,
              std::to_string(lists) + " lists, max error of c against eps_b(1 - h_sub/h) " + fmt(worst, 3));
}

void rafi_check(Run& r) {
  const auto& c = r.cfg;
  const int n = static_cast<int>(c.get_int("rafi.instances", 1000));
  const double k = c.get_positive("rafi.k", 2.0);
  ModelSpace X({plane_factor(), plane_factor(), plane_factor(), line_factor(), line_factor()},
               c.get_positive("model.eps_t", 0.1));
  std::mt19937_64 rng(derive_seed(r.ctx.seed, 12));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto rand_plane = [&] { return HalfPlanePoint{10 * U(rng) - 5, std::exp(8 * U(rng) - 2)}; };
  auto rand_line = [&] { return HalfPlanePoint{0, std::exp(-6 * U(rng))}; };
  int mismatches = 0, monotone_fail = 0, sandwich_fail = 0;
  for (int i = 0; i < n; ++i) {
    int kind = i % 3;  // 0 two-sided only, 1 one-sided only, 2 mixed
    ModelPoint a, b;
    for (const auto& f : X.factors) {
      HalfPlanePoint pa = f.kind == FactorKind::plane ? rand_plane() : rand_line();
      HalfPlanePoint pb = pa;
      bool active = kind == 2 || (kind == 0) == (f.kind == FactorKind::plane);
      if (active) pb = f.kind == FactorKind::plane ? rand_plane() : rand_line();
      a.c.push_back(pa);
      b.c.push_back(pb);
    }
    RafiInput in;
    in.k = k;
    for (std::size_t j = 0; j < X.size(); ++j) {
      double d = factor_distance(X, j, a, b);
      (X.factors[j].kind == FactorKind::plane ? in.gamma_two_sided : in.gamma_one_sided).push_back(d);
    }
    // inactive terms sit at or below the cutoff
    for (int j = 0; j < 4; ++j) in.nonannular.push_back(k * U(rng));
    for (int j = 0; j < 3; ++j) in.annular.push_back(std::exp(k * U(rng)));
    double rd = rafi_distance(in), md = model_distance(X, a, b);
    if (kind < 2) {
      if (rd != md) ++mismatches;
    } else if (!(rd >= md && rd <= 2 * md)) {
      ++sandwich_fail;
    }
    // raise one term at a time
    auto check = [&](RafiInput bumped) {
      if (rafi_distance(bumped) < rd) ++monotone_fail;
    };
    double up = 5 * U(rng);
    for (std::size_t j = 0; j < in.nonannular.size(); ++j) {
      auto t = in;
      t.nonannular[j] += up;
      check(t);
    }
    for (std::size_t j = 0; j < in.annular.size(); ++j) {
      auto t = in;
      t.annular[j] *= std::exp(up);
      check(t);
    }
    for (std::size_t j = 0; j < in.gamma_two_sided.size(); ++j) {
      auto t = in;
      t.gamma_two_sided[j] += up;
      check(t);
    }
    for (std::size_t j = 0; j < in.gamma_one_sided.size(); ++j) {
      auto t = in;
      t.gamma_one_sided[j] += up;
      check(t);
    }
    auto t = in;
    t.short_x.push_back(0.01 + 0.1 * U(rng));
    check(t);
  }
  r.rec.metrics["instances"] = n;
  r.rec.metrics["mismatches"] = mismatches;
  r.rec.metrics["monotonicity_failures"] = monotone_fail;
  r.rec.metrics["mixed_sandwich_failures"] = sandwich_fail;
  r.criterion(12, mismatches == 0 && monotone_fail == 0 && sandwich_fail == 0,
              std::to_string(n) + " instances, " + std::to_string(mismatches) + " mismatches against the model distance, " +
                  std::to_string(monotone_fail) + " monotonicity failures");
}

void volume_bounds(Run& r) {
  const auto& c = r.cfg;
  const double eps_t = c.get_positive("model.eps_t", 0.1);
  const double lmax = c.get_positive("volume.max_length", 1.0);
  const double R = c.get_positive("volume.radius", 1.0);
  const int centers = static_cast<int>(c.get_int("volume.centers", 50));
  const auto samples = static_cast<std::size_t>(c.get_int("volume.samples", 20000));
  ModelSpace X({plane_factor(), line_factor()}, eps_t);
  NorburyModelMeasure mu(X);
  std::mt19937_64 rng(derive_seed(r.ctx.seed, 11));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double vmin = INFINITY, vmax = 0;
  std::vector<double> vols;
  for (int i = 0; i < centers; ++i) {
    double len = eps_t * std::exp(U(rng) * std::log(lmax / eps_t));
    ModelPoint p{{{10 * U(rng) - 5, std::exp(6 * U(rng) - 3)}, {0, 1.0 / len}}};
    VolumeEstimate v = mc_ball_volume(mu, p, R, samples, derive_seed(r.ctx.seed, 200 + i), r.ctx.workers);
    vols.push_back(v.value);
    vmin = std::min(vmin, v.value);
    vmax = std::max(vmax, v.value);
  }
  // coth sandwich on draws inside the systole set
  const std::size_t nsand = static_cast<std::size_t>(c.get_int("volume.sandwich_samples", 10000));
  const double upper = 1.0 / std::tanh(eps_t);
  std::size_t checked = 0, bad = 0;
  for (std::size_t guard = 0; checked < nsand && guard < 100 * nsand; ++guard) {
    double len = eps_t * std::exp(U(rng) * std::log(lmax / eps_t));
    ModelPoint p{{{0, 1}, {0, 1.0 / len}}};
    BallDraw d = sample_model_ball(mu, p, R, rng);
    if (!d.inside) continue;
    ++checked;
    double w = NorburyModelMeasure::coth_weight(1.0 / d.point.c[1].y);
    if (!(w >= 1.0 && w <= upper * (1 + 1e-12))) ++bad;
  }
  r.rec.series["volumes"] = vols;
  r.rec.metrics["volume_ratio"] = vmax / vmin;
  r.rec.metrics["sandwich_checked"] = double(checked);
  r.rec.metrics["sandwich_failures"] = double(bad);
  bool ok = vmax / vmin <= 10 && checked == nsand && bad == 0;
  r.criterion(11, ok,
              "max/min volume " + fmt(vmax / vmin) + " over " + std::to_string(centers) + " centres, " +
                  std::to_string(bad) + " sandwich failures in " + std::to_string(checked) + " samples");
}

void entropy_compare(Run& r) {
  const auto& c = r.cfg;
  // free product gap
  const double L = c.get_positive("free.translation", 3.0);
  const double R = c.get_positive("free.radius", 14.0);
  const HalfPlanePoint p{0, 1};
  auto a = disc_axis_translation(0, L), b = disc_axis_translation(M_PI / 3, L), cc = disc_axis_translation(2 * M_PI / 3, L);
  GroupPresentation B = schottky({a, b}, p);
  GroupPresentation A = cyclic_hyperbolic(cc, p);
  GroupPresentation Hf = free_product(A, B);
  EnumerationOptions eo;
  eo.workers = r.ctx.workers;
  auto t0 = Clock::now();
  OrbitEnumeration OA = enumerate_orbit(A, p, R, eo), OB = enumerate_orbit(B, p, R, eo), OH = enumerate_orbit(Hf, p, R, eo);
  auto fr = linspace_step(R / 2, R, 0.25);
  ExponentEstimate eB = estimate_critical_exponent(OB, fr), eH = estimate_critical_exponent(OH, fr);
  // cyclic factor has exponent 0
  double larger = std::max(0.0, eB.value);
  double gap = eH.value - larger;
  const double h = eB.value + c.get_double("free.series_offset", 0.05);
  std::vector<double> sums, lower, shells = linspace_step(0.25, R, 0.25);
  bool dominated = true;
  for (double s : shells) {
    PoincareSeriesEstimate P = poincare_partial_sum(OH, h, s);
    double lb = dirichlet_lower_bound(OA, OB, h, s);
    sums.push_back(P.partial_sums.back());
    lower.push_back(lb);
    if (P.partial_sums.back() < lb) dominated = false;
  }
  r.rec.timings["free_product"] = seconds_since(t0);
  r.rec.metrics["factor_exponent"] = larger;
  r.rec.metrics["free_product_exponent"] = eH.value;
  r.rec.metrics["free_product_gap"] = gap;
  r.rec.series["series_radii"] = shells;
  r.rec.series["partial_sums"] = sums;
  r.rec.series["dirichlet_lower_bound"] = lower;
  r.criterion(10, gap >= 0.1 && dominated,
              "free product exponent " + fmt(eH.value) + " vs factor " + fmt(larger) + " (gap " + fmt(gap) +
                  "), lower bound respected at " + std::to_string(shells.size()) + " radii: " + (dominated ? "yes" : "no"));

  // lattice points against net points for PSL(2,Z), and good / bad net points
  const auto radii = c.get_radii("entropy.radii", linspace_step(5, 10, 0.5));
  const double eps_n = c.get_positive("entropy.eps_n", 1.0);
  const double eps_b = c.get_positive("entropy.eps_b", 0.2);
  const auto bad_radii = c.get_radii("entropy.bad_radii", {6, 8, 10});
  t0 = Clock::now();
  GroupPresentation G = modular_group();
  double reach = std::max(radii.back(), bad_radii.back() * (1 + eps_b));
  OrbitEnumeration O = enumerate_orbit(G, p, reach, eo);
  ExponentEstimate hlp = estimate_critical_exponent(O, radii);
  BallRegion ball(p, std::max(radii.back(), bad_radii.back()));
  NetOptions no;
  no.oversample = c.get_positive("nets.oversample", 10);
  HalfPlaneNet net = build_net(ball, eps_n, derive_seed(r.ctx.seed, 9), no);
  std::vector<std::size_t> counts;
  for (double x : radii) counts.push_back(net.count(p, x));
  EntropyEstimate hnp = fit_entropy(radii, counts, "h_NP");
  std::vector<double> bad;
  for (double x : bad_radii) bad.push_back(classify_good_bad(net, O, x, eps_b, r.ctx.workers).bad_fraction());
  r.rec.timings["lattice_vs_net"] = seconds_since(t0);
  r.rec.metrics["h_LP"] = hlp.value;
  r.rec.metrics["h_NP"] = hnp.slope;
  r.rec.series["bad_radii"] = bad_radii;
  r.rec.series["bad_fraction"] = bad;
  r.aux("h_LP <= h_NP + 0.05", hlp.value <= hnp.slope + 0.05, "h_LP " + fmt(hlp.value) + ", h_NP " + fmt(hnp.slope));
  bool decreasing = true;
  for (std::size_t i = 1; i < bad.size(); ++i) decreasing = decreasing && bad[i] < bad[i - 1];
  r.aux("bad fraction decreasing in R", decreasing, "bad fractions " + fmt(bad.front()) + " .. " + fmt(bad.back()));
}

const std::map<std::string, std::function<void(Run&)>>& table() {
  static const std::map<std::string, std::function<void(Run&)>> t = {
      {"lattice-count", lattice_count},   {"horoball-exponent", horoball_exponent},
      {"drift", drift},                   {"walk", walk},
      {"weak-convexity", weak_convexity}, {"projection-contrast", projection_contrast},
      {"witness-count", witness_count},   {"rafi-check", rafi_check},
      {"volume-bounds", volume_bounds},   {"entropy-compare", entropy_compare},
  };
  return t;
}

// experiment that owns each criterion
const std::map<int, std::string>& owners() {
  static const std::map<int, std::string> o = {
      {1, "lattice-count"},  {2, "horoball-exponent"}, {3, "lattice-count"},  {4, "drift"},
      {5, "walk"},           {6, "weak-convexity"},    {7, "projection-contrast"}, {8, "witness-count"},
      {9, "witness-count"},  {10, "entropy-compare"},  {11, "volume-bounds"},  {12, "rafi-check"},
  };
  return o;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "lattice-count", "horoball-exponent", "drift",         "walk",          "weak-convexity",
      "projection-contrast", "witness-count", "rafi-check", "volume-bounds", "entropy-compare"};
  return names;
}

bool is_experiment(const std::string& name) { return table().count(name) != 0; }

std::string criterion_name(int id) {
  static const char* names[] = {"auxiliary",
                                "lattice exponent",
                                "horoball net exponent",
                                "statistical convexity gap",
                                "drift inequality",
                                "walk recurrence",
                                "weak convexity",
                                "projection contrast",
                                "witness counting",
                                "linear gap",
                                "free product entropy gap",
                                "volume uniformity",
                                "distance formula consistency"};
  return id >= 0 && id <= 12 ? names[id] : "unknown";
}

bool ResultRecord::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

std::string ResultRecord::to_json_line() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["timestamp"] = timestamp;
  j["config"] = config;
  j["seed"] = seed;
  j["workers"] = workers;
  j["metrics"] = metrics;
  j["series"] = series;
  j["timings"] = timings;
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : criteria)
    j["criteria"].push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["warnings"] = warnings;
  j["pass"] = pass();
  return j.dump();
}

ResultRecord ResultRecord::from_json_line(const std::string& line) {
  ResultRecord r;
  try {
    auto j = nlohmann::json::parse(line);
    r.experiment = j.at("experiment").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.timestamp = j.value("timestamp", "");
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.workers = j.value("workers", 1);
    if (j.contains("metrics"))
      for (auto& [k, v] : j["metrics"].items()) r.metrics[k] = v.is_number() ? v.get<double>() : NAN;
    if (j.contains("series")) r.series = j["series"].get<std::map<std::string, std::vector<double>>>();
    if (j.contains("timings")) r.timings = j["timings"].get<std::map<std::string, double>>();
    for (const auto& c : j.at("criteria"))
      r.criteria.push_back({c.at("id").get<int>(), c.value("name", ""), c.at("pass").get<bool>(), c.value("detail", "")});
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed result record: ") + e.what());
  }
  return r;
}

ResultRecord run_experiment(const std::string& name, const Config& cfg, const RunContext& ctx) {
  auto it = table().find(name);
  if (it == table().end()) throw ConfigError("unknown experiment: " + name);
  if (ctx.workers < 1) throw ConfigError("workers must be at least 1");
  Config eff = cfg;
  eff.set("experiment", name);
  eff.set("seed", std::to_string(ctx.seed));
  eff.set("workers", std::to_string(ctx.workers));
  ResultRecord rec;
  rec.experiment = name;
  rec.config = eff.values;
  rec.config_hash = eff.hash_hex();
  rec.timestamp = utc_now();
  rec.seed = ctx.seed;
  rec.workers = ctx.workers;
  Run run{eff, ctx, rec};
  auto t0 = Clock::now();
  it->second(run);
  rec.timings["total"] = seconds_since(t0);
  return rec;
}

std::vector<ResultRecord> read_results(std::istream& is) {
  std::vector<ResultRecord> out;
  std::string line;
  while (std::getline(is, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(ResultRecord::from_json_line(line));
  return out;
}

void append_result(const std::string& path, const ResultRecord& r) {
  std::ofstream os(path, std::ios::app);
  if (!os) throw ResourceError("cannot open results file " + path, 0);
  os << r.to_json_line() << '\n';
}

bool Report::all_pass() const {
  for (const auto& l : criteria)
    if (l.status == "FAIL" || l.status == "INCONSISTENT") return false;
  for (const auto& l : cross_checks)
    if (l.status == "FAIL" || l.status == "INCONSISTENT") return false;
  return true;
}

Report make_report(const std::vector<ResultRecord>& records) {
  Report rep;
  // latest consistent record per experiment
  std::map<std::string, const ResultRecord*> latest;
  for (const auto& r : records) {
    Config c;
    c.values = r.config;
    if (c.hash_hex() != r.config_hash) {
      rep.inconsistent.push_back(r.experiment + " (" + r.timestamp + ")");
      continue;
    }
    latest[r.experiment] = &r;
  }
  auto inconsistent = [&](const std::string& exp) {
    for (const auto& s : rep.inconsistent)
      if (s.rfind(exp + " ", 0) == 0) return true;
    return false;
  };
  for (const auto& [id, exp] : owners()) {
    ReportLine l{id, criterion_name(id), "NOT RUN", exp, ""};
    auto it = latest.find(exp);
    if (it != latest.end()) {
      for (const auto& c : it->second->criteria)
        if (c.id == id) l.status = c.pass ? "PASS" : "FAIL", l.detail = c.detail;
    } else if (inconsistent(exp)) {
      l.status = "INCONSISTENT";
      l.detail = "config hash does not match the stored config";
    }
    if (l.status == "NOT RUN") rep.gaps.push_back("criterion " + std::to_string(id) + " needs " + exp);
    rep.criteria.push_back(l);
  }
  for (const auto& [exp, r] : latest)
    for (const auto& c : r->criteria)
      if (c.id == 0) rep.cross_checks.push_back({0, c.name, c.pass ? "PASS" : "FAIL", exp, c.detail});

  auto metric = [&](const std::string& exp, const std::string& key) -> std::optional<double> {
    auto it = latest.find(exp);
    if (it == latest.end()) return std::nullopt;
    auto m = it->second->metrics.find(key);
    if (m == it->second->metrics.end()) return std::nullopt;
    return m->second;
  };
  auto hc = metric("lattice-count", "concave_exponent"), hl = metric("lattice-count", "lattice_exponent");
  ReportLine sc{0, "concave exponent below lattice exponent", "NOT RUN", "lattice-count", ""};
  if (hc && hl) {
    sc.status = *hc < *hl ? "PASS" : "FAIL";
    sc.detail = fmt(*hc) + " < " + fmt(*hl);
  }
  rep.cross_checks.push_back(sc);
  auto hnp = metric("entropy-compare", "h_NP");
  ReportLine chain{0, "h_LPbar < h_LP <= h_NP + 0.05", "NOT RUN", "lattice-count, entropy-compare", ""};
  if (hc && hl && hnp) {
    chain.status = (*hc < *hl && *hl <= *hnp + 0.05) ? "PASS" : "FAIL";
    chain.detail = fmt(*hc) + " < " + fmt(*hl) + " <= " + fmt(*hnp) + " + 0.05";
  }
  rep.cross_checks.push_back(chain);
  return rep;
}

void Report::write_markdown(std::ostream& os) const {
  os << "# Acceptance report\n\n";
  os << "| # | criterion | status | experiment | detail |\n|---|---|---|---|---|\n";
  for (const auto& l : criteria)
    os << "| " << l.id << " | " << l.name << " | " << l.status << " | " << l.experiment << " | " << l.detail << " |\n";
  os << "\n## Cross checks\n\n| check | status | source | detail |\n|---|---|---|---|\n";
  for (const auto& l : cross_checks)
    os << "| " << l.name << " | " << l.status << " | " << l.experiment << " | " << l.detail << " |\n";
  if (!inconsistent.empty()) {
    os << "\n## Inconsistent records\n\n";
    for (const auto& s : inconsistent) os << "- " << s << "\n";
  }
  if (!gaps.empty()) {
    os << "\n## Gaps\n\n";
    for (const auto& s : gaps) os << "- " << s << "\n";
  }
  os << "\nOverall: " << (all_pass() ? "PASS" : "FAIL") << "\n";
}

void Report::write_series_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << "experiment,series,index,value\n";
  os << std::setprecision(10);
  for (const auto& r : records)
    for (const auto& [name, v] : r.series)
      for (std::size_t i = 0; i < v.size(); ++i) os << r.experiment << ',' << name << ',' << i << ',' << v[i] << '\n';
}

}  // namespace scclab
