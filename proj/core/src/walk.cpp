#include "scclab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include "json.hpp"
#include <ostream>

#include "scclab/common.hpp"

namespace scclab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(ThinMode m) { return m == ThinMode::strict ? "strict" : "distance"; }

ThinMode parse_thin_mode(const std::string& s) {
  if (s == "strict") return ThinMode::strict;
  if (s == "distance") return ThinMode::distance;
  throw ConfigError("unknown thin mode: " + s);
}

double ThinRule::threshold() const {
  if (!(eps > 0)) return kInf;
  return mode == ThinMode::strict ? 1.0 / eps : std::exp(tau) / eps;
}

int WalkConfig::s_param() const { return static_cast<int>(std::ceil(thick_diameter / tau)) + 1; }

void WalkConfig::validate() const {
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  if (!(eps >= 0)) throw ConfigError("eps must be nonnegative");
  if (!(thick_diameter >= 0)) throw ConfigError("thick diameter must be nonnegative");
  if (trajectories == 0) throw ConfigError("need at least one trajectory");
  for (int n : steps)
    if (n < 1) throw ConfigError("trajectory length must be at least 1");
}

bool Trajectory::concave(int s, std::size_t n) const {
  n = std::min(n, thin.size());
  for (std::size_t i = static_cast<std::size_t>(s); i + s < n; ++i)
    if (!thin[i]) return false;
  return true;
}

void Trajectory::write_json(std::ostream& os) const {
  nlohmann::json j;
  j["ids"] = ids;
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  j["x"] = xs;
  j["y"] = ys;
  j["steps"] = steps;
  std::vector<int> t(thin.begin(), thin.end());
  j["thin"] = t;
  os << j.dump() << '\n';
}

std::int32_t step(const HalfPlaneNet& net, std::int32_t r, double tau, std::mt19937_64& rng) {
  if (r < 0 || static_cast<std::size_t>(r) >= net.size()) throw WalkError("net point id out of range");
  std::vector<std::int32_t> c = net.within(net.points[r], tau);
  if (c.empty()) throw WalkError("empty neighbourhood: net or tau misconfigured");
  std::sort(c.begin(), c.end());
  std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
  return c[pick(rng)];
}

EquivariantNet::EquivariantNet(const GroupPresentation& G, double eps_n, double tau, std::uint64_t seed,
                               std::size_t samples)
    : G_(G), eps_n_(eps_n), tau_(tau) {
  if (!(eps_n > 0)) throw ConfigError("eps_n must be positive");
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  if (G.generators.empty()) throw DomainError("equivariant net needs a cocompact group");
  const HalfPlanePoint o{0, 1};
  faces_ = G.generators;
  // the domain sits inside the ball of radius max displacement
  const double R0 = max_displacement(G, o);
  rho_ = 0;

  EnumerationOptions eo;
  OrbitEnumeration near = enumerate_orbit(G, o, 2 * R0 + eps_n, eo);
  std::vector<HalfPlanePoint> near_pts;
  for (const auto& r : near.records) {
    near_.push_back(r.g);
    near_pts.push_back(apply(r.g, o));
  }

  if (samples == 0) samples = std::max<std::size_t>(2000, static_cast<std::size_t>(40 * ball_area(R0) / (eps_n * eps_n)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double shift[2] = {U(rng), U(rng)};
  for (std::size_t k = 1; k <= samples; ++k) {
    double u0 = std::fmod(halton(k, 2) + shift[0], 1.0), u1 = std::fmod(halton(k, 3) + shift[1], 1.0);
    double r = std::acosh(1.0 + u0 * (std::cosh(R0) - 1.0));
    HalfPlanePoint z = circle_point(o, r, 2 * M_PI * u1);
    if (!in_domain(z)) continue;
    rho_ = std::max(rho_, r);
    bool ok = true;
    for (std::size_t h = 0; h < near_.size() && ok; ++h) {
      if (distance(z, near_pts[h]) > R0 + eps_n) continue;
      for (const auto& m : seeds_)
        if (distance(z, apply(near_[h], m)) < eps_n) {
          ok = false;
          break;
        }
    }
    if (ok) seeds_.push_back(z);
  }
  if (seeds_.empty()) throw CoverageError("no net points found in the fundamental domain");
  if (rho_ > 0.999 * R0) throw DomainError("fundamental domain is not contained in the sampling ball");

  separation_ = kInf;
  for (std::size_t a = 0; a < seeds_.size(); ++a)
    for (std::size_t h = 0; h < near_.size(); ++h)
      for (std::size_t b = 0; b < seeds_.size(); ++b) {
        if (h == 0 && a == b) continue;
        separation_ = std::min(separation_, distance(seeds_[a], apply(near_[h], seeds_[b])));
      }

  // seeds lie within rho of i; the slack covers the sampled estimate of rho
  const double rho = std::min(R0, rho_ + 0.05);
  OrbitEnumeration big = enumerate_orbit(G, o, tau + 2 * rho, eo);
  table_.resize(seeds_.size());
  for (std::size_t a = 0; a < seeds_.size(); ++a) {
    for (const auto& rec : big.records) {
      if (distance(seeds_[a], apply(rec.g, o)) > tau + rho) continue;
      for (std::size_t b = 0; b < seeds_.size(); ++b) {
        double d = distance(seeds_[a], apply(rec.g, seeds_[b]));
        if (d <= tau) table_[a].push_back({rec.g, static_cast<std::int32_t>(b), d});
      }
    }
    if (table_[a].empty()) throw WalkError("empty neighbourhood: net or tau misconfigured");
  }
}

bool EquivariantNet::in_domain(const HalfPlanePoint& z) const {
  const HalfPlanePoint o{0, 1};
  double d0 = distance(z, o);
  for (const auto& f : faces_)
    if (distance(z, apply(f, o)) < d0) return false;
  return true;
}

std::size_t EquivariantNet::max_degree() const {
  std::size_t m = 0;
  for (const auto& t : table_) m = std::max(m, t.size());
  return m;
}

std::size_t EquivariantNet::min_degree() const {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& t : table_) m = std::min(m, t.size());
  return m;
}

EquivariantNet::State EquivariantNet::start() const {
  const HalfPlanePoint o{0, 1};
  State s;
  double best = kInf;
  for (std::size_t m = 0; m < seeds_.size(); ++m) {
    double d = distance(seeds_[m], o);
    if (d < best) best = d, s.m = static_cast<std::int32_t>(m);
  }
  return s;
}

EquivariantNet::State EquivariantNet::step(const State& s, std::mt19937_64& rng, double* length) const {
  const auto& t = table_[s.m];
  std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
  const Neighbor& nb = t[pick(rng)];
  if (length) *length = nb.distance;
  Isometry M = s.r * nb.h;
  HalfPlanePoint w = apply(M, {0, 1});
  return {{s.z.x + s.z.y * w.x, s.z.y * w.y}, lift(w).inverse() * M, nb.m};
}

HalfPlanePoint EquivariantNet::point(const State& s) const {
  HalfPlanePoint q = apply(s.r, seeds_[s.m]);
  return {s.z.x + s.z.y * q.x, s.z.y * q.y};
}

double EquivariantNet::probe_covering_radius(std::size_t probes, std::uint64_t seed) const {
  const HalfPlanePoint o{0, 1};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0;
  std::size_t done = 0;
  while (done < probes) {
    double r = std::acosh(1.0 + U(rng) * (std::cosh(rho_) - 1.0));
    HalfPlanePoint z = circle_point(o, r, 2 * M_PI * U(rng));
    if (!in_domain(z)) continue;
    ++done;
    double best = kInf;
    for (const auto& h : near_)
      for (const auto& m : seeds_) best = std::min(best, distance(z, apply(h, m)));
    worst = std::max(worst, best);
  }
  return worst;
}

namespace {

template <class Walker>
WalkResult run_walk(const WalkConfig& cfg, Walker&& walker) {
  cfg.validate();
  WalkResult res;
  res.s = cfg.s_param();
  res.steps = cfg.steps;
  if (res.steps.empty())
    for (int n = 2 * res.s + 1; n <= 2 * res.s + 8; ++n) res.steps.push_back(n);
  std::sort(res.steps.begin(), res.steps.end());
  const std::size_t nmax = static_cast<std::size_t>(res.steps.back());
  const ThinRule rule = cfg.rule();
  const int workers = std::max(1, cfg.workers);
  std::vector<std::vector<std::size_t>> hits(workers, std::vector<std::size_t>(res.steps.size(), 0));
  res.logged.resize(std::min(cfg.log_trajectories, cfg.trajectories));
  res.trajectories = cfg.trajectories;
  parallel_for(cfg.trajectories, workers, [&](int w, std::size_t b, std::size_t e) {
    Trajectory t;
    for (std::size_t k = b; k < e; ++k) {
      std::mt19937_64 rng(derive_seed(cfg.seed, k));
      walker(nmax, rule, rng, t);
      for (std::size_t j = 0; j < res.steps.size(); ++j)
        if (t.concave(res.s, static_cast<std::size_t>(res.steps[j]))) ++hits[w][j];
      if (k < res.logged.size()) res.logged[k] = t;
    }
  });
  res.concave.assign(res.steps.size(), 0);
  for (const auto& h : hits)
    for (std::size_t j = 0; j < h.size(); ++j) res.concave[j] += h[j];
  std::vector<double> x, y, wt;
  for (std::size_t j = 0; j < res.steps.size(); ++j) {
    double f = double(res.concave[j]) / double(res.trajectories);
    res.fractions.push_back(f);
    if (res.steps[j] > 2 * res.s && res.concave[j] > 0) {
      x.push_back(res.steps[j]);
      y.push_back(std::log(f));
      wt.push_back(double(res.concave[j]));
    }
  }
  std::size_t first = 0;
  while (first < res.steps.size() && res.steps[first] <= 2 * res.s) ++first;
  if (first < res.steps.size() && res.concave[first] < 30)
    res.warnings.push_back("fewer than 30 concave trajectories at the smallest length");
  if (x.size() >= 2) {
    res.fit = weighted_linear_fit(x, y, wt);
    res.fitted = true;
  } else {
    res.warnings.push_back("not enough lengths with concave trajectories to fit a decay");
  }
  return res;
}

}  // namespace

WalkResult run_and_count_concave(const EquivariantNet& net, const WalkConfig& cfg) {
  return run_walk(cfg, [&](std::size_t n, const ThinRule& rule, std::mt19937_64& rng, Trajectory& t) {
    t = Trajectory{};
    EquivariantNet::State s = net.start();
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        double len = 0;
        s = net.step(s, rng, &len);
        t.steps.push_back(len);
      }
      HalfPlanePoint p = net.point(s);
      t.points.push_back(p);
      t.ids.push_back(s.m);
      t.thin.push_back(rule.thin(p) ? 1 : 0);
    }
  });
}

WalkResult run_and_count_concave(const HalfPlaneNet& net, std::int32_t start, const WalkConfig& cfg) {
  if (start < 0 || static_cast<std::size_t>(start) >= net.size()) throw WalkError("start id out of range");
  return run_walk(cfg, [&](std::size_t n, const ThinRule& rule, std::mt19937_64& rng, Trajectory& t) {
    t = Trajectory{};
    std::int32_t r = start;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        std::int32_t nr = step(net, r, cfg.tau, rng);
        t.steps.push_back(distance(net.points[r], net.points[nr]));
        r = nr;
      }
      t.points.push_back(net.points[r]);
      t.ids.push_back(r);
      t.thin.push_back(rule.thin(net.points[r]) ? 1 : 0);
    }
  });
}

Trajectory discretize_geodesic(const GeodesicSegment& seg, const HalfPlaneNet& net, double tau, double eps_n,
                               const ThinRule& rule) {
  const double spacing = tau * (1.0 - 2.0 * eps_n / tau);
  if (!(spacing > 0)) throw ConfigError("tau must exceed 2 eps_n");
  const double L = seg.length();
  auto snap = [&](double s) {
    HalfPlanePoint p = seg.at_distance(s);
    auto nn = net.nearest(p, 2 * eps_n);
    if (!nn) throw CoverageError("no net point within 2 eps_n of the geodesic");
    return nn->first;
  };
  std::vector<double> marks;
  for (double s = 0; s < L; s += spacing) marks.push_back(s);
  marks.push_back(L);
  std::vector<std::int32_t> ids;
  for (double s : marks) ids.push_back(snap(s));
  // refine until consecutive snapped points are within tau
  for (int round = 0; round < 30; ++round) {
    std::vector<double> nm{marks[0]};
    std::vector<std::int32_t> ni{ids[0]};
    bool changed = false;
    for (std::size_t i = 1; i < marks.size(); ++i) {
      if (distance(net.points[ids[i - 1]], net.points[ids[i]]) > tau) {
        double mid = 0.5 * (marks[i - 1] + marks[i]);
        nm.push_back(mid);
        ni.push_back(snap(mid));
        changed = true;
      }
      nm.push_back(marks[i]);
      ni.push_back(ids[i]);
    }
    marks.swap(nm);
    ids.swap(ni);
    if (!changed) break;
  }
  Trajectory t;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const HalfPlanePoint& p = net.points[ids[i]];
    if (i > 0) {
      double d = distance(net.points[ids[i - 1]], p);
      if (d > tau) throw CoverageError("could not keep consecutive snapped points within tau");
      t.steps.push_back(d);
    }
    t.points.push_back(p);
    t.ids.push_back(ids[i]);
    t.thin.push_back(rule.thin(p) ? 1 : 0);
  }
  return t;
}

}  // namespace scclab
