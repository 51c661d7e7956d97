#include "scclab/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "scclab/common.hpp"
#include "scclab/stats.hpp"

namespace scclab {

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const double kTwoPi = 2.0 * M_PI;

double wrap(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0 ? t + kTwoPi : t;
}

IntMatrix int_canonical(IntMatrix m) {
  std::int64_t first = m.a != 0 ? m.a : (m.b != 0 ? m.b : (m.c != 0 ? m.c : m.d));
  if (first < 0) m = {-m.a, -m.b, -m.c, -m.d};
  return m;
}

bool int_mul(const IntMatrix& x, const IntMatrix& y, IntMatrix& out) {
  auto dot = [](std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s, std::int64_t& o) {
    std::int64_t u, v;
    if (__builtin_mul_overflow(p, q, &u) || __builtin_mul_overflow(r, s, &v) || __builtin_add_overflow(u, v, &o))
      return false;
    return true;
  };
  IntMatrix m;
  if (!dot(x.a, y.a, x.b, y.c, m.a) || !dot(x.a, y.b, x.b, y.d, m.b) || !dot(x.c, y.a, x.d, y.c, m.c) ||
      !dot(x.c, y.b, x.d, y.d, m.d))
    return false;
  out = int_canonical(m);
  return true;
}

Isometry to_isometry(const IntMatrix& m) {
  return canonical({double(m.a), double(m.b), double(m.c), double(m.d)});
}

struct IntHash {
  std::size_t operator()(const IntMatrix& m) const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(m.a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(m.b));
    h = splitmix64(h ^ static_cast<std::uint64_t>(m.c));
    return splitmix64(h ^ static_cast<std::uint64_t>(m.d));
  }
};

bool is_involution(const Isometry& g) {
  Isometry sq = g * g;
  return approx_equal(sq, Isometry::identity(), 1e-9);
}

}  // namespace

std::string to_string(GroupKind k) {
  switch (k) {
    case GroupKind::lattice: return "lattice";
    case GroupKind::cyclic_hyperbolic: return "cyclic-hyperbolic";
    case GroupKind::parabolic: return "parabolic";
    case GroupKind::schottky: return "schottky";
    case GroupKind::free_product: return "free-product";
    case GroupKind::trivial: return "trivial";
  }
  return "?";
}

GroupKind parse_group_kind(const std::string& s) {
  if (s == "lattice") return GroupKind::lattice;
  if (s == "cyclic-hyperbolic") return GroupKind::cyclic_hyperbolic;
  if (s == "parabolic") return GroupKind::parabolic;
  if (s == "schottky") return GroupKind::schottky;
  if (s == "free-product") return GroupKind::free_product;
  if (s == "trivial") return GroupKind::trivial;
  throw ConfigError("unknown group kind: " + s);
}

bool BoundaryArc::contains(double theta) const {
  return wrap(theta - start) <= wrap(end - start);
}

bool arcs_disjoint(const BoundaryArc& a, const BoundaryArc& b) {
  return !a.contains(b.start) && !a.contains(b.end) && !b.contains(a.start) && !b.contains(a.end);
}

double boundary_angle(double x) {
  if (std::isinf(x)) return 0.0;
  // Cayley image of x is (x - i) / (x + i), a point of the unit circle
  return wrap(std::atan2(-2.0 * x, x * x - 1.0));
}

HalfPlanePoint DomainReducer::reduce(const HalfPlanePoint& p) const {
  HalfPlanePoint z = p;
  switch (kind) {
    case Kind::none:
      return z;
    case Kind::strip:
      z.x -= width * std::round(z.x / width);
      return z;
    case Kind::modular:
      for (int it = 0; it < 10000; ++it) {
        z.x -= std::round(z.x);
        double r2 = z.x * z.x + z.y * z.y;
        if (r2 >= 1.0 - 1e-14) return z;
        z = {-z.x / r2, z.y / r2};
      }
      throw DomainError("modular reduction did not terminate");
  }
  return z;
}

GroupPresentation GroupPresentation::from_generators(const std::vector<Isometry>& gens, GroupKind kind,
                                                     std::vector<std::string> names) {
  GroupPresentation G;
  G.kind = gens.empty() ? GroupKind::trivial : kind;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    Isometry g = canonical(gens[i]);
    if (std::abs(g.det() - 1.0) > 1e-12) throw DomainError("generator must have determinant one");
    std::string name = i < names.size() ? names[i] : "g" + std::to_string(i);
    int idx = static_cast<int>(G.generators.size());
    G.generators.push_back(g);
    G.names.push_back(name);
    if (is_involution(g)) {
      G.inverse_of.push_back(idx);
    } else {
      G.generators.push_back(g.inverse());
      G.names.push_back(name + "^-1");
      G.inverse_of.push_back(idx + 1);
      G.inverse_of.push_back(idx);
    }
  }
  return G;
}

GroupPresentation GroupPresentation::from_integer_generators(const std::vector<IntMatrix>& gens, GroupKind kind,
                                                             std::vector<std::string> names) {
  std::vector<Isometry> real;
  for (const auto& m : gens) {
    if (m.a * m.d - m.b * m.c != 1) throw DomainError("integer generator must have determinant one");
    real.push_back(to_isometry(m));
  }
  GroupPresentation G = from_generators(real, kind, std::move(names));
  std::vector<IntMatrix> ints;
  for (const auto& m0 : gens) {
    IntMatrix m = int_canonical(m0);
    ints.push_back(m);
    if (!is_involution(to_isometry(m))) ints.push_back(int_canonical({m.d, -m.b, -m.c, m.a}));
  }
  G.integral = ints;
  return G;
}

GroupPresentation trivial_group() { return {}; }

GroupPresentation modular_group() {
  GroupPresentation G = GroupPresentation::from_integer_generators({{0, -1, 1, 0}, {1, 1, 0, 1}}, GroupKind::lattice,
                                                                   {"S", "T"});
  G.reducer.kind = DomainReducer::Kind::modular;
  return G;
}

double translation_length(const Isometry& g) {
  double t = std::abs(g.trace());
  return t > 2 ? 2.0 * std::acosh(t / 2.0) : 0.0;
}

Isometry power(const Isometry& g, int n) {
  Isometry base = n < 0 ? g.inverse() : g;
  Isometry r = Isometry::identity();
  for (int i = 0; i < std::abs(n); ++i) r = r * base;
  return r;
}

namespace {

// Ping-pong arcs (attracting domain, repelling domain) of a hyperbolic element.
std::pair<BoundaryArc, BoundaryArc> hyperbolic_domains(const Isometry& g, const HalfPlanePoint& p) {
  double L = translation_length(g);
  if (!(L > 0)) throw InputError("ping-pong domains need a hyperbolic element");
  double fixed[2];
  if (std::abs(g.c) < 1e-300) {
    fixed[0] = kInf;
    fixed[1] = g.b / (g.d - g.a);
  } else {
    double disc = std::sqrt((g.d - g.a) * (g.d - g.a) + 4 * g.b * g.c);
    fixed[0] = ((g.a - g.d) + disc) / (2 * g.c);
    fixed[1] = ((g.a - g.d) - disc) / (2 * g.c);
  }
  auto derivative = [&](double x) {
    if (std::isinf(x)) return g.d * g.d;  // for c = 0 the map is z -> (a z + b)/d
    double den = g.c * x + g.d;
    return 1.0 / (den * den);
  };
  double attract = fixed[0], repel = fixed[1];
  if (derivative(attract) > derivative(repel)) std::swap(attract, repel);
  Geodesic axis = Geodesic::from_endpoints(repel, attract);
  double t0 = axis.parameter(p);
  double hi = std::exp(t0 + L / 2), lo = std::exp(t0 - L / 2);
  auto ang = [&](double x) { return boundary_angle(apply_boundary(axis.frame, x)); };
  BoundaryArc plus{ang(hi), ang(-hi)};
  BoundaryArc minus{ang(-lo), ang(lo)};
  return {plus, minus};
}

void check_domains(const std::vector<BoundaryArc>& arcs) {
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j)
      if (!arcs_disjoint(arcs[i], arcs[j]))
        throw DomainError("ping-pong domains " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
}

}  // namespace

GroupPresentation cyclic_hyperbolic(const Isometry& g, const HalfPlanePoint& basepoint) {
  GroupPresentation G = GroupPresentation::from_generators({g}, GroupKind::cyclic_hyperbolic, {"a"});
  auto [plus, minus] = hyperbolic_domains(g, basepoint);
  G.domains = {plus, minus};
  return G;
}

GroupPresentation cyclic_hyperbolic(double q, const HalfPlanePoint& basepoint) {
  return cyclic_hyperbolic(Isometry::diag(q), basepoint);
}

GroupPresentation genus2_surface_group() {
  // opposite sides are at distance 2r with cosh r = cot(pi/8) = 1 + sqrt 2
  const double L = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
  std::vector<Isometry> gens;
  for (int k = 0; k < 4; ++k) gens.push_back(disc_axis_translation(k * M_PI / 4, L));
  return GroupPresentation::from_generators(gens, GroupKind::lattice, {"a0", "a1", "a2", "a3"});
}

double genus2_octagon_circumradius() {
  double c = 1.0 + std::sqrt(2.0);
  return std::acosh(c * c);
}

GroupPresentation parabolic(double t) {
  GroupPresentation G = GroupPresentation::from_generators({Isometry::translation(t)}, GroupKind::parabolic, {"T"});
  if (t == std::round(t)) G.integral = std::vector<IntMatrix>{{1, std::int64_t(t), 0, 1}, {1, -std::int64_t(t), 0, 1}};
  G.reducer.kind = DomainReducer::Kind::strip;
  G.reducer.width = t;
  return G;
}

GroupPresentation schottky(const std::vector<Isometry>& gens, const HalfPlanePoint& basepoint) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < gens.size(); ++i) names.push_back(std::string(1, char('a' + i)));
  GroupPresentation G = GroupPresentation::from_generators(gens, GroupKind::schottky, names);
  for (const auto& g : gens) {
    auto [plus, minus] = hyperbolic_domains(g, basepoint);
    G.domains.push_back(plus);
    G.domains.push_back(minus);
  }
  try {
    check_domains(G.domains);
  } catch (const DomainError& e) {
    throw InputError(std::string("schottky: ") + e.what());
  }
  return G;
}

Isometry disc_axis_translation(double theta, double L) {
  // rotate the imaginary axis (disc diameter through -1 and 1 at angle 0 after
  // Cayley) so that it passes through angle theta
  Isometry rot = Isometry::rotation(theta);
  return rot * Isometry::diag(std::exp(L / 2)) * rot.inverse();
}

GroupPresentation free_product(const GroupPresentation& A, const GroupPresentation& B) {
  if (A.generators.empty()) return B;
  if (B.generators.empty()) return A;
  if (!A.has_domains() || !B.has_domains()) throw DomainError("free product needs ping-pong domains on both factors");
  GroupPresentation H;
  H.kind = GroupKind::free_product;
  auto append = [&](const GroupPresentation& G, const std::string& prefix) {
    int offset = static_cast<int>(H.generators.size());
    for (std::size_t i = 0; i < G.generators.size(); ++i) {
      H.generators.push_back(G.generators[i]);
      H.inverse_of.push_back(G.inverse_of[i] + offset);
      H.names.push_back(prefix + G.names[i]);
      H.domains.push_back(G.domains[i]);
    }
  };
  append(A, "A.");
  append(B, "B.");
  check_domains(H.domains);
  return H;
}

double max_displacement(const GroupPresentation& G, const HalfPlanePoint& p) {
  double D = 0;
  for (const auto& g : G.generators) D = std::max(D, distance(p, apply(g, p)));
  return D;
}

// ---------------------------------------------------------------------------

std::vector<int> OrbitEnumeration::word(std::size_t i) const {
  std::vector<int> w;
  for (std::int64_t k = static_cast<std::int64_t>(i); k >= 0 && all[k].last >= 0; k = all[k].parent)
    w.push_back(all[k].last);
  std::reverse(w.begin(), w.end());
  return w;
}

std::string OrbitEnumeration::word_string(std::size_t i, const GroupPresentation& G) const {
  std::string s;
  for (int g : word(i)) {
    if (!s.empty()) s += ' ';
    s += G.names[g];
  }
  return s.empty() ? "e" : s;
}

std::size_t OrbitEnumeration::count(double R) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), R) - sorted_.begin());
}

void OrbitEnumeration::finalize() {
  sorted_.clear();
  for (const auto& r : records) sorted_.push_back(r.distance);
  std::sort(sorted_.begin(), sorted_.end());
}

void OrbitEnumeration::write_csv(std::ostream& os, const GroupPresentation& G) const {
  os << "word,x,y,distance\n";
  os.precision(17);
  for (std::size_t i = 0; i < records.size(); ++i) {
    HalfPlanePoint q = point(i);
    os << '"' << word_string(i, G) << "\"," << q.x << ',' << q.y << ',' << records[i].distance << '\n';
  }
}

namespace {

// Approximate dedup for real groups: bucket the image of an auxiliary point
// on a fine grid and compare matrices within the neighbouring cells.
class RealDedup {
 public:
  explicit RealDedup(double tol) : tol_(tol) {}

  bool insert_if_new(const Isometry& g, std::int32_t index, const std::vector<OrbitRecord>& all) {
    HalfPlanePoint z = apply(g, aux_);
    double u = z.x / z.y / cell_, v = std::log(z.y) / cell_;
    std::int64_t iu = static_cast<std::int64_t>(std::floor(u)), iv = static_cast<std::int64_t>(std::floor(v));
    for (int du = -1; du <= 1; ++du)
      for (int dv = -1; dv <= 1; ++dv) {
        auto it = map_.find(key(iu + du, iv + dv));
        if (it == map_.end()) continue;
        for (std::int32_t j : it->second) {
          double scale = std::max({1.0, std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)});
          if (approx_equal(g, all[j].g, tol_ * scale)) return false;
        }
      }
    map_[key(iu, iv)].push_back(index);
    return true;
  }

 private:
  static std::uint64_t key(std::int64_t a, std::int64_t b) {
    return splitmix64(static_cast<std::uint64_t>(a)) ^ (static_cast<std::uint64_t>(b) * 0x9e3779b97f4a7c15ULL);
  }
  double tol_;
  double cell_ = 1e-6;
  HalfPlanePoint aux_{0.3183098861837907, 1.4142135623730951};
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> map_;
};

struct Candidate {
  Isometry g;
  IntMatrix m;
  double d;
  std::int32_t parent;
  std::int16_t gen;
};

}  // namespace

OrbitEnumeration enumerate_orbit(const GroupPresentation& G, const HalfPlanePoint& p, double R,
                                 const EnumerationOptions& opt) {
  validate(p);
  if (!(R >= 0)) throw DomainError("enumeration radius must be non-negative");
  OrbitEnumeration out;
  out.basepoint = p;
  out.radius = R;
  std::vector<OrbitRecord>& all = out.all;
  all.push_back({Isometry::identity(), 0.0, -1, -1});

  if (!G.generators.empty()) {
    double D = max_displacement(G, p) + opt.extra_margin;
    if (!(D > 0) || !std::isfinite(D)) throw ConfigError("generator displacement must be positive for pruning");
    const double cutoff = R + D;
    const bool integral = G.integral.has_value();
    std::vector<IntMatrix> ints;
    std::unordered_map<IntMatrix, std::int32_t, IntHash> int_seen;
    RealDedup real_seen(1e-7);
    if (integral) {
      ints.push_back({1, 0, 0, 1});
      int_seen.emplace(IntMatrix{1, 0, 0, 1}, 0);
    } else {
      real_seen.insert_if_new(Isometry::identity(), 0, all);
    }

    std::vector<std::int32_t> frontier{0};
    const int ngen = static_cast<int>(G.generators.size());
    const int workers = std::max(1, opt.workers);
    while (!frontier.empty()) {
      std::vector<std::vector<Candidate>> parts(workers);
      parallel_for(frontier.size(), workers, [&](int w, std::size_t b, std::size_t e) {
        auto& local = parts[w];
        for (std::size_t k = b; k < e; ++k) {
          std::int32_t idx = frontier[k];
          const OrbitRecord& rec = all[idx];
          for (int s = 0; s < ngen; ++s) {
            if (rec.last >= 0 && G.inverse_of[rec.last] == s) continue;
            Candidate c;
            c.parent = idx;
            c.gen = static_cast<std::int16_t>(s);
            if (integral) {
              if (!int_mul(ints[idx], (*G.integral)[s], c.m)) throw ResourceError("integer overflow in orbit enumeration", 0);
              c.g = to_isometry(c.m);
            } else {
              c.g = rec.g * G.generators[s];
            }
            c.d = distance(p, apply(c.g, p));
            if (c.d > cutoff) continue;
            local.push_back(c);
          }
        }
      });
      std::vector<std::int32_t> next;
      double frontier_min = std::numeric_limits<double>::infinity();
      for (auto& part : parts)
        for (auto& c : part) {
          std::int32_t index = static_cast<std::int32_t>(all.size());
          bool fresh = integral ? int_seen.emplace(c.m, index).second : real_seen.insert_if_new(c.g, index, all);
          if (!fresh) continue;
          all.push_back({c.g, c.d, c.parent, c.gen});
          if (integral) ints.push_back(c.m);
          next.push_back(index);
          frontier_min = std::min(frontier_min, c.d);
        }
      if (all.size() > opt.max_elements)
        throw ResourceError("orbit enumeration exceeded the element budget",
                            std::max(0.0, std::min(R, frontier_min - D)));
      frontier = std::move(next);
    }
  }

  // records are the elements within R, moved to the front of `all` so that
  // record i and all[i] coincide and parent links stay valid
  std::vector<std::int32_t> newpos(all.size());
  std::int32_t k = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].distance <= R) newpos[i] = k++;
  const std::size_t within = static_cast<std::size_t>(k);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].distance > R) newpos[i] = k++;
  std::vector<OrbitRecord> reordered(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    OrbitRecord r = all[i];
    if (r.parent >= 0) r.parent = newpos[r.parent];
    reordered[newpos[i]] = r;
  }
  all = std::move(reordered);
  out.records.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(within));
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------

double modular_thick_diameter(double epsilon) {
  if (!(epsilon > 0) || 1.0 / epsilon <= std::sqrt(3.0) / 2) throw DomainError("thick part of the modular domain is empty");
  const double top = 1.0 / epsilon;
  const int n = 300;
  std::vector<HalfPlanePoint> b;
  double ymin = std::sqrt(3.0) / 2;
  for (int i = 0; i <= n; ++i) {
    double t = double(i) / n;
    double y = ymin * std::pow(top / ymin, t);
    b.push_back({-0.5, y});
    b.push_back({0.5, y});
    b.push_back({-0.5 + t, top});
    double a = M_PI / 3 + t * M_PI / 3;
    b.push_back({std::cos(a), std::sin(a)});
  }
  double best = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) best = std::max(best, distance(b[i], b[j]));
  return best;
}

bool is_concave(const GroupPresentation& G, const HalfPlanePoint& p, const HalfPlanePoint& q, double s,
                const ConcaveOptions& opt) {
  GeodesicSegment seg(p, q);
  double L = seg.length();
  const double thin = 1.0 / opt.epsilon;
  long k0 = static_cast<long>(std::floor(s / opt.spacing)) + 1;
  bool any = false;
  for (long k = k0;; ++k) {
    double t = k * opt.spacing;
    if (!(t < L - s)) break;
    if (t <= s) continue;
    any = true;
    if (!(G.reducer.reduce(seg.at_distance(t)).y > thin)) return false;
  }
  return any;
}

ConcaveCount count_concave_lattice_points(const GroupPresentation& G, const OrbitEnumeration& orbit,
                                          const std::vector<double>& radii, const ConcaveOptions& opt) {
  if (!(opt.spacing > 0) || opt.spacing > 0.5) throw ConfigError("sampling spacing exceeds the injectivity scale 0.5");
  if (!(opt.epsilon > 0)) throw ConfigError("thin threshold must be positive");
  if (G.reducer.kind == DomainReducer::Kind::none) throw ConfigError("group has no fundamental-domain reducer");
  const HalfPlanePoint p = orbit.basepoint;
  if (G.reducer.reduce(p).y > 1.0 / opt.epsilon) throw PreconditionError("basepoint lies in the thin part");
  for (double r : radii)
    if (r > orbit.radius + 1e-12) throw PreconditionError("orbit not enumerated to the requested radius");

  ConcaveCount out;
  out.radii = radii;
  double diam = opt.thick_diameter >= 0 ? opt.thick_diameter : modular_thick_diameter(opt.epsilon);
  out.s = 2.0 * diam;
  out.flags.assign(orbit.records.size(), 0);
  parallel_for(orbit.records.size(), opt.workers, [&](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      if (orbit.records[i].distance <= 2 * out.s) continue;
      out.flags[i] = is_concave(G, p, orbit.point(i), out.s, opt) ? 1 : 0;
    }
  });
  std::vector<double> conc;
  for (std::size_t i = 0; i < orbit.records.size(); ++i)
    if (out.flags[i]) conc.push_back(orbit.records[i].distance);
  std::sort(conc.begin(), conc.end());
  std::vector<double> xs, ys;
  for (double r : radii) {
    std::size_t m = static_cast<std::size_t>(std::upper_bound(conc.begin(), conc.end(), r) - conc.begin());
    out.concave.push_back(m);
    out.total.push_back(orbit.count(r));
    if (m > 0) {
      xs.push_back(r);
      ys.push_back(std::log(double(m)));
    }
  }
  if (xs.size() >= 4) out.exponent = linear_fit(xs, ys).slope;
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::convergent: return "convergent";
    case SeriesVerdict::divergent: return "divergent";
    case SeriesVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

PoincareSeriesEstimate poincare_partial_sum(const OrbitEnumeration& orbit, double h, double R,
                                            const SeriesOptions& opt) {
  if (R > orbit.radius + 1e-12) throw PreconditionError("orbit not enumerated to the requested radius");
  PoincareSeriesEstimate est;
  est.h = h;
  const auto& ds = orbit.sorted_distances();
  for (double r = opt.shell; r < R - 1e-12; r += opt.shell) est.radii.push_back(r);
  est.radii.push_back(R);
  double sum = 0;
  std::size_t i = 0;
  for (double r : est.radii) {
    for (; i < ds.size() && ds[i] <= r; ++i) sum += std::exp(-h * ds[i]);
    est.partial_sums.push_back(sum);
  }
  std::size_t n = est.radii.size();
  if (n >= 2) est.last_increment = est.partial_sums[n - 1] - est.partial_sums[n - 2];
  // fit the decay of shell increments over the upper half of the shells
  std::vector<double> xs, ys;
  for (std::size_t k = std::max<std::size_t>(1, n / 2); k < n; ++k) {
    double inc = est.partial_sums[k] - est.partial_sums[k - 1];
    double width = est.radii[k] - est.radii[k - 1];
    if (inc > 0 && width > 0) {
      xs.push_back(est.radii[k]);
      ys.push_back(std::log(inc / width));
    }
  }
  if (xs.size() < 3) return est;
  LinearFit f = linear_fit(xs, ys);
  est.decay_rate = -f.slope;
  if (f.slope > -0.05 || f.slope > -3.0 * f.slope_stderr) {
    est.verdict = SeriesVerdict::divergent;
    est.remainder_estimate = std::numeric_limits<double>::infinity();
    return est;
  }
  double q = std::exp(f.slope * opt.shell);
  double last_shell = std::exp(f.intercept + f.slope * R) * opt.shell;
  est.remainder_estimate = last_shell * q / (1.0 - q);
  est.verdict = est.remainder_estimate <= opt.tolerance * sum ? SeriesVerdict::convergent : SeriesVerdict::inconclusive;
  return est;
}

ExponentEstimate estimate_critical_exponent(const OrbitEnumeration& orbit, const std::vector<double>& radii) {
  if (radii.size() < 4) throw EstimationError("critical exponent needs at least 4 radii");
  ExponentEstimate e;
  e.radii = radii;
  for (double r : radii) {
    if (r > orbit.radius + 1e-12) throw PreconditionError("orbit not enumerated to the requested radius");
    std::size_t n = orbit.count(r);
    e.log_counts.push_back(std::log(double(std::max<std::size_t>(n, 1))));
  }
  if (std::all_of(e.log_counts.begin(), e.log_counts.end(), [&](double v) { return v == e.log_counts.front(); }))
    throw EstimationError("orbit counts are constant over the radius range");
  LinearFit f = linear_fit(radii, e.log_counts);
  e.value = f.slope;
  e.lo = f.lo;
  e.hi = f.hi;
  return e;
}

ExponentEstimate estimate_critical_exponent(const GroupPresentation& G, const HalfPlanePoint& p,
                                            const std::vector<double>& radii, const EnumerationOptions& opt) {
  if (radii.size() < 4) throw EstimationError("critical exponent needs at least 4 radii");
  double R = *std::max_element(radii.begin(), radii.end());
  return estimate_critical_exponent(enumerate_orbit(G, p, R, opt), radii);
}

double dirichlet_lower_bound(const OrbitEnumeration& A, const OrbitEnumeration& B, double h, double R, double dx) {
  if (R > A.radius + 1e-12 || R > B.radius + 1e-12) throw PreconditionError("factor orbits not enumerated to R");
  const std::size_t n = static_cast<std::size_t>(std::floor(R / dx + 1e-9));
  auto histogram = [&](const OrbitEnumeration& O) {
    std::vector<double> f(n + 1, 0.0);
    for (const auto& r : O.records) {
      if (r.last < 0) continue;  // identity
      double k = std::ceil(r.distance / dx - 1e-12);
      if (k < 1) k = 1;
      if (k <= double(n)) f[static_cast<std::size_t>(k)] += std::exp(-h * k * dx);
    }
    return f;
  };
  std::vector<double> fa = histogram(A), fb = histogram(B), g(n + 1, 0.0), T(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    if (fa[i] != 0)
      for (std::size_t j = 1; i + j <= n; ++j) g[i + j] += fa[i] * fb[j];
  double total = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    double t = g[m];
    for (std::size_t j = 1; j < m; ++j) t += g[j] * T[m - j];
    T[m] = t;
    total += t;
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  double value;
  bool integer;
  std::int64_t ivalue;
};

Entry parse_entry(const std::string& tok) {
  auto slash = tok.find('/');
  try {
    if (slash != std::string::npos) {
      std::int64_t p = std::stoll(tok.substr(0, slash)), q = std::stoll(tok.substr(slash + 1));
      if (q == 0) throw ConfigError("zero denominator in " + tok);
      std::int64_t g = std::gcd(p, q);
      p /= g;
      q /= g;
      if (q < 0) {
        p = -p;
        q = -q;
      }
      return {double(p) / double(q), q == 1, p};
    }
    std::size_t used = 0;
    if (tok.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = std::stoll(tok, &used);
      if (used == tok.size()) return {double(v), true, v};
    }
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw ConfigError("bad matrix entry " + tok);
    return {v, false, 0};
  } catch (const std::logic_error&) {
    throw ConfigError("bad matrix entry " + tok);
  }
}

}  // namespace

GroupPresentation parse_group(std::istream& is) {
  GroupKind kind = GroupKind::lattice;
  std::vector<std::vector<Entry>> gens;
  std::vector<std::string> names;
  std::string reducer = "none";
  double width = 1.0;
  HalfPlanePoint base{0, 1};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "kind") {
      kind = parse_group_kind(val);
    } else if (key == "generator") {
      std::istringstream ss(val);
      std::vector<Entry> m;
      std::string tok;
      while (ss >> tok) m.push_back(parse_entry(tok));
      if (m.size() != 4) throw ConfigError("line " + std::to_string(lineno) + ": generator needs 4 entries");
      gens.push_back(m);
    } else if (key == "name") {
      names.push_back(val);
    } else if (key == "reducer") {
      reducer = val;
    } else if (key == "strip_width") {
      width = parse_entry(val).value;
    } else if (key == "basepoint") {
      std::istringstream ss(val);
      std::string a, b;
      ss >> a >> b;
      base = make_point(parse_entry(a).value, parse_entry(b).value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + key);
    }
  }
  bool all_int = !gens.empty();
  for (auto& m : gens)
    for (auto& e : m) all_int = all_int && e.integer;
  GroupPresentation G;
  if (kind == GroupKind::schottky) {
    std::vector<Isometry> real;
    for (auto& m : gens) real.push_back(Isometry::from(m[0].value, m[1].value, m[2].value, m[3].value));
    G = schottky(real, base);
  } else if (all_int) {
    std::vector<IntMatrix> ints;
    for (auto& m : gens) ints.push_back({m[0].ivalue, m[1].ivalue, m[2].ivalue, m[3].ivalue});
    G = GroupPresentation::from_integer_generators(ints, kind, names);
  } else {
    std::vector<Isometry> real;
    for (auto& m : gens) real.push_back(Isometry::from(m[0].value, m[1].value, m[2].value, m[3].value));
    G = GroupPresentation::from_generators(real, kind, names);
    if (kind == GroupKind::cyclic_hyperbolic && real.size() == 1) G = cyclic_hyperbolic(real[0], base);
  }
  if (reducer == "modular") {
    G.reducer.kind = DomainReducer::Kind::modular;
  } else if (reducer == "strip") {
    G.reducer.kind = DomainReducer::Kind::strip;
    G.reducer.width = width;
  } else if (reducer != "none") {
    throw ConfigError("unknown reducer " + reducer);
  }
  return G;
}

GroupPresentation load_group(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  return parse_group(f);
}

}  // namespace scclab
