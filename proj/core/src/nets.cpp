#include "scclab/nets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "scclab/common.hpp"
#include "scclab/stats.hpp"

namespace scclab {

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}
}  // namespace

std::string PointRegion::describe() const { return "point(" + fmt(p_.x) + "," + fmt(p_.y) + ")"; }

std::optional<HalfPlanePoint> BallRegion::sample(const double u[3]) const {
  double rho = std::acosh(1.0 + u[0] * (std::cosh(R_) - 1.0));
  return circle_point(c_, rho, 2.0 * M_PI * u[1]);
}

std::string BallRegion::describe() const {
  return "ball(" + fmt(c_.x) + "," + fmt(c_.y) + ";R=" + fmt(R_) + ")";
}

HoroballBallRegion::HoroballBallRegion(HalfPlanePoint c, double R, double level)
    : c_(c), R_(R), level_(level), disc_(ball_disc(c, R)) {
  ylo_ = std::max(level, c.y * std::exp(-R));
  yhi_ = c.y * std::exp(R);
  kmax_ = 0;
  area_ = 0;
  if (!(yhi_ > ylo_)) return;
  // Simpson in s = log y, where dy / y^2 = e^{-s} ds
  const int n = 20000;
  double a = std::log(ylo_), b = std::log(yhi_), hs = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    double s = a + i * hs, y = std::exp(s);
    double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    area_ += w * 2.0 * chord(y) / y;
    kmax_ = std::max(kmax_, chord(y) / std::sqrt(y));
  }
  area_ *= hs / 3.0;
  kmax_ *= 1.01;
}

double HoroballBallRegion::chord(double y) const {
  double dy = y - disc_.cy;
  return std::sqrt(std::max(0.0, disc_.radius * disc_.radius - dy * dy));
}

std::optional<HalfPlanePoint> HoroballBallRegion::sample(const double u[3]) const {
  if (!(yhi_ > ylo_)) return std::nullopt;
  // y with density proportional to y^{-3/2}, then thin by chord / sqrt(y)
  double a = 1.0 / std::sqrt(ylo_), b = 1.0 / std::sqrt(yhi_);
  double t = a - u[0] * (a - b);
  double y = 1.0 / (t * t);
  double w = chord(y);
  if (u[2] * kmax_ > w / std::sqrt(y)) return std::nullopt;
  HalfPlanePoint p{disc_.cx + (2 * u[1] - 1) * w, y};
  if (!(p.y > level_) || distance(c_, p) > R_) return std::nullopt;
  return p;
}

std::string HoroballBallRegion::describe() const {
  return "horoball-ball(" + fmt(c_.x) + "," + fmt(c_.y) + ";R=" + fmt(R_) + ";y>" + fmt(level_) + ")";
}

std::optional<HalfPlanePoint> RectangleRegion::sample(const double u[3]) const {
  double inv = 1.0 / y0_ - u[1] * (1.0 / y0_ - 1.0 / y1_);
  return HalfPlanePoint{x0_ + u[0] * (x1_ - x0_), 1.0 / inv};
}

std::string RectangleRegion::describe() const {
  return "rectangle([" + fmt(x0_) + "," + fmt(x1_) + "]x[" + fmt(y0_) + "," + fmt(y1_) + "])";
}

// ---------------------------------------------------------------------------

void HalfPlaneIndex::insert(std::int32_t id, const HalfPlanePoint& p) {
  std::int64_t k = static_cast<std::int64_t>(std::floor(std::log(p.y) / h_));
  double width = h_ * std::exp(k * h_);
  std::int64_t j = static_cast<std::int64_t>(std::floor(p.x / width));
  auto& cell = cells_[key(k, j)];
  if (cell.empty()) bands_[k].insert(j);
  cell.push_back(id);
}

// ---------------------------------------------------------------------------

void HalfPlaneNet::rebuild_index() {
  index_ = std::make_shared<HalfPlaneIndex>(eps_n > 0 ? eps_n : 1.0);
  for (std::size_t i = 0; i < points.size(); ++i) index_->insert(static_cast<std::int32_t>(i), points[i]);
}

std::vector<std::int32_t> HalfPlaneNet::within(const HalfPlanePoint& p, double R) const {
  std::vector<std::int32_t> out;
  index_->candidates(p, R, [&](std::int32_t id) {
    if (distance(p, points[id]) <= R) out.push_back(id);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t HalfPlaneNet::count(const HalfPlanePoint& p, double R) const {
  std::size_t n = 0;
  index_->candidates(p, R, [&](std::int32_t id) { n += distance(p, points[id]) <= R; });
  return n;
}

std::optional<std::pair<std::int32_t, double>> HalfPlaneNet::nearest(const HalfPlanePoint& p, double max_radius) const {
  for (double r = std::min(max_radius, std::max(eps_n, 1e-3));; r = std::min(2 * r, max_radius)) {
    std::int32_t best = -1;
    double bd = kInf;
    index_->candidates(p, r, [&](std::int32_t id) {
      double d = distance(p, points[id]);
      if (d < bd || (d == bd && id < best)) bd = d, best = id;
    });
    if (best >= 0 && bd <= r) return std::make_pair(best, bd);
    if (r >= max_radius) return std::nullopt;
  }
}

void HalfPlaneNet::write_csv(std::ostream& os) const {
  os << "# region=" << region << " eps_n=" << eps_n << "\n";
  os << "x,y\n";
  os.precision(17);
  for (const auto& p : points) os << p.x << ',' << p.y << '\n';
}

HalfPlaneNet HalfPlaneNet::read_csv(std::istream& is) {
  HalfPlaneNet net;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto r = line.find("region="), e = line.find(" eps_n=");
      if (r != std::string::npos && e != std::string::npos) {
        net.region = line.substr(r + 7, e - r - 7);
        net.eps_n = std::stod(line.substr(e + 7));
      }
      continue;
    }
    if (line == "x,y") continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("bad net csv line: " + line);
    net.points.push_back(make_point(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))));
  }
  net.rebuild_index();
  return net;
}

HalfPlaneNet build_net(const HalfPlaneRegion& region, double eps_n, std::uint64_t seed, const NetOptions& opt) {
  if (!(eps_n > 0)) throw DomainError("net separation must be positive");
  HalfPlaneNet net;
  net.eps_n = eps_n;
  net.region = region.describe();
  HalfPlaneIndex index(eps_n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double shift[3] = {U(rng), U(rng), U(rng)};
  std::size_t n = 1;
  if (region.measure() > 0)
    n = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(opt.oversample * region.measure() / (eps_n * eps_n))),
                                opt.min_samples, opt.max_samples);
  for (std::size_t i = 0; i < n; ++i) {
    double u[3];
    for (int d = 0; d < 3; ++d) u[d] = std::fmod(halton(i + 1, kPrimes[d]) + shift[d], 1.0);
    auto p = region.sample(u);
    if (!p) continue;
    bool close = false;
    index.candidates(*p, eps_n, [&](std::int32_t id) {
      if (!close && distance(*p, net.points[id]) < eps_n) close = true;
    });
    if (close) continue;
    index.insert(static_cast<std::int32_t>(net.points.size()), *p);
    net.points.push_back(*p);
  }
  net.rebuild_index();
  if (net.points.empty()) throw CoverageError("region sampler produced no points");

  // statistical covering certificate
  std::mt19937_64 prng(splitmix64(seed ^ 0xc0febabeULL));
  std::size_t got = 0;
  for (std::size_t attempt = 0; got < opt.probes && attempt < 100 * opt.probes; ++attempt) {
    double u[3] = {U(prng), U(prng), U(prng)};
    auto p = region.sample(u);
    if (!p) continue;
    ++got;
    auto nn = net.nearest(*p, 1e3);
    double d = nn ? nn->second : kInf;
    net.probe_covering_radius = std::max(net.probe_covering_radius, d);
    if (region.measure() == 0) break;
  }
  if (net.probe_covering_radius > 2 * eps_n)
    net.warnings.push_back("covering not certified: probe covering radius " + fmt(net.probe_covering_radius) +
                           " exceeds 2 eps_n");
  return net;
}

std::size_t net_count(const HalfPlaneNet& net, const HalfPlanePoint& p, double R) { return net.count(p, R); }

EntropyEstimate fit_entropy(const std::vector<double>& radii, const std::vector<std::size_t>& counts,
                            const std::string& source) {
  if (radii.size() < 4 || radii.size() != counts.size()) throw EstimationError("entropy fit needs at least 4 radii");
  EntropyEstimate e;
  e.source = source;
  e.radii = radii;
  for (auto c : counts) {
    if (c == 0) throw EstimationError("entropy fit needs positive counts");
    e.log_counts.push_back(std::log(double(c)));
  }
  LinearFit f = linear_fit(radii, e.log_counts);
  e.slope = f.slope;
  e.lo = std::min(f.lo, f.slope);
  e.hi = std::max(f.hi, f.slope);
  return e;
}

PackingReport verify_packing(const HalfPlaneNet& net, double C, const std::vector<std::int32_t>& centers, int workers) {
  std::vector<std::int32_t> ids = centers;
  if (ids.empty())
    for (std::size_t i = 0; i < net.size(); ++i) ids.push_back(static_cast<std::int32_t>(i));
  std::vector<std::size_t> counts(ids.size());
  parallel_for(ids.size(), workers, [&](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) counts[i] = net.count(net.points[ids[i]], C);
  });
  PackingReport r;
  r.centers = ids.size();
  if (!counts.empty()) {
    r.max_count = *std::max_element(counts.begin(), counts.end());
    r.min_count = *std::min_element(counts.begin(), counts.end());
  }
  double half = net.eps_n / 2;
  r.covering_bound = (std::cosh(C + half) - 1) / (std::cosh(half) - 1);
  return r;
}

double GoodBadClassification::bad_fraction() const {
  std::size_t n = good_count + bad_count;
  return n ? double(bad_count) / double(n) : 0.0;
}

std::size_t GoodBadClassification::max_bucket() const {
  std::size_t m = 0;
  for (const auto& [k, v] : buckets) m = std::max(m, v);
  return m;
}

GoodBadClassification classify_good_bad(const HalfPlaneNet& net, const OrbitEnumeration& orbit, double R,
                                        double eps_b, int workers) {
  if (orbit.radius < R * (1 + eps_b) - 1e-9) throw PreconditionError("orbit must be enumerated to R(1 + eps_b)");
  const HalfPlanePoint p = orbit.basepoint;
  HalfPlaneIndex idx(1.0);
  std::vector<HalfPlanePoint> opts;
  std::vector<std::int32_t> orec;
  for (std::size_t i = 0; i < orbit.records.size(); ++i) {
    if (orbit.records[i].distance > R * (1 + eps_b)) continue;
    idx.insert(static_cast<std::int32_t>(opts.size()), orbit.point(i));
    opts.push_back(orbit.point(i));
    orec.push_back(static_cast<std::int32_t>(i));
  }
  GoodBadClassification out;
  out.R = R;
  out.eps_b = eps_b;
  out.net_ids = net.within(p, R);
  const std::size_t n = out.net_ids.size();
  out.nearest_distance.assign(n, kInf);
  out.nearest_record.assign(n, -1);
  out.good.assign(n, 0);
  const double thr = eps_b * R;
  parallel_for(n, workers, [&](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const HalfPlanePoint q = net.points[out.net_ids[i]];
      for (double r = std::max(thr, 0.5);; r *= 2) {
        double rr = std::min(r, R + 1e-9);
        std::int32_t best = -1;
        double bd = kInf;
        idx.candidates(q, rr, [&](std::int32_t id) {
          double d = distance(q, opts[id]);
          if (d < bd || (d == bd && id < best)) bd = d, best = id;
        });
        if (best >= 0 && bd <= rr) {
          out.nearest_distance[i] = bd;
          out.nearest_record[i] = orec[best];
          break;
        }
        if (rr >= R + 1e-9) break;
      }
      out.good[i] = out.nearest_distance[i] <= thr ? 1 : 0;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (out.good[i]) {
      ++out.good_count;
      ++out.buckets[out.nearest_record[i]];
    } else {
      ++out.bad_count;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t ModelNet::count(const ModelPoint& p, double R) const {
  std::size_t n = 0;
  for (const auto& q : points) n += model_distance(*space, p, q) <= R;
  return n;
}

void ModelNet::write_csv(std::ostream& os) const {
  os << "# factors=";
  for (std::size_t i = 0; i < space->size(); ++i) os << (i ? ";" : "") << to_string(space->factors[i].kind);
  os << " eps_n=" << eps_n << "\n";
  os.precision(17);
  for (const auto& p : points) {
    for (std::size_t i = 0; i < p.c.size(); ++i) os << (i ? "," : "") << p.c[i].x << ',' << p.c[i].y;
    os << '\n';
  }
}

ModelNet build_model_net(const ModelSpace& X, const ModelPoint& center, double R, double eps_n, std::uint64_t seed,
                         std::size_t samples) {
  validate(X, center);
  if (!(eps_n > 0) || !(R > 0)) throw DomainError("model net needs positive radius and separation");
  ModelNet net;
  net.space = &X;
  net.eps_n = eps_n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> shift(2 * X.size());
  for (auto& s : shift) s = U(rng);
  const bool indexed = X.factors[0].kind == FactorKind::plane;
  HalfPlaneIndex index(eps_n);
  const double cap = 1.0 / X.eps_t;
  for (std::size_t i = 0; i < samples; ++i) {
    ModelPoint p = center;
    bool ok = true;
    std::size_t dim = 0;
    auto u = [&] {
      double v = std::fmod(halton(i + 1, kPrimes[dim]) + shift[dim], 1.0);
      ++dim;
      return v;
    };
    for (std::size_t f = 0; f < X.size() && ok; ++f) {
      const HalfPlanePoint& c = center.c[f];
      switch (X.factors[f].kind) {
        case FactorKind::plane: {
          double rho = std::acosh(1.0 + u() * (std::cosh(R) - 1.0));
          p.c[f] = circle_point(c, rho, 2 * M_PI * u());
          break;
        }
        case FactorKind::line: {
          // uniform in the arclength coordinate log u
          double v = c.y * std::exp((2 * u() - 1) * R);
          if (v > cap) ok = false;
          p.c[f].y = v;
          break;
        }
        case FactorKind::base: {
          double D = X.factors[f].diameter;
          double lo = std::max(0.0, c.x - R), hi = std::min(D, c.x + R);
          p.c[f].x = lo + u() * (hi - lo);
          break;
        }
      }
    }
    if (!ok) continue;
    bool close = false;
    if (indexed) {
      index.candidates(p.c[0], eps_n, [&](std::int32_t id) {
        if (!close && model_distance(X, p, net.points[id]) < eps_n) close = true;
      });
    } else {
      for (const auto& q : net.points)
        if (model_distance(X, p, q) < eps_n) {
          close = true;
          break;
        }
    }
    if (close) continue;
    if (indexed) index.insert(static_cast<std::int32_t>(net.points.size()), p.c[0]);
    net.points.push_back(std::move(p));
  }
  return net;
}

PackingReport verify_packing(const ModelNet& net, double C, const std::vector<std::int32_t>& centers) {
  PackingReport r;
  r.min_count = std::numeric_limits<std::size_t>::max();
  std::vector<std::int32_t> ids = centers;
  if (ids.empty())
    for (std::size_t i = 0; i < net.points.size(); ++i) ids.push_back(static_cast<std::int32_t>(i));
  for (auto id : ids) {
    std::size_t c = net.count(net.points[id], C);
    r.max_count = std::max(r.max_count, c);
    r.min_count = std::min(r.min_count, c);
  }
  r.centers = ids.size();
  if (ids.empty()) r.min_count = 0;
  return r;
}

}  // namespace scclab
