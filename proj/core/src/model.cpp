#include "scclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scclab/common.hpp"
#include "scclab/stats.hpp"

namespace scclab {

namespace {
const double kInf = std::numeric_limits<double>::infinity();

bool same_point(const ModelPoint& a, const ModelPoint& b) {
  for (std::size_t i = 0; i < a.c.size(); ++i)
    if (a.c[i].x != b.c[i].x || a.c[i].y != b.c[i].y) return false;
  return true;
}
}  // namespace

std::string to_string(FactorKind k) {
  switch (k) {
    case FactorKind::plane: return "plane";
    case FactorKind::line: return "line";
    case FactorKind::base: return "base";
  }
  return "?";
}

Factor plane_factor() { return {FactorKind::plane, 1.0, 0.0}; }
Factor line_factor() { return {FactorKind::line, 0.0, 0.0}; }
Factor base_factor(double exponent, double diameter) { return {FactorKind::base, exponent, diameter}; }

ModelSpace::ModelSpace(std::vector<Factor> f, double eps) : factors(std::move(f)), eps_t(eps) { validate(); }

void ModelSpace::validate() const {
  if (factors.empty()) throw DomainError("model space needs at least one factor");
  if (!(eps_t > 0 && eps_t < 1)) throw DomainError("systole threshold must lie in (0, 1)");
  for (const auto& f : factors) {
    if (!(f.exponent >= 0)) throw DomainError("factor exponents must be non-negative");
    if (f.kind == FactorKind::base && !(f.diameter >= 0)) throw DomainError("base diameter must be non-negative");
  }
}

int ModelSpace::plane_count() const {
  return static_cast<int>(std::count_if(factors.begin(), factors.end(),
                                        [](const Factor& f) { return f.kind == FactorKind::plane; }));
}

double ModelSpace::entropy_exponent() const {
  double h = 0;
  for (const auto& f : factors) h += f.exponent;
  return h;
}

void validate(const ModelSpace& X, const ModelPoint& p) {
  if (p.c.size() != X.factors.size()) throw DomainError("model point does not match the factor layout");
  for (std::size_t i = 0; i < p.c.size(); ++i) {
    const auto& z = p.c[i];
    switch (X.factors[i].kind) {
      case FactorKind::plane:
        validate(z);
        break;
      case FactorKind::line:
        if (!(z.y > 0) || !std::isfinite(z.y)) throw DomainError("line coordinate must be positive");
        break;
      case FactorKind::base:
        if (!std::isfinite(z.x)) throw DomainError("base coordinate must be finite");
        break;
    }
  }
}

double factor_distance(const ModelSpace& X, std::size_t i, const ModelPoint& p, const ModelPoint& q) {
  switch (X.factors[i].kind) {
    case FactorKind::plane: return distance(p.c[i], q.c[i]);
    case FactorKind::line: return std::abs(std::log(p.c[i].y / q.c[i].y));
    case FactorKind::base: return std::abs(p.c[i].x - q.c[i].x);
  }
  return 0;
}

double model_distance(const ModelSpace& X, const ModelPoint& p, const ModelPoint& q) {
  if (p.c.size() != X.size() || q.c.size() != X.size()) throw DomainError("model points do not match the space");
  double d = 0;
  for (std::size_t i = 0; i < X.size(); ++i) d = std::max(d, factor_distance(X, i, p, q));
  return d;
}

ModelPoint interpolate(const ModelSpace& X, const ModelPoint& p, const ModelPoint& q, double t) {
  ModelPoint r = p;
  for (std::size_t i = 0; i < X.size(); ++i) {
    switch (X.factors[i].kind) {
      case FactorKind::plane:
        r.c[i] = GeodesicSegment(p.c[i], q.c[i]).at(t);
        break;
      case FactorKind::line:
        r.c[i].y = std::exp((1 - t) * std::log(p.c[i].y) + t * std::log(q.c[i].y));
        break;
      case FactorKind::base:
        r.c[i].x = (1 - t) * p.c[i].x + t * q.c[i].x;
        break;
    }
  }
  return r;
}

ModelPoint systole_projection(const ModelSpace& X, const ModelPoint& p) {
  ModelPoint r = p;
  const double cap = 1.0 / X.eps_t;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (X.factors[i].kind == FactorKind::line) r.c[i].y = std::min(r.c[i].y, cap);
  return r;
}

double min_line_length(const ModelSpace& X, const ModelPoint& p) {
  double m = kInf;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (X.factors[i].kind == FactorKind::line) m = std::min(m, 1.0 / p.c[i].y);
  return m;
}

bool is_in_systole_set(const ModelSpace& X, const ModelPoint& p, double eps) {
  return min_line_length(X, p) >= eps * (1 - 1e-12);
}

bool is_thick(const ModelSpace& X, const ModelPoint& p, double eps) {
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X.factors[i].kind == FactorKind::plane && 1.0 / p.c[i].y < eps) return false;
    if (X.factors[i].kind == FactorKind::line && 1.0 / p.c[i].y < eps) return false;
  }
  return true;
}

double NorburyModelMeasure::coth_weight(double length) { return 1.0 / std::tanh(length); }

double NorburyModelMeasure::density(const ModelPoint& p) const {
  double d = 1.0;
  for (std::size_t i = 0; i < space->size(); ++i) {
    double y = p.c[i].y;
    switch (space->factors[i].kind) {
      case FactorKind::plane: d /= y * y; break;
      case FactorKind::line: d *= coth_weight(1.0 / y) / (y * y); break;
      case FactorKind::base: break;
    }
  }
  return d;
}

double ModelPath::length(const ModelSpace& X) const {
  double L = 0;
  for (std::size_t i = 1; i < points.size(); ++i) L += model_distance(X, points[i - 1], points[i]);
  return L;
}

ModelPoint ModelPath::at(const ModelSpace& X, double s) const {
  if (points.empty()) throw DomainError("empty model path");
  if (s <= 0) return points.front();
  for (std::size_t i = 1; i < points.size(); ++i) {
    double d = model_distance(X, points[i - 1], points[i]);
    if (s <= d) return d > 0 ? interpolate(X, points[i - 1], points[i], s / d) : points[i];
    s -= d;
  }
  return points.back();
}

HomotopyResult weak_convexity_homotope(const ModelSpace& X, const ModelPath& path, double delta, double eps_prime,
                                       double injected_error) {
  if (path.points.size() < 2) throw DomainError("homotopy needs a path with two endpoints");
  if (!(delta > 0)) throw DomainError("subdivision spacing must be positive");
  if (!(injected_error >= 0)) throw DomainError("injected error must be non-negative");
  if (!is_in_systole_set(X, path.points.front(), eps_prime) || !is_in_systole_set(X, path.points.back(), eps_prime))
    throw PreconditionError("path endpoints must lie in the systole set");

  HomotopyResult out;
  out.input_length = path.length(X);
  std::vector<ModelPoint> pts{path.points.front()};
  std::vector<char> moved{0};
  // sample every delta of arclength and at the interior vertices, so that
  // short excursions between two samples are not missed
  std::vector<double> at;
  for (double s = delta; s < out.input_length - 1e-12; s += delta) at.push_back(s);
  double run = 0;
  for (std::size_t i = 1; i + 1 < path.points.size(); ++i) {
    run += model_distance(X, path.points[i - 1], path.points[i]);
    if (run > 1e-12 && run < out.input_length - 1e-12) at.push_back(run);
  }
  std::sort(at.begin(), at.end());
  for (double s : at) {
    ModelPoint p = path.at(X, s);
    ModelPoint q = systole_projection(X, p);
    moved.push_back(same_point(p, q) ? 0 : 1);
    out.modified += moved.back();
    pts.push_back(std::move(q));
  }
  pts.push_back(path.points.back());
  moved.push_back(0);

  if (out.modified == 0) {
    out.path = path;
    out.output_length = out.input_length;
  } else {
    out.path.points = pts;
    double L = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      L += model_distance(X, pts[i - 1], pts[i]);
      if (moved[i - 1] || moved[i]) L += 2 * injected_error;
    }
    out.output_length = L;
  }
  out.ratio = out.input_length > 0 ? out.output_length / out.input_length : 1.0;
  out.achieved_epsilon = kInf;
  for (const auto& p : out.path.points) out.achieved_epsilon = std::min(out.achieved_epsilon, min_line_length(X, p));
  return out;
}

VolumeEstimate mc_ball_volume(const NorburyModelMeasure& mu, const ModelPoint& center, double R, std::size_t n,
                              std::uint64_t seed, int workers) {
  const ModelSpace& X = *mu.space;
  validate(X, center);
  if (!is_in_systole_set(X, center, X.eps_t)) throw PreconditionError("ball center must lie in the systole set");
  if (!(R > 0)) throw DomainError("ball radius must be positive");
  if (n == 0) throw EstimationError("no samples requested");
  workers = std::max(1, workers);
  struct Acc {
    double sum = 0, sum2 = 0;
    std::size_t inside = 0;
  };
  std::vector<Acc> acc(workers);
  parallel_for(n, workers, [&](int w, std::size_t b, std::size_t e) {
    std::mt19937_64 rng(derive_seed(seed, w));
    Acc a;
    for (std::size_t k = b; k < e; ++k) {
      BallDraw d = sample_model_ball(mu, center, R, rng);
      if (!d.inside) continue;
      a.sum += d.weight;
      a.sum2 += d.weight * d.weight;
      ++a.inside;
    }
    acc[w] = a;
  });
  Acc t;
  for (const auto& a : acc) {
    t.sum += a.sum;
    t.sum2 += a.sum2;
    t.inside += a.inside;
  }
  if (t.inside == 0) throw EstimationError("no samples landed inside the ball");
  VolumeEstimate v;
  v.samples = n;
  v.inside = t.inside;
  double m = t.sum / double(n);
  v.value = m;
  double var = std::max(0.0, t.sum2 / double(n) - m * m);
  v.stderr_ = std::sqrt(var / double(n));
  return v;
}

std::vector<std::vector<Interval>> active_intervals(const ModelSpace& X, const ModelPath& path, double eps) {
  std::vector<std::vector<Interval>> out(X.size());
  const double Y = 1.0 / eps, logY = std::log(Y);
  auto add = [](std::vector<Interval>& v, double lo, double hi) {
    if (!(hi > lo)) return;
    if (!v.empty() && lo <= v.back().hi + 1e-12)
      v.back().hi = std::max(v.back().hi, hi);
    else
      v.push_back({lo, hi});
  };
  double S = 0;
  for (std::size_t k = 1; k < path.points.size(); ++k) {
    const ModelPoint &P = path.points[k - 1], &Q = path.points[k];
    double Lk = model_distance(X, P, Q);
    for (std::size_t i = 0; i < X.size(); ++i) {
      double t0 = 1, t1 = 0;  // thin parameter range within [0, 1]
      switch (X.factors[i].kind) {
        case FactorKind::plane: {
          GeodesicSegment seg(P.c[i], Q.c[i]);
          double Lh = seg.length();
          if (Lh == 0) {
            if (P.c[i].y > Y) t0 = 0, t1 = 1;
            break;
          }
          // along the frame, y(s) = e^s / (c^2 e^{2s} + d^2)
          const Isometry& M = seg.line().frame;
          double lo, hi;
          if (std::abs(M.c) < 1e-300) {
            lo = std::log(M.d * M.d * Y);
            hi = kInf;
          } else {
            double disc = 1 - 4 * M.c * M.c * M.d * M.d * Y * Y;
            if (disc <= 0) break;
            double sq = std::sqrt(disc), den = 2 * M.c * M.c * Y;
            lo = std::log((1 - sq) / den);
            hi = std::log((1 + sq) / den);
          }
          t0 = std::max(0.0, lo / Lh);
          t1 = std::min(1.0, hi / Lh);
          break;
        }
        case FactorKind::line: {
          double a = std::log(P.c[i].y), b = std::log(Q.c[i].y);
          if (a == b) {
            if (a > logY) t0 = 0, t1 = 1;
          } else {
            double tc = (logY - a) / (b - a);
            if (b > a)
              t0 = std::max(0.0, tc), t1 = 1;
            else
              t0 = 0, t1 = std::min(1.0, tc);
          }
          break;
        }
        case FactorKind::base:
          break;
      }
      if (t1 > t0) add(out[i], S + t0 * Lk, S + t1 * Lk);
    }
    S += Lk;
  }
  return out;
}

TwistProjection dehn_twist_axis_projection_experiment(double R, double eps, double twist) {
  if (!(R >= 0) || !(eps > 0) || !(twist > 0)) throw DomainError("twist experiment needs R >= 0, eps > 0, twist > 0");
  TwistProjection out;
  const double yp = 1.0 / eps;
  HalfPlanePoint q{twist / 2, yp * std::exp(R)};
  // distance from q to the orbit row is minimised at the nearest column
  long n0 = static_cast<long>(std::floor(q.x / twist));
  out.min_distance_to_orbit = kInf;
  for (long n = n0 - 1; n <= n0 + 2; ++n)
    out.min_distance_to_orbit = std::min(out.min_distance_to_orbit, distance(q, {n * twist, yp}));
  out.disjoint = R == 0 || out.min_distance_to_orbit > R;
  // nearest orbit point to (u, v) is the column round(u / twist), for every v
  EuclideanDisc disc = ball_disc(q, R);
  out.n_min = std::lround((disc.cx - disc.radius) / twist);
  out.n_max = std::lround((disc.cx + disc.radius) / twist);
  out.diameter = distance({out.n_min * twist, yp}, {out.n_max * twist, yp});
  return out;
}

}  // namespace scclab
