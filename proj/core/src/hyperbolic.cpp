#include "scclab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scclab/common.hpp"

namespace scclab {

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

void validate(const HalfPlanePoint& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.y > 0))
    throw DomainError("half-plane point must have finite coordinates and y > 0");
}

HalfPlanePoint make_point(double x, double y) {
  HalfPlanePoint p{x, y};
  validate(p);
  return p;
}

double distance(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  validate(p);
  validate(q);
  // 2 asinh(|p - q| / (2 sqrt(y1 y2))) equals the arcosh form but keeps full
  // relative accuracy for nearby points.
  double dx = p.x - q.x, dy = p.y - q.y;
  double e = std::hypot(dx, dy);
  return 2.0 * std::asinh(e / (2.0 * std::sqrt(p.y * q.y)));
}

Isometry canonical(Isometry g) {
  double first = g.a != 0 ? g.a : (g.b != 0 ? g.b : (g.c != 0 ? g.c : g.d));
  if (first < 0) {
    g.a = -g.a;
    g.b = -g.b;
    g.c = -g.c;
    g.d = -g.d;
  }
  return g;
}

Isometry Isometry::from(double a, double b, double c, double d) {
  double det = a * d - b * c;
  if (!(det > 0) || !std::isfinite(det)) throw DomainError("isometry needs positive determinant");
  double s = std::sqrt(det);
  return canonical({a / s, b / s, c / s, d / s});
}

Isometry Isometry::diag(double q) {
  if (!(q > 0)) throw DomainError("diag needs q > 0");
  return canonical({q, 0, 0, 1 / q});
}

Isometry Isometry::translation(double t) { return {1, t, 0, 1}; }

Isometry Isometry::rotation(double phi) {
  double c = std::cos(phi / 2), s = std::sin(phi / 2);
  return canonical({c, s, -s, c});
}

Isometry Isometry::operator*(const Isometry& o) const {
  return canonical({a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d});
}

Isometry Isometry::inverse() const { return canonical({d, -b, -c, a}); }

HalfPlanePoint apply(const Isometry& g, const HalfPlanePoint& p) {
  double u = g.c * p.x + g.d, v = g.c * p.y;
  double den = u * u + v * v;
  if (!(den > 0) || !std::isfinite(den)) throw DomainError("isometry image at infinity");
  double x = ((g.a * p.x + g.b) * u + g.a * g.c * p.y * p.y) / den;
  double y = p.y / den;
  if (!std::isfinite(x) || !std::isfinite(y) || !(y > 0)) throw DomainError("isometry image degenerate");
  return {x, y};
}

double apply_boundary(const Isometry& g, double x) {
  if (std::isinf(x)) return g.c == 0 ? kInf : g.a / g.c;
  double den = g.c * x + g.d;
  if (den == 0) return kInf;
  return (g.a * x + g.b) / den;
}

bool approx_equal(const Isometry& g, const Isometry& h, double tol) {
  auto close = [&](double s) {
    return std::abs(g.a - s * h.a) <= tol && std::abs(g.b - s * h.b) <= tol &&
           std::abs(g.c - s * h.c) <= tol && std::abs(g.d - s * h.d) <= tol;
  };
  return close(1.0) || close(-1.0);
}

Isometry lift(const HalfPlanePoint& p) {
  validate(p);
  double s = std::sqrt(p.y);
  return {s, p.x / s, 0, 1 / s};
}

Geodesic Geodesic::through(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  Isometry g = lift(p);
  HalfPlanePoint w = apply(g.inverse(), q);
  if (std::abs(w.x) < 1e-300 && std::abs(w.y - 1.0) < 1e-300) throw DomainError("geodesic through equal points");
  // argument of the Cayley image of w, measured from the positive real axis
  double phi = std::atan2(w.y - 1.0, w.x) - std::atan2(w.y + 1.0, w.x);
  // the image of i*e^L under Cayley lies on the positive real axis
  return {g * Isometry::rotation(phi)};
}

Geodesic Geodesic::from_endpoints(double from, double to) {
  if (std::isinf(from) && std::isinf(to)) throw DomainError("geodesic endpoints coincide");
  if (from == to) throw DomainError("geodesic endpoints coincide");
  if (std::isinf(to)) return {Isometry::translation(from)};
  if (std::isinf(from)) return {canonical({to, -1, 1, 0})};
  if (to > from) return {Isometry::from(to, from, 1, 1)};
  return {Isometry::from(-to, from, -1, 1)};
}

std::array<double, 2> Geodesic::endpoints() const {
  return {apply_boundary(frame, 0.0), apply_boundary(frame, kInf)};
}

double Geodesic::parameter(const HalfPlanePoint& p) const {
  HalfPlanePoint z = apply(frame.inverse(), p);
  return std::log(std::hypot(z.x, z.y));
}

HalfPlanePoint Geodesic::at(double s) const { return apply(frame, {0.0, std::exp(s)}); }

GeodesicSegment::GeodesicSegment(const HalfPlanePoint& from, const HalfPlanePoint& to) : p(from), q(to) {
  length_ = distance(from, to);
  if (length_ > 0)
    line_ = Geodesic::through(from, to);
  else
    line_ = Geodesic{lift(from)};
}

HalfPlanePoint GeodesicSegment::at_distance(double s) const {
  if (s <= 0) return p;
  if (s >= length_) return q;
  return line_.at(s);
}

double distance_to_geodesic(const HalfPlanePoint& p, const Geodesic& g) {
  HalfPlanePoint z = apply(g.frame.inverse(), p);
  return std::asinh(std::abs(z.x) / z.y);
}

HalfPlanePoint project_to_geodesic(const HalfPlanePoint& p, const Geodesic& g) { return g.at(g.parameter(p)); }

HalfPlanePoint project_to_geodesic(const HalfPlanePoint& p, const GeodesicSegment& s) {
  if (s.length() == 0) return s.p;
  double t = s.line().parameter(p);
  return s.at_distance(t);
}

double set_projection_diameter(const std::vector<HalfPlanePoint>& pts, const Geodesic& g) {
  if (pts.empty()) throw DomainError("projection diameter of an empty set");
  double lo = kInf, hi = -kInf;
  for (const auto& p : pts) {
    double t = g.parameter(p);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo;
}

double set_projection_diameter(const std::vector<HalfPlanePoint>& pts, const GeodesicSegment& s) {
  if (pts.empty()) throw DomainError("projection diameter of an empty set");
  if (s.length() == 0) return 0;
  double lo = kInf, hi = -kInf;
  for (const auto& p : pts) {
    double t = std::clamp(s.line().parameter(p), 0.0, s.length());
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo;
}

double ball_projection_diameter(const HalfPlanePoint& center, double r, const Geodesic& g) {
  if (!(r >= 0)) throw DomainError("ball radius must be non-negative");
  HalfPlanePoint c = apply(g.frame.inverse(), center);
  EuclideanDisc disc = ball_disc(c, r);
  // projection to the imaginary axis is z -> i|z|, and the disc misses 0
  double m = std::hypot(disc.cx, disc.cy);
  return std::log((m + disc.radius) / (m - disc.radius));
}

EuclideanDisc ball_disc(const HalfPlanePoint& center, double r) {
  validate(center);
  return {center.x, center.y * std::cosh(r), center.y * std::sinh(r)};
}

HalfPlanePoint circle_point(const HalfPlanePoint& center, double r, double theta) {
  return apply(lift(center) * Isometry::rotation(theta), {0.0, std::exp(r)});
}

bool Horoball::contains(const HalfPlanePoint& p) const { return apply(frame.inverse(), p).y > t0; }

std::complex<double> to_disc(const HalfPlanePoint& p) {
  std::complex<double> z(p.x, p.y), i(0, 1);
  return (z - i) / (z + i);
}

HalfPlanePoint from_disc(std::complex<double> w) {
  std::complex<double> i(0, 1);
  std::complex<double> z = i * (1.0 + w) / (1.0 - w);
  return make_point(z.real(), z.imag());
}

double ball_area(double r) { return 2.0 * M_PI * (std::cosh(r) - 1.0); }

double rectangle_integral(double X, double Y) {
  if (!(X >= 0) || !(Y >= 1)) throw DomainError("rectangle integral needs X >= 0 and Y >= 1");
  return 2.0 * X * (1.0 - 1.0 / Y);
}

double horoball_ball_volume(double R, double b, double C) {
  if (!(R >= 0) || !(b > 0 && b <= 1) || !(C > 0)) throw DomainError("horoball_ball_volume: need R >= 0, 0 < b <= 1, C > 0");
  return rectangle_integral(C * std::exp(b * R / 2), std::exp(b * R));
}

}  // namespace scclab
