#pragma once

#include <array>
#include <complex>
#include <vector>

namespace scclab {

// Point of the upper half-plane, x horocyclic coordinate, y height.
struct HalfPlanePoint {
  double x = 0;
  double y = 1;
};

// Throws DomainError unless y > 0 and both coordinates are finite.
HalfPlanePoint make_point(double x, double y);
void validate(const HalfPlanePoint& p);

double distance(const HalfPlanePoint& p, const HalfPlanePoint& q);

// Determinant one Moebius map, stored up to global sign with the first
// nonzero entry positive.
struct Isometry {
  double a = 1, b = 0, c = 0, d = 1;

  static Isometry identity() { return {}; }
  // Rescales to determinant one; throws DomainError if det <= 0.
  static Isometry from(double a, double b, double c, double d);
  // Hyperbolic translation along the imaginary axis z -> q^2 z.
  static Isometry diag(double q);
  static Isometry translation(double t);
  // Elliptic rotation fixing i, acting on the tangent space by angle phi.
  static Isometry rotation(double phi);

  Isometry operator*(const Isometry& o) const;
  Isometry inverse() const;
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
};

Isometry canonical(Isometry g);
HalfPlanePoint apply(const Isometry& g, const HalfPlanePoint& p);
// Action on the boundary R u {inf}; infinity is represented by +INFINITY.
double apply_boundary(const Isometry& g, double x);
bool approx_equal(const Isometry& g, const Isometry& h, double tol = 1e-9);

// Isometry taking i to p (upper triangular).
Isometry lift(const HalfPlanePoint& p);

// Complete geodesic, stored as a frame M carrying the imaginary axis onto it,
// oriented from M(0) to M(inf).
struct Geodesic {
  Isometry frame;

  static Geodesic through(const HalfPlanePoint& p, const HalfPlanePoint& q);
  // Endpoints on the boundary; either may be +INFINITY but not both.
  static Geodesic from_endpoints(double from, double to);
  static Geodesic imaginary_axis() { return {}; }

  std::array<double, 2> endpoints() const;
  // Signed arclength coordinate of the projection of p; 0 at frame(i).
  double parameter(const HalfPlanePoint& p) const;
  HalfPlanePoint at(double s) const;
};

struct GeodesicSegment {
  HalfPlanePoint p, q;

  GeodesicSegment() = default;
  GeodesicSegment(const HalfPlanePoint& from, const HalfPlanePoint& to);
  double length() const { return length_; }
  // Point at arclength s from p (clamped to the segment).
  HalfPlanePoint at_distance(double s) const;
  // Proportional parameter t in [0, 1].
  HalfPlanePoint at(double t) const { return at_distance(t * length_); }
  const Geodesic& line() const { return line_; }

 private:
  Geodesic line_;
  double length_ = 0;
};

double distance_to_geodesic(const HalfPlanePoint& p, const Geodesic& g);
HalfPlanePoint project_to_geodesic(const HalfPlanePoint& p, const Geodesic& g);
HalfPlanePoint project_to_geodesic(const HalfPlanePoint& p, const GeodesicSegment& s);
double set_projection_diameter(const std::vector<HalfPlanePoint>& pts, const Geodesic& g);
double set_projection_diameter(const std::vector<HalfPlanePoint>& pts, const GeodesicSegment& s);
// Exact diameter of the projection of the closed ball B_r(center).
double ball_projection_diameter(const HalfPlanePoint& center, double r, const Geodesic& g);

// Euclidean disc occupied by a hyperbolic ball.
struct EuclideanDisc {
  double cx, cy, radius;
};
EuclideanDisc ball_disc(const HalfPlanePoint& center, double r);
// Point on the hyperbolic circle of radius r about center, at angle theta.
HalfPlanePoint circle_point(const HalfPlanePoint& center, double r, double theta);

// Horoball frame({Im z > t0}).
struct Horoball {
  double t0 = 1;
  Isometry frame;
  bool contains(const HalfPlanePoint& p) const;
};

std::complex<double> to_disc(const HalfPlanePoint& p);
HalfPlanePoint from_disc(std::complex<double> w);

double ball_area(double r);
// Integral of dx dy / y^2 over [-X, X] x [1, Y].
double rectangle_integral(double X, double Y);
// Rectangle bound for a ball inside a horoball: X = C exp(bR/2), Y = exp(bR).
double horoball_ball_volume(double R, double b, double C = 1.0);

}  // namespace scclab
