#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "scclab/hyperbolic.hpp"

namespace scclab {

enum class FactorKind { plane, line, base };
std::string to_string(FactorKind k);

struct Factor {
  FactorKind kind = FactorKind::plane;
  double exponent = 1.0;  // plane 1, line 0, base configurable
  double diameter = 0.0;  // base factor: metric model is the interval [0, diameter]
};

Factor plane_factor();
Factor line_factor();
Factor base_factor(double exponent, double diameter = 0.0);

struct ModelSpace {
  std::vector<Factor> factors;
  double eps_t = 0.1;

  ModelSpace() = default;
  ModelSpace(std::vector<Factor> f, double eps);
  void validate() const;
  std::size_t size() const { return factors.size(); }
  int plane_count() const;
  double entropy_exponent() const;  // sum of factor exponents
};

// One coordinate per factor: plane (x, y) with y = 1/length, line (0, u) with
// u = 1/length, base (b, 1).
struct ModelPoint {
  std::vector<HalfPlanePoint> c;
};

void validate(const ModelSpace& X, const ModelPoint& p);
double factor_distance(const ModelSpace& X, std::size_t i, const ModelPoint& p, const ModelPoint& q);
double model_distance(const ModelSpace& X, const ModelPoint& p, const ModelPoint& q);
// Coordinatewise geodesic with proportional parameterization, t in [0, 1].
ModelPoint interpolate(const ModelSpace& X, const ModelPoint& p, const ModelPoint& q, double t);

ModelPoint systole_projection(const ModelSpace& X, const ModelPoint& p);
bool is_in_systole_set(const ModelSpace& X, const ModelPoint& p, double eps);
bool is_thick(const ModelSpace& X, const ModelPoint& p, double eps);
// Shortest one-sided length, +inf without line factors.
double min_line_length(const ModelSpace& X, const ModelPoint& p);

struct NorburyModelMeasure {
  const ModelSpace* space = nullptr;
  explicit NorburyModelMeasure(const ModelSpace& X) : space(&X) {}
  // Density in the chart (x, y) per plane factor, u per line factor.
  double density(const ModelPoint& p) const;
  // Line factor weight coth(length) relative to d(length).
  static double coth_weight(double length);
};

struct ModelPath {
  std::vector<ModelPoint> points;
  double length(const ModelSpace& X) const;
  // Point at arclength s along the piecewise coordinatewise geodesic.
  ModelPoint at(const ModelSpace& X, double s) const;
};

struct HomotopyResult {
  ModelPath path;
  double input_length = 0;
  double output_length = 0;  // includes any injected additive error
  double ratio = 1;
  int modified = 0;          // subdivision points moved by the projection
  double achieved_epsilon = 0;
};

// Subdivide at spacing delta, project interior points to the systole set,
// reconnect by coordinatewise geodesics. injected_error is an additive error
// charged twice on every piece touching a moved point; it is zero in the
// exact model.
HomotopyResult weak_convexity_homotope(const ModelSpace& X, const ModelPath& path, double delta, double eps_prime,
                                       double injected_error = 0.0);

struct VolumeEstimate {
  double value = 0;
  double stderr_ = 0;
  std::size_t inside = 0;
  std::size_t samples = 0;
};

// One weighted draw from B_R(center) inside the systole set: plane factors
// exactly uniform in hyperbolic area, line factors uniform in log u, base
// factors uniform. weight is the model density divided by the proposal
// density; inside is false when the draw leaves the systole set.
struct BallDraw {
  ModelPoint point;
  double weight = 0;
  bool inside = false;
};
template <class Rng>
BallDraw sample_model_ball(const NorburyModelMeasure& mu, const ModelPoint& center, double R, Rng& rng);

// Monte Carlo of the model measure of B_R(center) inside the systole set.
VolumeEstimate mc_ball_volume(const NorburyModelMeasure& mu, const ModelPoint& center, double R, std::size_t n,
                              std::uint64_t seed, int workers = 1);

template <class Rng>
BallDraw sample_model_ball(const NorburyModelMeasure& mu, const ModelPoint& center, double R, Rng& rng) {
  const ModelSpace& X = *mu.space;
  auto U = [&] { return (rng() >> 11) * 0x1.0p-53; };
  BallDraw d{center, 1.0, true};
  const double cap = 1.0 / X.eps_t;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const HalfPlanePoint& c = center.c[i];
    switch (X.factors[i].kind) {
      case FactorKind::plane: {
        double rho = std::acosh(1.0 + U() * (std::cosh(R) - 1.0));
        d.point.c[i] = circle_point(c, rho, 2.0 * M_PI * U());
        d.weight *= ball_area(R);
        break;
      }
      case FactorKind::line: {
        double u = c.y * std::exp((2.0 * U() - 1.0) * R);
        d.point.c[i].y = u;
        if (u > cap) d.inside = false;
        d.weight *= 2.0 * R * NorburyModelMeasure::coth_weight(1.0 / u) / u;
        break;
      }
      case FactorKind::base: {
        double D = X.factors[i].diameter;
        if (D <= 0) break;  // point factor with unit mass
        double lo = std::max(0.0, c.x - R), hi = std::min(D, c.x + R);
        d.point.c[i].x = lo + U() * (hi - lo);
        d.weight *= hi - lo;
        break;
      }
    }
  }
  if (!d.inside) d.weight = 0;
  return d;
}

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Per factor, the arclength intervals where that factor's length is below eps.
std::vector<std::vector<Interval>> active_intervals(const ModelSpace& X, const ModelPath& path, double eps);

struct TwistProjection {
  double diameter = 0;
  double min_distance_to_orbit = 0;
  bool disjoint = true;
  long n_min = 0;
  long n_max = 0;
};

// Twist orbit {(n t, 1/eps)} and a ball of radius R about (t/2, e^R / eps).
TwistProjection dehn_twist_axis_projection_experiment(double R, double eps, double twist = 1.0);

}  // namespace scclab
