#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "scclab/hyperbolic.hpp"
#include "scclab/model.hpp"

namespace scclab {

// f(x) = max over plane factors of sqrt(y), with y the reciprocal length.
struct MargulisFn {
  const ModelSpace* space = nullptr;
  double lower_bound = 0.5;  // stand-in for the Bers constant

  explicit MargulisFn(const ModelSpace& X, double lower = 0.5);
  double operator()(const ModelPoint& x) const;
  // Sum of sqrt(y) over plane factors; f'/c_g <= f <= f'.
  double comparison(const ModelPoint& x) const;
  int plane_count() const { return space->plane_count(); }
};

// Average of sqrt(Im w) over the hyperbolic circle of radius tau about z.
double spherical_average(const HalfPlanePoint& z, double tau);
// Same average over the disc of radius tau, divided by sqrt(Im z). The ratio
// does not depend on z.
double ball_average_ratio(double tau);

struct BallAverage {
  double value = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
  std::size_t inside = 0;
};

// mu-weighted Monte Carlo average of g over B_tau(x) in the sup metric.
BallAverage ball_average(const std::function<double(const ModelPoint&)>& g, const NorburyModelMeasure& mu,
                         const ModelPoint& x, double tau, std::size_t n, std::uint64_t seed, int workers = 1);

enum class DriftRegion { R1, R2, R3 };
std::string to_string(DriftRegion r);

// R1: one plane factor thin on the whole ball and dominating every other
// factor there, so f is that factor's sqrt(y). R2: some factor is thin on the
// whole ball but R1 fails. R3: no factor is thin on the whole ball.
DriftRegion classify_region(const ModelSpace& X, const ModelPoint& x, double tau, double eps);

struct DriftOptions {
  double eps = 0.5;          // thin means y > 1/eps
  std::size_t samples = 20000;
  std::uint64_t seed = 1;
  int workers = 1;
  double sigmas = 3.0;
};

struct DriftRow {
  std::size_t id = 0;
  DriftRegion region = DriftRegion::R3;
  double tau = 0;
  double f = 0;
  double average = 0;
  double stderr_ = 0;
  double c = 0;      // coefficient used in the inequality
  double b = 0;      // additive term used
  double ratio = 0;  // measured average / f
  bool holds = true;
};

struct DriftReport {
  std::vector<DriftRow> rows;
  double bound_B = 0;           // analytic bound used on R3
  double max_thick_average = 0; // largest measured average on R3 points
  std::size_t counterexamples() const;
  std::size_t count(DriftRegion r) const;
  void write_csv(std::ostream& os) const;
};

// Bound for A_tau f on R3: every plane factor has y <= e^tau/eps on the ball.
double thick_bound(double tau, double eps);

DriftReport verify_drift(const MargulisFn& f, const NorburyModelMeasure& mu, const std::vector<ModelPoint>& points,
                         double tau, const DriftOptions& opt = {});

struct DecayFit {
  std::vector<double> taus;
  std::vector<double> ratios;
  double exponent = 0;  // kappa in c(tau) ~ C tau exp(kappa tau)
  double raw_slope = 0; // slope of log c against tau
  bool strictly_decreasing = false;
};

DecayFit fit_decay(const std::vector<double>& taus, const std::vector<double>& ratios);

}  // namespace scclab
