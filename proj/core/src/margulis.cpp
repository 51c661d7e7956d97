#include "scclab/margulis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <ostream>
#include <random>

#include "scclab/common.hpp"
#include "scclab/stats.hpp"

namespace scclab {

namespace {

constexpr double kQuadTol = 1e-10;

template <class F>
double integrate(F&& fn, double a, double b, const char* what) {
  double err = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fn, a, b, 30, kQuadTol, &err);
  if (!std::isfinite(v) || err > 1e-6 * std::abs(v)) throw EstimationError(std::string(what) + ": quadrature did not converge");
  return v;
}

}  // namespace

MargulisFn::MargulisFn(const ModelSpace& X, double lower) : space(&X), lower_bound(lower) {
  if (X.plane_count() == 0) throw DomainError("Margulis function needs at least one plane factor");
  if (!(lower > 0)) throw DomainError("lower bound must be positive");
}

double MargulisFn::operator()(const ModelPoint& x) const {
  double m = 0;
  for (std::size_t i = 0; i < space->size(); ++i)
    if (space->factors[i].kind == FactorKind::plane) m = std::max(m, x.c[i].y);
  return std::sqrt(m);
}

double MargulisFn::comparison(const ModelPoint& x) const {
  double s = 0;
  for (std::size_t i = 0; i < space->size(); ++i)
    if (space->factors[i].kind == FactorKind::plane) s += std::sqrt(x.c[i].y);
  return s;
}

double spherical_average(const HalfPlanePoint& z, double tau) {
  validate(z);
  if (tau < 0) throw DomainError("radius must be nonnegative");
  if (tau == 0) return std::sqrt(z.y);
  // the top of the circle sits at theta = 0, keep it inside the interval
  auto g = [&](double th) { return std::sqrt(circle_point(z, tau, th).y); };
  return integrate(g, -M_PI, M_PI, "spherical average") / (2 * M_PI);
}

double ball_average_ratio(double tau) {
  if (!(tau > 0)) throw DomainError("radius must be positive");
  HalfPlanePoint i{0, 1};
  auto g = [&](double r) { return spherical_average(i, r) * std::sinh(r); };
  return integrate(g, 0.0, tau, "ball average") / (std::cosh(tau) - 1.0);
}

BallAverage ball_average(const std::function<double(const ModelPoint&)>& g, const NorburyModelMeasure& mu,
                         const ModelPoint& x, double tau, std::size_t n, std::uint64_t seed, int workers) {
  if (!(tau > 0)) throw DomainError("radius must be positive");
  if (n == 0) throw EstimationError("no samples requested");
  validate(*mu.space, x);
  workers = std::max(1, workers);
  struct Acc {
    double w = 0, wg = 0, w2 = 0, w2g = 0, w2g2 = 0;
    std::size_t inside = 0;
  };
  std::vector<Acc> acc(workers);
  parallel_for(n, workers, [&](int k, std::size_t b, std::size_t e) {
    std::mt19937_64 rng(derive_seed(seed, k));
    Acc a;
    for (std::size_t i = b; i < e; ++i) {
      BallDraw d = sample_model_ball(mu, x, tau, rng);
      if (!d.inside) continue;
      double v = g(d.point);
      a.w += d.weight;
      a.wg += d.weight * v;
      a.w2 += d.weight * d.weight;
      a.w2g += d.weight * d.weight * v;
      a.w2g2 += d.weight * d.weight * v * v;
      ++a.inside;
    }
    acc[k] = a;
  });
  Acc t;
  for (const auto& a : acc) {
    t.w += a.w;
    t.wg += a.wg;
    t.w2 += a.w2;
    t.w2g += a.w2g;
    t.w2g2 += a.w2g2;
    t.inside += a.inside;
  }
  if (t.inside == 0 || !(t.w > 0)) throw EstimationError("no samples landed inside the ball");
  BallAverage r;
  r.samples = n;
  r.inside = t.inside;
  r.value = t.wg / t.w;
  // delta method for the ratio estimator: sum w^2 (g - mean)^2 / (sum w)^2
  double num = t.w2g2 - 2 * r.value * t.w2g + r.value * r.value * t.w2;
  r.stderr_ = std::sqrt(std::max(0.0, num)) / t.w;
  return r;
}

std::string to_string(DriftRegion r) {
  switch (r) {
    case DriftRegion::R1: return "R1";
    case DriftRegion::R2: return "R2";
    case DriftRegion::R3: return "R3";
  }
  return "?";
}

DriftRegion classify_region(const ModelSpace& X, const ModelPoint& x, double tau, double eps) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const double thin = 1.0 / eps, up = std::exp(tau), down = std::exp(-tau);
  int thin_count = 0;
  std::size_t top = X.size();
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X.factors[i].kind != FactorKind::plane) continue;
    if (x.c[i].y * down > thin) ++thin_count;
    if (top == X.size() || x.c[i].y > x.c[top].y) top = i;
  }
  if (thin_count == 0) return DriftRegion::R3;
  if (thin_count > 1) return DriftRegion::R2;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (i == top || X.factors[i].kind != FactorKind::plane) continue;
    if (x.c[i].y * up > x.c[top].y * down) return DriftRegion::R2;
  }
  return DriftRegion::R1;
}

double thick_bound(double tau, double eps) { return std::exp(tau) / std::sqrt(eps); }

std::size_t DriftReport::counterexamples() const {
  return std::count_if(rows.begin(), rows.end(), [](const DriftRow& r) { return !r.holds; });
}

std::size_t DriftReport::count(DriftRegion g) const {
  return std::count_if(rows.begin(), rows.end(), [&](const DriftRow& r) { return r.region == g; });
}

void DriftReport::write_csv(std::ostream& os) const {
  os << "id,region,tau,f,average,stderr,c,b,holds\n";
  for (const auto& r : rows)
    os << r.id << ',' << to_string(r.region) << ',' << r.tau << ',' << r.f << ',' << r.average << ','
       << r.stderr_ << ',' << r.c << ',' << r.b << ',' << (r.holds ? 1 : 0) << '\n';
}

DriftReport verify_drift(const MargulisFn& f, const NorburyModelMeasure& mu, const std::vector<ModelPoint>& points,
                         double tau, const DriftOptions& opt) {
  if (!(tau > 0)) throw DomainError("tau must be positive");
  const ModelSpace& X = *f.space;
  const double A = ball_average_ratio(tau);
  const double cg = f.plane_count();
  DriftReport rep;
  rep.bound_B = thick_bound(tau, opt.eps);
  auto fn = [&f](const ModelPoint& p) { return f(p); };
  for (std::size_t k = 0; k < points.size(); ++k) {
    DriftRow row;
    row.id = k;
    row.tau = tau;
    row.region = classify_region(X, points[k], tau, opt.eps);
    row.f = f(points[k]);
    BallAverage avg = ball_average(fn, mu, points[k], tau, opt.samples, derive_seed(opt.seed, k), opt.workers);
    row.average = avg.value;
    row.stderr_ = avg.stderr_;
    row.ratio = avg.value / row.f;
    switch (row.region) {
      case DriftRegion::R1: row.c = A; break;
      case DriftRegion::R2: row.c = cg * A; break;
      case DriftRegion::R3:
        row.b = rep.bound_B;
        rep.max_thick_average = std::max(rep.max_thick_average, avg.value);
        break;
    }
    row.holds = avg.value - opt.sigmas * avg.stderr_ <= row.c * row.f + row.b;
    rep.rows.push_back(row);
  }
  return rep;
}

DecayFit fit_decay(const std::vector<double>& taus, const std::vector<double>& ratios) {
  if (taus.size() != ratios.size()) throw InputError("tau and ratio lists differ in length");
  if (taus.size() < 2) throw EstimationError("need at least two radii for a decay fit");
  DecayFit d;
  d.taus = taus;
  d.ratios = ratios;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(ratios[i] > 0) || !(taus[i] > 0)) throw DomainError("decay fit needs positive ratios and radii");
    a.push_back(std::log(ratios[i] / taus[i]));
    b.push_back(std::log(ratios[i]));
  }
  d.exponent = linear_fit(taus, a).slope;
  d.raw_slope = linear_fit(taus, b).slope;
  d.strictly_decreasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (!(ratios[i] < ratios[i - 1])) d.strictly_decreasing = false;
  return d;
}

}  // namespace scclab
