#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "scclab/common.hpp"
#include "scclab/model.hpp"

using namespace scclab;

namespace {

ModelPoint pt(std::initializer_list<HalfPlanePoint> c) { return ModelPoint{std::vector<HalfPlanePoint>(c)}; }

}  // namespace

TEST_CASE("sup metric distance") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  auto a = pt({{0, 1}, {0, 1}});
  CHECK(model_distance(X, a, a) == 0.0);
  auto b = pt({{0, std::exp(1.0)}, {0, std::exp(3.0)}});
  CHECK(model_distance(X, a, b) == doctest::Approx(3.0));
}

TEST_CASE("sup metric triangle inequality") {
  ModelSpace X({plane_factor(), plane_factor(), line_factor()}, 0.1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3, 3);
  auto rnd = [&] { return pt({{U(rng), std::exp(U(rng))}, {U(rng), std::exp(U(rng))}, {0, std::exp(U(rng))}}); };
  for (int k = 0; k < 10000; ++k) {
    auto a = rnd(), b = rnd(), c = rnd();
    REQUIRE(model_distance(X, a, c) <= model_distance(X, a, b) + model_distance(X, b, c) + 1e-9);
  }
}

TEST_CASE("systole projection caps line coordinates") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  auto in = pt({{0, 5}, {0, 3}});
  auto q = systole_projection(X, in);
  CHECK(q.c[1].y == 3.0);
  CHECK(is_in_systole_set(X, in, 0.1));
  auto out = pt({{0, 5}, {0, 100}});
  CHECK(systole_projection(X, out).c[1].y == doctest::Approx(10.0));
  CHECK_FALSE(is_in_systole_set(X, out, 0.1));
  auto out2 = pt({{0, 5}, {0, 1000}});
  CHECK(model_distance(X, systole_projection(X, out), systole_projection(X, out2)) == 0.0);
}

TEST_CASE("thick predicate") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  CHECK(is_thick(X, pt({{0, 1}, {0, 1}}), 0.5));
  CHECK_FALSE(is_thick(X, pt({{0, 3}, {0, 1}}), 0.5));
  CHECK(min_line_length(X, pt({{0, 1}, {0, 4}})) == doctest::Approx(0.25));
}

TEST_CASE("homotopy leaves paths inside the set alone") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  ModelPath p{{pt({{0, 1}, {0, 1}}), pt({{3, 2}, {0, 5}})}};
  auto h = weak_convexity_homotope(X, p, 1.0, 0.1);
  CHECK(h.modified == 0);
  CHECK(h.ratio == 1.0);
  CHECK(h.path.points.size() == 2);
}

TEST_CASE("homotopy of a line factor excursion does not lengthen the path") {
  ModelSpace X({line_factor(), line_factor()}, 0.1);
  ModelPath p{{pt({{0, 1}, {0, 1}}), pt({{0, 1000}, {0, 2}}), pt({{0, 2}, {0, 1}})}};
  auto h = weak_convexity_homotope(X, p, 1.0, 0.1);
  CHECK(h.modified > 0);
  CHECK(h.ratio <= 1.0);
  for (const auto& q : h.path.points) CHECK(is_in_systole_set(X, q, 0.1));
  // brute force: the shortest path in the capped set goes up to the cap and back
  double oracle = std::log(10.0) + (std::log(10.0) - std::log(2.0));
  CHECK(h.output_length >= oracle - 1e-9);
}

TEST_CASE("homotopy with injected error on mixed paths") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0, 1);
  double worst = 0;
  for (int k = 0; k < 300; ++k) {
    ModelPath p{{pt({{0, 1}, {0, 1}}), pt({{20 * U(rng), std::exp(6 * U(rng))}, {0, 10 * std::exp(2 * U(rng))}}),
                 pt({{0, std::exp(8.0)}, {0, 2}})}};
    auto h = weak_convexity_homotope(X, p, 1.0, 0.1, 0.01);
    for (const auto& q : h.path.points) REQUIRE(is_in_systole_set(X, q, 0.1));
    CHECK(model_distance(X, h.path.points.front(), p.points.front()) == 0.0);
    CHECK(model_distance(X, h.path.points.back(), p.points.back()) == 0.0);
    worst = std::max(worst, h.ratio);
  }
  CHECK(worst <= 1.05);
  ModelPath bad{{pt({{0, 1}, {0, 100}}), pt({{0, 1}, {0, 1}})}};
  CHECK_THROWS_AS(weak_convexity_homotope(X, bad, 1.0, 0.1), PreconditionError);
}

TEST_CASE("ball volume of a plane factor") {
  ModelSpace X({plane_factor()}, 0.1);
  NorburyModelMeasure mu(X);
  for (double R : {0.5, 1.0, 2.0}) {
    auto v = mc_ball_volume(mu, pt({{0.3, 2}}), R, 20000, 3);
    CHECK(std::abs(v.value - 2 * M_PI * (std::cosh(R) - 1)) <= 3 * v.stderr_ + 1e-9);
  }
}

TEST_CASE("ball volume with a line factor against quadrature") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  NorburyModelMeasure mu(X);
  using boost::math::quadrature::gauss_kronrod;
  for (double u : {1.0, 4.0, 9.0}) {
    const double R = 1.0;
    double hi = std::min(u * std::exp(R), 10.0);
    double line = gauss_kronrod<double, 61>::integrate(
        [](double v) { return NorburyModelMeasure::coth_weight(1 / v) / (v * v); }, u * std::exp(-R), hi, 15, 1e-13);
    double oracle = ball_area(R) * line;
    auto v = mc_ball_volume(mu, pt({{0, 1}, {0, u}}), R, 200000, 11, 2);
    CHECK(std::abs(v.value - oracle) <= 3 * v.stderr_);
  }
}

TEST_CASE("small balls see the density") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  NorburyModelMeasure mu(X);
  auto c = pt({{0, 2}, {0, 3}});
  const double R = 0.01;
  // Euclidean disc of radius y R in the plane chart, interval of length 2 u R in the line chart
  double predicted = mu.density(c) * (M_PI * std::pow(2 * R, 2)) * (2 * 3 * R);
  auto v = mc_ball_volume(mu, c, R, 20000, 1);
  CHECK(std::abs(v.value / predicted - 1) < 0.1);
}

TEST_CASE("coth weight sandwich") {
  for (double l = 0.1; l <= 5; l += 0.1) {
    CHECK(NorburyModelMeasure::coth_weight(l) >= 1.0);
    CHECK(NorburyModelMeasure::coth_weight(l) <= 1 / std::tanh(0.1) + 1e-12);
  }
}

TEST_CASE("active intervals") {
  ModelSpace X({plane_factor(), plane_factor()}, 0.1);
  ModelPath thick{{pt({{0, 1}, {0, 1}}), pt({{0, 1}, {0, 1}})}};
  for (const auto& v : active_intervals(X, thick, 0.5)) CHECK(v.empty());

  // straight up to e^3 in factor 0, flat in factor 1
  ModelPath up{{pt({{0, 1}, {0, 1}}), pt({{0, std::exp(3.0)}, {0, 1}})}};
  auto iv = active_intervals(X, up, 0.5);
  REQUIRE(iv[0].size() == 1);
  CHECK(iv[0][0].lo == doctest::Approx(std::log(2.0)));
  CHECK(iv[0][0].hi == doctest::Approx(3.0));
  CHECK(iv[1].empty());

  // a semicircle through the thin region: compare with dense sampling
  ModelPath arc{{pt({{-20, 1}, {0, 1}}), pt({{20, 1}, {-10, 1}})}};
  iv = active_intervals(X, arc, 0.5);
  REQUIRE(iv[0].size() == 1);
  const double L = arc.length(X);
  double lo = L, hi = 0;
  for (double s = 0; s <= L; s += 1e-4)
    if (arc.at(X, s).c[0].y > 2) lo = std::min(lo, s), hi = std::max(hi, s);
  CHECK(iv[0][0].lo == doctest::Approx(lo).epsilon(1e-3));
  CHECK(iv[0][0].hi == doctest::Approx(hi).epsilon(1e-3));

  // two factors thin on overlapping stretches are both reported
  ModelPath both{{pt({{0, 1}, {0, 1}}), pt({{0, std::exp(3.0)}, {0, std::exp(2.5)}})}};
  iv = active_intervals(X, both, 0.5);
  CHECK(iv[0].size() == 1);
  CHECK(iv[1].size() == 1);
}

TEST_CASE("Dehn twist projections grow linearly") {
  CHECK(dehn_twist_axis_projection_experiment(0, 0.5).diameter == doctest::Approx(0).epsilon(1e-12));
  double d4 = dehn_twist_axis_projection_experiment(4, 0.5).diameter;
  double d8 = dehn_twist_axis_projection_experiment(8, 0.5).diameter;
  CHECK(d4 >= 6);
  CHECK(d8 > d4 + 2);
  CHECK(dehn_twist_axis_projection_experiment(6, 0.5).disjoint);
}

TEST_CASE("model space validation") {
  CHECK_THROWS(ModelSpace({plane_factor()}, 0.0));
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  CHECK_THROWS(validate(X, pt({{0, 1}})));
  CHECK_THROWS(validate(X, pt({{0, 1}, {0, -1}})));
  CHECK(X.entropy_exponent() == doctest::Approx(1.0));
  CHECK(X.plane_count() == 1);
}
