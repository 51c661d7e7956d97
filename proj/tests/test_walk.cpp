#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "scclab/common.hpp"
#include "scclab/fuchsian.hpp"
#include "scclab/nets.hpp"
#include "scclab/walk.hpp"

using namespace scclab;

namespace {

const HalfPlaneNet& ball_net() {
  static const HalfPlaneNet net = build_net(BallRegion({0, 1}, 9), 1.0, 2);
  return net;
}

std::int32_t nearest_id(const HalfPlaneNet& net, const HalfPlanePoint& p) { return net.nearest(p, 5.0)->first; }

// Exact probability that an n-point walk has thin points s .. n-s-1, by
// propagating the distribution over net points.
double concave_probability(const HalfPlaneNet& net, std::int32_t start, double tau, const ThinRule& rule, int s,
                           int n) {
  std::vector<std::vector<std::int32_t>> nb(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) nb[i] = net.within(net.points[i], tau);
  std::vector<double> p(net.size(), 0.0);
  p[start] = 1;
  auto mask = [&](int i) {
    if (i < s || i + s >= n) return;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (!rule.thin(net.points[k])) p[k] = 0;
  };
  mask(0);
  for (int i = 1; i < n; ++i) {
    std::vector<double> q(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] == 0) continue;
      double w = p[k] / double(nb[k].size());
      for (auto j : nb[k]) q[j] += w;
    }
    p = std::move(q);
    mask(i);
  }
  double tot = 0;
  for (double v : p) tot += v;
  return tot;
}

}  // namespace

TEST_CASE("thin rules") {
  CHECK(ThinRule{0.5, ThinMode::strict, 5}.threshold() == doctest::Approx(2.0));
  CHECK(ThinRule{0.5, ThinMode::distance, 1}.threshold() == doctest::Approx(2 * std::exp(1.0)));
  CHECK_FALSE(ThinRule{0.0, ThinMode::strict, 5}.thin({0, 1e300}));
  CHECK(parse_thin_mode("strict") == ThinMode::strict);
  CHECK_THROWS(parse_thin_mode("sideways"));
  WalkConfig cfg;
  CHECK(cfg.s_param() == 2);
  cfg.tau = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("a step below the separation stays put") {
  const auto& net = ball_net();
  std::mt19937_64 rng(1);
  for (std::int32_t r = 0; r < 50; ++r) CHECK(step(net, r, 0.5, rng) == r);
}

TEST_CASE("steps are uniform over the candidates and never longer than tau") {
  const auto& net = ball_net();
  std::int32_t r = nearest_id(net, {0, 1});
  const double tau = 2.5;
  auto cand = net.within(net.points[r], tau);
  std::map<std::int32_t, long> hits;
  std::mt19937_64 rng(7);
  const long draws = 100000;
  for (long k = 0; k < draws; ++k) {
    auto nr = step(net, r, tau, rng);
    REQUIRE(distance(net.points[r], net.points[nr]) <= tau);
    ++hits[nr];
  }
  CHECK(hits.size() == cand.size());
  double expect = double(draws) / double(cand.size()), chi = 0;
  for (auto id : cand) chi += std::pow(double(hits[id]) - expect, 2) / expect;
  boost::math::chi_squared dist(double(cand.size() - 1));
  CHECK(boost::math::cdf(boost::math::complement(dist, chi)) > 0.01);
}

TEST_CASE("short trajectories are vacuously concave and nothing thin means no concave walks") {
  const auto& net = ball_net();
  WalkConfig cfg;
  cfg.tau = 2.5;
  cfg.mode = ThinMode::strict;
  cfg.trajectories = 2000;
  cfg.steps = {1, 2, 3, 4, 5, 6, 7};
  const int s = cfg.s_param();
  auto res = run_and_count_concave(net, nearest_id(net, {0, 1}), cfg);
  for (std::size_t i = 0; i < res.steps.size(); ++i)
    if (res.steps[i] <= 2 * s) CHECK(res.fractions[i] == 1.0);
  cfg.eps = 0;
  res = run_and_count_concave(net, nearest_id(net, {0, 1}), cfg);
  for (std::size_t i = 0; i < res.steps.size(); ++i)
    if (res.steps[i] > 2 * s) CHECK(res.concave[i] == 0);
}

TEST_CASE("finite net walk matches the exact distribution") {
  const auto& net = ball_net();
  WalkConfig cfg;
  cfg.tau = 5;
  cfg.eps = 0.5;
  cfg.mode = ThinMode::strict;
  cfg.trajectories = 20000;
  cfg.workers = 2;
  cfg.steps = {5, 6, 7};
  const auto start = nearest_id(net, {0, 1});
  auto res = run_and_count_concave(net, start, cfg);
  for (std::size_t i = 0; i < res.steps.size(); ++i) {
    double p = concave_probability(net, start, cfg.tau, cfg.rule(), res.s, res.steps[i]);
    double se = std::sqrt(p * (1 - p) / double(res.trajectories));
    CHECK(std::abs(res.fractions[i] - p) <= 4 * se + 1e-12);
  }
  CHECK(res.fractions[2] < res.fractions[0]);
  // deterministic per (seed, workers)
  cfg.trajectories = 3000;
  auto a = run_and_count_concave(net, start, cfg), b = run_and_count_concave(net, start, cfg);
  CHECK(a.concave == b.concave);
}

TEST_CASE("equivariant net on the genus two surface") {
  EquivariantNet net(genus2_surface_group(), 0.5, 5.0, 3);
  CHECK(net.separation() >= 0.5 - 1e-9);
  CHECK(net.circumradius() <= genus2_octagon_circumradius() + 1e-9);
  for (const auto& p : net.seeds()) CHECK(net.in_domain(p));
  CHECK(net.min_degree() > 1);
  CHECK(net.probe_covering_radius(2000, 4) <= 1.0);
  for (std::int32_t m = 0; m < static_cast<std::int32_t>(net.seeds().size()); ++m)
    for (const auto& nb : net.neighbors(m)) {
      REQUIRE(nb.distance <= 5.0);
      CHECK(distance(net.seeds()[m], apply(nb.h, net.seeds()[nb.m])) == doctest::Approx(nb.distance).epsilon(1e-9));
    }
  // heights along walks against the plain product of group elements in
  // 50 digit arithmetic, replaying the same neighbour choices
  using Big = boost::multiprecision::cpp_bin_float_50;
  std::mt19937_64 rng(1);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    auto st = net.start();
    Big a = 1, b = 0, c = 0, d = 1;
    for (int j = 0; j < 20; ++j) {
      std::mt19937_64 replay = rng;
      std::uniform_int_distribution<std::size_t> pick(0, net.neighbors(st.m).size() - 1);
      const auto& nb = net.neighbors(st.m)[pick(replay)];
      double len = -1;
      st = net.step(st, rng, &len);
      REQUIRE(len == nb.distance);
      REQUIRE(len <= 5.0);
      Big na = a * nb.h.a + b * nb.h.c, nbb = a * nb.h.b + b * nb.h.d;
      Big nc = c * nb.h.a + d * nb.h.c, nd = c * nb.h.b + d * nb.h.d;
      a = na, b = nbb, c = nc, d = nd;
      const auto& q = net.seeds()[st.m];
      Big re = c * q.x + d, im = c * q.y;
      Big y = (a * d - b * c) * q.y / (re * re + im * im);
      double rel = std::abs(static_cast<double>((Big(net.point(st).y) - y) / y));
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("surface group walk decays exponentially") {
  EquivariantNet net(genus2_surface_group(), 0.5, 5.0, 5);
  WalkConfig cfg;
  cfg.mode = ThinMode::strict;
  cfg.trajectories = 100000;
  auto res = run_and_count_concave(net, cfg);
  REQUIRE(res.fitted);
  CHECK(res.fit.slope <= -0.5);
  for (std::size_t i = 1; i < res.fractions.size(); ++i) CHECK(res.fractions[i] <= res.fractions[i - 1]);
}

TEST_CASE("discretized geodesics") {
  const auto& net = ball_net();
  ThinRule rule{0.5, ThinMode::strict, 5};
  SUBCASE("short segments give their two endpoints") {
    auto t = discretize_geodesic(GeodesicSegment({0, 1}, {0.5, 1.2}), net, 5, 1.0, rule);
    CHECK(t.size() == 2);
  }
  SUBCASE("a deep vertical excursion is thin in the middle") {
    auto t = discretize_geodesic(GeodesicSegment({0, 1}, {0, std::exp(8.5)}), net, 5, 1.0, rule);
    REQUIRE(t.size() >= 3);
    for (double d : t.steps) CHECK(d <= 5 + 1e-9);
    // everything past height e^2 snaps into the thin part
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t.points[i].y > std::exp(3.0)) CHECK(t.thin[i]);
  }
  SUBCASE("geodesics with the same discretization fellow travel") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    std::map<std::vector<std::int64_t>, std::vector<GeodesicSegment>> fibres;
    for (int k = 0; k < 400; ++k) {
      HalfPlanePoint a{0.3 * U(rng), std::exp(0.3 * U(rng))}, b{0.3 * U(rng), std::exp(7 + 0.3 * U(rng))};
      GeodesicSegment seg(a, b);
      fibres[discretize_geodesic(seg, net, 5, 1.0, rule).ids].push_back(seg);
    }
    for (const auto& [ids, segs] : fibres)
      for (const auto& s : segs) {
        CHECK(distance(s.p, segs[0].p) <= 4.0);
        CHECK(distance(s.q, segs[0].q) <= 4.0);
      }
  }
  SUBCASE("trajectory json") {
    auto t = discretize_geodesic(GeodesicSegment({0, 1}, {0, std::exp(6.0)}), net, 5, 1.0, rule);
    std::ostringstream os;
    t.write_json(os);
    CHECK(os.str().find("\"thin\"") != std::string::npos);
  }
}
