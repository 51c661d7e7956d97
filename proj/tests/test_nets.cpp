#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "scclab/common.hpp"
#include "scclab/fuchsian.hpp"
#include "scclab/nets.hpp"
#include "scclab/stats.hpp"

using namespace scclab;

namespace {

double min_pairwise(const HalfPlaneNet& net) {
  double m = INFINITY;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j) m = std::min(m, distance(net.points[i], net.points[j]));
  return m;
}

std::size_t brute_count(const HalfPlaneNet& net, const HalfPlanePoint& p, double R) {
  std::size_t n = 0;
  for (const auto& q : net.points) n += distance(p, q) <= R;
  return n;
}

}  // namespace

TEST_CASE("net of a point") {
  auto net = build_net(PointRegion({0.5, 2}), 0.3, 1);
  REQUIRE(net.size() == 1);
  CHECK(net.points[0].x == 0.5);
}

TEST_CASE("net size on a unit area patch lies between packing and covering bounds") {
  RectangleRegion patch(0, 2, 1, 2);  // hyperbolic area 1
  CHECK(patch.measure() == doctest::Approx(1.0));
  auto net = build_net(patch, 0.1, 7);
  double area = patch.measure();
  CHECK(double(net.size()) >= area / (M_PI * 0.1 * 0.1 * 4));
  CHECK(double(net.size()) <= area / (M_PI * 0.05 * 0.05));
  CHECK(min_pairwise(net) >= 0.1 - 1e-12);
  for (const auto& p : net.points) CHECK(patch.contains(p));
}

TEST_CASE("nets at different scales differ by a bounded factor") {
  BallRegion ball({0, 1}, 5);
  auto a = build_net(ball, 0.5, 1), b = build_net(ball, 1.0, 1);
  double ratio = double(a.size()) / double(b.size());
  // areas of eps/2 discs: (cosh(0.5) - 1) / (cosh(0.25) - 1) is about 4
  CHECK(ratio > 2.0);
  CHECK(ratio < 8.0);
}

TEST_CASE("net counts agree with brute force") {
  auto net = build_net(BallRegion({0, 1}, 4), 0.5, 3);
  CHECK(min_pairwise(net) >= 0.5 - 1e-12);
  for (double R : {0.3, 1.0, 2.5, 4.0}) CHECK(net.count({0, 1}, R) == brute_count(net, {0, 1}, R));
  CHECK(net_count(net, net.points[3], 0.4) == 1);
  auto w = net.within({0.2, 1.3}, 2.0);
  CHECK(w.size() == brute_count(net, {0.2, 1.3}, 2.0));
  auto nn = net.nearest({0.2, 1.3}, 2.0);
  REQUIRE(nn);
  double best = INFINITY;
  for (const auto& q : net.points) best = std::min(best, distance({0.2, 1.3}, q));
  CHECK(nn->second == doctest::Approx(best));
  CHECK(net.probe_covering_radius <= 2 * 0.5);
}

TEST_CASE("net entropy of the plane and of a horoball") {
  HalfPlanePoint p{0, 1};
  {
    auto net = build_net(BallRegion(p, 10), 1.0, 1);
    std::vector<double> radii;
    std::vector<std::size_t> counts;
    for (double R = 5; R <= 10; R += 0.5) radii.push_back(R), counts.push_back(net.count(p, R));
    CHECK(std::abs(fit_entropy(radii, counts).slope - 1.0) <= 0.15);
  }
  {
    auto net = build_net(HoroballBallRegion(p, 16, 1.0), 1.0, 1);
    std::vector<double> radii;
    std::vector<std::size_t> counts;
    for (double R = 6; R <= 16; R += 1) radii.push_back(R), counts.push_back(net.count(p, R));
    CHECK(std::abs(fit_entropy(radii, counts).slope - 0.5) <= 0.1);
  }
}

TEST_CASE("packing counts") {
  auto net = build_net(BallRegion({0, 1}, 5), 0.5, 2);
  auto small = verify_packing(net, 0.4);
  CHECK(small.max_count == 1);
  auto rep = verify_packing(net, 2.0, {}, 2);
  std::size_t brute = 0;
  for (const auto& c : net.points) brute = std::max(brute, brute_count(net, c, 2.0));
  CHECK(rep.max_count == brute);
  CHECK(double(rep.max_count) <= rep.covering_bound);
  CHECK(rep.covering_bound == doctest::Approx(ball_area(2.25) / ball_area(0.25)));
}

TEST_CASE("model net packing is stable between thick and thin centres") {
  ModelSpace X({plane_factor(), line_factor()}, 0.1);
  ModelPoint thick{{{0, 1}, {0, 1}}}, thin{{{0, 1}, {0, 9}}};
  auto a = build_model_net(X, thick, 3, 0.5, 1, 40000), b = build_model_net(X, thin, 3, 0.5, 1, 40000);
  auto pa = verify_packing(a, 1.0, {}), pb = verify_packing(b, 1.0, {});
  double r = double(pa.max_count) / double(pb.max_count);
  CHECK(r >= 0.8);
  CHECK(r <= 1.25);
}

TEST_CASE("good and bad net points") {
  auto G = modular_group();
  HalfPlanePoint p{0, 1};
  auto O = enumerate_orbit(G, p, 12.5);
  SUBCASE("orbit points are good") {
    HalfPlaneNet net;
    for (std::size_t i = 0; i < O.records.size(); ++i)
      if (O.records[i].distance <= 6) net.points.push_back(O.point(i));
    net.eps_n = 0;
    net.rebuild_index();
    auto c = classify_good_bad(net, O, 6, 0.2);
    CHECK(c.bad_count == 0);
    CHECK(c.good_count == c.net_ids.size());
  }
  SUBCASE("bad fraction falls and buckets grow polynomially") {
    auto net = build_net(BallRegion(p, 10), 1.0, 4);
    std::vector<double> fr, lr, lb;
    for (double R : {6.0, 8.0, 10.0}) {
      auto c = classify_good_bad(net, O, R, 0.2);
      fr.push_back(c.bad_fraction());
      lr.push_back(std::log(R));
      lb.push_back(std::log(double(c.max_bucket())));
      // nearest distances against brute force on a few points
      for (std::size_t i = 0; i < c.net_ids.size(); i += 1499) {
        double best = INFINITY;
        for (std::size_t j = 0; j < O.records.size(); ++j)
          if (O.records[j].distance <= R * 1.2) best = std::min(best, distance(net.points[c.net_ids[i]], O.point(j)));
        if (best <= R) CHECK(c.nearest_distance[i] == doctest::Approx(best));
      }
    }
    CHECK(fr[1] < fr[0]);
    CHECK(fr[2] < fr[1]);
    // area of a fundamental domain piece of radius eps_b R grows like exp(0.2 R)
    // in the worst case; log-log slope stays below a modest degree
    CHECK(linear_fit(lr, lb).slope <= 4.0);
    CHECK_THROWS_AS(classify_good_bad(net, O, 11, 0.2), PreconditionError);
  }
}

TEST_CASE("net csv round trip") {
  auto net = build_net(BallRegion({0, 1}, 2), 0.5, 1);
  std::stringstream ss;
  net.write_csv(ss);
  auto back = HalfPlaneNet::read_csv(ss);
  REQUIRE(back.size() == net.size());
  CHECK(back.points[5].x == doctest::Approx(net.points[5].x));
  CHECK(back.count({0, 1}, 1.0) == net.count({0, 1}, 1.0));
}
