#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "scclab/common.hpp"
#include "scclab/fuchsian.hpp"

using namespace scclab;

namespace {

// Elements of PSL(2,Z) moving i by at most R, straight from the integer
// entries: 2 cosh d(i, g i) = a^2 + b^2 + c^2 + d^2.
std::size_t modular_count_oracle(double R) {
  const double lim = 2 * std::cosh(R);
  const long m = static_cast<long>(std::sqrt(lim)) + 1;
  std::size_t n = 0;
  for (long a = -m; a <= m; ++a)
    for (long b = -m; b <= m; ++b)
      for (long c = -m; c <= m; ++c) {
        double rest = lim - double(a * a + b * b + c * c);
        if (rest < 0) continue;
        // ad - bc = 1 fixes d when a != 0
        if (a != 0) {
          if ((1 + b * c) % a != 0) continue;
          long d = (1 + b * c) / a;
          if (double(d * d) <= rest) ++n;
        } else if (b * c == -1) {
          for (long d = -m; d <= m; ++d)
            if (double(d * d) <= rest) ++n;
        }
      }
  return n / 2;  // g and -g
}

}  // namespace

TEST_CASE("cyclic orbit counts") {
  auto G = cyclic_hyperbolic(std::exp(1.0));
  auto O = enumerate_orbit(G, {0, 1}, 9.5);
  for (double R : {0.5, 1.5, 2.5, 5.0, 9.0}) CHECK(O.count(R) == 2 * std::floor(R / 2) + 1);
}

TEST_CASE("modular group stabiliser of i by word enumeration") {
  // words of length <= 6 in S, T, T^-1, reduced to canonical integer matrices
  using M = std::tuple<long, long, long, long>;
  auto canon = [](long a, long b, long c, long d) {
    if (a < 0 || (a == 0 && b < 0)) a = -a, b = -b, c = -c, d = -d;
    return M{a, b, c, d};
  };
  std::set<M> seen{canon(1, 0, 0, 1)}, frontier = seen;
  const long gens[3][4] = {{0, -1, 1, 0}, {1, 1, 0, 1}, {1, -1, 0, 1}};
  for (int len = 0; len < 6; ++len) {
    std::set<M> next;
    for (auto [a, b, c, d] : frontier)
      for (auto& g : gens) {
        auto m = canon(a * g[0] + b * g[2], a * g[1] + b * g[3], c * g[0] + d * g[2], c * g[1] + d * g[3]);
        if (seen.insert(m).second) next.insert(m);
      }
    frontier = next;
  }
  std::size_t fixing = 0;
  for (auto [a, b, c, d] : seen) fixing += a == d && b == -c;
  CHECK(fixing == 2);
  auto O = enumerate_orbit(modular_group(), {0, 1}, 0.0);
  CHECK(O.count(1e-9) == fixing);
}

TEST_CASE("modular orbit counts match the integer matrix oracle") {
  auto O = enumerate_orbit(modular_group(), {0, 1}, 8.0);
  for (double R : {1.3, 3.7, 6.1, 7.9}) CHECK(O.count(R) == modular_count_oracle(R));
}

TEST_CASE("modular lattice exponent") {
  auto e = estimate_critical_exponent(modular_group(), {0, 1}, {6, 7, 8, 9, 10, 11, 12});
  CHECK(std::abs(e.value - 1.0) <= 0.15);
  CHECK(e.lo <= e.value);
  CHECK(e.value <= e.hi);
}

TEST_CASE("cyclic group has exponent zero") {
  auto e = estimate_critical_exponent(cyclic_hyperbolic(2.0), {0, 1}, {20, 30, 40, 50, 60});
  CHECK(std::abs(e.value) <= 0.05);
}

TEST_CASE("Schottky group exponent lies strictly between 0 and 1") {
  auto G = schottky({disc_axis_translation(0, 3), disc_axis_translation(M_PI / 2, 3)});
  auto e = estimate_critical_exponent(G, {0, 1}, {8, 9, 10, 11, 12, 13, 14});
  CHECK(e.value > 0);
  CHECK(e.value < 1);
}

TEST_CASE("Poincare partial sums") {
  SUBCASE("h = 0 counts orbit points") {
    auto O = enumerate_orbit(cyclic_hyperbolic(std::exp(1.0)), {0, 1}, 20);
    auto P = poincare_partial_sum(O, 0.0, 20);
    CHECK(P.partial_sums.back() == doctest::Approx(double(O.count(20))));
    CHECK(P.verdict != SeriesVerdict::convergent);
  }
  SUBCASE("modular group converges at h = 2") {
    auto O = enumerate_orbit(modular_group(), {0, 1}, 12);
    auto P = poincare_partial_sum(O, 2.0, 12);
    CHECK(P.verdict == SeriesVerdict::convergent);
    CHECK(P.last_increment < 1e-4);
    // direct summation
    double direct = 0;
    for (const auto& r : O.records) direct += std::exp(-2.0 * r.distance);
    CHECK(P.partial_sums.back() == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("free products") {
  auto B = schottky({disc_axis_translation(0, 3), disc_axis_translation(M_PI / 3, 3)});
  auto same = free_product(trivial_group(), B);
  CHECK(same.size() == B.size());
  CHECK(same.kind == B.kind);

  auto A = cyclic_hyperbolic(disc_axis_translation(2 * M_PI / 3, 3));
  auto H = free_product(A, B);
  CHECK(H.kind == GroupKind::free_product);
  CHECK(H.size() == A.size() + B.size());
  // ping-pong: domains pairwise disjoint
  for (std::size_t i = 0; i < H.domains.size(); ++i)
    for (std::size_t j = i + 1; j < H.domains.size(); ++j) CHECK(arcs_disjoint(H.domains[i], H.domains[j]));

  // axes too close together with short translations cannot be certified
  auto C = cyclic_hyperbolic(disc_axis_translation(0.05, 0.5));
  CHECK_THROWS(free_product(C, B));
}

TEST_CASE("free product exponent exceeds the factors and the series bound holds") {
  auto B = schottky({disc_axis_translation(0, 3), disc_axis_translation(M_PI / 3, 3)});
  auto A = cyclic_hyperbolic(disc_axis_translation(2 * M_PI / 3, 3));
  auto H = free_product(A, B);
  const double R = 12;
  auto OA = enumerate_orbit(A, {0, 1}, R), OB = enumerate_orbit(B, {0, 1}, R), OH = enumerate_orbit(H, {0, 1}, R);
  std::vector<double> radii;
  for (double r = 6; r <= R + 1e-9; r += 0.5) radii.push_back(r);
  double eB = estimate_critical_exponent(OB, radii).value, eH = estimate_critical_exponent(OH, radii).value;
  CHECK(eH - eB >= 0.1);
  for (double r = 1; r <= R; r += 1) {
    double s = poincare_partial_sum(OH, eB + 0.05, r).partial_sums.back();
    CHECK(s >= dirichlet_lower_bound(OA, OB, eB + 0.05, r));
  }
}

TEST_CASE("concave lattice points") {
  auto G = modular_group();
  auto O = enumerate_orbit(G, {0, 1}, 12);
  ConcaveOptions opt;
  auto cc = count_concave_lattice_points(G, O, {1.0, 2.0, 12.0}, opt);
  CHECK(cc.concave[0] == 0);
  CHECK(2 * cc.s > 1.0);
  CHECK(cc.concave[2] < cc.total[2]);
  CHECK(cc.total[2] == O.count(12.0));
}

TEST_CASE("parabolic orbit geodesics all enter the cusp") {
  auto G = parabolic(1.0);
  auto O = enumerate_orbit(G, {0, 1}, 12);
  ConcaveOptions opt;
  auto cc = count_concave_lattice_points(G, O, {12.0}, opt);
  // geodesic sampling oracle: the strip reducer keeps heights, so a middle
  // point above 1/eps is a thin excursion
  std::size_t oracle = 0;
  for (const auto& r : O.records) {
    GeodesicSegment seg({0, 1}, apply(r.g, {0, 1}));
    bool thin = false;
    for (double t = cc.s; t <= seg.length() - cc.s; t += 0.01) thin = thin || seg.at_distance(t).y > 1 / opt.epsilon;
    oracle += thin;
  }
  CHECK(cc.concave[0] == oracle);
  CHECK(cc.concave[0] <= O.count(12.0) - 1);
  CHECK(double(cc.concave[0]) >= 0.9 * double(O.count(12.0) - 1));
}

TEST_CASE("max displacement and translation length") {
  auto g = disc_axis_translation(0.4, 2.5);
  CHECK(translation_length(g) == doctest::Approx(2.5));
  CHECK(translation_length(power(g, 3)) == doctest::Approx(7.5));
  auto G = cyclic_hyperbolic(g);
  CHECK(max_displacement(G, {0, 1}) == doctest::Approx(2.5));
}

TEST_CASE("genus two group") {
  auto G = genus2_surface_group();
  CHECK(G.kind == GroupKind::lattice);
  CHECK(G.size() == 8);
  auto O = enumerate_orbit(G, {0, 1}, 2 * genus2_octagon_circumradius() + 0.5);
  // the octagon tiles with 8 copies around each vertex
  CHECK(O.count(2 * genus2_octagon_circumradius() + 0.01) > 8);
}

TEST_CASE("group parsing") {
  std::istringstream is("kind = lattice\ngenerator = 0 -1 1 0\ngenerator = 1 1 0 1\nreducer = modular\n");
  auto G = parse_group(is);
  CHECK(G.kind == GroupKind::lattice);
  auto O = enumerate_orbit(G, {0, 1}, 6);
  CHECK(O.count(6) == modular_count_oracle(6));
  std::istringstream bad("kind = lattice\ngenerator = 1 2 3\n");
  CHECK_THROWS(parse_group(bad));
}
