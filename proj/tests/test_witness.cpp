#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "scclab/common.hpp"
#include "scclab/witness.hpp"

using namespace scclab;

namespace {

// Brute force evaluation of the suborder axioms straight from the edge list.
struct Brute {
  int n;
  std::set<std::pair<int, int>> nest, trans;
  std::map<std::pair<int, int>, EdgeType> e;

  explicit Brute(const WitnessGraph& g) : n(g.size()) {
    for (auto p : g.nesting) nest.insert(p);
    // close under transitivity by repeated passes
    for (bool grew = true; grew;) {
      grew = false;
      for (auto [a, b] : std::set<std::pair<int, int>>(nest))
        for (auto [c, d] : std::set<std::pair<int, int>>(nest))
          if (b == c && nest.insert({a, d}).second) grew = true;
    }
    for (auto [a, b] : g.transverse) trans.insert({a, b}), trans.insert({b, a});
    for (const auto& x : g.edges) e[{x.from, x.to}] = x.type;
  }
  bool N(int a, int b) const { return nest.count({a, b}); }
  bool T(int a, int b) const { return trans.count({a, b}); }
  bool has(int a, int b, EdgeType t) const {
    auto it = e.find({a, b});
    return it != e.end() && it->second == t;
  }
  bool minimal_over(int w, int v) const {
    if (!N(w, v)) return false;
    for (int u = 0; u < n; ++u)
      if (N(w, u) && N(u, v)) return false;
    return true;
  }
  std::map<std::string, bool> eval() const {
    std::map<std::string, bool> r{{"assignment", true}, {"i", true}, {"ii", true}, {"iii", true}, {"iv", true}};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (N(a, b) && has(a, b, EdgeType::SW) == has(b, a, EdgeType::SE)) r["assignment"] = false;
    for (int z = 0; z < n; ++z)
      for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
          if (z == v || v == w || z == w) continue;
          if (N(z, v) && N(v, w) && has(z, w, EdgeType::SW) != has(v, w, EdgeType::SW)) r["i"] = false;
          if (has(z, v, EdgeType::SW) && has(v, w, EdgeType::SE) && !(T(z, w) && has(z, w, EdgeType::P))) r["ii"] = false;
          bool pre = (has(z, v, EdgeType::SW) && has(v, w, EdgeType::P)) || (has(w, v, EdgeType::P) && has(v, z, EdgeType::SE));
          if (pre && !T(z, w)) r["iii"] = false;
          if (minimal_over(w, v) && ((has(z, v, EdgeType::SW) && has(w, z, EdgeType::P)) ||
                                     (has(v, z, EdgeType::SE) && has(z, w, EdgeType::P))))
            r["iv"] = false;
        }
    return r;
  }
};

// Distinct labelled acyclic configurations up to relabelling, by canonical
// forms over all permutations.
std::size_t brute_types(int k, int r, const std::vector<int>& H) {
  std::set<std::vector<int>> seen;
  std::size_t total = 1;
  for (int m = 1; m <= k; ++m) {
    std::vector<std::pair<int, int>> labels;
    for (int h : H)
      for (int s = 1; h * s <= r; ++s) labels.push_back({h, s});
    std::vector<int> lab(m, 0), edge(m * m, -1);
    std::vector<std::vector<int>> forms;
    std::set<std::vector<int>> canon;
    std::function<void(int)> rec_edges;
    auto emit = [&] {
      int cost = 0;
      for (int i = 0; i < m; ++i) cost += labels[lab[i]].first * labels[lab[i]].second;
      if (cost > r) return;
      // acyclic check
      std::vector<int> indeg(m, 0), order;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          if (edge[a * m + b] >= 0) ++indeg[b];
      std::vector<int> q;
      for (int i = 0; i < m; ++i)
        if (!indeg[i]) q.push_back(i);
      while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        order.push_back(v);
        for (int b = 0; b < m; ++b)
          if (edge[v * m + b] >= 0 && --indeg[b] == 0) q.push_back(b);
      }
      if (static_cast<int>(order.size()) != m) return;
      std::vector<int> perm(m), best;
      std::iota(perm.begin(), perm.end(), 0);
      do {
        std::vector<int> f;
        for (int i = 0; i < m; ++i) f.push_back(lab[perm[i]]);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) f.push_back(edge[perm[a] * m + perm[b]]);
        if (best.empty() || f < best) best = f;
      } while (std::next_permutation(perm.begin(), perm.end()));
      canon.insert(best);
    };
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) pairs.push_back({a, b});
    std::function<void(std::size_t)> pe = [&](std::size_t t) {
      if (t == pairs.size()) return emit();
      auto [a, b] = pairs[t];
      for (int st = 0; st < 7; ++st) {
        edge[a * m + b] = edge[b * m + a] = -1;
        if (st >= 1 && st <= 3) edge[a * m + b] = st - 1;
        if (st >= 4) edge[b * m + a] = st - 4;
        pe(t + 1);
      }
      edge[a * m + b] = edge[b * m + a] = -1;
    };
    std::function<void(int)> pl = [&](int i) {
      if (i == m) return pe(0);
      for (std::size_t l = 0; l < labels.size(); ++l) lab[i] = static_cast<int>(l), pl(i + 1);
    };
    if (!labels.empty()) pl(0);
    total += canon.size();
  }
  return total;
}

}  // namespace

TEST_CASE("complexity length") {
  CHECK(complexity_length({{3.0, 2.0}}) == doctest::Approx(6.0));
  CHECK(rescaled_complexity_length({{3.0, 2.0}}, 2.0) == doctest::Approx(3.0));
  const double R = 10, h = 2.5;
  std::vector<Segment> segs{{0.8 * R, h}, {0.2 * R, h - 1}};
  CHECK(complexity_length(segs) == doctest::Approx(h * R - 0.2 * R));
  CHECK(1 - rescaled_complexity_length(segs, h) / R == doctest::Approx(0.2 / h).epsilon(1e-14));
  CHECK(complexity_length({{0, 1}, {0, 3}}) == 0.0);
  CHECK_THROWS_AS(complexity_length({{-1, 1}}), DomainError);
}

TEST_CASE("linear gap checker") {
  auto g0 = linear_gap_check({{5, 3}, {5, 3}}, 3, 0.0, 2);
  CHECK(g0.verdict == GapVerdict::holds);
  CHECK(g0.achieved_c == doctest::Approx(0.0));
  CHECK(g0.required_c == 0.0);
  const double R = 7;
  auto g = linear_gap_check({{0.8 * R, 3}, {0.2 * R, 2}}, 3, 0.2, 2);
  CHECK(g.verdict == GapVerdict::holds);
  CHECK(std::abs(g.achieved_c - 0.2 / 3) < 1e-12);
  // tail above the cap: the gap check does not apply
  auto na = linear_gap_check({{0.8 * R, 2}, {0.2 * R, 3}}, 3, 0.2, 2);
  CHECK(na.verdict == GapVerdict::not_applicable);
  // a tail long enough but with a heavier head fails the gap
  auto f = linear_gap_check({{0.7 * R, 4}, {0.3 * R, 2}}, 3, 0.2, 2);
  CHECK(f.verdict == GapVerdict::fails);
}

TEST_CASE("suborder axioms") {
  WitnessGraph empty;
  CHECK(all_hold(check_suborder_axioms(empty)));

  // Z nested in V, W nested in V, SW Z->V and SE V->W but no P edge Z->W
  WitnessGraph g;
  int Z = g.add_vertex(1, 1, "Z"), V = g.add_vertex(1, 1, "V"), W = g.add_vertex(1, 1, "W");
  g.nesting = {{Z, V}, {W, V}};
  g.transverse = {{Z, W}};
  g.add_edge(Z, V, EdgeType::SW);
  g.add_edge(V, W, EdgeType::SE);
  auto r = check_suborder_axioms(g);
  auto ii = std::find_if(r.begin(), r.end(), [](const AxiomResult& a) { return a.axiom == "ii"; });
  REQUIRE(ii != r.end());
  CHECK_FALSE(ii->holds);
  CHECK(ii->witness == std::vector<int>{Z, V, W});
  g.add_edge(Z, W, EdgeType::P);
  r = check_suborder_axioms(g);
  CHECK(std::find_if(r.begin(), r.end(), [](const AxiomResult& a) { return a.axiom == "ii"; })->holds);
}

TEST_CASE("axiom checker agrees with brute force on random graphs") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coin(0, 3), pick(0, 2);
  for (int trial = 0; trial < 2000; ++trial) {
    WitnessGraph g;
    const int n = 5;
    for (int i = 0; i < n; ++i) g.add_vertex(1, 1);
    // nesting follows a random order so it stays acyclic
    std::vector<int> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::shuffle(ord.begin(), ord.end(), rng);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        int c = coin(rng);
        if (c == 0) g.nesting.push_back({ord[a], ord[b]});
        if (c == 1) g.transverse.push_back({ord[a], ord[b]});
      }
    auto N = g.nested_matrix();
    auto T = g.transverse_matrix();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b || coin(rng) == 0) continue;
        if (N[a][b] && pick(rng) == 0) g.add_edge(a, b, EdgeType::SW);
        else if (N[b][a] && pick(rng) == 0) g.add_edge(a, b, EdgeType::SE);
        else if (T[a][b] && !g.edge(b, a) && pick(rng) == 0) g.add_edge(a, b, EdgeType::P);
      }
    auto want = Brute(g).eval();
    for (const auto& a : check_suborder_axioms(g)) REQUIRE(a.holds == want.at(a.axiom));
  }
}

TEST_CASE("initial subsets") {
  WitnessGraph g;
  for (int i = 0; i < 4; ++i) g.add_vertex(1, 1);
  CHECK(enumerate_initial_subsets(g).size() == 16);
  WitnessGraph e;
  int u = e.add_vertex(1, 1), v = e.add_vertex(1, 1);
  e.transverse = {{u, v}};
  e.add_edge(u, v, EdgeType::P);
  auto s = enumerate_initial_subsets(e);
  REQUIRE(s.size() == 3);
  CHECK(s[0].empty());
  CHECK(s[1] == std::vector<int>{u});
  CHECK(s[2] == std::vector<int>{u, v});
  e.add_edge(v, u, EdgeType::P);
  CHECK_THROWS_AS(enumerate_initial_subsets(e), InputError);
}

TEST_CASE("combinatorial type counts against canonical forms") {
  CHECK(count_combinatorial_types(3, 0, {1, 2}) == 1);
  for (int r : {1, 2, 3, 5}) CHECK(count_combinatorial_types(3, r, {1, 2}) == brute_types(3, r, {1, 2}));
  CHECK(count_combinatorial_types(2, 4, {1}) == brute_types(2, 4, {1}));
  CHECK_THROWS(count_combinatorial_types(5, 1, {1}));
}

TEST_CASE("type counts grow polynomially") {
  std::vector<double> lr, lc;
  for (double r = 10; r <= 80; r += 10) {
    lr.push_back(std::log(r));
    lc.push_back(std::log(double(count_combinatorial_types(3, r, {1, 2}))));
  }
  // least squares slope
  double mx = std::accumulate(lr.begin(), lr.end(), 0.0) / lr.size(), my = std::accumulate(lc.begin(), lc.end(), 0.0) / lc.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lr.size(); ++i) sxy += (lr[i] - mx) * (lc[i] - my), sxx += (lr[i] - mx) * (lr[i] - mx);
  CHECK(sxy / sxx <= 6.0);
}

TEST_CASE("count bound") {
  WitnessGraph empty;
  CHECK(count_bound(empty, 0.3) == 1.0);
  WitnessGraph one;
  one.add_vertex(2, 5);
  CHECK(count_bound(one, 0) == doctest::Approx(std::exp(10.0)));
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> nv(1, 6), num(1, 40), den(1, 8), sv(0, 30);
  for (int t = 0; t < 1000; ++t) {
    WitnessGraph g;
    for (int i = nv(rng); i > 0; --i) g.add_vertex(double(num(rng)) / den(rng), sv(rng));
    auto c = check_count_bound(g, 0.1);
    CHECK(c.holds);
    CHECK(c.log_bound <= c.limit * (1 + 1e-12));
  }
}

TEST_CASE("cutoff and distance formula") {
  CHECK(cutoff(3, 5) == 0.0);
  CHECK(cutoff(7, 5) == 7.0);
  RafiInput in;
  in.k = 2;
  in.nonannular = {1.0, 1.9};
  in.annular = {std::exp(1.5)};
  in.gamma_two_sided = {4.2, 0.3};
  CHECK(rafi_distance(in) == doctest::Approx(4.2));
  in.gamma_one_sided = {0.7};
  CHECK(rafi_distance(in) == doctest::Approx(4.9));
  in.short_x = {0.01};
  CHECK(rafi_distance(in) == doctest::Approx(4.9 + std::log(100.0)));
  in.nonannular.push_back(-1);
  CHECK_THROWS_AS(rafi_distance(in), DomainError);
}

TEST_CASE("badness of contribution sets") {
  const double R = 10;
  auto d = badness({{{0, 3}}, {{4, 6}}, {{7, 10}}}, R, {10, 10, 10}, 5);
  for (double b : d.bad_length) CHECK(b == 0.0);
  CHECK(d.admissible);

  auto o = badness({{{0, 5}}, {{2, 7}}}, R, {10, 10}, 5);
  CHECK(o.bad_length[0] == doctest::Approx(3.0));
  CHECK_FALSE(o.admissible);  // 0.3 R > R / 10

  // nested layout: A covers [0, 0.6R], B inside A, C overlapping both
  std::vector<std::vector<std::pair<double, double>>> iv = {{{0, 6}}, {{2, 5}}, {{4, 9}}};
  auto n = badness(iv, R, {1, 1, 1}, 3);
  CHECK(n.bad_length[0] == doctest::Approx(4.0));
  CHECK(n.bad_length[1] == doctest::Approx(3.0));
  CHECK(n.bad_length[2] == doctest::Approx(2.0));
  // brute force sweep
  for (std::size_t v = 0; v < iv.size(); ++v) {
    double len = 0;
    const int steps = 100000;
    for (int i = 0; i < steps; ++i) {
      double x = (i + 0.5) * R / steps;
      auto in = [&](std::size_t w) { return iv[w][0].first <= x && x <= iv[w][0].second; };
      bool other = false;
      for (std::size_t w = 0; w < iv.size(); ++w) other = other || (w != v && in(w));
      if (in(v) && other) len += R / steps;
    }
    CHECK(n.bad_length[v] == doctest::Approx(len).epsilon(1e-3));
  }
  CHECK(badness(iv, R, {1, 1, 1}, 2).limited == false);
}

TEST_CASE("witness graph json round trip and validation") {
  WitnessGraph g;
  int a = g.add_vertex(1.5, 3), b = g.add_vertex(2, 1);
  g.nesting = {{a, b}};
  g.add_edge(a, b, EdgeType::SW);
  std::stringstream ss;
  g.write_json(ss);
  auto back = WitnessGraph::read_json(ss);
  CHECK(back.size() == 2);
  CHECK(back.edge(a, b) == EdgeType::SW);
  g.add_edge(b, a, EdgeType::P);
  CHECK_THROWS_AS(g.validate(), InputError);
  WitnessGraph cyc;
  cyc.add_vertex(1, 1);
  cyc.add_vertex(1, 1);
  cyc.nesting = {{0, 1}, {1, 0}};
  CHECK_THROWS_AS(cyc.nested_matrix(), InputError);
}
