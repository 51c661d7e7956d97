#include "scclab/witness.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "scclab/common.hpp"

namespace scclab {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(EdgeType t) {
  switch (t) {
    case EdgeType::SW: return "SW";
    case EdgeType::SE: return "SE";
    case EdgeType::P: return "P";
  }
  return "?";
}

EdgeType parse_edge_type(const std::string& s) {
  if (s == "SW") return EdgeType::SW;
  if (s == "SE") return EdgeType::SE;
  if (s == "P") return EdgeType::P;
  throw InputError("unknown edge type: " + s);
}

int WitnessGraph::add_vertex(double h, long long s, std::string name) {
  if (name.empty()) name = "v" + std::to_string(vertices.size());
  vertices.push_back({name, h, s});
  return size() - 1;
}

void WitnessGraph::add_edge(int from, int to, EdgeType t) { edges.push_back({from, to, t}); }

std::vector<std::vector<char>> WitnessGraph::nested_matrix() const {
  const int n = size();
  std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
  for (auto [a, b] : nesting) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw InputError("nesting pair out of range");
    if (a == b) throw InputError("a witness cannot be nested in itself");
    m[a][b] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (m[i][k])
        for (int j = 0; j < n; ++j)
          if (m[k][j]) m[i][j] = 1;
  for (int i = 0; i < n; ++i)
    if (m[i][i]) throw InputError("nesting relation has a cycle");
  return m;
}

std::vector<std::vector<char>> WitnessGraph::transverse_matrix() const {
  const int n = size();
  std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
  for (auto [a, b] : transverse) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw InputError("bad transverse pair");
    m[a][b] = m[b][a] = 1;
  }
  return m;
}

std::optional<EdgeType> WitnessGraph::edge(int a, int b) const {
  for (const auto& e : edges)
    if (e.from == a && e.to == b) return e.type;
  return std::nullopt;
}

void WitnessGraph::validate() const {
  const int n = size();
  for (const auto& v : vertices) {
    if (!(v.h > 0)) throw InputError("entropy label must be positive");
    if (v.s < 0) throw InputError("distance label must be nonnegative");
  }
  auto N = nested_matrix();
  auto T = transverse_matrix();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (T[i][j] && (N[i][j] || N[j][i])) throw InputError("a pair cannot be both nested and transverse");
  std::vector<std::vector<char>> seen(n, std::vector<char>(n, 0));
  for (const auto& e : edges) {
    if (e.from < 0 || e.to < 0 || e.from >= n || e.to >= n) throw InputError("edge endpoint out of range");
    if (e.from == e.to) throw InputError("edge endpoints must be distinct");
    if (seen[e.from][e.to]++) throw InputError("more than one edge for an ordered pair");
    switch (e.type) {
      case EdgeType::SW:
        if (!N[e.from][e.to]) throw InputError("SW edge between a non-nested pair");
        break;
      case EdgeType::SE:
        if (!N[e.to][e.from]) throw InputError("SE edge between a non-nested pair");
        break;
      case EdgeType::P:
        if (!T[e.from][e.to]) throw InputError("P edge between a non-transverse pair");
        break;
    }
  }
}

bool WitnessGraph::is_acyclic() const {
  const int n = size();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (const auto& e : edges) {
    out[e.from].push_back(e.to);
    ++indeg[e.to];
  }
  std::vector<int> q;
  for (int i = 0; i < n; ++i)
    if (!indeg[i]) q.push_back(i);
  int done = 0;
  while (!q.empty()) {
    int v = q.back();
    q.pop_back();
    ++done;
    for (int w : out[v])
      if (--indeg[w] == 0) q.push_back(w);
  }
  return done == n;
}

void WitnessGraph::write_json(std::ostream& os) const {
  nlohmann::json j;
  j["C"] = C;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices) j["vertices"].push_back({{"name", v.name}, {"h", v.h}, {"s", v.s}, {"N", v.N}, {"K", v.K}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges) j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"type", to_string(e.type)}});
  j["nesting"] = nesting;
  j["transverse"] = transverse;
  os << j.dump(2) << '\n';
}

WitnessGraph WitnessGraph::read_json(std::istream& is) {
  WitnessGraph g;
  try {
    nlohmann::json j = nlohmann::json::parse(is);
    g.C = j.value("C", 1.0);
    for (const auto& v : j.at("vertices")) {
      WitnessVertex w;
      w.name = v.value("name", "v" + std::to_string(g.vertices.size()));
      w.h = v.at("h").get<double>();
      w.s = v.at("s").get<long long>();
      w.N = v.value("N", 100.0);
      w.K = v.value("K", 1.0);
      g.vertices.push_back(w);
    }
    if (j.contains("edges"))
      for (const auto& e : j["edges"])
        g.edges.push_back({e.at("from").get<int>(), e.at("to").get<int>(), parse_edge_type(e.at("type").get<std::string>())});
    if (j.contains("nesting")) g.nesting = j["nesting"].get<std::vector<std::pair<int, int>>>();
    if (j.contains("transverse")) g.transverse = j["transverse"].get<std::vector<std::pair<int, int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed witness graph: ") + e.what());
  }
  g.validate();
  return g;
}

std::vector<AxiomResult> check_suborder_axioms(const WitnessGraph& g) {
  const int n = g.size();
  auto N = g.nested_matrix();
  auto T = g.transverse_matrix();
  std::vector<std::vector<int>> E(n, std::vector<int>(n, -1));
  for (const auto& e : g.edges) E[e.from][e.to] = static_cast<int>(e.type);
  auto sw = [&](int a, int b) { return E[a][b] == static_cast<int>(EdgeType::SW); };
  auto se = [&](int a, int b) { return E[a][b] == static_cast<int>(EdgeType::SE); };
  auto p = [&](int a, int b) { return E[a][b] == static_cast<int>(EdgeType::P); };
  // V is a minimal witness strictly containing W
  auto closure_is = [&](int w, int v) {
    if (!N[w][v]) return false;
    for (int u = 0; u < n; ++u)
      if (N[w][u] && N[u][v]) return false;
    return true;
  };

  std::vector<AxiomResult> out;
  AxiomResult a0{"assignment", true, {}}, a1{"i", true, {}}, a2{"ii", true, {}}, a3{"iii", true, {}}, a4{"iv", true, {}};
  auto fail = [](AxiomResult& r, std::vector<int> w) {
    if (r.holds) r.holds = false, r.witness = std::move(w);
  };
  for (int w = 0; w < n; ++w)
    for (int v = 0; v < n; ++v)
      if (N[w][v] && (sw(w, v) == se(v, w))) fail(a0, {w, v});
  for (int z = 0; z < n; ++z)
    for (int v = 0; v < n; ++v)
      for (int w = 0; w < n; ++w) {
        if (z == v || v == w || z == w) continue;
        if (N[z][v] && N[v][w] && sw(z, w) != sw(v, w)) fail(a1, {z, v, w});
        if (sw(z, v) && se(v, w) && !(T[z][w] && p(z, w))) fail(a2, {z, v, w});
        if ((sw(z, v) && p(v, w)) || (p(w, v) && se(v, z)))
          if (!T[z][w]) fail(a3, {z, v, w});
        if (sw(z, v) && closure_is(w, v) && p(w, z)) fail(a4, {z, v, w});
        if (se(v, z) && closure_is(w, v) && p(z, w)) fail(a4, {z, v, w});
      }
  return {a0, a1, a2, a3, a4};
}

bool all_hold(const std::vector<AxiomResult>& r) {
  return std::all_of(r.begin(), r.end(), [](const AxiomResult& a) { return a.holds; });
}

std::vector<std::vector<int>> enumerate_initial_subsets(const WitnessGraph& g) {
  if (!g.is_acyclic()) throw InputError("witness graph has a directed cycle");
  const int n = g.size();
  std::vector<std::vector<int>> preds(n);
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.to < 0 || e.from >= n || e.to >= n) throw InputError("edge endpoint out of range");
    preds[e.to].push_back(e.from);
  }
  // topological order so predecessors are decided first
  std::vector<int> order, indeg(n, 0);
  for (const auto& e : g.edges) ++indeg[e.to];
  std::vector<int> q;
  for (int i = n - 1; i >= 0; --i)
    if (!indeg[i]) q.push_back(i);
  while (!q.empty()) {
    int v = q.back();
    q.pop_back();
    order.push_back(v);
    for (const auto& e : g.edges)
      if (e.from == v && --indeg[e.to] == 0) q.push_back(e.to);
  }
  std::vector<std::vector<int>> out;
  std::vector<char> in(n, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::vector<int> s;
      for (int v = 0; v < n; ++v)
        if (in[v]) s.push_back(v);
      out.push_back(s);
      return;
    }
    int v = order[i];
    rec(i + 1);
    if (std::all_of(preds[v].begin(), preds[v].end(), [&](int u) { return in[u]; })) {
      in[v] = 1;
      rec(i + 1);
      in[v] = 0;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

namespace {

// Pair states: 0 none, 1..3 type from lower to higher index, 4..6 reversed.
struct EdgeConfigs {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> acyclic;
};

EdgeConfigs edge_configs(int m) {
  EdgeConfigs ec;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) ec.pairs.push_back({i, j});
  const int P = static_cast<int>(ec.pairs.size());
  std::vector<int> c(P, 0);
  std::function<void(int)> rec = [&](int k) {
    if (k == P) {
      std::vector<std::vector<int>> out(m);
      std::vector<int> indeg(m, 0);
      for (int t = 0; t < P; ++t) {
        if (!c[t]) continue;
        auto [a, b] = ec.pairs[t];
        if (c[t] > 3) std::swap(a, b);
        out[a].push_back(b);
        ++indeg[b];
      }
      std::vector<int> q;
      for (int i = 0; i < m; ++i)
        if (!indeg[i]) q.push_back(i);
      int done = 0;
      while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        ++done;
        for (int w : out[v])
          if (--indeg[w] == 0) q.push_back(w);
      }
      if (done == m) ec.acyclic.push_back(c);
      return;
    }
    for (int s = 0; s < 7; ++s) {
      c[k] = s;
      rec(k + 1);
    }
  };
  rec(0);
  return ec;
}

std::uint64_t fixed_edge_configs(const EdgeConfigs& ec, const std::vector<int>& perm) {
  const int m = static_cast<int>(perm.size());
  std::vector<std::vector<int>> index(m, std::vector<int>(m, -1));
  for (std::size_t t = 0; t < ec.pairs.size(); ++t) index[ec.pairs[t].first][ec.pairs[t].second] = static_cast<int>(t);
  std::uint64_t count = 0;
  for (const auto& c : ec.acyclic) {
    bool fixed = true;
    for (std::size_t t = 0; t < ec.pairs.size() && fixed; ++t) {
      auto [a, b] = ec.pairs[t];
      int pa = perm[a], pb = perm[b];
      int s = c[t];
      if (pa > pb) {
        std::swap(pa, pb);
        if (s) s = s > 3 ? s - 3 : s + 3;
      }
      if (c[index[pa][pb]] != s) fixed = false;
    }
    if (fixed) ++count;
  }
  return count;
}

// label assignments constant on cycles: cycle j of length len[j] takes one
// label (h, s) with s >= 1, total cost sum len h s <= budget
std::uint64_t label_count(const std::vector<int>& len, std::size_t j, double budget, const std::vector<double>& H) {
  constexpr double tol = 1e-9;
  if (j == len.size()) return 1;
  std::uint64_t total = 0;
  for (double h : H) {
    double unit = len[j] * h;
    if (j + 1 == len.size()) {
      double smax = std::floor(budget / unit + tol);
      if (smax >= 1) total += static_cast<std::uint64_t>(smax);
      continue;
    }
    for (long long s = 1; s * unit <= budget + tol; ++s) total += label_count(len, j + 1, budget - s * unit, H);
  }
  return total;
}

}  // namespace

std::uint64_t count_combinatorial_types(int k, double r, const std::vector<double>& H) {
  if (k < 0 || k > 4) throw DomainError("type counting supports at most 4 vertices");
  if (r < 0) throw DomainError("budget must be nonnegative");
  for (double h : H)
    if (!(h > 0)) throw DomainError("entropy labels must be positive");
  std::uint64_t total = 1;  // empty graph
  for (int m = 1; m <= k; ++m) {
    EdgeConfigs ec = edge_configs(m);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    unsigned __int128 sum = 0;
    std::uint64_t fact = 0;
    do {
      ++fact;
      std::vector<int> len;
      std::vector<char> seen(m, 0);
      for (int i = 0; i < m; ++i) {
        if (seen[i]) continue;
        int c = 0;
        for (int j = i; !seen[j]; j = perm[j]) seen[j] = 1, ++c;
        len.push_back(c);
      }
      std::uint64_t lab = label_count(len, 0, r, H);
      if (lab) sum += static_cast<unsigned __int128>(lab) * fixed_edge_configs(ec, perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    total += static_cast<std::uint64_t>(sum / fact);
  }
  return total;
}

double log_count_bound(const WitnessGraph& g, double eps_ent) {
  double s = 0;
  for (const auto& v : g.vertices) s += (v.h + eps_ent) * double(v.s);
  return s;
}

double count_bound(const WitnessGraph& g, double eps_ent) { return std::exp(log_count_bound(g, eps_ent)); }

CountBoundCheck check_count_bound(const WitnessGraph& g, double eps_r) {
  if (!(eps_r >= 0)) throw DomainError("eps_r must be nonnegative");
  CountBoundCheck c;
  if (g.vertices.empty()) return c;
  Rational hmin(g.vertices[0].h);
  for (const auto& v : g.vertices) hmin = std::min(hmin, Rational(v.h));
  Rational er(eps_r), eps = er * hmin, lhs = 0, budget = 0;
  for (const auto& v : g.vertices) {
    Rational h(v.h), s(v.s);
    lhs += (h + eps) * s;
    budget += h * s;
  }
  Rational limit = (1 + er) * budget;
  c.holds = lhs <= limit;
  c.eps_ent = static_cast<double>(eps);
  c.log_bound = static_cast<double>(lhs);
  c.budget = static_cast<double>(budget);
  c.limit = static_cast<double>(limit);
  return c;
}

namespace {
void check_segments(const std::vector<Segment>& segs) {
  for (const auto& s : segs)
    if (!(s.length >= 0) || !(s.exponent >= 0)) throw DomainError("segment lengths and exponents must be nonnegative");
}
}  // namespace

double complexity_length(const std::vector<Segment>& segs) {
  check_segments(segs);
  double L = 0;
  for (const auto& s : segs) L += s.exponent * s.length;
  return L;
}

double rescaled_complexity_length(const std::vector<Segment>& segs, double h_np) {
  if (!(h_np > 0)) throw DomainError("net point entropy must be positive");
  return complexity_length(segs) / h_np;
}

double total_length(const std::vector<Segment>& segs) {
  check_segments(segs);
  double R = 0;
  for (const auto& s : segs) R += s.length;
  return R;
}

std::string to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::holds: return "holds";
    case GapVerdict::fails: return "fails";
    case GapVerdict::not_applicable: return "not-applicable";
  }
  return "?";
}

GapResult linear_gap_check(const std::vector<Segment>& segs, double h, double eps_b, double h_sub, double tolerance) {
  if (!(h > 0)) throw DomainError("ambient exponent must be positive");
  if (!(eps_b >= 0)) throw DomainError("eps_b must be nonnegative");
  GapResult g;
  const double R = total_length(segs);
  g.required_c = eps_b * (1.0 - h_sub / h);
  if (!(R > 0) || !(h_sub < h)) return g;
  double tail = 0;
  for (auto it = segs.rbegin(); it != segs.rend() && it->exponent <= h_sub; ++it) tail += it->length;
  if (tail < eps_b * R * (1.0 - 1e-12)) return g;
  g.achieved_c = 1.0 - rescaled_complexity_length(segs, h) / R;
  g.verdict = g.achieved_c >= g.required_c - tolerance ? GapVerdict::holds : GapVerdict::fails;
  return g;
}

double cutoff(double x, double k) { return x <= k ? 0.0 : x; }

double rafi_distance(const RafiInput& in) {
  if (!(in.k > 0)) throw DomainError("threshold must be positive");
  auto nonneg = [](const std::vector<double>& v) {
    for (double d : v)
      if (!(d >= 0)) throw DomainError("distances must be nonnegative");
  };
  nonneg(in.nonannular);
  nonneg(in.annular);
  nonneg(in.gamma_two_sided);
  nonneg(in.gamma_one_sided);
  double total = 0;
  for (double d : in.nonannular) total += cutoff(d, in.k);
  for (double d : in.annular)
    if (d > 0) total += cutoff(std::log(d), in.k);
  auto vmax = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  total += vmax(in.gamma_two_sided);
  total += vmax(in.gamma_one_sided);
  auto short_term = [](const std::vector<double>& lens) {
    double m = 0;
    for (double l : lens) {
      if (!(l > 0)) throw DomainError("curve lengths must be positive");
      m = std::max(m, std::log(1.0 / l));
    }
    return m;
  };
  total += short_term(in.short_x);
  total += short_term(in.short_y);
  return total;
}

BadnessReport badness(const std::vector<std::vector<std::pair<double, double>>>& intervals, double R,
                      const std::vector<double>& KC, std::size_t max_witnesses) {
  if (!(R > 0)) throw InputError("total length must be positive");
  if (KC.size() != intervals.size()) throw InputError("one K_V C constant per witness is required");
  const double tol = 1e-12 * R;
  std::vector<double> cuts{0.0, R};
  for (const auto& iv : intervals)
    for (auto [a, b] : iv) {
      if (!(a <= b) || a < -tol || b > R + tol) throw InputError("interval outside [0, R] or reversed");
      cuts.push_back(std::clamp(a, 0.0, R));
      cuts.push_back(std::clamp(b, 0.0, R));
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const std::size_t n = intervals.size();
  BadnessReport rep;
  rep.R = R;
  rep.bad_length.assign(n, 0.0);
  rep.admissible_each.assign(n, 1);
  auto covers = [](const std::vector<std::pair<double, double>>& iv, double x) {
    for (auto [a, b] : iv)
      if (a <= x && x <= b) return true;
    return false;
  };
  for (std::size_t c = 1; c < cuts.size(); ++c) {
    double mid = 0.5 * (cuts[c - 1] + cuts[c]), len = cuts[c] - cuts[c - 1];
    std::size_t hits = 0;
    for (const auto& iv : intervals) hits += covers(iv, mid);
    if (hits < 2) continue;
    for (std::size_t v = 0; v < n; ++v)
      if (covers(intervals[v], mid)) rep.bad_length[v] += len;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!(KC[v] > 0)) throw InputError("K_V C must be positive");
    rep.admissible_each[v] = rep.bad_length[v] <= R / KC[v];
    rep.admissible = rep.admissible && rep.admissible_each[v];
  }
  rep.limited = n <= max_witnesses;
  return rep;
}

}  // namespace scclab
