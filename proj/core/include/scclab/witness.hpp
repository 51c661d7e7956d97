#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scclab {

// SW: a -> b means a nested in b, progress in a first.
// SE: a -> b means b nested in a, progress in a first.
// P:  a -> b means a and b transverse, a before b.
enum class EdgeType { SW, SE, P };
std::string to_string(EdgeType t);
EdgeType parse_edge_type(const std::string& s);

struct WitnessVertex {
  std::string name;
  double h = 1.0;  // entropy exponent
  long long s = 0;
  double N = 100;  // N_V
  double K = 1;    // K_V
};

struct WitnessEdge {
  int from = 0;
  int to = 0;
  EdgeType type = EdgeType::P;
};

class WitnessGraph {
 public:
  std::vector<WitnessVertex> vertices;
  std::vector<WitnessEdge> edges;
  std::vector<std::pair<int, int>> nesting;     // (a, b): a nested in b
  std::vector<std::pair<int, int>> transverse;  // unordered pairs
  double C = 1.0;

  int size() const { return static_cast<int>(vertices.size()); }
  int add_vertex(double h, long long s, std::string name = {});
  void add_edge(int from, int to, EdgeType t);

  // Throws InputError on a nesting cycle or a violated edge invariant.
  void validate() const;
  // Transitive closure of the nesting input; throws InputError on cycles.
  std::vector<std::vector<char>> nested_matrix() const;
  std::vector<std::vector<char>> transverse_matrix() const;
  // edge type from a to b, if any
  std::optional<EdgeType> edge(int a, int b) const;
  bool is_acyclic() const;

  void write_json(std::ostream& os) const;
  static WitnessGraph read_json(std::istream& is);
};

struct AxiomResult {
  std::string axiom;  // "assignment", "i", "ii", "iii", "iv"
  bool holds = true;
  std::vector<int> witness;  // offending vertices on failure
};

std::vector<AxiomResult> check_suborder_axioms(const WitnessGraph& g);
bool all_hold(const std::vector<AxiomResult>& r);

// Vertex sets with no edge from the complement into the set.
std::vector<std::vector<int>> enumerate_initial_subsets(const WitnessGraph& g);

// Labelled acyclic graphs on at most k vertices, labels (h in H, s >= 0)
// with sum h s <= r, each vertex pair carrying no edge or one typed
// directed edge, counted up to label preserving isomorphism. k <= 4.
std::uint64_t count_combinatorial_types(int k, double r, const std::vector<double>& H);

// Product over vertices of exp((h + eps_ent) s), and its logarithm.
double count_bound(const WitnessGraph& g, double eps_ent);
double log_count_bound(const WitnessGraph& g, double eps_ent);

struct CountBoundCheck {
  bool holds = true;
  double eps_ent = 0;   // eps_r times the smallest h
  double log_bound = 0; // sum (h + eps_ent) s
  double budget = 0;    // sum h s
  double limit = 0;     // (1 + eps_r) budget
};

// Exact rational check of sum (h + eps_ent) s <= (1 + eps_r) sum h s with
// eps_ent = eps_r * min h.
CountBoundCheck check_count_bound(const WitnessGraph& g, double eps_r);

struct Segment {
  double length = 0;
  double exponent = 0;
};

double complexity_length(const std::vector<Segment>& segs);
double rescaled_complexity_length(const std::vector<Segment>& segs, double h_np);
double total_length(const std::vector<Segment>& segs);

enum class GapVerdict { holds, fails, not_applicable };
std::string to_string(GapVerdict v);

struct GapResult {
  GapVerdict verdict = GapVerdict::not_applicable;
  double achieved_c = 0;  // 1 - rescaled / R
  double required_c = 0;  // eps_b (1 - h_sub / h)
};

GapResult linear_gap_check(const std::vector<Segment>& segs, double h, double eps_b, double h_sub,
                           double tolerance = 1e-12);

double cutoff(double x, double k);

struct RafiInput {
  std::vector<double> nonannular;       // d_Y
  std::vector<double> annular;          // d_alpha for two-sided curves outside Gamma
  std::vector<double> gamma_two_sided;  // plane factor distances
  std::vector<double> gamma_one_sided;  // line factor distances
  std::vector<double> short_x;          // lengths short only at x
  std::vector<double> short_y;
  double k = 1.0;
};

double rafi_distance(const RafiInput& in);

struct BadnessReport {
  double R = 0;
  std::vector<double> bad_length;
  std::vector<char> admissible_each;
  bool admissible = true;
  bool limited = true;
};

// intervals[v] is the contribution set of witness v inside [0, R].
BadnessReport badness(const std::vector<std::vector<std::pair<double, double>>>& intervals, double R,
                      const std::vector<double>& KC, std::size_t max_witnesses);

}  // namespace scclab
