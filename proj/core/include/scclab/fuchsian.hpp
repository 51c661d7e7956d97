#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scclab/hyperbolic.hpp"

namespace scclab {

enum class GroupKind { lattice, cyclic_hyperbolic, parabolic, schottky, free_product, trivial };
std::string to_string(GroupKind k);
GroupKind parse_group_kind(const std::string& s);

// Boundary arc, counterclockwise from start to end, in Cayley angles.
struct BoundaryArc {
  double start = 0;
  double end = 0;
  bool contains(double theta) const;
};
bool arcs_disjoint(const BoundaryArc& a, const BoundaryArc& b);
double boundary_angle(double x);  // x may be +INFINITY

struct IntMatrix {
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  bool operator==(const IntMatrix&) const = default;
};

// How points are reduced to a fundamental domain for cusp-excursion tests.
struct DomainReducer {
  enum class Kind { none, modular, strip } kind = Kind::none;
  double width = 1.0;  // strip period
  HalfPlanePoint reduce(const HalfPlanePoint& p) const;
};

struct GroupPresentation {
  std::vector<Isometry> generators;   // closed under formal inversion
  std::vector<int> inverse_of;        // index of the inverse generator
  std::vector<std::string> names;
  GroupKind kind = GroupKind::trivial;
  std::optional<std::vector<IntMatrix>> integral;  // exact entries when available
  std::vector<BoundaryArc> domains;   // ping-pong domain per generator (if any)
  DomainReducer reducer;

  std::size_t size() const { return generators.size(); }
  bool has_domains() const { return !domains.empty() && domains.size() == generators.size(); }

  // Adds formal inverses. Involutions (g^2 = 1) are their own inverse.
  static GroupPresentation from_generators(const std::vector<Isometry>& gens, GroupKind kind,
                                           std::vector<std::string> names = {});
  static GroupPresentation from_integer_generators(const std::vector<IntMatrix>& gens, GroupKind kind,
                                                   std::vector<std::string> names = {});
};

GroupPresentation trivial_group();
// PSL(2,Z) generated by S and T.
GroupPresentation modular_group();
// <diag(q, 1/q)>, translation length 2 log q along the imaginary axis.
GroupPresentation cyclic_hyperbolic(double q, const HalfPlanePoint& basepoint = {0, 1});
GroupPresentation cyclic_hyperbolic(const Isometry& g, const HalfPlanePoint& basepoint = {0, 1});
// Genus two surface group: side pairings of the regular octagon with angles
// pi/4 centred at i. Its Dirichlet domain at i is that octagon.
GroupPresentation genus2_surface_group();
// Circumradius of that octagon.
double genus2_octagon_circumradius();
// <z -> z + t>
GroupPresentation parabolic(double t = 1.0);
// Schottky group from hyperbolic generators. Ping-pong domains are the
// half-planes cut off perpendicular to each axis at distance L/2 on either
// side of the projection of the basepoint. Throws InputError if they overlap.
GroupPresentation schottky(const std::vector<Isometry>& gens, const HalfPlanePoint& basepoint = {0, 1});
// Hyperbolic element translating by L along the diameter of the disc at angle
// theta (measured in the Cayley disc), as an isometry of the half-plane.
Isometry disc_axis_translation(double theta, double L);
Isometry power(const Isometry& g, int n);
double translation_length(const Isometry& g);

// Free product of two groups with ping-pong domains. A trivial factor
// returns the other unchanged. Throws DomainError if the combined domains
// overlap (free product not certified).
GroupPresentation free_product(const GroupPresentation& A, const GroupPresentation& B);

// Max over generators of d(p, g p).
double max_displacement(const GroupPresentation& G, const HalfPlanePoint& p);

struct OrbitRecord {
  Isometry g;
  double distance = 0;
  std::int32_t parent = -1;
  std::int16_t last = -1;  // last generator of the word
};

struct EnumerationOptions {
  std::size_t max_elements = 40'000'000;
  int workers = 1;
  double extra_margin = 0.0;  // added to the max generator displacement
};

class OrbitEnumeration {
 public:
  HalfPlanePoint basepoint;
  double radius = 0;
  std::vector<OrbitRecord> records;  // only elements with distance <= radius

  std::vector<int> word(std::size_t i) const;
  std::string word_string(std::size_t i, const GroupPresentation& G) const;
  HalfPlanePoint point(std::size_t i) const { return apply(records[i].g, basepoint); }
  // Number of recorded elements with distance <= R.
  std::size_t count(double R) const;
  const std::vector<double>& sorted_distances() const { return sorted_; }
  void write_csv(std::ostream& os, const GroupPresentation& G) const;

  // parent links refer to this table, which also holds the pruning shell
  std::vector<OrbitRecord> all;
  void finalize();

 private:
  std::vector<double> sorted_;
};

OrbitEnumeration enumerate_orbit(const GroupPresentation& G, const HalfPlanePoint& p, double R,
                                 const EnumerationOptions& opt = {});

struct ConcaveOptions {
  double epsilon = 0.5;         // thin means reduced height > 1/epsilon
  double spacing = 0.05;        // geodesic sampling step
  double thick_diameter = -1;   // negative: diameter of the truncated modular domain
  int workers = 1;
};

// Diameter of {|x| <= 1/2, |z| >= 1, y <= 1/epsilon}.
double modular_thick_diameter(double epsilon);

struct ConcaveCount {
  std::vector<double> radii;
  std::vector<std::size_t> concave;   // M_p(R)
  std::vector<std::size_t> total;     // N_p(R)
  double s = 0;                       // prefix / suffix length excluded
  std::optional<double> exponent;     // fitted slope of log M, when estimable
  std::vector<char> flags;            // per orbit record
};

ConcaveCount count_concave_lattice_points(const GroupPresentation& G, const OrbitEnumeration& orbit,
                                          const std::vector<double>& radii, const ConcaveOptions& opt = {});
// Whether the geodesic [p, g p] has a nonempty thin middle.
bool is_concave(const GroupPresentation& G, const HalfPlanePoint& p, const HalfPlanePoint& q, double s,
                const ConcaveOptions& opt);

enum class SeriesVerdict { convergent, divergent, inconclusive };
std::string to_string(SeriesVerdict v);

struct PoincareSeriesEstimate {
  double h = 0;
  std::vector<double> radii;
  std::vector<double> partial_sums;
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  double last_increment = 0;      // S(R_k) - S(R_{k-1})
  double decay_rate = 0;          // fitted rate of shell increments
  double remainder_estimate = 0;  // geometric extrapolation of the tail
  std::optional<double> critical_exponent;
};

struct SeriesOptions {
  double tolerance = 1e-4;  // relative remainder below which "convergent"
  double shell = 1.0;       // width of the radius shells for the increment fit
};

PoincareSeriesEstimate poincare_partial_sum(const OrbitEnumeration& orbit, double h, double R,
                                            const SeriesOptions& opt = {});

struct ExponentEstimate {
  double value = 0;
  double lo = 0;
  double hi = 0;
  std::vector<double> radii;
  std::vector<double> log_counts;
};

ExponentEstimate estimate_critical_exponent(const OrbitEnumeration& orbit, const std::vector<double>& radii);
ExponentEstimate estimate_critical_exponent(const GroupPresentation& G, const HalfPlanePoint& p,
                                            const std::vector<double>& radii, const EnumerationOptions& opt = {});

// Geometric lower bound for the free-product partial sum: the sum over
// alternating normal forms a1 b1 ... ak bk with total factor displacement
// at most R of exp(-h * total). Displacements are rounded up to a grid of
// width dx so the result never exceeds the exact bound.
double dirichlet_lower_bound(const OrbitEnumeration& A, const OrbitEnumeration& B, double h, double R,
                             double dx = 0.005);

// Parse a group presentation from key-value text:
//   kind = lattice
//   generator = a b c d        (rationals p/q or decimals)
//   reducer = modular | strip | none
GroupPresentation parse_group(std::istream& is);
GroupPresentation load_group(const std::string& path);

}  // namespace scclab
