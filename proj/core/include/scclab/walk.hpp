#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "scclab/fuchsian.hpp"
#include "scclab/hyperbolic.hpp"
#include "scclab/nets.hpp"
#include "scclab/stats.hpp"

namespace scclab {

// strict: thin iff y > 1/eps. distance: thin iff the point is at least tau
// away from {y <= 1/eps}, i.e. y >= e^tau / eps.
enum class ThinMode { strict, distance };
std::string to_string(ThinMode m);
ThinMode parse_thin_mode(const std::string& s);

struct ThinRule {
  double eps = 0.5;  // eps = 0 makes nothing thin
  ThinMode mode = ThinMode::distance;
  double tau = 0;
  double threshold() const;
  bool thin(const HalfPlanePoint& p) const { return p.y > threshold(); }
};

struct WalkConfig {
  double tau = 5.0;
  double eps = 0.5;
  ThinMode mode = ThinMode::distance;
  double thick_diameter = 4.0;
  std::vector<int> steps;        // trajectory lengths n to report; empty: 2s+1 .. 2s+8
  std::size_t trajectories = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t log_trajectories = 0;  // how many trajectories to keep for logging

  int s_param() const;  // ceil(thick_diameter / tau) + 1
  ThinRule rule() const { return {eps, mode, tau}; }
  void validate() const;
};

struct Trajectory {
  std::vector<HalfPlanePoint> points;
  std::vector<std::int64_t> ids;  // net point ids (translate-local for equivariant nets)
  std::vector<double> steps;      // distances between consecutive points
  std::vector<char> thin;

  std::size_t size() const { return points.size(); }
  // Points s .. n-s-1 all thin-tagged; vacuous when n <= 2s.
  bool concave(int s, std::size_t n) const;
  void write_json(std::ostream& os) const;
};

// Uniform step among the net points within tau of net point r.
std::int32_t step(const HalfPlaneNet& net, std::int32_t r, double tau, std::mt19937_64& rng);

// Net Gamma * M for a cocompact group, with M a finite set in the Dirichlet
// domain at i. Neighbour tables for one step radius are precomputed.
class EquivariantNet {
 public:
  // Translate lift(z) * r of seed m. Keeping the large part upper triangular
  // makes heights exact products along the walk; a plain product of group
  // elements loses all precision after a dozen steps.
  struct State {
    HalfPlanePoint z{0, 1};
    Isometry r;  // rotation about i
    std::int32_t m = 0;
    Isometry isometry() const { return lift(z) * r; }
  };
  struct Neighbor {
    Isometry h;
    std::int32_t m = 0;
    double distance = 0;
  };

  EquivariantNet(const GroupPresentation& G, double eps_n, double tau, std::uint64_t seed = 1,
                 std::size_t samples = 0);

  const std::vector<HalfPlanePoint>& seeds() const { return seeds_; }
  double eps_n() const { return eps_n_; }
  double tau() const { return tau_; }
  double circumradius() const { return rho_; }
  HalfPlanePoint point(const State& s) const;
  const std::vector<Neighbor>& neighbors(std::int32_t m) const { return table_[m]; }
  std::size_t max_degree() const;
  std::size_t min_degree() const;
  State start() const;  // seed point nearest to i
  // Picks a neighbour uniformly; its table distance goes to *length if given.
  State step(const State& s, std::mt19937_64& rng, double* length = nullptr) const;
  // Min distance between distinct points of the net near the domain.
  double separation() const { return separation_; }
  // Max distance from probe points of the domain to the net.
  double probe_covering_radius(std::size_t probes, std::uint64_t seed) const;
  bool in_domain(const HalfPlanePoint& z) const;

 private:
  GroupPresentation G_;
  double eps_n_, tau_, rho_;
  std::vector<Isometry> faces_;  // face pairings
  std::vector<Isometry> near_;   // elements moving i by at most 2 rho + eps_n
  std::vector<HalfPlanePoint> seeds_;
  std::vector<std::vector<Neighbor>> table_;
  double separation_ = 0;
};

struct WalkResult {
  int s = 0;
  std::vector<int> steps;
  std::vector<std::size_t> concave;
  std::size_t trajectories = 0;
  std::vector<double> fractions;
  LinearFit fit;      // log fraction against n over points with hits
  bool fitted = false;
  std::vector<std::string> warnings;
  std::vector<Trajectory> logged;
};

WalkResult run_and_count_concave(const EquivariantNet& net, const WalkConfig& cfg);
// Same on a finite net; trajectories reaching a point with no neighbours
// raise WalkError.
WalkResult run_and_count_concave(const HalfPlaneNet& net, std::int32_t start, const WalkConfig& cfg);

// Marks points along the segment at spacing tau - 2 eps_n and snaps each to
// its nearest net point. A pair of consecutive snapped points further than
// tau apart gets an extra mark between them.
Trajectory discretize_geodesic(const GeodesicSegment& seg, const HalfPlaneNet& net, double tau, double eps_n,
                               const ThinRule& rule);

}  // namespace scclab
