#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scclab/fuchsian.hpp"
#include "scclab/hyperbolic.hpp"
#include "scclab/model.hpp"

namespace scclab {

// Region of the half-plane with a sampler driven by three uniform numbers.
// Samples follow the hyperbolic area measure; the sampler may reject.
class HalfPlaneRegion {
 public:
  virtual ~HalfPlaneRegion() = default;
  virtual bool contains(const HalfPlanePoint& p) const = 0;
  virtual std::optional<HalfPlanePoint> sample(const double u[3]) const = 0;
  virtual double measure() const = 0;
  virtual std::string describe() const = 0;
};

class PointRegion : public HalfPlaneRegion {
 public:
  explicit PointRegion(HalfPlanePoint p) : p_(p) {}
  bool contains(const HalfPlanePoint& p) const override { return p.x == p_.x && p.y == p_.y; }
  std::optional<HalfPlanePoint> sample(const double*) const override { return p_; }
  double measure() const override { return 0; }
  std::string describe() const override;

 private:
  HalfPlanePoint p_;
};

class BallRegion : public HalfPlaneRegion {
 public:
  BallRegion(HalfPlanePoint c, double R) : c_(c), R_(R) {}
  bool contains(const HalfPlanePoint& p) const override { return distance(c_, p) <= R_; }
  std::optional<HalfPlanePoint> sample(const double u[3]) const override;
  double measure() const override { return ball_area(R_); }
  std::string describe() const override;

 private:
  HalfPlanePoint c_;
  double R_;
};

// B_R(c) intersected with the horoball {y > level}.
class HoroballBallRegion : public HalfPlaneRegion {
 public:
  HoroballBallRegion(HalfPlanePoint c, double R, double level);
  bool contains(const HalfPlanePoint& p) const override { return p.y > level_ && distance(c_, p) <= R_; }
  std::optional<HalfPlanePoint> sample(const double u[3]) const override;
  double measure() const override { return area_; }
  std::string describe() const override;

 private:
  double chord(double y) const;
  HalfPlanePoint c_;
  double R_, level_;
  EuclideanDisc disc_;
  double ylo_, yhi_, kmax_, area_;
};

class RectangleRegion : public HalfPlaneRegion {
 public:
  RectangleRegion(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {}
  bool contains(const HalfPlanePoint& p) const override {
    return p.x >= x0_ && p.x <= x1_ && p.y >= y0_ && p.y <= y1_;
  }
  std::optional<HalfPlanePoint> sample(const double u[3]) const override;
  double measure() const override { return (x1_ - x0_) * (1 / y0_ - 1 / y1_); }
  std::string describe() const override;

 private:
  double x0_, x1_, y0_, y1_;
};

// Grid hash over bands of log y, with x cells scaled by the band height.
class HalfPlaneIndex {
 public:
  explicit HalfPlaneIndex(double cell = 1.0) : h_(cell) {}
  void insert(std::int32_t id, const HalfPlanePoint& p);
  // Calls fn(id) for every inserted point in cells meeting the Euclidean disc
  // of B_r(c); callers filter by exact distance.
  template <class Fn>
  void candidates(const HalfPlanePoint& c, double r, Fn&& fn) const;
  double cell() const { return h_; }

 private:
  using Key = std::pair<std::int64_t, std::int64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& c) const {
      std::uint64_t h = static_cast<std::uint64_t>(c.first) * 0x9e3779b97f4a7c15ULL;
      h ^= static_cast<std::uint64_t>(c.second) + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };
  static Key key(std::int64_t k, std::int64_t j) { return {k, j}; }
  double h_;
  std::unordered_map<Key, std::vector<std::int32_t>, KeyHash> cells_;
  std::unordered_map<std::int64_t, std::set<std::int64_t>> bands_;
};

template <class Fn>
void HalfPlaneIndex::candidates(const HalfPlanePoint& c, double r, Fn&& fn) const {
  EuclideanDisc d = ball_disc(c, r);
  double ylo = c.y * std::exp(-r), yhi = c.y * std::exp(r);
  std::int64_t k0 = static_cast<std::int64_t>(std::floor(std::log(ylo) / h_));
  std::int64_t k1 = static_cast<std::int64_t>(std::floor(std::log(yhi) / h_));
  for (std::int64_t k = k0; k <= k1; ++k) {
    // same expression as insert() so cell boundaries agree exactly
    double base = std::exp(k * h_);
    double ya = std::max(ylo, base), yb = std::min(yhi, std::exp((k + 1) * h_));
    double gap = d.cy < ya ? ya - d.cy : (d.cy > yb ? d.cy - yb : 0.0);
    double w = std::sqrt(std::max(0.0, d.radius * d.radius - gap * gap));
    double width = h_ * base;
    std::int64_t j0 = static_cast<std::int64_t>(std::floor((d.cx - w) / width));
    std::int64_t j1 = static_cast<std::int64_t>(std::floor((d.cx + w) / width));
    if (j1 - j0 <= 32) {
      for (std::int64_t j = j0; j <= j1; ++j) {
        auto it = cells_.find(key(k, j));
        if (it == cells_.end()) continue;
        for (std::int32_t id : it->second) fn(id);
      }
      continue;
    }
    // wide query: walk only the occupied cells of this band
    auto band = bands_.find(k);
    if (band == bands_.end()) continue;
    for (auto it = band->second.lower_bound(j0); it != band->second.end() && *it <= j1; ++it) {
      auto cell = cells_.find(key(k, *it));
      for (std::int32_t id : cell->second) fn(id);
    }
  }
}

struct NetOptions {
  double oversample = 10.0;  // samples per eps_n^2 of area
  std::size_t min_samples = 1000;
  std::size_t max_samples = 20'000'000;
  std::size_t probes = 10'000;
};

class HalfPlaneNet {
 public:
  std::vector<HalfPlanePoint> points;
  double eps_n = 0;
  std::string region;
  double probe_covering_radius = 0;  // max probe distance to the net
  std::vector<std::string> warnings;

  void rebuild_index();
  std::size_t size() const { return points.size(); }
  std::size_t count(const HalfPlanePoint& p, double R) const;
  std::vector<std::int32_t> within(const HalfPlanePoint& p, double R) const;
  // Nearest net point, searching out to max_radius; nullopt if none.
  std::optional<std::pair<std::int32_t, double>> nearest(const HalfPlanePoint& p, double max_radius) const;
  void write_csv(std::ostream& os) const;
  static HalfPlaneNet read_csv(std::istream& is);

 private:
  std::shared_ptr<HalfPlaneIndex> index_;
};

HalfPlaneNet build_net(const HalfPlaneRegion& region, double eps_n, std::uint64_t seed, const NetOptions& opt = {});
std::size_t net_count(const HalfPlaneNet& net, const HalfPlanePoint& p, double R);

struct EntropyEstimate {
  std::string source;  // "h_NP" or "h_LP"
  std::vector<double> radii;
  std::vector<double> log_counts;
  double slope = 0;
  double lo = 0;
  double hi = 0;
};

EntropyEstimate fit_entropy(const std::vector<double>& radii, const std::vector<std::size_t>& counts,
                            const std::string& source = "h_NP");

struct PackingReport {
  std::size_t max_count = 0;
  std::size_t min_count = 0;
  std::size_t centers = 0;
  double covering_bound = 0;  // area(B_{C + eps/2}) / area(B_{eps/2})
};

// Scans balls of radius C about the given net points (all points if empty).
PackingReport verify_packing(const HalfPlaneNet& net, double C, const std::vector<std::int32_t>& centers = {},
                             int workers = 1);

struct GoodBadClassification {
  double R = 0;
  double eps_b = 0;
  std::vector<std::int32_t> net_ids;   // net points inside B_R(p)
  std::vector<double> nearest_distance;
  std::vector<std::int32_t> nearest_record;  // index into the orbit records
  std::vector<char> good;
  std::size_t good_count = 0;
  std::size_t bad_count = 0;
  std::unordered_map<std::int32_t, std::size_t> buckets;  // good points per nearest element
  double bad_fraction() const;
  std::size_t max_bucket() const;
};

GoodBadClassification classify_good_bad(const HalfPlaneNet& net, const OrbitEnumeration& orbit, double R,
                                        double eps_b, int workers = 1);

// Model-space nets over a sup-metric ball intersected with the systole set.
struct ModelNet {
  const ModelSpace* space = nullptr;
  std::vector<ModelPoint> points;
  double eps_n = 0;
  std::size_t count(const ModelPoint& p, double R) const;
  void write_csv(std::ostream& os) const;
};

ModelNet build_model_net(const ModelSpace& X, const ModelPoint& center, double R, double eps_n, std::uint64_t seed,
                         std::size_t samples);
PackingReport verify_packing(const ModelNet& net, double C, const std::vector<std::int32_t>& centers);

}  // namespace scclab
