#include "scclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "scclab/common.hpp"

namespace scclab {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw EstimationError("linear_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) throw EstimationError("linear_fit: x values have no spread");
  LinearFit f;
  f.n = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - rss / syy : 1.0;
  f.slope_stderr = x.size() > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  f.lo = f.slope - 1.96 * f.slope_stderr;
  f.hi = f.slope + 1.96 * f.slope_stderr;
  return f;
}

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw EstimationError("weighted_linear_fit: need at least two points");
  double sw = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(w[i] >= 0)) throw EstimationError("weighted_linear_fit: negative weight");
    sw += w[i];
    mx += w[i] * x[i];
    my += w[i] * y[i];
  }
  if (!(sw > 0)) throw EstimationError("weighted_linear_fit: zero total weight");
  mx /= sw;
  my /= sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) throw EstimationError("weighted_linear_fit: x values have no spread");
  LinearFit f;
  f.n = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    rss += w[i] * r * r;
  }
  f.r2 = syy > 0 ? 1.0 - rss / syy : 1.0;
  // weights are inverse variances, so 1/sxx is the slope variance
  f.slope_stderr = std::sqrt(1.0 / sxx);
  f.lo = f.slope - 1.96 * f.slope_stderr;
  f.hi = f.slope + 1.96 * f.slope_stderr;
  return f;
}

double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) { return splitmix64(seed + k); }

void parallel_for(std::size_t n, int workers,
                  const std::function<void(int, std::size_t, std::size_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t b = std::min(n, w * chunk), e = std::min(n, b + chunk);
    if (b >= e) continue;
    pool.emplace_back([&, w, b, e] {
      try {
        fn(w, b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int default_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace scclab
