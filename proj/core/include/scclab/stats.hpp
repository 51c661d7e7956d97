#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace scclab {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double lo = 0;  // approximate 95% interval for the slope
  double hi = 0;
  double r2 = 0;
  int n = 0;
};

// Ordinary least squares y = a + b x. Throws EstimationError on fewer than
// two points or zero spread in x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Weighted least squares; weights are inverse variances of y.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w);

struct MeanEstimate {
  double mean = 0;
  double stderr_ = 0;
  long long n = 0;
};

// Radical-inverse low discrepancy coordinate.
double halton(std::uint64_t index, unsigned base);

std::uint64_t splitmix64(std::uint64_t x);

// Seed for worker / trajectory k derived from a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

// Splits [0, n) into contiguous chunks, one per worker, and runs
// fn(worker, begin, end) on separate threads. The split depends only on
// n and workers, so results are reproducible per (seed, workers).
void parallel_for(std::size_t n, int workers,
                  const std::function<void(int, std::size_t, std::size_t)>& fn);

int default_workers();

}  // namespace scclab
