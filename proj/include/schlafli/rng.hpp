#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace schlafli {

/// Per-block generator. Streams are derived from (seed, block) with
/// splitmix64, so a Monte Carlo run gives identical results for any number
/// of worker threads.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t block);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box–Muller; platform independent).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Number of worker threads used by Monte Carlo routines when no explicit
/// count is passed (defaults to 1).
int default_threads();
void set_default_threads(int threads);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

/// Mean of `draw` over `samples` independent draws. Samples are split in
/// fixed blocks; block sums are combined in block order.
MeanEstimate mc_mean(long samples, std::uint64_t seed, const std::function<double(Rng&)>& draw,
                     int threads = 0);

}  // namespace schlafli
