#include "schlafli/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace schlafli {
namespace {

constexpr long kBlockSize = 8192;
std::atomic<int> g_threads{1};

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t block) : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~block))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

int default_threads() { return g_threads.load(); }
void set_default_threads(int threads) { g_threads.store(std::max(1, threads)); }

MeanEstimate mc_mean(long samples, std::uint64_t seed, const std::function<double(Rng&)>& draw, int threads) {
  MeanEstimate est;
  if (samples <= 0) return est;
  const long blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<double> sums(blocks, 0.0), sums2(blocks, 0.0);

  auto run_block = [&](long b) {
    Rng rng(seed, static_cast<std::uint64_t>(b));
    const long n = std::min(kBlockSize, samples - b * kBlockSize);
    double s = 0.0, s2 = 0.0;
    for (long i = 0; i < n; ++i) {
      const double x = draw(rng);
      s += x;
      s2 += x * x;
    }
    sums[b] = s;
    sums2[b] = s2;
  };

  const int workers = std::clamp<long>(threads > 0 ? threads : default_threads(), 1, blocks);
  if (workers == 1) {
    for (long b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (long b = next++; b < blocks; b = next++) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  double s = 0.0, s2 = 0.0;
  for (long b = 0; b < blocks; ++b) {
    s += sums[b];
    s2 += sums2[b];
  }
  const double n = static_cast<double>(samples);
  est.mean = s / n;
  est.samples = samples;
  if (samples > 1) {
    const double var = std::max(0.0, (s2 - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

}  // namespace schlafli
