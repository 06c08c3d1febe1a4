#pragma once

#include <cstdint>

namespace dsg {

// Counter-seeded random stream (xoshiro256++ core, splitmix64 expansion).
//
// A stream is fully determined by (seed, stream id), so ensembles can hand
// one stream per replicate and produce identical draws no matter how the
// replicates are scheduled across workers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  // Independent stream derived from this one's identity (not its state).
  RngStream substream(std::uint64_t tag) const;

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); safe to feed into log().
  double uniform();
  // Uniform on (lo, hi).
  double uniform(double lo, double hi);
  // Standard normal, Marsaglia polar method.
  double normal();
  // Standard exponential.
  double exponential();
  // Poisson(mean); inversion below kPoissonSwitch, PTRS rejection above.
  long poisson(double mean);
  // +/-1 with equal probability.
  int rademacher();
  // Uniform integer in {0, ..., n-1}, unbiased.
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static constexpr double kPoissonSwitch = 10.0;

 private:
  long poisson_inversion(double mean);
  long poisson_ptrs(double mean);

  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace dsg
