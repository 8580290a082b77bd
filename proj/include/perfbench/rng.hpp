#pragma once

#include <array>
#include <cstdint>

namespace perfbench::rng {

/// Philox4x32-10 keyed block function (Salmon et al., SC 2011).
/// Maps a 128-bit counter and 64-bit key to 128 bits of output.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

/// One independent random stream out of 2^64 per seed.
///
/// The key is the 64-bit seed; counter words 2..3 hold the stream id and
/// words 0..1 the running block index. Draws from (seed, stream) depend on
/// nothing else, so replicate r of a Monte Carlo job can be produced by any
/// process that knows (seed, r) and always yields the same values.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0, 1).
  double next_uniform();

  /// Standard normal via the Marsaglia polar method.
  double next_normal();

  /// Poisson(lambda), lambda > 0. Inversion by sequential search; large
  /// means are split into sums of smaller Poisson draws to keep the
  /// partial sums well inside double range.
  std::int64_t next_poisson(double lambda);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // empty
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace perfbench::rng
