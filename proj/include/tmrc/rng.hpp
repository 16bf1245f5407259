#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace tmrc {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the
/// output is a pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream. The key is the 64-bit seed, the upper half of
/// the 128-bit counter is the stream id, and the lower half counts blocks. Two
/// streams with the same (seed, stream_id) produce identical sequences no
/// matter which thread draws them or in what order streams are visited.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t blocks_drawn() const noexcept { return block_; }

  std::array<std::uint32_t, 4> next_block() noexcept;

  /// Two independent uniforms in the open interval (0, 1), 53 bits each.
  std::array<double, 2> next_uniform_pair() noexcept;
  double next_uniform() noexcept { return next_uniform_pair()[0]; }

  /// Two independent standard normals (Box-Muller on one block).
  std::array<double, 2> next_normal_pair() noexcept;

  /// Fills `out` with standard normals. Consumes ceil(size/2) blocks; for odd
  /// sizes the second normal of the last block is dropped, so the block count
  /// per call is fixed by the size alone.
  void fill_normals(std::span<double> out) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
};

/// Stream id for replicate `replicate` started from evaluation point `point`.
constexpr std::uint64_t burst_stream_id(std::uint64_t point, std::uint64_t replicate) noexcept {
  return (point << 32) | (replicate & 0xffffffffULL);
}

/// Disjoint id range for single-trajectory consumers (equilibrium runs,
/// observable draws, randomized tests) so they never collide with bursts.
constexpr std::uint64_t auxiliary_stream_id(std::uint64_t tag) noexcept {
  return 0xffffffff00000000ULL | (tag & 0xffffffffULL);
}

}  // namespace tmrc
