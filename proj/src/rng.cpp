#include "tmrc/rng.hpp"

#include <cmath>
#include <numbers>

namespace tmrc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t bits) noexcept {
  // (k + 0.5) / 2^53 with k in [0, 2^53): never 0, never 1.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::array<std::uint32_t, 4> RngStream::next_block() noexcept {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  ++block_;
  return philox4x32_10(ctr, key);
}

std::array<double, 2> RngStream::next_uniform_pair() noexcept {
  const auto b = next_block();
  const std::uint64_t a = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  const std::uint64_t c = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
  return {to_open_unit(a), to_open_unit(c)};
}

std::array<double, 2> RngStream::next_normal_pair() noexcept {
  const auto [u1, u2] = next_uniform_pair();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

void RngStream::fill_normals(std::span<double> out) noexcept {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const auto z = next_normal_pair();
    out[i] = z[0];
    out[i + 1] = z[1];
  }
  if (i < out.size()) out[i] = next_normal_pair()[0];
}

}  // namespace tmrc
