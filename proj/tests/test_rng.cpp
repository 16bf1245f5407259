#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "tmrc/rng.hpp"

using namespace tmrc;

TEST_SUITE("rng") {

// Known-answer vectors of the Random123 reference distribution.
TEST_CASE("philox4x32-10 known answers") {
  using C = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same seed and stream reproduce the sequence") {
  RngStream a(42, burst_stream_id(3, 7)), b(42, burst_stream_id(3, 7));
  for (int i = 0; i < 100; ++i) CHECK(a.next_block() == b.next_block());
  CHECK(a.blocks_drawn() == 100);
}

TEST_CASE("distinct streams and seeds differ") {
  RngStream a(42, burst_stream_id(0, 0)), b(42, burst_stream_id(0, 1)), c(43, burst_stream_id(0, 0));
  const auto x = a.next_block();
  CHECK(x != b.next_block());
  CHECK(x != c.next_block());
}

TEST_CASE("stream ids keep bursts and auxiliary consumers apart") {
  CHECK(burst_stream_id(1, 2) == ((1ULL << 32) | 2ULL));
  CHECK(auxiliary_stream_id(0) != burst_stream_id(0, 0));
  std::set<std::uint64_t> ids;
  for (std::uint64_t p = 0; p < 20; ++p)
    for (std::uint64_t r = 0; r < 20; ++r) ids.insert(burst_stream_id(p, r));
  CHECK(ids.size() == 400);
}

TEST_CASE("uniforms stay in the open unit interval") {
  RngStream s(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto u = s.next_uniform_pair();
    CHECK(u[0] > 0.0);
    CHECK(u[0] < 1.0);
    CHECK(u[1] > 0.0);
    CHECK(u[1] < 1.0);
  }
}

TEST_CASE("normals have unit moments") {
  RngStream s(7, auxiliary_stream_id(100));
  const int n = 200000;
  std::vector<double> v(n);
  s.fill_normals(v);
  double m = 0, q = 0;
  for (double x : v) m += x;
  m /= n;
  for (double x : v) q += (x - m) * (x - m);
  q /= (n - 1);
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(q - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("fill_normals consumes a size-determined number of blocks") {
  RngStream s(1, 0);
  std::vector<double> v(5);
  s.fill_normals(v);
  CHECK(s.blocks_drawn() == 3);
  RngStream t(1, 0);
  std::vector<double> w(6);
  t.fill_normals(w);
  CHECK(t.blocks_drawn() == 3);
  for (int i = 0; i < 4; ++i) CHECK(v[i] == w[i]);
}

}
