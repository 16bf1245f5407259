#include <doctest.h>

#include <cmath>
#include <vector>

#include "tmrc/rng.hpp"
#include "tmrc/simd/kernels.hpp"

using namespace tmrc;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t stream) {
  std::vector<double> v(n);
  RngStream s(99, stream);
  s.fill_normals(v);
  return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar table is always available") {
  CHECK(simd::scalar_kernels().isa == simd::Isa::Scalar);
  CHECK(simd::set_isa(simd::Isa::Scalar));
  CHECK(simd::active().isa == simd::Isa::Scalar);
  if (simd::avx2_kernels()) CHECK(simd::set_isa(simd::Isa::Avx2));
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const simd::KernelTable* wide = simd::avx2_kernels();
  if (!wide) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  for (std::size_t len : {0u, 1u, 3u, 4u, 7u, 10u, 33u, 1000u}) {
    CAPTURE(len);
    const auto x0 = normals(len, 1), g = normals(len, 2), xi = normals(len, 3);
    auto xa = x0, xb = x0;
    ref.em_update(xa.data(), g.data(), xi.data(), len, 0.01, 0.1414);
    wide->em_update(xb.data(), g.data(), xi.data(), len, 0.01, 0.1414);
    CHECK(xa == xb);

    auto ya = g, yb = g;
    ref.axpy(-0.37, x0.data(), ya.data(), len);
    wide->axpy(-0.37, x0.data(), yb.data(), len);
    CHECK(ya == yb);

    const double da = ref.dot(x0.data(), g.data(), len);
    const double db = wide->dot(x0.data(), g.data(), len);
    double mag = 0;
    for (std::size_t i = 0; i < len; ++i) mag += std::abs(x0[i] * g[i]);
    CHECK(std::abs(da - db) <= 1e-14 * (mag + 1.0));
  }

  for (std::size_t dim : {1u, 2u, 3u, 5u, 10u}) {
    for (std::size_t count : {1u, 4u, 9u, 257u}) {
      CAPTURE(dim);
      CAPTURE(count);
      const auto rows = normals(dim * count, 10 + dim);
      const auto pt = normals(dim, 20 + count);
      std::vector<double> oa(count), ob(count);
      ref.sqdist_rows(pt.data(), rows.data(), count, dim, oa.data());
      wide->sqdist_rows(pt.data(), rows.data(), count, dim, ob.data());
      CHECK(oa == ob);
      double ba = 0, bb = 0;
      CHECK(ref.nearest_row(pt.data(), rows.data(), count, dim, &ba) ==
            wide->nearest_row(pt.data(), rows.data(), count, dim, &bb));
      CHECK(ba == bb);
    }
  }
}

TEST_CASE("nearest_row breaks ties toward the lowest index") {
  const std::vector<double> rows{1, 0, -1, 0, 1, 0};
  const std::vector<double> pt{0, 0};
  for (const simd::KernelTable* t : {&simd::scalar_kernels(), simd::avx2_kernels()}) {
    if (!t) continue;
    double best = -1;
    CHECK(t->nearest_row(pt.data(), rows.data(), 3, 2, &best) == 0);
    CHECK(best == 1.0);
  }
}

}
