#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tmrc/errors.hpp"
#include "tmrc/rng.hpp"
#include "tmrc/spectrum.hpp"

using namespace tmrc;

namespace {

std::vector<std::size_t> two_state_chain(double p, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, auxiliary_stream_id(60));
  std::vector<std::size_t> cells(n);
  std::size_t s = 0;
  for (auto& c : cells) {
    c = s;
    if (rng.next_uniform() < p) s = 1 - s;
  }
  return cells;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("cell assignment at corners, boundaries and outside") {
  const auto part = UlamPartition::full_state({-2, -2}, {2, 2}, {40, 40});
  CHECK(part.cell_count() == 1600);
  const double lo[2] = {-2, -2}, hi[2] = {2, 2}, out[2] = {2.5, 0};
  CHECK(part.cell_of(lo) == 0);
  CHECK(part.cell_of(hi) == 1599);
  CHECK(part.cell_of(out) == UlamPartition::kOutside);
  // Interior boundaries belong to the lower cell.
  const auto unit = UlamPartition::full_state({0, 0}, {4, 4}, {4, 4});
  const double edge[2] = {1.0, 2.0};
  CHECK(unit.cell_of(edge) == 0 * 4 + 1);
  const auto c = part.center(0);
  CHECK(c[0] == doctest::Approx(-1.95));
  CHECK(c[1] == doctest::Approx(-1.95));
  CHECK_THROWS_AS(UlamPartition::full_state({0}, {1}, {0}), ArgumentError);
}

TEST_CASE("uniform points fill the boxes evenly") {
  const auto part = UlamPartition::full_state({-2, -2}, {2, 2}, {40, 40});
  RngStream rng(3, auxiliary_stream_id(61));
  const std::size_t n = 160000;
  PointMatrix pts(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = rng.next_uniform_pair();
    pts(static_cast<Eigen::Index>(i), 0) = 4 * u[0] - 2;
    pts(static_cast<Eigen::Index>(i), 1) = 4 * u[1] - 2;
  }
  const auto a = assign_cells(part, pts);
  CHECK(a.outside == 0);
  std::vector<double> occ(1600, 0);
  for (auto c : a.cells) occ[c] += 1;
  const double expect = static_cast<double>(n) / 1600;
  double chi2 = 0;
  for (double o : occ) chi2 += (o - expect) * (o - expect) / expect;
  // 1599 degrees of freedom; mean 1599, sd about 57.
  CHECK(chi2 < 1599 + 6 * 57);
}

TEST_CASE("counting transitions") {
  const std::vector<std::size_t> constant(50, 2);
  const auto c = count_transitions(constant, 4, 3);
  CHECK(c.counts(2, 2) == 47);
  CHECK(c.counts.sum() == 47);

  const std::vector<std::size_t> alt{0, 1, 0, 1, 0, 1};
  const auto a = count_transitions(alt, 2, 1);
  CHECK(a.counts(0, 0) == 0);
  CHECK(a.counts(1, 1) == 0);
  CHECK(a.counts(0, 1) == 3);
  CHECK(a.counts(1, 0) == 2);

  const std::vector<std::size_t> gaps{0, UlamPartition::kOutside, 1, 1};
  const auto g = count_transitions(gaps, 2, 1);
  CHECK(g.skipped == 2);
  CHECK(g.counts(1, 1) == 1);

  const std::vector<std::size_t> none{UlamPartition::kOutside, UlamPartition::kOutside};
  CHECK_THROWS_AS(count_transitions(none, 2, 1), EmptyCountsError);
}

TEST_CASE("two-state chain flip frequency") {
  const double p = 0.1;
  const std::size_t n = 100000;
  const auto c = count_transitions(two_state_chain(p, n, 1), 2, 1).counts;
  for (int i = 0; i < 2; ++i) {
    const double row = c.row(i).sum();
    const double frac = c(i, 1 - i) / row;
    CHECK(std::abs(frac - p) <= 3 * std::sqrt(p * (1 - p) / row));
  }
}

TEST_CASE("row normalization") {
  Eigen::Matrix2d ones;
  ones << 1, 1, 1, 1;
  CHECK(to_stochastic(ones, false).stochastic.isApprox(Eigen::Matrix2d::Constant(0.5)));
  Eigen::Matrix2d diag;
  diag << 2, 0, 0, 2;
  CHECK(to_stochastic(diag, false).stochastic == Eigen::Matrix2d::Identity());
  Eigen::Matrix2d asym;
  asym << 0, 2, 1, 1;
  const auto tm = to_stochastic(asym, true);
  Eigen::Matrix2d sc, sp;
  sc << 0, 1.5, 1.5, 1;
  sp << 0, 1, 0.6, 0.4;
  CHECK(tm.counts == sc);
  CHECK((tm.stochastic - sp).cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::Matrix3d empty;
  empty << 1, 1, 0, 1, 1, 0, 0, 0, 0;
  const auto te = to_stochastic(empty, false);
  CHECK(te.stochastic(2, 2) == 1.0);
  REQUIRE(te.empty_rows.size() == 1);
  CHECK(te.empty_rows[0] == 2);
  CHECK((te.stochastic.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("random count matrices normalize to stochastic rows") {
  RngStream rng(11, auxiliary_stream_id(62));
  Eigen::MatrixXd c(30, 30);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = std::floor(20 * rng.next_uniform());
  for (bool sym : {false, true}) {
    const auto tm = to_stochastic(c, sym);
    CHECK((tm.stochastic.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("eigenvalues of small chains") {
  const auto id = to_stochastic(Eigen::Matrix3d::Identity() * 4, true, 1.0);
  const auto ri = eigenvalues(id, 3, false, false);
  for (int i = 0; i < 3; ++i) {
    CHECK(ri.eigenvalues[i] == doctest::Approx(1.0));
    CHECK(std::isinf(ri.timescales[i]));
  }

  // Restricted to one communicating class by default.
  CHECK(eigenvalues(id, 3).eigenvalues.size() == 1);

  Eigen::Matrix2d c;
  c << 9, 1, 1, 9;
  for (bool sym : {false, true}) {
    const auto r = eigenvalues(to_stochastic(c, sym, 1.0), 2);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(0.8));
    CHECK(r.timescales[1] == doctest::Approx(4.4814).epsilon(1e-4));
    CHECK(r.dominant == 0);
  }
}

TEST_CASE("implied timescales") {
  CHECK(implied_timescale(0.8, 1.0) == doctest::Approx(-1.0 / std::log(0.8)));
  CHECK(std::isinf(implied_timescale(1.0, 1.0)));
  CHECK(std::isnan(implied_timescale(-0.2, 1.0)));
}

TEST_CASE("eigenproblem restricted to the largest connected set") {
  // States 0-2 communicate, 3-4 form a smaller block.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(5, 5);
  c.block(0, 0, 3, 3) << 5, 1, 0, 1, 5, 1, 0, 1, 5;
  c.block(3, 3, 2, 2) << 3, 1, 1, 3;
  const auto r = eigenvalues(to_stochastic(c, true, 1.0), 3, true);
  CHECK(r.active == std::vector<std::size_t>{0, 1, 2});
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(r.eigenvectors.rows() == 5);
  CHECK(r.eigenvectors(3, 0) == 0.0);
  CHECK(r.eigenvectors(4, 1) == 0.0);
}

TEST_CASE("two-state chain through the full pipeline") {
  const double p = 0.05;
  const auto cells = two_state_chain(p, 200000, 2);
  PointMatrix traj(static_cast<Eigen::Index>(cells.size()), 1);
  for (std::size_t i = 0; i < cells.size(); ++i) traj(static_cast<Eigen::Index>(i), 0) = cells[i] == 0 ? -0.5 : 0.5;
  const auto part = UlamPartition::full_state({-1}, {1}, {2});
  const auto full = ulam_spectrum(traj, part, 1, 1.0, 2);
  CHECK(full.eigenvalues[1] == doctest::Approx(1 - 2 * p).epsilon(0.01));
  // Projecting onto the full coordinate reproduces the full spectrum.
  const auto proj = project_and_discretize(traj, UlamPartition::rc_range({-1}, {1}, {2}), 1, 1.0, 2);
  CHECK(proj.eigenvalues[1] == doctest::Approx(full.eigenvalues[1]).epsilon(1e-12));
  CHECK_THROWS_AS(project_and_discretize(traj, part, 1, 1.0, 2), ArgumentError);
}

TEST_CASE("comparison table") {
  SpectrumReport a;
  a.eigenvalues = Eigen::Vector3d(1.0, 0.85, 0.5);
  a.timescales = Eigen::Vector3d(std::numeric_limits<double>::infinity(), implied_timescale(0.85, 1), implied_timescale(0.5, 1));
  a.lag = 1.0;
  const auto self = compare_spectra({{"full", a}, {"same", a}});
  CHECK(self.abs_delta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(self.flags.empty());
  CHECK(self.timescale_ratio(0, 1) == 1.0);
  CHECK(self.timescale_ratio(1, 1) == 1.0);

  SpectrumReport b = a;
  b.eigenvalues[1] = 0.85 + 0.021;
  const auto bad = compare_spectra({{"full", a}, {"corrupt", b}}, 0.02);
  REQUIRE(bad.flags.size() == 1);
  CHECK(bad.flags[0] == std::pair<std::size_t, std::size_t>{1, 1});

  SpectrumReport other = a;
  other.lag = 2.0;
  CHECK_THROWS_AS(compare_spectra({{"full", a}, {"other", other}}), ArgumentError);
}

}
