#include <doctest.h>

#include <cmath>
#include <vector>

#include "tmrc/errors.hpp"
#include "tmrc/rng.hpp"
#include "tmrc/validation.hpp"

using namespace tmrc;

namespace {

struct Samples {
  PointMatrix rc;
  std::vector<double> f, g;
};

Samples uniform_square(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, auxiliary_stream_id(70));
  Samples s;
  s.rc.resize(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = rng.next_uniform_pair();
    const auto w = rng.next_uniform_pair();
    s.rc(static_cast<Eigen::Index>(i), 0) = 2 * u[0] - 1;
    s.f.push_back(2 * u[1] - 1);
    s.g.push_back(std::sin(5 * w[0]) + w[1]);
  }
  return s;
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("constant function projects to itself") {
  const auto s = uniform_square(1000, 1);
  const std::vector<double> c(1000, 2.5);
  const auto bc = binned_projection(s.rc, c, UlamPartition::rc_bounding(s.rc, {10}));
  for (std::size_t b = 0; b < 10; ++b)
    if (!bc.empty(b)) CHECK(bc.means[b] == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("conditioning on itself with fine bins") {
  const auto s = uniform_square(20000, 2);
  std::vector<double> f(s.rc.data(), s.rc.data() + s.rc.size());
  const auto bins = UlamPartition::rc_bounding(s.rc, {200});
  const auto bc = binned_projection(s.rc, f, bins);
  const auto p = bc.projected();
  double worst = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(p[i] - f[static_cast<std::size_t>(i)]));
  CHECK(worst <= 2.0 / 200 + 1e-9);
}

TEST_CASE("symmetric conditional has zero bin means") {
  const auto s = uniform_square(40000, 3);
  const auto bc = binned_projection(s.rc, s.f, UlamPartition::rc_bounding(s.rc, {10}));
  for (std::size_t b = 0; b < 10; ++b) {
    // Each bin holds about 4000 uniform[-1,1] values: sd of the mean about 0.009.
    CHECK(std::abs(bc.means[b]) < 0.04);
  }
}

TEST_CASE("projection properties hold for the binned estimator") {
  const auto s = uniform_square(10000, 4);
  const auto bc = binned_projection(s.rc, s.f, UlamPartition::rc_bounding(s.rc, {37}));
  const auto rep = projection_property_check(bc, s.f, s.g);
  CHECK(rep.idempotence_gap == 0.0);
  CHECK(rep.self_adjointness_gap <= 1e-10);
  CHECK(rep.expansiveness_gap <= 0.0);
  CHECK(projection_property_check(bc, s.f, s.f).self_adjointness_gap == 0.0);
}

TEST_CASE("samples outside the bins are excluded") {
  PointMatrix rc(3, 1);
  rc << 0.1, 0.9, 5.0;
  const std::vector<double> f{1, 2, 3};
  const auto bc = binned_projection(rc, f, UlamPartition::rc_range({0}, {1}, {2}));
  CHECK(bc.excluded == 1);
  CHECK(std::isnan(bc.projected()[2]));
  CHECK(bc.means[0] == 1.0);
  CHECK(bc.means[1] == 2.0);
}

TEST_CASE("perturbation oracle edge cases") {
  const auto full = perturbation_oracle(20, 20, 0.2, 20, 1);
  CHECK(full.max_gap <= 1e-10);
  CHECK(full.violations == 0);
  const auto inside = perturbation_oracle(30, 5, 0.2, 20, 2, 0.0);
  CHECK(inside.max_gap <= 1e-10);
  CHECK(inside.max_leak <= 1e-12);
}

TEST_CASE("perturbation bound holds over randomized instances") {
  const auto rep = perturbation_oracle(50, 10, 0.2, 100, 3);
  CHECK(rep.trials == 100);
  CHECK(rep.bound == doctest::Approx(0.2 / std::sqrt(0.96)));
  CHECK(rep.violations == 0);
  CHECK(rep.max_gap < rep.bound);
  const auto tight = perturbation_oracle(40, 8, 0.3, 100, 4, 0.3);
  CHECK(tight.violations == 0);
  CHECK(tight.max_leak == doctest::Approx(0.3));
}

TEST_CASE("parametrization scores") {
  const auto s = uniform_square(5000, 5);
  const auto bins = UlamPartition::rc_bounding(s.rc, {100});
  const std::vector<double> c(5000, 1.0);
  CHECK(parametrization_score(c, s.rc, bins) == 1.0);
  std::vector<double> self(s.rc.data(), s.rc.data() + s.rc.size());
  CHECK(parametrization_score(self, s.rc, bins) >= 0.99);
  CHECK(parametrization_score(s.f, s.rc, bins) < 0.1);
}

TEST_CASE("default cores") {
  const auto hilly = default_cores(PotentialSystem::quad_hilly(1), 0.3);
  CHECK(hilly.size() == 4);
  CHECK(default_cores(PotentialSystem::curved_double_well(1)).size() == 2);
  CHECK(default_cores(PotentialSystem::circular(7, 2, 1)).size() == 7);
  CHECK_THROWS(default_cores(PotentialSystem::zero(2, 1)));
}

TEST_CASE("committor from a core center") {
  const auto sys = PotentialSystem::quad_hilly(1.0);
  const auto cores = default_cores(sys, 0.3);
  IntegratorConfig cfg;
  const auto est = committor_estimate(sys, cfg, cores[2].center, cores, 50, 10.0, 1);
  CHECK(est.q[2] == 1.0);
  CHECK(est.q.sum() == 1.0);
  CHECK(est.undecided == 0);
}

TEST_CASE("committor at the symmetric center of the quad well") {
  const auto sys = PotentialSystem::quad_hilly(1.0);
  const auto cores = default_cores(sys, 0.3);
  IntegratorConfig cfg;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  const auto est = committor_estimate(sys, cfg, x, cores, 2000, 50.0, 7);
  CHECK(est.q.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(est.inconclusive);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(est.q[static_cast<Eigen::Index>(i)] - 0.25) <= 3 * est.std_error(i));
}

TEST_CASE("committor between two adjacent wells") {
  const auto sys = PotentialSystem::quad_hilly(1.0);
  const auto cores = default_cores(sys, 0.3);
  IntegratorConfig cfg;
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  const auto est = committor_estimate(sys, cfg, x, cores, 1000, 50.0, 8);
  // Cores 0 and 1 sit at (1, 1) and (1, -1).
  CHECK(est.q[0] + est.q[1] > 0.9);
}

TEST_CASE("overlapping cores are rejected") {
  const auto sys = PotentialSystem::quad_hilly(1.0);
  std::vector<Core> cores{{Eigen::Vector2d(0, 0), 1.0}, {Eigen::Vector2d(0.5, 0), 1.0}};
  IntegratorConfig cfg;
  CHECK_THROWS_AS(committor_estimate(sys, cfg, Eigen::Vector2d(2, 2), cores, 10, 1.0, 1), ArgumentError);
}

}
