// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tmrc/dynamics.hpp"
#include "tmrc/embedding.hpp"
#include "tmrc/errors.hpp"
#include "tmrc/manifold.hpp"
#include "tmrc/pipeline.hpp"
#include "tmrc/rng.hpp"
#include "tmrc/sampling.hpp"
#include "tmrc/spectrum.hpp"
#include "tmrc/stats.hpp"
#include "tmrc/validation.hpp"

using namespace tmrc;

namespace {

// Double well: equilibrium trajectory and the full-state partitions.
constexpr double kBeta = 2.0;
constexpr double kStep = 0.01;
constexpr std::size_t kTrajSteps = 1000000;
constexpr double kTau = 0.01;
constexpr std::uint64_t kTrajSeed = 1;
constexpr std::uint64_t kBurstSeed = 11;

// Criterion 1
constexpr double kT1 = 6.1823, kT1Tol = 0.15;
constexpr double kT2 = 0.9066, kT3 = 0.6098, kT4 = 0.3976, kT234Tol = 0.25;
// Criterion 2
constexpr double kXiGapTol = 0.02;
constexpr double kZeta2 = 0.7252, kZeta2Tol = 0.05;
// Criterion 3
constexpr double kSpearmanMin = 0.95;
// Criterion 4
constexpr double kT6OverT7 = 1.53 / 0.05, kRatioFactor = 2.0;
constexpr double kCircularMin7 = 0.95;
// Criterion 5
constexpr double kCircularMin10 = 0.9;
// Criterion 7
constexpr double kParamMin = 0.8;
// Criterion 8
constexpr double kGradTol = 1e-6, kRowSumTol = 1e-12, kSelfAdjointTol = 1e-10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

bool within(double v, double ref, double rel) { return std::abs(v - ref) <= rel * std::abs(ref); }

IntegratorConfig integrator() {
  IntegratorConfig c;
  c.step = kStep;
  return c;
}

EvaluationSet grid(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> shape) {
  return make_grid(lo, hi, shape);
}

// Angle of the first two RC components around their centroid, against the
// physical angle, over evaluation points near the unit annulus.
double annulus_correlation(const PointMatrix& x, const PointMatrix& xi) {
  const Eigen::RowVectorXd c = xi.colwise().mean();
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double r = std::hypot(x(i, 0), x(i, 1));
    if (r < 0.5 || r > 1.5) continue;
    a.push_back(std::atan2(x(i, 1), x(i, 0)));
    b.push_back(std::atan2(xi(i, 1) - c[1], xi(i, 0) - c[0]));
  }
  return stats::circular_correlation(a, b);
}

PointMatrix linear_coordinate(const PointMatrix& states, double a, double b) {
  PointMatrix out(states.rows(), 1);
  out.col(0) = a * states.col(0) + b * states.col(1);
  return out;
}

}  // namespace

int main() {
  const IntegratorConfig cfg = integrator();

  // Shared double-well data for criteria 1-3.
  const auto dw = PotentialSystem::curved_double_well(kBeta);
  const auto dw_traj = run_equilibrium(dw, cfg, Eigen::Vector2d(-1, 0), kTrajSteps, kTau, kTrajSeed);
  const std::size_t lag_steps = 100;  // t = 1
  const double lag = lag_steps * kTau;

  report(1, "double-well implied timescales", [&] {
    const auto part = UlamPartition::full_state({-2, -1}, {2, 2}, {40, 30});
    const auto rep = ulam_spectrum(dw_traj.states, part, lag_steps, lag, 5);
    const auto& t = rep.timescales;
    const bool ok = within(t[1], kT1, kT1Tol) && within(t[2], kT2, kT234Tol) && within(t[3], kT3, kT234Tol) &&
                    within(t[4], kT4, kT234Tol);
    return Outcome{ok, "t1..t4 = " + fmt(t[1]) + ", " + fmt(t[2]) + ", " + fmt(t[3]) + ", " + fmt(t[4]) +
                           " (targets 6.1823 +-15%, 0.9066/0.6098/0.3976 +-25%)"};
  });

  const auto dw_grid = grid({-2, -1}, {2, 2}, {40, 30});
  ReactionCoordinate dw_rc;
  bool dw_rc_ok = false;
  std::string dw_rc_error;
  try {
    const auto cloud = embed_streaming(dw, cfg, dw_grid, planar_reference_observables(), 10000, 2.0, kBurstSeed);
    DiffusionMapOptions o;
    o.r = 1;
    dw_rc = ReactionCoordinate::from_model(fit_diffmap(cloud.z, 0.01, 4.0, o));
    dw_rc_ok = true;
  } catch (const std::exception& e) {
    dw_rc_error = e.what();
  }

  report(2, "projected-spectrum fidelity", [&] {
    if (!dw_rc_ok) return Outcome{false, "embedding failed: " + dw_rc_error};
    // Same box size as the 40x30 partition, on a domain that holds every trajectory state.
    const auto cover = UlamPartition::full_state({-3, -2}, {3, 3}, {60, 50});
    const double full = ulam_spectrum(dw_traj.states, cover, lag_steps, lag, 3).eigenvalues[1];
    const PointMatrix xi = rc_on_states(dw_grid.points, dw_rc.values, dw_traj.states);
    auto projected = [&](const PointMatrix& v) {
      return project_and_discretize(v, UlamPartition::rc_bounding(v, {40}), lag_steps, lag, 3).eigenvalues[1];
    };
    const double lxi = projected(xi);
    const double lz1 = projected(linear_coordinate(dw_traj.states, 1, 0));
    const double lz2 = projected(linear_coordinate(dw_traj.states, 1, 1));
    const bool ok = std::abs(lxi - full) <= kXiGapTol && full >= lxi && lxi > lz1 && lz1 > lz2 &&
                    std::abs(lz2 - kZeta2) <= kZeta2Tol;
    return Outcome{ok, "lambda1 full " + fmt(full) + ", xi " + fmt(lxi) + ", zeta1 " + fmt(lz1) + ", zeta2 " +
                           fmt(lz2) + " (|full-xi| <= 0.02, ordering, zeta2 in 0.7252 +-0.05)"};
  });

  report(3, "reference RC agreement", [&] {
    if (!dw_rc_ok) return Outcome{false, "embedding failed: " + dw_rc_error};
    std::vector<double> xi, ref;
    for (Eigen::Index i = 0; i < dw_grid.points.rows(); ++i) {
      xi.push_back(dw_rc.values(i, 0));
      ref.push_back(dw_grid.points(i, 0) * std::exp(-2 * dw_grid.points(i, 1)));
    }
    const double rho = stats::spearman(xi, ref);
    return Outcome{std::abs(rho) >= kSpearmanMin, "spearman " + fmt(rho) + " (|rho| >= 0.95)"};
  });

  // Seven wells in the plane: criteria 4 and 7.
  const auto c7 = PotentialSystem::circular(7, 2, kBeta);
  const auto c7_traj = run_equilibrium(c7, cfg, Eigen::Vector2d(1, 0), kTrajSteps, kTau, kTrajSeed);
  const auto c7_part = UlamPartition::full_state({-2, -2}, {2, 2}, {40, 40});
  const std::size_t c7_lag_steps = 10;  // t = 0.1
  SpectrumReport c7_spec;
  std::string c7_spec_error;
  try {
    c7_spec = ulam_spectrum(c7_traj.states, c7_part, c7_lag_steps, c7_lag_steps * kTau, 9, true, true);
  } catch (const std::exception& e) {
    c7_spec_error = e.what();
  }
  const auto c7_grid = grid({-2, -2}, {2, 2}, {40, 40});
  ReactionCoordinate c7_rc;
  std::string c7_rc_error;
  try {
    const auto cloud = embed_streaming(c7, cfg, c7_grid, planar_reference_observables(), 1000, 0.1, kBurstSeed);
    DiffusionMapOptions o;
    o.r = 2;
    c7_rc = ReactionCoordinate::from_model(fit_diffmap(cloud.z, 0.01, 4.0, o));
  } catch (const std::exception& e) {
    c7_rc_error = e.what();
  }

  report(4, "seven-well structure", [&] {
    if (!c7_spec_error.empty()) return Outcome{false, "spectrum failed: " + c7_spec_error};
    if (!c7_rc_error.empty()) return Outcome{false, "embedding failed: " + c7_rc_error};
    const double ratio = c7_spec.timescales[6] / c7_spec.timescales[7];
    const bool gap = c7_spec.dominant == 6 && ratio >= kT6OverT7 / kRatioFactor && ratio <= kT6OverT7 * kRatioFactor;
    const double circ = annulus_correlation(c7_grid.points, c7_rc.values);
    return Outcome{gap && circ >= kCircularMin7,
                   "(a) dominant " + std::to_string(c7_spec.dominant + 1) + " eigenvalues, t6 " +
                       fmt(c7_spec.timescales[6]) + ", t7 " + fmt(c7_spec.timescales[7]) + ", ratio " + fmt(ratio, 1) +
                       " (7 dominant, ratio in [15.3, 61.2]); (b) circular correlation " + fmt(circ) + " (>= 0.95)"};
  });

  report(5, "ten-dimensional circle", [&] {
    const auto c10 = PotentialSystem::circular(7, 10, kBeta);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(10);
    x0[0] = 1;
    const auto traj = run_equilibrium(c10, cfg, x0, 100000, 0.1, kTrajSeed);
    const auto eval = subsample(traj, 10000);
    const auto cloud = embed_streaming(c10, cfg, eval, make_random_observables(3, 10, 7), 1000, 0.1, kBurstSeed);
    DiffusionMapOptions o;
    o.r = 2;
    const auto rc = ReactionCoordinate::from_model(fit_diffmap(cloud.z, 0.03, 4.0, o));
    const double circ = annulus_correlation(eval.points, rc.values);
    return Outcome{circ >= kCircularMin10, "circular correlation " + fmt(circ) + " (>= 0.9)"};
  });

  report(6, "quad-well dimension detection", [&] {
    const auto g = grid({-2, -2}, {2, 2}, {40, 40});
    std::size_t votes[2];
    const PotentialSystem systems[2] = {PotentialSystem::quad_hilly(kBeta), PotentialSystem::quad_flat(kBeta)};
    for (int i = 0; i < 2; ++i) {
      const auto cloud = embed_streaming(systems[i], cfg, g, planar_reference_observables(), 1000, 1.0, kBurstSeed);
      votes[i] = dimension_diagnostic(cloud.z, cloud.std_error, 20).vote;
    }
    return Outcome{votes[0] == 1 && votes[1] == 2,
                   "votes hilly " + std::to_string(votes[0]) + ", flat " + std::to_string(votes[1]) + " (1 and 2)"};
  });

  report(7, "eigenfunction parametrization", [&] {
    if (!c7_spec_error.empty()) return Outcome{false, "spectrum failed: " + c7_spec_error};
    if (!c7_rc_error.empty()) return Outcome{false, "embedding failed: " + c7_rc_error};
    const PointMatrix xi = rc_on_states(c7_grid.points, c7_rc.values, c7_traj.states);
    const auto cells = assign_cells(c7_part, c7_traj.states);
    const auto bins = UlamPartition::rc_bounding(xi, {20, 20});
    std::vector<double> scores;
    for (std::size_t i = 0; i < 9; ++i) {
      const auto phi = eigenvector_on_samples(c7_spec, cells, i);
      std::vector<double> kept;
      std::vector<Eigen::Index> rows;
      for (std::size_t s = 0; s < phi.size(); ++s)
        if (!std::isnan(phi[s])) {
          kept.push_back(phi[s]);
          rows.push_back(static_cast<Eigen::Index>(s));
        }
      PointMatrix sub(static_cast<Eigen::Index>(rows.size()), 2);
      for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = xi.row(rows[r]);
      scores.push_back(parametrization_score(kept, sub, bins));
    }
    double lo = 1.0;
    for (int i = 0; i <= 6; ++i) lo = std::min(lo, scores[i]);
    const bool ok = lo >= kParamMin && lo > scores[7] && lo > scores[8];
    std::string d = "scores";
    for (double s : scores) d += " " + fmt(s, 3);
    return Outcome{ok, d + " (phi0..phi6 >= 0.8 and above phi7, phi8)"};
  });

  report(8, "property suites", [&] {
    std::vector<std::string> bad;
    // Gradient against central differences at 100 random points per potential.
    const std::vector<PotentialSystem> pots{PotentialSystem::curved_double_well(kBeta), PotentialSystem::circular(7, 2, kBeta),
                                            PotentialSystem::circular(7, 10, kBeta),     PotentialSystem::quad_hilly(kBeta),
                                            PotentialSystem::quad_flat(kBeta),           PotentialSystem::harmonic(3, kBeta),
                                            PotentialSystem::zero(2, kBeta)};
    double worst_grad = 0;
    for (std::size_t p = 0; p < pots.size(); ++p) {
      RngStream rng(123, auxiliary_stream_id(200 + p));
      for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(pots[p].dim()));
        for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = 4 * rng.next_uniform() - 2;
        if (pots[p].kind() == PotentialKind::Circular && x.head(2).norm() < 0.05) x[0] += 0.5;
        const Eigen::VectorXd g = potential_gradient(pots[p], x);
        Eigen::VectorXd fd(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
          Eigen::VectorXd a = x, b = x;
          a[j] += 1e-5;
          b[j] -= 1e-5;
          fd[j] = (potential_value(pots[p], a) - potential_value(pots[p], b)) / 2e-5;
        }
        worst_grad = std::max(worst_grad, (g - fd).norm() / std::max(1.0, g.norm()));
      }
    }
    if (worst_grad > kGradTol) bad.push_back("gradient " + fmt(worst_grad, 10));

    // OU mean.
    {
      const auto harm = PotentialSystem::harmonic(1, 1.0);
      PointMatrix x0(1, 1);
      x0 << 1.0;
      Eigen::MatrixXd a(1, 1);
      a << 1.0;
      IntegratorConfig fine;
      fine.step = 1e-3;
      const auto c = embed_streaming(harm, fine, explicit_points(x0), make_explicit_observables(a), 10000, 1.0, 31);
      if (std::abs(c.z(0, 0) - std::exp(-1.0)) > 3 * c.std_error(0, 0)) bad.push_back("OU mean");
    }

    // Stochastic rows.
    {
      const auto part = UlamPartition::full_state({-2, -1}, {2, 2}, {40, 30});
      const auto a = assign_cells(part, dw_traj.states);
      const auto counts = count_transitions(a.cells, part.cell_count(), 100);
      for (bool sym : {false, true}) {
        const auto tm = to_stochastic(counts.counts, sym);
        if ((tm.stochastic.rowwise().sum().array() - 1.0).abs().maxCoeff() > kRowSumTol) bad.push_back("row sums");
      }
    }

    // Diffusion-map invariants on the seven-well cloud.
    if (c7_rc_error.empty()) {
      const auto& m = c7_rc.model;
      const auto psi0 = m.eigenvectors.col(0);
      if (std::abs(m.eigenvalues[0] - 1.0) > 1e-10) bad.push_back("gamma0");
      if ((m.eigenvalues.array().abs() > 1.0 + 1e-10).any()) bad.push_back("|gamma| > 1");
      if (psi0.maxCoeff() - psi0.minCoeff() > 1e-8 * psi0.cwiseAbs().maxCoeff()) bad.push_back("psi0 not constant");
      const Eigen::MatrixXd p = diffusion_transition_matrix(build_kernel(m.training, m.sigma, m.cutoff).w);
      if ((p.rowwise().sum().array() - 1.0).abs().maxCoeff() > kRowSumTol) bad.push_back("diffusion rows");
    } else {
      bad.push_back("diffusion map unavailable");
    }

    // Perturbation oracle: 300 randomized instances.
    std::size_t violations = 0;
    violations += perturbation_oracle(50, 10, 0.05, 100, 41).violations;
    violations += perturbation_oracle(50, 10, 0.1, 100, 42).violations;
    violations += perturbation_oracle(50, 10, 0.2, 100, 43).violations;
    if (violations) bad.push_back("oracle violations " + std::to_string(violations));

    // Binned projection.
    ProjectionReport pr;
    {
      RngStream rng(9, auxiliary_stream_id(300));
      PointMatrix rc(10000, 1);
      std::vector<double> f(10000), g(10000);
      for (Eigen::Index i = 0; i < 10000; ++i) {
        const auto u = rng.next_uniform_pair();
        const auto v = rng.next_normal_pair();
        rc(i, 0) = u[0];
        f[static_cast<std::size_t>(i)] = v[0] + u[1];
        g[static_cast<std::size_t>(i)] = v[1] * u[0];
      }
      const auto bc = binned_projection(rc, f, UlamPartition::rc_bounding(rc, {40}));
      pr = projection_property_check(bc, f, g);
      if (pr.idempotence_gap != 0.0) bad.push_back("idempotence");
      if (pr.self_adjointness_gap > kSelfAdjointTol) bad.push_back("self-adjointness");
    }

    // Committor: simplex and four-fold symmetry at the center.
    {
      const auto qh = PotentialSystem::quad_hilly(1.0);
      const auto cores = default_cores(qh, 0.3);
      const auto est = committor_estimate(qh, cfg, Eigen::Vector2d(0, 0), cores, 2000, 50.0, 51);
      if (std::abs(est.q.sum() - 1.0) > 1e-12) bad.push_back("committor sum");
      for (std::size_t i = 0; i < 4; ++i)
        if (std::abs(est.q[static_cast<Eigen::Index>(i)] - 0.25) > 3 * est.std_error(i)) bad.push_back("committor symmetry");
    }

    std::string d = "gradient rel. error " + sci(worst_grad) + ", oracle violations " + std::to_string(violations) +
                    "/300, idempotence gap " + sci(pr.idempotence_gap) + ", self-adjointness gap " +
                    sci(pr.self_adjointness_gap);
    for (const auto& b : bad) d += "; failed: " + b;
    return Outcome{bad.empty(), d};
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
