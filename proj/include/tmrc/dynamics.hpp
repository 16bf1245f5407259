#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmrc/rng.hpp"

namespace tmrc {

enum class PotentialKind { CurvedDoubleWell, Circular, QuadHilly, QuadFlat, Harmonic, Zero };

/// An analytic potential V on R^n together with the inverse temperature of
/// the overdamped Langevin dynamics dX = -grad V(X) dt + sqrt(2/beta) dW.
///
/// Parameter lists per kind:
///   CurvedDoubleWell  (none)              V = (x1^2-1)^2 + 2(x1^2+x2-1)^2
///   Circular          {wells, radial, confinement}
///                     V = cos(wells*atan2(x2,x1)) + radial*(|(x1,x2)|-1)^2
///                         + confinement * sum_{j>=3} xj^2
///   QuadHilly         (none)              V = (x1^2-1)^2 + (x2^2-1)^2 + 5 exp(-5|x|^2)
///   QuadFlat          (none)              V = 1 - sum over (+-1,+-1) of exp(-10 |x-c|^4)
///   Harmonic          {stiffness}         V = stiffness/2 |x|^2
///   Zero              (none)              V = 0
class PotentialSystem {
 public:
  static PotentialSystem curved_double_well(double beta);
  static PotentialSystem circular(int wells, std::size_t dim, double beta, double radial = 10.0,
                                  double confinement = 10.0);
  static PotentialSystem quad_hilly(double beta);
  static PotentialSystem quad_flat(double beta);
  static PotentialSystem harmonic(std::size_t dim, double beta, double stiffness = 1.0);
  static PotentialSystem zero(std::size_t dim, double beta);

  /// Registry lookup by name: double_well, circular, quad_hilly, quad_flat,
  /// harmonic, zero. Empty params select the defaults above.
  static PotentialSystem from_name(std::string_view name, std::size_t dim, double beta,
                                   std::span<const double> params = {});

  PotentialKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  double beta() const noexcept { return beta_; }
  const std::vector<double>& params() const noexcept { return params_; }
  std::string_view name() const noexcept;

  /// Throws ArgumentError on a dimension mismatch and SingularPointError at
  /// the origin of the circular potential.
  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  /// Hot-path gradient without the dimension check.
  void gradient_unchecked(const double* x, double* out) const;

 private:
  PotentialSystem(PotentialKind kind, std::size_t dim, double beta, std::vector<double> params);

  PotentialKind kind_;
  std::size_t dim_;
  double beta_;
  std::vector<double> params_;
};

double potential_value(const PotentialSystem& sys, const Eigen::VectorXd& x);
Eigen::VectorXd potential_gradient(const PotentialSystem& sys, const Eigen::VectorXd& x);

enum class Scheme { EulerMaruyama };

struct IntegratorConfig {
  double step = 1e-2;
  Scheme scheme = Scheme::EulerMaruyama;
};

/// Number of integrator steps covering `t`. Throws ArgumentError unless t is
/// a positive integer multiple of the step (relative slack 1e-9).
std::size_t steps_for(double t, const IntegratorConfig& cfg);

/// Any coordinate above this magnitude aborts a trajectory.
inline constexpr double kBlowUpThreshold = 1e6;

/// x' = x - grad V(x) h + sqrt(2h/beta) noise
Eigen::VectorXd em_step(const PotentialSystem& sys, const IntegratorConfig& cfg,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& noise);

enum class NoiseMode { Random, Zero };

/// Advances replicates in place. `states` is count x dim row-major and
/// streams[i] drives replicate i. Throws InstabilityError naming the step
/// and replicate on blow-up.
void propagate(const PotentialSystem& sys, const IntegratorConfig& cfg, std::span<double> states,
               std::span<RngStream> streams, std::size_t steps,
               NoiseMode mode = NoiseMode::Random);

/// Endpoint after t/h Euler-Maruyama steps from x0.
Eigen::VectorXd simulate_endpoint(const PotentialSystem& sys, const IntegratorConfig& cfg,
                                  const Eigen::VectorXd& x0, double t, RngStream& rng,
                                  NoiseMode mode = NoiseMode::Random);

}  // namespace tmrc
