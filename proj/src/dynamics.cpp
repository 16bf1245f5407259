#include "tmrc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmrc/errors.hpp"
#include "tmrc/simd/kernels.hpp"

namespace tmrc {

namespace {

constexpr double kQuadWellCenters[4][2] = {{1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}, {-1.0, 1.0}};

void require_dim(const PotentialSystem& sys, std::size_t got) {
  if (got != sys.dim()) {
    std::ostringstream os;
    os << "potential " << sys.name() << " expects dimension " << sys.dim() << ", got " << got;
    throw ArgumentError(os.str());
  }
}

[[noreturn]] void throw_singular(const double* x) {
  std::ostringstream os;
  os << "circular potential is singular at (x1, x2) = (" << x[0] << ", " << x[1] << ")";
  throw SingularPointError(os.str());
}

}  // namespace

PotentialSystem::PotentialSystem(PotentialKind kind, std::size_t dim, double beta,
                                 std::vector<double> params)
    : kind_(kind), dim_(dim), beta_(beta), params_(std::move(params)) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("inverse temperature must be positive");
  if (dim == 0) throw ArgumentError("dimension must be positive");
}

PotentialSystem PotentialSystem::curved_double_well(double beta) {
  return {PotentialKind::CurvedDoubleWell, 2, beta, {}};
}

PotentialSystem PotentialSystem::circular(int wells, std::size_t dim, double beta, double radial,
                                          double confinement) {
  if (dim < 2) throw ArgumentError("circular potential needs dimension >= 2");
  if (wells < 1) throw ArgumentError("circular potential needs at least one well");
  return {PotentialKind::Circular, dim, beta, {static_cast<double>(wells), radial, confinement}};
}

PotentialSystem PotentialSystem::quad_hilly(double beta) { return {PotentialKind::QuadHilly, 2, beta, {}}; }

PotentialSystem PotentialSystem::quad_flat(double beta) { return {PotentialKind::QuadFlat, 2, beta, {}}; }

PotentialSystem PotentialSystem::harmonic(std::size_t dim, double beta, double stiffness) {
  return {PotentialKind::Harmonic, dim, beta, {stiffness}};
}

PotentialSystem PotentialSystem::zero(std::size_t dim, double beta) { return {PotentialKind::Zero, dim, beta, {}}; }

PotentialSystem PotentialSystem::from_name(std::string_view name, std::size_t dim, double beta,
                                           std::span<const double> params) {
  auto param = [&](std::size_t i, double fallback) { return i < params.size() ? params[i] : fallback; };
  auto fixed_2d = [&](std::string_view what) {
    if (dim != 2) throw ArgumentError(std::string(what) + " potential is two-dimensional");
  };
  if (name == "double_well") {
    fixed_2d(name);
    return curved_double_well(beta);
  }
  if (name == "circular") {
    return circular(static_cast<int>(param(0, 7.0)), dim, beta, param(1, 10.0), param(2, 10.0));
  }
  if (name == "quad_hilly") {
    fixed_2d(name);
    return quad_hilly(beta);
  }
  if (name == "quad_flat") {
    fixed_2d(name);
    return quad_flat(beta);
  }
  if (name == "harmonic") return harmonic(dim, beta, param(0, 1.0));
  if (name == "zero") return zero(dim, beta);
  throw ArgumentError("unknown potential '" + std::string(name) + "'");
}

std::string_view PotentialSystem::name() const noexcept {
  switch (kind_) {
    case PotentialKind::CurvedDoubleWell: return "double_well";
    case PotentialKind::Circular: return "circular";
    case PotentialKind::QuadHilly: return "quad_hilly";
    case PotentialKind::QuadFlat: return "quad_flat";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Zero: return "zero";
  }
  return "unknown";
}

double PotentialSystem::value(std::span<const double> xs) const {
  require_dim(*this, xs.size());
  const double* x = xs.data();
  switch (kind_) {
    case PotentialKind::CurvedDoubleWell: {
      const double a = x[0] * x[0] - 1.0;
      const double b = x[0] * x[0] + x[1] - 1.0;
      return a * a + 2.0 * b * b;
    }
    case PotentialKind::Circular: {
      const double r = std::hypot(x[0], x[1]);
      if (r == 0.0) throw_singular(x);
      double v = std::cos(params_[0] * std::atan2(x[1], x[0])) + params_[1] * (r - 1.0) * (r - 1.0);
      double tail = 0.0;
      for (std::size_t j = 2; j < dim_; ++j) tail += x[j] * x[j];
      return v + params_[2] * tail;
    }
    case PotentialKind::QuadHilly: {
      const double a = x[0] * x[0] - 1.0;
      const double b = x[1] * x[1] - 1.0;
      return a * a + b * b + 5.0 * std::exp(-5.0 * (x[0] * x[0] + x[1] * x[1]));
    }
    case PotentialKind::QuadFlat: {
      double v = 1.0;
      for (const auto& c : kQuadWellCenters) {
        const double s = (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
        v -= std::exp(-10.0 * s * s);
      }
      return v;
    }
    case PotentialKind::Harmonic: {
      double s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += x[j] * x[j];
      return 0.5 * params_[0] * s;
    }
    case PotentialKind::Zero:
      return 0.0;
  }
  return 0.0;
}

void PotentialSystem::gradient(std::span<const double> x, std::span<double> out) const {
  require_dim(*this, x.size());
  require_dim(*this, out.size());
  gradient_unchecked(x.data(), out.data());
}

void PotentialSystem::gradient_unchecked(const double* x, double* g) const {
  switch (kind_) {
    case PotentialKind::CurvedDoubleWell: {
      const double a = x[0] * x[0] - 1.0;
      const double b = x[0] * x[0] + x[1] - 1.0;
      g[0] = 4.0 * x[0] * a + 8.0 * x[0] * b;
      g[1] = 4.0 * b;
      return;
    }
    case PotentialKind::Circular: {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      if (r2 == 0.0) throw_singular(x);
      const double r = std::sqrt(r2);
      const double wells = params_[0];
      // d/dtheta cos(k theta) = -k sin(k theta); dtheta/dx = (-x2, x1) / r^2
      const double dv_dtheta = -wells * std::sin(wells * std::atan2(x[1], x[0]));
      const double radial = 2.0 * params_[1] * (r - 1.0) / r;
      g[0] = dv_dtheta * (-x[1] / r2) + radial * x[0];
      g[1] = dv_dtheta * (x[0] / r2) + radial * x[1];
      for (std::size_t j = 2; j < dim_; ++j) g[j] = 2.0 * params_[2] * x[j];
      return;
    }
    case PotentialKind::QuadHilly: {
      const double bump = -50.0 * std::exp(-5.0 * (x[0] * x[0] + x[1] * x[1]));
      g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0) + bump * x[0];
      g[1] = 4.0 * x[1] * (x[1] * x[1] - 1.0) + bump * x[1];
      return;
    }
    case PotentialKind::QuadFlat: {
      g[0] = 0.0;
      g[1] = 0.0;
      for (const auto& c : kQuadWellCenters) {
        const double dx = x[0] - c[0];
        const double dy = x[1] - c[1];
        const double s = dx * dx + dy * dy;
        const double w = 40.0 * s * std::exp(-10.0 * s * s);
        g[0] += w * dx;
        g[1] += w * dy;
      }
      return;
    }
    case PotentialKind::Harmonic:
      for (std::size_t j = 0; j < dim_; ++j) g[j] = params_[0] * x[j];
      return;
    case PotentialKind::Zero:
      std::fill(g, g + dim_, 0.0);
      return;
  }
}

double potential_value(const PotentialSystem& sys, const Eigen::VectorXd& x) {
  return sys.value({x.data(), static_cast<std::size_t>(x.size())});
}

Eigen::VectorXd potential_gradient(const PotentialSystem& sys, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  sys.gradient({x.data(), static_cast<std::size_t>(x.size())}, {g.data(), static_cast<std::size_t>(g.size())});
  return g;
}

std::size_t steps_for(double t, const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0)) throw ArgumentError("integrator step must be positive");
  if (!(t > 0.0)) throw ArgumentError("lag time must be positive");
  const double ratio = t / cfg.step;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, m)) {
    std::ostringstream os;
    os << "time " << t << " is not an integer multiple of the step " << cfg.step;
    throw ArgumentError(os.str());
  }
  return static_cast<std::size_t>(m);
}

namespace {

bool blown_up(const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i)
    if (!(std::abs(x[i]) <= kBlowUpThreshold)) return true;
  return false;
}

}  // namespace

Eigen::VectorXd em_step(const PotentialSystem& sys, const IntegratorConfig& cfg, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& noise) {
  const auto n = static_cast<std::size_t>(x.size());
  require_dim(sys, n);
  require_dim(sys, static_cast<std::size_t>(noise.size()));
  Eigen::VectorXd out = x;
  Eigen::VectorXd g(x.size());
  sys.gradient_unchecked(x.data(), g.data());
  simd::em_update({out.data(), n}, {g.data(), n}, {noise.data(), n}, cfg.step,
                  std::sqrt(2.0 * cfg.step / sys.beta()));
  if (blown_up(out.data(), n)) throw InstabilityError("Euler-Maruyama step diverged (step 1)");
  return out;
}

void propagate(const PotentialSystem& sys, const IntegratorConfig& cfg, std::span<double> states,
               std::span<RngStream> streams, std::size_t steps, NoiseMode mode) {
  const std::size_t n = sys.dim();
  const std::size_t count = streams.size();
  if (states.size() != count * n) throw ArgumentError("state buffer does not match replicate count");

  const double h = cfg.step;
  const double scale = std::sqrt(2.0 * h / sys.beta());
  constexpr std::size_t kBlock = 128;
  std::vector<double> grad(std::min(count, kBlock) * n);
  std::vector<double> noise(grad.size(), 0.0);

  for (std::size_t lo = 0; lo < count; lo += kBlock) {
    const std::size_t hi = std::min(count, lo + kBlock);
    const std::size_t len = (hi - lo) * n;
    double* x = states.data() + lo * n;
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t r = lo; r < hi; ++r) {
        const std::size_t off = (r - lo) * n;
        sys.gradient_unchecked(x + off, grad.data() + off);
        if (mode == NoiseMode::Random) streams[r].fill_normals({noise.data() + off, n});
      }
      simd::active().em_update(x, grad.data(), noise.data(), len, h, scale);
      if (blown_up(x, len)) {
        for (std::size_t r = lo; r < hi; ++r) {
          if (blown_up(x + (r - lo) * n, n)) {
            std::ostringstream os;
            os << "Euler-Maruyama trajectory diverged at step " << (s + 1) << " (replicate " << r
               << ", stream " << streams[r].stream_id() << ")";
            throw InstabilityError(os.str());
          }
        }
      }
    }
  }
}

Eigen::VectorXd simulate_endpoint(const PotentialSystem& sys, const IntegratorConfig& cfg,
                                  const Eigen::VectorXd& x0, double t, RngStream& rng, NoiseMode mode) {
  require_dim(sys, static_cast<std::size_t>(x0.size()));
  const std::size_t steps = steps_for(t, cfg);
  Eigen::VectorXd x = x0;
  propagate(sys, cfg, {x.data(), static_cast<std::size_t>(x.size())}, {&rng, 1}, steps, mode);
  return x;
}

}  // namespace tmrc
