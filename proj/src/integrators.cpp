#include "rsm/integrators.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "rsm/errors.hpp"

namespace rsm {

namespace {

constexpr double kOverflowGuard = 1e12;

std::size_t step_count(TimeSpan span, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(span.t1 > span.t0)) throw ConfigError("time span must be increasing");
  try {
    return static_cast<std::size_t>(aligned_steps(span.t1 - span.t0, dt));
  } catch (const AlignmentError&) {
    throw AlignmentError("dt does not divide the time span");
  }
}

void check_initial(const SlowFastSystem& sys, const Vec& x0, const Vec& y0) {
  if (x0.size() != sys.n_slow() || y0.size() != sys.n_fast()) {
    throw ConfigError("initial condition dimensions do not match the system");
  }
}

class Recorder {
 public:
  Recorder(Trajectory& traj, std::size_t steps, Eigen::Index n1, Eigen::Index n2, double t0,
           double dt)
      : traj_(traj), t0_(t0), dt_(dt) {
    traj_.n_slow = n1;
    traj_.n_fast = n2;
    traj_.times.reserve(steps + 1);
    traj_.states.reserve((steps + 1) * static_cast<std::size_t>(n1 + n2));
  }

  void push(std::size_t k, const Vec& x, const Vec& y) {
    const double t = t0_ + static_cast<double>(k) * dt_;
    const double norm = std::max(x.size() ? x.cwiseAbs().maxCoeff() : 0.0,
                                 y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
    if (!std::isfinite(norm) || norm > kOverflowGuard) {
      throw DivergenceError("state diverged (|z| = " + std::to_string(norm) + ") at t = " +
                                std::to_string(t),
                            t);
    }
    traj_.times.push_back(t);
    traj_.states.insert(traj_.states.end(), x.data(), x.data() + x.size());
    traj_.states.insert(traj_.states.end(), y.data(), y.data() + y.size());
  }

 private:
  Trajectory& traj_;
  double t0_;
  double dt_;
};

Trajectory run_scaled(const SlowFastSystem& sys, double eps, const StationaryProcess& noise,
                      const Vec& x0, const Vec& y0, TimeSpan span, double dt, SystemTag tag) {
  check_initial(sys, x0, y0);
  if (static_cast<Eigen::Index>(noise.dim) != sys.n_fast()) {
    throw ConfigError("noise process dimension does not match the fast variable");
  }
  const std::size_t steps = step_count(span, dt);
  const double fnorm = sys.F.operatorNorm();
  if (dt * fnorm > 0.1 + 1e-12) {
    throw ConfigError("step too large for the fast matrix: need dt |F| <= 0.1");
  }
  // eta lives in original time; read it at eps * t.
  const double clock = noise.kind == ProcessKind::eta ? noise.epsilon : 1.0;
  const bool noisy = sys.sigma != 0.0;
  if (noisy && !noise.covers(clock * span.t0, clock * span.t1)) {
    throw SpanError("noise process does not cover the integration span");
  }
  Trajectory traj;
  traj.tag = tag;
  traj.path = noise.source;
  Recorder rec(traj, steps, sys.n_slow(), sys.n_fast(), span.t0, dt);
  Vec x = x0;
  Vec y = y0;
  Vec shift = Vec::Zero(sys.n_fast());
  rec.push(0, x, y);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = span.t0 + static_cast<double>(k) * dt;
    if (noisy) shift = sys.sigma * noise.value(clock * t);
    const Vec ye = y + shift;
    const Vec dy = sys.F * y + sys.g2(x, ye);
    if (eps != 0.0) x += dt * eps * (sys.S * x + sys.g1(x, ye));
    y += dt * dy;
    rec.push(k + 1, x, y);
  }
  return traj;
}

}  // namespace

std::string to_string(SystemTag tag) {
  switch (tag) {
    case SystemTag::sde: return "sde";
    case SystemTag::transformed: return "transformed";
    case SystemTag::scaled: return "scaled";
    case SystemTag::critical: return "critical";
    case SystemTag::reduced: return "reduced";
  }
  return "unknown";
}

Vec Trajectory::state(std::size_t i) const {
  const auto w = width();
  return Eigen::Map<const Vec>(states.data() + i * static_cast<std::size_t>(w), w);
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (Eigen::Index i = 0; i < traj.n_slow; ++i) out << ",x" << i + 1;
  for (Eigen::Index i = 0; i < traj.n_fast; ++i) out << ",y" << i + 1;
  out << '\n';
  char buf[32];
  const auto w = static_cast<std::size_t>(traj.width());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
    out << buf;
    for (std::size_t c = 0; c < w; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.states[k * w + c]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

Trajectory integrate_sde(const SlowFastSystem& sys, const LevyPath& path, const Vec& x0,
                         const Vec& y0, TimeSpan span, double dt) {
  check_initial(sys, x0, y0);
  const double eps = sys.epsilon;
  if (!(eps > 0.0)) throw DomainError("the original system needs epsilon > 0");
  if (dt > eps / 10.0 * (1.0 + 1e-9)) {
    throw ConfigError("stiffness guard: dt must not exceed epsilon / 10");
  }
  const std::size_t steps = step_count(span, dt);
  if (static_cast<Eigen::Index>(path.dim()) != sys.n_fast()) {
    throw ConfigError("noise dimension does not match the fast variable");
  }
  std::int64_t cells_per_step = 0;
  try {
    cells_per_step = aligned_steps(dt, path.dt());
  } catch (const AlignmentError&) {
    throw AlignmentError("dt must be a whole number of noise cells");
  }
  if (cells_per_step < 1) throw AlignmentError("dt is finer than the noise path");
  const bool noisy = sys.sigma != 0.0;
  std::size_t cell0 = 0;
  if (noisy) {
    cell0 = path.node_index(span.t0);
    path.node_index(span.t1);
  }
  Vec scale(sys.n_fast());
  for (Eigen::Index c = 0; c < scale.size(); ++c) {
    scale[c] = sys.sigma * std::pow(eps, -1.0 / sys.noise.alpha[static_cast<std::size_t>(c)]);
  }

  Trajectory traj;
  traj.tag = SystemTag::sde;
  traj.path = path.seed();
  Recorder rec(traj, steps, sys.n_slow(), sys.n_fast(), span.t0, dt);
  Vec x = x0;
  Vec y = y0;
  Vec dl(sys.n_fast());
  rec.push(0, x, y);
  for (std::size_t k = 0; k < steps; ++k) {
    const Vec dx = sys.S * x + sys.g1(x, y);
    const Vec dy = sys.F * y + sys.g2(x, y);
    x += dt * dx;
    y += (dt / eps) * dy;
    if (noisy) {
      dl.setZero();
      const std::size_t base = cell0 + k * static_cast<std::size_t>(cells_per_step);
      for (std::int64_t j = 0; j < cells_per_step; ++j) {
        for (Eigen::Index c = 0; c < dl.size(); ++c) {
          dl[c] += path.increment(base + static_cast<std::size_t>(j), static_cast<std::size_t>(c));
        }
      }
      y += scale.cwiseProduct(dl);
    }
    rec.push(k + 1, x, y);
  }
  return traj;
}

Trajectory integrate_transformed(const SlowFastSystem& sys, const StationaryProcess& eta,
                                 const Vec& x0, const Vec& y0, TimeSpan span, double dt) {
  check_initial(sys, x0, y0);
  const double eps = sys.epsilon;
  if (!(eps > 0.0)) throw DomainError("the transformed system needs epsilon > 0");
  if (dt > eps / 10.0 * (1.0 + 1e-9)) {
    throw ConfigError("stiffness guard: dt must not exceed epsilon / 10");
  }
  const std::size_t steps = step_count(span, dt);
  const bool noisy = sys.sigma != 0.0;
  if (noisy) {
    if (eta.kind != ProcessKind::eta) throw ConfigError("transformed system is driven by eta");
    if (static_cast<Eigen::Index>(eta.dim) != sys.n_fast()) {
      throw ConfigError("eta dimension does not match the fast variable");
    }
    if (!eta.covers(span.t0, span.t1)) throw SpanError("eta does not cover the integration span");
  }
  Trajectory traj;
  traj.tag = SystemTag::transformed;
  traj.path = eta.source;
  Recorder rec(traj, steps, sys.n_slow(), sys.n_fast(), span.t0, dt);
  Vec x = x0;
  Vec y = y0;
  Vec shift = Vec::Zero(sys.n_fast());
  rec.push(0, x, y);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = span.t0 + static_cast<double>(k) * dt;
    if (noisy) shift = sys.sigma * eta.value(t);
    const Vec ye = y + shift;
    const Vec dx = sys.S * x + sys.g1(x, ye);
    const Vec dy = sys.F * y + sys.g2(x, ye);
    x += dt * dx;
    y += (dt / eps) * dy;
    rec.push(k + 1, x, y);
  }
  return traj;
}

Trajectory integrate_scaled(const SlowFastSystem& sys, const StationaryProcess& noise,
                            const Vec& x0, const Vec& y0, TimeSpan span, double dt) {
  return run_scaled(sys, sys.epsilon, noise, x0, y0, span, dt, SystemTag::scaled);
}

Trajectory integrate_critical(const SlowFastSystem& sys, const StationaryProcess& noise,
                              const Vec& x0, const Vec& y0, TimeSpan span, double dt) {
  return run_scaled(sys, 0.0, noise, x0, y0, span, dt, SystemTag::critical);
}

Trajectory integrate_reduced(const SlowFastSystem& sys, const ManifoldSection& h, const Vec& x0,
                             TimeSpan span, double dt) {
  if (x0.size() != sys.n_slow()) throw ConfigError("initial slow state has the wrong dimension");
  if (!h) throw ConfigError("reduced system needs a manifold section");
  const std::size_t steps = step_count(span, dt);
  Trajectory traj;
  traj.tag = SystemTag::reduced;
  Recorder rec(traj, steps, sys.n_slow(), sys.n_fast(), span.t0, dt);
  Vec x = x0;
  Vec hv = h(span.t0, x);
  if (hv.size() != sys.n_fast()) throw ConfigError("manifold section returned the wrong dimension");
  rec.push(0, x, hv);
  for (std::size_t k = 0; k < steps; ++k) {
    x += dt * (sys.S * x + sys.g1(x, hv));
    const double t = span.t0 + static_cast<double>(k + 1) * dt;
    hv = h(t, x);
    rec.push(k + 1, x, hv);
  }
  return traj;
}

}  // namespace rsm
