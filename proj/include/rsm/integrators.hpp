#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsm/stochastic_convolution.hpp"
#include "rsm/system_model.hpp"

namespace rsm {

enum class SystemTag { sde, transformed, scaled, critical, reduced };

std::string to_string(SystemTag tag);

struct TimeSpan {
  double t0 = 0.0;
  double t1 = 0.0;
};

// Uniform-grid solution. Every state row holds (x, y); reduced runs store
// the lifted pair (xbar, h(t, xbar)).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  Eigen::Index n_slow = 0;
  Eigen::Index n_fast = 0;
  SystemTag tag = SystemTag::sde;
  SeedRecord path;

  std::size_t size() const noexcept { return times.size(); }
  Eigen::Index width() const noexcept { return n_slow + n_fast; }
  Vec state(std::size_t i) const;
  Vec x(std::size_t i) const { return state(i).head(n_slow); }
  Vec y(std::size_t i) const { return state(i).tail(n_fast); }
};

// Header t,x1..,y1.. then one row per sample, %.17g.
void write_csv(std::ostream& out, const Trajectory& traj);

// Euler-Maruyama on the original system:
//   x += dt (S x + g1),  y += dt/eps (F y + g2) + sigma eps^{-1/alpha} dL
// dt must be a whole number of path cells and at most eps / 10.
Trajectory integrate_sde(const SlowFastSystem& sys, const LevyPath& path, const Vec& x0,
                         const Vec& y0, TimeSpan span, double dt);

// Random ODE for (x, y - sigma eta): g_i see y + sigma eta(t). eta must be
// sampled at every step time; (x0, y0) are already transformed.
Trajectory integrate_transformed(const SlowFastSystem& sys, const StationaryProcess& eta,
                                 const Vec& x0, const Vec& y0, TimeSpan span, double dt);

// Rescaled-time system:
//   x' = eps (S x + g1(x, y + sigma xi)),  y' = F y + g2(x, y + sigma xi)
// An eta process is read at eps * t, which is xi on the rescaled path.
Trajectory integrate_scaled(const SlowFastSystem& sys, const StationaryProcess& noise,
                            const Vec& x0, const Vec& y0, TimeSpan span, double dt);

// integrate_scaled at eps = 0: x stays at x0.
Trajectory integrate_critical(const SlowFastSystem& sys, const StationaryProcess& noise,
                              const Vec& x0, const Vec& y0, TimeSpan span, double dt);

// h(t, x): fast coordinate of the manifold over x at time t, in original
// coordinates. Sections throw ExtrapolationError when x leaves their domain.
using ManifoldSection = std::function<Vec(double t, const Vec& x)>;

// xbar' = S xbar + g1(xbar, h(t, xbar)); stores (xbar, h(t, xbar)).
Trajectory integrate_reduced(const SlowFastSystem& sys, const ManifoldSection& h, const Vec& x0,
                             TimeSpan span, double dt);

}  // namespace rsm
