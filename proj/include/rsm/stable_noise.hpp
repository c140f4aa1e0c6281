#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rsm {

// Symmetric alpha-stable noise specification. Components are independent;
// each carries its own stability index.
struct StableSpec {
  std::vector<double> alpha;
  double scale = 1.0;

  static StableSpec uniform(double alpha, std::size_t dim);

  std::size_t dim() const noexcept { return alpha.size(); }
  // Throws DomainError unless every alpha is in (1, 2], dim >= 1, scale > 0.
  void validate() const;
};

// One variate of the standard symmetric alpha-stable law, characteristic
// function exp(-|u|^alpha), from two independent U(0,1) draws
// (Chambers-Mallows-Stuck). alpha = 2 gives Normal(0, 2).
double sample_standard_stable(double alpha, double u1, double u2);

struct SeedRecord {
  std::uint64_t seed = 0;
  // Absolute RNG cell index of this path's time origin. Zero for freshly
  // generated paths; shifting moves it so provenance survives theta_t.
  std::int64_t origin_cell = 0;
};

// Two-sided cadlag Levy path on a uniform grid, stored as increments.
// Cell k covers [t_min + k dt, t_min + (k+1) dt); increments are laid out
// time-major, component-minor. The value at t = 0 is exactly 0.
class LevyPath {
 public:
  LevyPath(StableSpec spec, double dt, double t_min, double t_max,
           std::vector<double> increments, SeedRecord seed);

  const StableSpec& spec() const noexcept { return spec_; }
  std::size_t dim() const noexcept { return spec_.dim(); }
  double dt() const noexcept { return dt_; }
  double t_min() const noexcept { return t_min_; }
  double t_max() const noexcept { return t_max_; }
  const SeedRecord& seed() const noexcept { return seed_; }

  std::size_t cell_count() const noexcept { return cells_; }
  // Cell index (relative to t_min) of grid time t; AlignmentError if t is
  // off-grid, SpanError if it lies outside [t_min, t_max].
  std::size_t node_index(double t) const;
  double cell_start(std::size_t k) const noexcept { return t_min_ + static_cast<double>(k) * dt_; }

  double increment(std::size_t cell, std::size_t component) const {
    return increments_[cell * dim() + component];
  }
  std::span<const double> increments() const noexcept { return increments_; }

  // L_t for one component (sum of increments between 0 and t).
  double value(double t, std::size_t component) const;

 private:
  StableSpec spec_;
  double dt_;
  double t_min_;
  double t_max_;
  std::size_t cells_;
  std::vector<double> increments_;
  SeedRecord seed_;
};

// Draws dt^{1/alpha} * Z for every cell and component. Each variate is a
// pure function of (seed, absolute cell, component, side), so windows of
// the same seed agree on their overlap.
LevyPath generate_path(const StableSpec& spec, double t_min, double t_max, double dt,
                       std::uint64_t seed);

// Path of theta_t omega: s -> omega(s + t) - omega(t). The window moves to
// [t_min - t, t_max - t]; t must be a grid node inside [t_min, t_max].
LevyPath shift_path(const LevyPath& path, double t);

// Path of s -> c^{-1/alpha} L_{c s}: same variates, step dt / c. With
// c = epsilon this maps the original time frame to the rescaled one.
LevyPath rescale_time(const LevyPath& path, double c);

// Binary dump: magic "LEVYPATH", u32 version, u32 dim, f64 alpha[dim],
// f64 dt, f64 t_min, f64 t_max, u64 seed, i64 origin_cell, u64 count,
// f64 increments[count]; everything little-endian.
void write_path(std::ostream& out, const LevyPath& path);
LevyPath read_path(std::istream& in);

// Exact grid index helper shared by the grid-based modules.
std::int64_t aligned_steps(double t, double dt);

}  // namespace rsm
