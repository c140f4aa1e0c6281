#include "rsm/stable_noise.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "rsm/errors.hpp"
#include "rsm/philox.hpp"

namespace rsm {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'V', 'Y', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kFormatVersion = 1;

void check_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw DomainError("stability index must lie in (1, 2], got " + std::to_string(alpha));
  }
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ConfigError("truncated path file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw ConfigError("truncated path file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

StableSpec StableSpec::uniform(double alpha, std::size_t dim) {
  return StableSpec{std::vector<double>(dim, alpha), 1.0};
}

void StableSpec::validate() const {
  if (alpha.empty()) throw DomainError("stable noise needs at least one component");
  for (double a : alpha) check_alpha(a);
  if (!(scale > 0.0)) throw DomainError("stable noise scale must be positive");
}

double sample_standard_stable(double alpha, double u1, double u2) {
  check_alpha(alpha);
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
    throw DomainError("uniform draws must lie in (0, 1)");
  }
  const double v = std::numbers::pi * (u1 - 0.5);
  const double w = -std::log(u2);
  if (alpha == 2.0) return 2.0 * std::sqrt(w) * std::sin(v);
  const double av = alpha * v;
  return std::sin(av) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
}

std::int64_t aligned_steps(double t, double dt) {
  const double q = t / dt;
  const double r = std::nearbyint(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(r))) {
    throw AlignmentError("time " + std::to_string(t) + " is not a multiple of dt = " +
                         std::to_string(dt));
  }
  return static_cast<std::int64_t>(r);
}

LevyPath::LevyPath(StableSpec spec, double dt, double t_min, double t_max,
                   std::vector<double> increments, SeedRecord seed)
    : spec_(std::move(spec)), dt_(dt), t_min_(t_min), t_max_(t_max), seed_(seed) {
  spec_.validate();
  if (!(dt > 0.0)) throw ConfigError("path step must be positive");
  if (!(t_min <= 0.0 && 0.0 <= t_max)) throw ConfigError("path window must contain t = 0");
  const std::int64_t first = aligned_steps(t_min, dt);
  const std::int64_t last = aligned_steps(t_max, dt);
  cells_ = static_cast<std::size_t>(last - first);
  if (increments.size() != cells_ * spec_.dim()) {
    throw ConfigError("increment array size does not match span and dimension");
  }
  increments_ = std::move(increments);
}

std::size_t LevyPath::node_index(double t) const {
  const std::int64_t k = aligned_steps(t - t_min_, dt_);
  if (k < 0 || static_cast<std::size_t>(k) > cells_) {
    throw SpanError("time " + std::to_string(t) + " outside path window [" +
                    std::to_string(t_min_) + ", " + std::to_string(t_max_) + "]");
  }
  return static_cast<std::size_t>(k);
}

double LevyPath::value(double t, std::size_t component) const {
  const std::size_t origin = node_index(0.0);
  const std::size_t k = node_index(t);
  double sum = 0.0;
  if (k >= origin) {
    for (std::size_t c = origin; c < k; ++c) sum += increment(c, component);
  } else {
    for (std::size_t c = k; c < origin; ++c) sum -= increment(c, component);
  }
  return sum;
}

LevyPath generate_path(const StableSpec& spec, double t_min, double t_max, double dt,
                       std::uint64_t seed) {
  spec.validate();
  if (!(dt > 0.0)) throw ConfigError("path step must be positive");
  if (!(t_min <= 0.0 && 0.0 <= t_max)) throw ConfigError("path window must contain t = 0");
  std::int64_t first = 0;
  std::int64_t last = 0;
  try {
    first = aligned_steps(t_min, dt);
    last = aligned_steps(t_max, dt);
  } catch (const AlignmentError& e) {
    throw ConfigError(std::string("path span is not an integer number of cells: ") + e.what());
  }
  const std::size_t dim = spec.dim();
  const std::size_t cells = static_cast<std::size_t>(last - first);
  std::vector<double> inc(cells * dim);
  const Philox4x32 rng(seed);
  std::vector<double> factor(dim);
  for (std::size_t c = 0; c < dim; ++c) factor[c] = spec.scale * std::pow(dt, 1.0 / spec.alpha[c]);

#pragma omp parallel for schedule(static) if (cells * dim > 65536)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(cells); ++k) {
    const std::int64_t absolute = first + k;
    // Negative time is an independent substream (side 1).
    const std::uint32_t side = absolute < 0 ? 1u : 0u;
    const std::uint64_t counter =
        absolute < 0 ? static_cast<std::uint64_t>(-absolute - 1) : static_cast<std::uint64_t>(absolute);
    for (std::size_t c = 0; c < dim; ++c) {
      const auto u = rng.uniform_pair({static_cast<std::uint32_t>(counter),
                                       static_cast<std::uint32_t>(counter >> 32),
                                       static_cast<std::uint32_t>(c), side});
      inc[static_cast<std::size_t>(k) * dim + c] =
          factor[c] * sample_standard_stable(spec.alpha[c], u[0], u[1]);
    }
  }
  return LevyPath(spec, dt, t_min, t_max, std::move(inc), SeedRecord{seed, 0});
}

LevyPath shift_path(const LevyPath& path, double t) {
  const std::int64_t steps = aligned_steps(t, path.dt());
  if (t < path.t_min() - 1e-12 * path.dt() || t > path.t_max() + 1e-12 * path.dt()) {
    throw SpanError("shift " + std::to_string(t) + " moves the origin outside the path window");
  }
  const double dt = path.dt();
  const std::int64_t first = aligned_steps(path.t_min(), dt) - steps;
  const std::int64_t last = aligned_steps(path.t_max(), dt) - steps;
  SeedRecord seed = path.seed();
  seed.origin_cell += steps;
  std::vector<double> inc(path.increments().begin(), path.increments().end());
  return LevyPath(path.spec(), dt, static_cast<double>(first) * dt, static_cast<double>(last) * dt,
                  std::move(inc), seed);
}

LevyPath rescale_time(const LevyPath& path, double c) {
  if (!(c > 0.0)) throw DomainError("time rescaling factor must be positive");
  const std::size_t dim = path.dim();
  std::vector<double> factor(dim);
  for (std::size_t k = 0; k < dim; ++k) factor[k] = std::pow(c, -1.0 / path.spec().alpha[k]);
  std::vector<double> inc(path.increments().begin(), path.increments().end());
  for (std::size_t i = 0; i < inc.size(); ++i) inc[i] *= factor[i % dim];
  const double dt = path.dt() / c;
  const std::int64_t first = aligned_steps(path.t_min(), path.dt());
  const std::int64_t last = aligned_steps(path.t_max(), path.dt());
  return LevyPath(path.spec(), dt, static_cast<double>(first) * dt, static_cast<double>(last) * dt,
                  std::move(inc), path.seed());
}

void write_path(std::ostream& out, const LevyPath& path) {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(path.dim()));
  for (double a : path.spec().alpha) put_f64(out, a);
  put_f64(out, path.dt());
  put_f64(out, path.t_min());
  put_f64(out, path.t_max());
  put_u64(out, path.seed().seed);
  put_u64(out, static_cast<std::uint64_t>(path.seed().origin_cell));
  put_u64(out, path.increments().size());
  for (double v : path.increments()) put_f64(out, v);
}

LevyPath read_path(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw ConfigError("not a Levy path file");
  }
  if (get_u32(in) != kFormatVersion) throw ConfigError("unsupported path file version");
  const std::uint32_t dim = get_u32(in);
  StableSpec spec;
  spec.alpha.resize(dim);
  for (auto& a : spec.alpha) a = get_f64(in);
  const double dt = get_f64(in);
  const double t_min = get_f64(in);
  const double t_max = get_f64(in);
  SeedRecord seed;
  seed.seed = get_u64(in);
  seed.origin_cell = static_cast<std::int64_t>(get_u64(in));
  const std::uint64_t count = get_u64(in);
  std::vector<double> inc(count);
  for (auto& v : inc) v = get_f64(in);
  return LevyPath(std::move(spec), dt, t_min, t_max, std::move(inc), seed);
}

}  // namespace rsm
