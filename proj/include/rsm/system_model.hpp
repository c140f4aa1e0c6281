#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsm/stable_noise.hpp"

namespace rsm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// g(x, y) with x in R^{n1}, y in R^{n2}.
using VectorField = std::function<Vec(const Vec& x, const Vec& y)>;
using JacobianField = std::function<Mat(const Vec& x, const Vec& y)>;

// dx = (S x + g1(x, y)) dt
// dy = (F y + g2(x, y)) dt / epsilon + sigma epsilon^{-1/alpha} dL_t
struct SlowFastSystem {
  std::string name;
  Mat S;
  Mat F;
  VectorField g1;
  VectorField g2;
  // Optional analytic partials of g2; central differences otherwise.
  JacobianField g2_x;
  JacobianField g2_y;
  double K = 0.0;  // declared joint Lipschitz constant of g1, g2
  double epsilon = 0.0;
  double sigma = 0.0;
  StableSpec noise;
  std::optional<double> g1_bound;

  Eigen::Index n_slow() const noexcept { return S.rows(); }
  Eigen::Index n_fast() const noexcept { return F.rows(); }

  // Shapes, g_i(0,0) = 0, K > 0, epsilon > 0, sigma >= 0, noise dim = n2.
  void validate() const;

  SlowFastSystem with_epsilon(double eps) const;
  SlowFastSystem with_sigma(double s) const;
};

// Partial derivatives of g2 at (x, y); analytic when supplied, central
// differences with step 1e-6 * max(1, |coordinate|) otherwise.
Mat g2_jacobian_x(const SlowFastSystem& sys, const Vec& x, const Vec& y);
Mat g2_jacobian_y(const SlowFastSystem& sys, const Vec& x, const Vec& y);

// Largest eigenvalue of (A + A^T) / 2: |e^{At} v| <= e^{mu t} |v| for t >= 0.
double logarithmic_norm(const Mat& A);

struct DeclaredRates {
  double gamma_s;
  double gamma_f;
};

struct HypothesisReport {
  double gamma_s = 0.0;
  double gamma_f = 0.0;
  double gamma = 0.0;
  double rho_eps = 0.0;
  double rho_bar_eps = 0.0;
  double lip_h_bound = 0.0;
  bool spectral_gap_ok = false;
  bool lipschitz_gap_ok = false;
  bool contraction_ok = false;
  // False when the rates came from declared (e.g. eigenvalue) input
  // rather than logarithmic norms.
  bool certified = false;
  std::vector<std::string> notes;
};

// gamma defaults to (-gamma_f - K) / 2.
double default_gamma(double K, double gamma_f);

HypothesisReport validate_hypotheses(const SlowFastSystem& sys,
                                     std::optional<double> gamma = std::nullopt,
                                     std::optional<DeclaredRates> declared = std::nullopt);

// rho(eps) = eps K / (gamma + eps gamma_s) - K / (gamma + gamma_f)
double contraction_rate(double epsilon, double K, double gamma, double gamma_s, double gamma_f);

// Contraction constant of the exponential-tracking operator.
double tracking_rate(double epsilon, double K, double gamma, double gamma_s, double gamma_f);

// Lipschitz bound of the manifold graph: -K / (gamma + gamma_f) / (1 - rho(eps)).
double lipschitz_bound_h(double epsilon, double K, double gamma, double gamma_s, double gamma_f);

// Largest eps with rho(eps) = rho_max. Returns +inf when rho stays below
// rho_max for every eps (rho_max - rho(0) >= K / gamma_s).
double epsilon_threshold(double K, double gamma, double gamma_s, double gamma_f, double rho_max);

// Diagnostics only: max |g(a) - g(b)| / (|xa - xb| + |ya - yb|) over random
// pairs in the box [-radius, radius]^n.
double estimate_lipschitz(const SlowFastSystem& sys, double radius, int samples,
                          std::uint64_t seed);

}  // namespace rsm
