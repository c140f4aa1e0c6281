#include "rsm/system_model.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "rsm/errors.hpp"

namespace rsm {

namespace {

void require_rate_domain(double epsilon, double gamma, double gamma_s, double gamma_f) {
  if (!(gamma > 0.0)) throw DomainError("auxiliary rate gamma must be positive");
  if (!(gamma + gamma_f < 0.0)) throw DomainError("gamma + gamma_f must be negative");
  if (!(gamma + epsilon * gamma_s > 0.0)) throw DomainError("gamma + eps * gamma_s must be positive");
  if (epsilon < 0.0) throw DomainError("epsilon must be non-negative");
}

Mat central_difference(const VectorField& g, const Vec& x, const Vec& y, bool wrt_x) {
  const Vec& base = wrt_x ? x : y;
  const Vec g0 = g(x, y);
  Mat J(g0.size(), base.size());
  for (Eigen::Index j = 0; j < base.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(base[j]));
    Vec xp = x, xm = x, yp = y, ym = y;
    if (wrt_x) {
      xp[j] += h;
      xm[j] -= h;
    } else {
      yp[j] += h;
      ym[j] -= h;
    }
    const Vec d = (g(xp, yp) - g(xm, ym)) / (2.0 * h);
    if (!d.allFinite()) throw DerivativeError("finite-difference derivative of g2 is not finite");
    J.col(j) = d;
  }
  return J;
}

}  // namespace

void SlowFastSystem::validate() const {
  if (S.rows() == 0 || S.rows() != S.cols()) throw ConfigError("S must be a non-empty square matrix");
  if (F.rows() == 0 || F.rows() != F.cols()) throw ConfigError("F must be a non-empty square matrix");
  if (!g1 || !g2) throw ConfigError("nonlinearities g1 and g2 must be provided");
  if (!(K > 0.0)) throw ConfigError("Lipschitz constant K must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  noise.validate();
  if (static_cast<Eigen::Index>(noise.dim()) != n_fast()) {
    throw ConfigError("noise dimension must equal the fast dimension");
  }
  const Vec zx = Vec::Zero(n_slow());
  const Vec zy = Vec::Zero(n_fast());
  const Vec a = g1(zx, zy);
  const Vec b = g2(zx, zy);
  if (a.size() != n_slow()) throw ConfigError("g1 returns a vector of the wrong size");
  if (b.size() != n_fast()) throw ConfigError("g2 returns a vector of the wrong size");
  if (a.lpNorm<Eigen::Infinity>() > 1e-12 || b.lpNorm<Eigen::Infinity>() > 1e-12) {
    throw ConfigError("nonlinearities must vanish at the origin");
  }
}

SlowFastSystem SlowFastSystem::with_epsilon(double eps) const {
  SlowFastSystem copy = *this;
  copy.epsilon = eps;
  return copy;
}

SlowFastSystem SlowFastSystem::with_sigma(double s) const {
  SlowFastSystem copy = *this;
  copy.sigma = s;
  return copy;
}

Mat g2_jacobian_x(const SlowFastSystem& sys, const Vec& x, const Vec& y) {
  if (sys.g2_x) return sys.g2_x(x, y);
  return central_difference(sys.g2, x, y, true);
}

Mat g2_jacobian_y(const SlowFastSystem& sys, const Vec& x, const Vec& y) {
  if (sys.g2_y) return sys.g2_y(x, y);
  return central_difference(sys.g2, x, y, false);
}

double logarithmic_norm(const Mat& A) {
  if (A.rows() != A.cols()) throw ConfigError("logarithmic norm needs a square matrix");
  const Mat sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double default_gamma(double K, double gamma_f) { return 0.5 * (-gamma_f - K); }

HypothesisReport validate_hypotheses(const SlowFastSystem& sys, std::optional<double> gamma,
                                     std::optional<DeclaredRates> declared) {
  if (sys.S.rows() != sys.S.cols() || sys.F.rows() != sys.F.cols()) {
    throw ConfigError("S and F must be square");
  }
  if (gamma && !(*gamma > 0.0)) throw DomainError("auxiliary rate gamma must be positive");

  HypothesisReport r;
  if (declared) {
    r.gamma_s = declared->gamma_s;
    r.gamma_f = declared->gamma_f;
    r.certified = false;
    r.notes.push_back("rates declared by the caller; spectral gap not certified");
  } else {
    // Backward bound |e^{St} x| <= e^{gamma_s t}|x| for t <= 0 holds with
    // gamma_s = -mu(-S) = lambda_min((S + S^T)/2).
    r.gamma_s = -logarithmic_norm(-sys.S);
    r.gamma_f = logarithmic_norm(sys.F);
    r.certified = true;
  }
  r.spectral_gap_ok = r.gamma_s > 0.0 && r.gamma_f < 0.0;
  if (!r.spectral_gap_ok) r.notes.push_back("spectral gap fails: need gamma_s > 0 and gamma_f < 0");
  r.lipschitz_gap_ok = sys.K > 0.0 && r.gamma_f < 0.0 && sys.K < -r.gamma_f;
  if (!r.lipschitz_gap_ok) r.notes.push_back("gap condition fails: need K < -gamma_f");

  r.gamma = gamma ? *gamma : default_gamma(sys.K, r.gamma_f);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.rho_eps = r.rho_bar_eps = r.lip_h_bound = nan;
  const bool margin = r.lipschitz_gap_ok && r.gamma > 0.0 && sys.K < -(r.gamma + r.gamma_f) &&
                      r.gamma + sys.epsilon * r.gamma_s > 0.0;
  if (!margin) {
    r.notes.push_back("no admissible gamma margin: need 0 < gamma and K < -(gamma + gamma_f)");
    return r;
  }
  r.rho_eps = contraction_rate(sys.epsilon, sys.K, r.gamma, r.gamma_s, r.gamma_f);
  r.contraction_ok = r.rho_eps > 0.0 && r.rho_eps < 1.0;
  if (!r.contraction_ok) {
    r.notes.push_back("rho(eps) >= 1: Lyapunov-Perron operator not contractive");
    return r;
  }
  r.rho_bar_eps = tracking_rate(sys.epsilon, sys.K, r.gamma, r.gamma_s, r.gamma_f);
  r.lip_h_bound = lipschitz_bound_h(sys.epsilon, sys.K, r.gamma, r.gamma_s, r.gamma_f);
  return r;
}

double contraction_rate(double epsilon, double K, double gamma, double gamma_s, double gamma_f) {
  require_rate_domain(epsilon, gamma, gamma_s, gamma_f);
  return epsilon * K / (gamma + epsilon * gamma_s) - K / (gamma + gamma_f);
}

double tracking_rate(double epsilon, double K, double gamma, double gamma_s, double gamma_f) {
  const double rho = contraction_rate(epsilon, K, gamma, gamma_s, gamma_f);
  const double a = gamma + epsilon * gamma_s;
  const double b = gamma + gamma_f;
  const double bracket = 1.0 - K * (epsilon / a - 1.0 / b);
  if (bracket == 0.0) throw DomainError("tracking rate bracket vanishes");
  return rho - epsilon * K * K / (a * b * bracket);
}

double lipschitz_bound_h(double epsilon, double K, double gamma, double gamma_s, double gamma_f) {
  const double rho = contraction_rate(epsilon, K, gamma, gamma_s, gamma_f);
  if (!(rho < 1.0)) throw ContractionError("rho(eps) >= 1, Lipschitz bound undefined");
  return -K / (gamma + gamma_f) / (1.0 - rho);
}

double epsilon_threshold(double K, double gamma, double gamma_s, double gamma_f, double rho_max) {
  const double rho0 = contraction_rate(0.0, K, gamma, gamma_s, gamma_f);
  if (!(rho_max > rho0)) throw DomainError("rho_max must exceed rho(0); no admissible epsilon");
  if (!(rho_max < 1.0)) throw DomainError("rho_max must be below 1");
  // eps K / (gamma + eps gamma_s) = d  <=>  eps (K - d gamma_s) = d gamma
  const double d = rho_max - rho0;
  const double denom = K - d * gamma_s;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return d * gamma / denom;
}

double estimate_lipschitz(const SlowFastSystem& sys, double radius, int samples,
                          std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  auto draw = [&](Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = u(gen);
    return v;
  };
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec xa = draw(sys.n_slow()), xb = draw(sys.n_slow());
    const Vec ya = draw(sys.n_fast()), yb = draw(sys.n_fast());
    const double d = (xa - xb).norm() + (ya - yb).norm();
    if (d == 0.0) continue;
    best = std::max(best, (sys.g1(xa, ya) - sys.g1(xb, yb)).norm() / d);
    best = std::max(best, (sys.g2(xa, ya) - sys.g2(xb, yb)).norm() / d);
  }
  return best;
}

}  // namespace rsm
