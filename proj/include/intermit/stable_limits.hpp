#pragma once

#include <stdexcept>
#include <vector>

#include "intermit/rng.hpp"

namespace intermit::stable {

// (alpha, beta_1..beta_d): parameters of the skew Bessel limit objects.
// beta must lie on the simplex.
struct StableParams {
  double alpha;
  std::vector<double> beta;

  StableParams(double a, std::vector<double> b);
  int rays() const { return static_cast<int>(beta.size()); }
};

// One draw of the joint limit vector.  z sums to one; zg lies on the simplex
// whenever it has been filled in.
struct LimitSample {
  std::vector<double> z;   // occupation fractions Z_j(1)
  double l = 0.0;          // local time L(1)
  double g = 0.0;          // last zero G(1)
  double dv = 0.0;         // first zero after 1, D(1)
  std::vector<double> zg;  // occupation fractions at the last zero, Z_j(G)/G
};

struct EffectiveSampleSizeLow : std::runtime_error {
  explicit EffectiveSampleSizeLow(double ess)
      : std::runtime_error("sample_zg_joint: effective sample size below 10%"), ess_frac(ess) {}
  double ess_frac;
};

// One-sided alpha-stable variable with Laplace transform exp(-lambda^alpha * scale).
// Kanter's representation; scale = 0 returns 0.
double sample_one_sided_stable(double alpha, double scale, Rng& rng);

// Joint (Z_j(1), L(1)) = ((xi_j / sum xi), (sum xi)^{-alpha}) with independent
// one-sided stable xi_j of scale beta_j.
LimitSample sample_lamperti_joint(const StableParams& params, Rng& rng);

// (G(t), D(t)): G/t is Beta(alpha, 1-alpha); conditionally on G = u,
// P[D > v] = ((v-u)/(t-u))^{-alpha}.
std::pair<double, double> sample_gd_pair(const StableParams& params, double t, Rng& rng);

// E[exp(-lambda L(t))] for the Mittag-Leffler process of order alpha: the
// series sum_n (-lambda t^alpha)^n / Gamma(1+n alpha), evaluated by the
// spectral integral once the argument is large enough to make the
// alternating series ill-conditioned.
double mittag_leffler_laplace(double lambda, double t, double alpha);

// Closed-form CDFs.
double arcsine_cdf(double u, double t);
double beta_a_1ma_cdf(double u, double alpha);
double half_gaussian_cdf(double u, double t);
double half_gaussian_density(double u, double t);
double arcsine_density(double u, double t);
double beta_a_1ma_density(double u, double alpha);

// Lamperti generalized arcsine law of Z_1(1) for d = 2 with beta_1 = p.
double lamperti_cdf(double x, double alpha, double p);
double lamperti_density(double x, double alpha, double p);

// Law of Z_1(G)/G for d = 2, beta_1 = p.  The alpha = 1/2 density is closed
// form; other alpha go through adaptive quadrature of the CDF integral, and
// the density through differentiation of that CDF.
double lamperti_zg_density(double x, double alpha, double p);
double lamperti_zg_cdf(double x, double alpha, double p);

// Joint density of (G(t), D(t)) on {0 < u < t < v}.
double gd_joint_density(double u, double v, double t, double alpha);

// (Z_j(G)/G, L/G^alpha, G, D, post-G ray) per the three-block decomposition:
// proposals from sample_lamperti_joint are importance-reweighted by
// Gamma(1+alpha) (sum xi)^{-alpha} (self-normalized) and resampled; (G, D)
// and the post-G ray indicator are drawn independently.
std::vector<LimitSample> sample_zg_joint(const StableParams& params, std::size_t n, Rng& rng);

}  // namespace intermit::stable
