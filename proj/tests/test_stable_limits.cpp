#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "intermit/rng.hpp"
#include "intermit/special.hpp"
#include "intermit/stable_limits.hpp"
#include "intermit/stats.hpp"

using intermit::Rng;
using namespace intermit::stable;
using intermit::harness::ks_statistic;
using intermit::harness::ks_two_sample;

TEST_CASE("one-sided stable sampler: degenerate scale") {
  Rng rng(1);
  CHECK(sample_one_sided_stable(0.5, 0.0, rng) == 0.0);
}

TEST_CASE("one-sided stable sampler: Laplace transform at alpha = 1/2") {
  Rng rng(20001);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(-sample_one_sided_stable(0.5, 1.0, rng));
  acc /= n;
  CHECK(acc == doctest::Approx(std::exp(-1.0)).epsilon(0.003 / std::exp(-1.0)));
}

TEST_CASE("one-sided stable sampler matches the Levy closed form at alpha = 1/2") {
  // exp(-sqrt(lambda)) is the Laplace transform of 1/(2 Z^2), Z standard normal.
  Rng rng(20003);
  const int n = 100000;
  std::vector<double> kanter(n), levy(n);
  for (int i = 0; i < n; ++i) kanter[i] = sample_one_sided_stable(0.5, 1.0, rng);
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    levy[i] = 0.5 / (z * z);
  }
  CHECK(ks_two_sample(kanter, levy) < 0.01);
}

TEST_CASE("one-sided stable scaling law in the scale parameter") {
  Rng rng(20005);
  const int n = 100000;
  const double alpha = 0.7, beta = 0.37;
  std::vector<double> scaled(n), direct(n);
  for (int i = 0; i < n; ++i) direct[i] = sample_one_sided_stable(alpha, beta, rng);
  for (int i = 0; i < n; ++i)
    scaled[i] = std::pow(beta, 1.0 / alpha) * sample_one_sided_stable(alpha, 1.0, rng);
  CHECK(ks_two_sample(direct, scaled) < 0.01);
}

TEST_CASE("Lamperti joint sampler: simplex identity and arcsine marginal") {
  const StableParams params(0.5, {0.5, 0.5});
  Rng rng(20007);
  const int n = 1000000;
  std::vector<double> z1(n);
  double mean_l = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_lamperti_joint(params, rng);
    CHECK(s.z[0] + s.z[1] == doctest::Approx(1.0).epsilon(1e-12));
    z1[i] = s.z[0];
    mean_l += s.l;
  }
  mean_l /= n;
  CHECK(ks_statistic(z1, [](double u) { return arcsine_cdf(u, 1.0); }) < 0.01);
  // E[L(1)] = 1/Gamma(1+alpha)
  CHECK(mean_l == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(0.01));
}

TEST_CASE("Lamperti occupation law closed form at general (alpha, p)") {
  const double alpha = 0.6, p = 0.3;
  const StableParams params(alpha, {p, 1.0 - p});
  Rng rng(20009);
  const int n = 100000;
  std::vector<double> z1(n);
  for (int i = 0; i < n; ++i) z1[i] = sample_lamperti_joint(params, rng).z[0];
  CHECK(ks_statistic(z1, [&](double u) { return lamperti_cdf(u, alpha, p); }) < 0.01);
  // The closed form integrates its own density.
  const double total = intermit::integrate(
      [&](double x) { return lamperti_density(x, alpha, p); }, 1e-9, 1.0 - 1e-9, 1e-10);
  CHECK(total == doctest::Approx(1.0).epsilon(2e-4));
}

TEST_CASE("Mittag-Leffler moment identities via Monte Carlo") {
  const StableParams params(0.5, {1.0});
  Rng rng(20011);
  const int n = 400000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = sample_lamperti_joint(params, rng).l;
    m1 += l;
    m2 += l * l;
  }
  m1 /= n;
  m2 /= n;
  CHECK(m1 == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(0.02));
  CHECK(m2 == doctest::Approx(2.0 / std::tgamma(2.0)).epsilon(0.02));
}

TEST_CASE("joint (G, D) sampler marginals") {
  const StableParams params(0.5, {0.5, 0.5});
  Rng rng(20013);
  const int n = 100000;
  std::vector<double> g(n);
  int below_half = 0;
  for (int i = 0; i < n; ++i) {
    const auto gd = sample_gd_pair(params, 1.0, rng);
    CHECK(gd.first <= 1.0);
    CHECK(gd.second > 1.0);
    g[i] = gd.first;
    if (gd.first <= 0.5) ++below_half;
  }
  CHECK(static_cast<double>(below_half) / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(ks_statistic(g, [](double u) { return beta_a_1ma_cdf(u, 0.5); }) < 0.01);
}

TEST_CASE("(G, D) joint density integrates to one") {
  for (const double alpha : {0.3, 0.5, 0.7}) {
    // Tensor midpoint rule on the unit square: u through the Beta-exponent
    // power substitutions on each half, v through q = r^{1/alpha}, under
    // which v - u = (1 - u)/q stays finite all the way to the endpoint.
    const int nu = 3000, nv = 1600;
    auto inner = [&](double u) {
      double acc = 0.0;
      const double hr = 1.0 / nv;
      for (int i = 0; i < nv; ++i) {
        const double r = (i + 0.5) * hr;
        const double q = std::pow(r, 1.0 / alpha);
        const double v = u + (1.0 - u) / q;
        const double dv = (1.0 - u) / (q * q) * (1.0 / alpha) * std::pow(r, 1.0 / alpha - 1.0);
        acc += gd_joint_density(u, v, 1.0, alpha) * dv;
      }
      return acc * hr;
    };
    double mass = 0.0;
    const double hu = 1.0 / nu;
    for (int k = 0; k < nu; ++k) {
      const double t = (k + 0.5) * hu;
      const double u_lo = 0.5 * std::pow(t, 1.0 / alpha);
      mass += inner(u_lo) * (0.5 / alpha) * std::pow(t, 1.0 / alpha - 1.0) * hu;
      const double u_hi = 1.0 - 0.5 * std::pow(t, 1.0 / (1.0 - alpha));
      mass += inner(u_hi) * (0.5 / (1.0 - alpha)) * std::pow(t, 1.0 / (1.0 - alpha) - 1.0) * hu;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("(G, D) conditional tail matches the sampling formula") {
  // P[D > v | G = u] = ((v-u)/(1-u))^{-alpha}: the density integrated from v
  // to infinity against the closed form the sampler inverts.
  for (const double alpha : {0.4, 0.5, 0.6}) {
    for (const double u : {0.2, 0.7}) {
      for (const double v : {1.5, 3.0}) {
        auto h = [&](double r) {
          const double q = std::pow(r, 1.0 / alpha);
          const double w = u + (v - u) / q;
          const double dw = (v - u) / (q * q) * (1.0 / alpha) * std::pow(r, 1.0 / alpha - 1.0);
          return gd_joint_density(u, w, 1.0, alpha) * dw;
        };
        // Conditional = joint / marginal of G.
        const double marginal = beta_a_1ma_density(u, alpha);
        const double num = intermit::integrate(h, 1e-12, 1.0, 1e-12);
        const double expected = std::pow((v - u) / (1.0 - u), -alpha);
        CHECK(num / marginal == doctest::Approx(expected).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("Mittag-Leffler Laplace transform special values") {
  CHECK(mittag_leffler_laplace(0.0, 1.0, 0.5) == 1.0);
  CHECK(mittag_leffler_laplace(2.0, 3.0, 1.0) == doctest::Approx(std::exp(-6.0)).epsilon(1e-14));
  // alpha = 1/2, lambda = t = 1: e * erfc(1).
  const double expected = std::exp(1.0) * std::erfc(1.0);
  CHECK(mittag_leffler_laplace(1.0, 1.0, 0.5) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Mittag-Leffler series and integral branches agree") {
  for (const double alpha : {0.3, 0.5, 0.8}) {
    // The evaluator switches from the series to the spectral integral at
    // x = 1/2; the value must be continuous across the switch.
    const double lo = mittag_leffler_laplace(0.5 - 1e-9, 1.0, alpha);
    const double hi = mittag_leffler_laplace(0.5 + 1e-9, 1.0, alpha);
    CHECK(std::fabs(lo - hi) < 1e-8);
  }
  // Against exp(x^2) erfc(x) for alpha = 1/2 across both branches.
  for (const double x : {0.5, 2.0, 5.0, 12.0}) {
    const double expected = std::exp(x * x) * std::erfc(x);
    CHECK(mittag_leffler_laplace(x, 1.0, 0.5) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("arcsine CDF closed-form values") {
  CHECK(arcsine_cdf(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(arcsine_cdf(1.0, 1.0) == 1.0);
  CHECK(arcsine_cdf(0.25, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(arcsine_cdf(2.0, 8.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)arcsine_cdf(1.5, 1.0), std::domain_error);
}

TEST_CASE("Beta(alpha, 1-alpha) CDF reduces to the arcsine law at alpha = 1/2") {
  for (double u = 0.05; u < 1.0; u += 0.1) {
    CHECK(beta_a_1ma_cdf(u, 0.5) == doctest::Approx(arcsine_cdf(u, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("half-Gaussian CDF") {
  CHECK(half_gaussian_cdf(0.0, 1.0) == 0.0);
  CHECK(half_gaussian_cdf(60.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(half_gaussian_cdf(2.0, 1.0) == doctest::Approx(std::erf(1.0)).epsilon(1e-15));
}

TEST_CASE("Lamperti-at-G law: closed forms at alpha = 1/2") {
  // p = 1/2 is the uniform law.
  for (double x = 0.05; x < 1.0; x += 0.1) {
    CHECK(lamperti_zg_density(x, 0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(lamperti_zg_cdf(x, 0.5, 0.5) == doctest::Approx(x).epsilon(1e-13));
  }
  // p = 1/4 density at the origin: (3/32)(1/16)^{-3/2} = 6.
  CHECK(lamperti_zg_density(0.0, 0.5, 0.25) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("Lamperti-at-G CDF normalizes across the (alpha, p) grid") {
  for (const double a : {0.3, 0.5, 0.7}) {
    for (const double p : {0.2, 0.5, 0.8}) {
      CHECK(lamperti_zg_cdf(1.0, a, p) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("Lamperti-at-G quadrature branch is continuous with the closed form") {
  for (const double p : {0.2, 0.5, 0.8}) {
    for (double x = 0.1; x < 1.0; x += 0.2) {
      const double closed = lamperti_zg_cdf(x, 0.5, p);
      const double quad = lamperti_zg_cdf(x, 0.5 + 1e-9, p);
      CHECK(quad == doctest::Approx(closed).epsilon(1e-5));
    }
  }
}

TEST_CASE("zg joint sampler: uniform law, block frequencies, positive weights") {
  const StableParams params(0.5, {0.5, 0.5});
  Rng rng(20015);
  const std::size_t n = 1000000;
  const auto samples = sample_zg_joint(params, n, rng);
  std::vector<double> zg(n);
  double ray1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    zg[i] = samples[i].zg[0];
    CHECK(samples[i].l > 0.0);
    ray1 += samples[i].z[0];
  }
  CHECK(ks_statistic(zg, [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }) < 0.01);
  CHECK(ray1 / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("zg joint sampler matches the skewed closed form") {
  const StableParams params(0.5, {0.25, 0.75});
  Rng rng(20017);
  const std::size_t n = 200000;
  const auto samples = sample_zg_joint(params, n, rng);
  std::vector<double> zg(n);
  double ray1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    zg[i] = samples[i].zg[0];
    ray1 += samples[i].z[0];
  }
  CHECK(ks_statistic(zg, [](double x) {
          return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : lamperti_zg_cdf(x, 0.5, 0.25));
        }) < 0.012);
  CHECK(ray1 / static_cast<double>(n) == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("StableParams validation") {
  CHECK_THROWS_AS(StableParams(1.2, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StableParams(0.5, {0.4, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(StableParams(0.5, {1.2, -0.2}), std::invalid_argument);
}
