#include <doctest.h>

#include <cmath>
#include <vector>

#include "intermit/bessel_sim.hpp"
#include "intermit/rng.hpp"
#include "intermit/stable_limits.hpp"
#include "intermit/stats.hpp"

using namespace intermit::bessel;
using intermit::Rng;
using intermit::stable::StableParams;

TEST_CASE("subordinator Laplace transform at lambda = 1") {
  const StableParams params(0.5, {0.7, 0.3});
  Rng rng(50001);
  const int n = 30000;
  double acc0 = 0.0, acc1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto path = subordinator_paths(params, 0.0, 1.0, rng);
    for (int j = 0; j < 2; ++j) {
      double eta1 = path.drift[j];
      for (std::size_t k = 0; k < path.epochs[j].size(); ++k) {
        if (path.epochs[j][k] <= 1.0) eta1 += path.sizes[j][k];
      }
      (j == 0 ? acc0 : acc1) += std::exp(-eta1);
    }
  }
  acc0 /= n;
  acc1 /= n;
  CHECK(std::fabs(acc0 - std::exp(-0.7)) < 0.005);
  CHECK(std::fabs(acc1 - std::exp(-0.3)) < 0.005);
}

TEST_CASE("aggregate subordinator is the exact sum of the rays") {
  const StableParams params(0.4, {0.25, 0.35, 0.4});
  Rng rng(50003);
  const auto path = subordinator_paths(params, 0.0, 2.0, rng);
  const auto total = path.eta_total();
  std::vector<intermit::cadlag::StepFunction> eta;
  for (int j = 0; j < 3; ++j) eta.push_back(path.eta_function(j));
  for (double s = 0.0; s < 2.0; s += 0.0137) {
    const double direct = eta[0](s) + eta[1](s) + eta[2](s);
    CHECK(total(s) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("zero-skewness ray contributes no jumps") {
  const StableParams params(0.5, {1.0, 0.0});
  Rng rng(50005);
  const auto path = subordinator_paths(params, 0.0, 1.0, rng);
  CHECK(path.epochs[1].empty());
  CHECK(path.drift[1] == 0.0);
  CHECK_FALSE(path.epochs[0].empty());
}

TEST_CASE("single-ray Williams inversion is the identity") {
  const StableParams params(0.5, {1.0});
  Rng rng(50007);
  const auto path = subordinator_paths(params, 0.0, 4.0, rng);
  const auto occ = occupation_from_subordinators(path, {0.25, 0.5, 1.0});
  for (std::size_t i = 0; i < occ.t_grid.size(); ++i) {
    CHECK(occ.z[0][i] == doctest::Approx(occ.t_grid[i]).epsilon(1e-9));
  }
}

TEST_CASE("occupation functionals: simplex identity, bracketing, monotonicity") {
  const StableParams params(0.5, {0.5, 0.5});
  Rng rng(50009);
  const std::vector<double> grid{0.5, 1.0, 2.0};
  for (int rep = 0; rep < 200; ++rep) {
    const auto path = subordinator_paths(params, 0.0, 10.0, rng);
    OccupationFunctionals occ;
    try {
      occ = occupation_from_subordinators(path, grid);
    } catch (const HorizonExceeded&) {
      continue;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid[i];
      CHECK(occ.z[0][i] + occ.z[1][i] == doctest::Approx(t).epsilon(1e-9));
      CHECK(occ.g[i] <= t);
      CHECK(occ.d[i] >= t);  // equality only inside the compensation drift sliver
      CHECK(occ.l[i] > 0.0);
      if (i > 0) {
        CHECK(occ.z[0][i] >= occ.z[0][i - 1]);
        CHECK(occ.l[i] >= occ.l[i - 1]);
      }
    }
  }
}

TEST_CASE("subordinator construction reproduces the G marginal and the local time law") {
  const StableParams params(0.5, {0.5, 0.5});
  Rng rng(50011);
  const int n = 20000;
  std::vector<double> g(n), l(n);
  for (int i = 0; i < n; ++i) {
    double s_max = 8.0;
    for (;;) {
      const auto path = subordinator_paths(params, 0.0, s_max, rng);
      try {
        const auto occ = occupation_from_subordinators(path, {1.0});
        g[i] = occ.g[0];
        l[i] = occ.l[0];
        break;
      } catch (const HorizonExceeded&) {
        s_max *= 2.0;
      }
    }
  }
  CHECK(intermit::harness::ks_statistic(
            g, [](double u) { return intermit::stable::beta_a_1ma_cdf(std::min(u, 1.0), 0.5); }) <
        0.015);
  const auto emp = intermit::harness::empirical_laplace(l, {0.5, 1.0, 2.0});
  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double ref = intermit::stable::mittag_leffler_laplace(lambdas[i], 1.0, 0.5);
    CHECK(emp[i] == doctest::Approx(ref).epsilon(0.02 / ref));
  }
}

TEST_CASE("besq_step: drift identity and nonnegativity") {
  Rng rng(50013);
  const double x0 = 0.7, dt = 0.1, alpha = 0.3;
  const int n = 200000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = besq_step(x0, dt, alpha, rng);
    CHECK(x1 >= 0.0);
    mean += x1;
  }
  mean /= n;
  // E[X(dt)] = x + (2 - 2 alpha) dt
  CHECK(mean == doctest::Approx(x0 + (2.0 - 2.0 * alpha) * dt).epsilon(0.004));
}

TEST_CASE("besq at alpha = 1/2 from zero is the squared reflected Brownian motion") {
  Rng rng(50015);
  const int n = 40000;
  const int steps = 100;
  const double dt = 0.01;
  std::vector<double> modulus(n);
  for (int i = 0; i < n; ++i) {
    double x = 0.0;
    for (int k = 0; k < steps; ++k) x = besq_step(x, dt, 0.5, rng);
    modulus[i] = std::sqrt(x);
  }
  // |N(0,1)| CDF = erf(u / sqrt 2).
  CHECK(intermit::harness::ks_statistic(modulus, [](double u) {
          return u <= 0.0 ? 0.0 : std::erf(u / std::sqrt(2.0));
        }) < 0.01);
}

TEST_CASE("besq from the origin leaves zero but stays near it for small dt") {
  Rng rng(50017);
  for (const double dt : {1e-6, 1e-4}) {
    for (int i = 0; i < 100; ++i) {
      const double x = besq_step(0.0, dt, 0.5, rng);
      CHECK(x >= 0.0);
      CHECK(x < 100.0 * dt * 40.0);
    }
  }
}

TEST_CASE("skew path: occupation fractions, local time law, ray tagging") {
  const StableParams params(0.5, {0.5, 0.5});
  SkewPathConfig cfg;
  cfg.dt = 2e-4;
  cfg.eps = 0.05;
  cfg.horizon = 1.05;
  cfg.refine_until = 1.05;
  const int n = 2000;
  std::vector<double> z1(n), l(n);
  std::int64_t tags = 0, tag1 = 0;
  Rng master(50019);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(50019, static_cast<std::uint64_t>(i));
    const auto path = simulate_skew_path(params, cfg, {1.0}, rng);
    z1[i] = path.z[0][0];
    l[i] = path.l[0];
    CHECK(path.z[0][0] + path.z[1][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(path.g[0] <= 1.0);
    tags += static_cast<std::int64_t>(path.ray_tags.size());
    for (const auto tag : path.ray_tags) tag1 += tag == 0 ? 1 : 0;
  }
  CHECK(intermit::harness::ks_statistic(z1, [](double u) {
          return intermit::stable::arcsine_cdf(std::clamp(u, 0.0, 1.0), 1.0);
        }) < 0.05);
  const auto emp = intermit::harness::empirical_laplace(l, {0.5, 1.0, 2.0});
  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double ref = intermit::stable::mittag_leffler_laplace(lambdas[i], 1.0, 0.5);
    CHECK(std::fabs(emp[i] - ref) < 0.02);
  }
  // Excursion tags are iid beta.
  CHECK(static_cast<double>(tag1) / static_cast<double>(tags) ==
        doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("local time estimate is stable under eps halving and dt quartering") {
  // Coupled Richardson probe: the coarse (eps, dt) estimator is read off the
  // same fine (eps/2, dt/4) trajectory, so the comparison isolates the
  // discretization drift from Monte Carlo noise.  The eps-shell bias of the
  // occupation estimator is ~ -eps/sqrt(2), which dictates thresholds at the
  // percent level.
  const StableParams params(0.5, {0.5, 0.5});
  SkewPathConfig cfg;
  cfg.dt = 2e-5;
  cfg.eps = 0.01;
  const double horizon = 0.5;
  cfg.horizon = horizon + cfg.dt;
  cfg.refine_until = cfg.horizon;
  cfg.store_path = true;
  const double c_alpha = bessel_clock_constant(0.5);
  const int n = 1500;
  double fine_mean = 0.0, coarse_mean = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(50021, static_cast<std::uint64_t>(i));
    const auto path = simulate_skew_path(params, cfg, {horizon}, rng);
    fine_mean += path.l[0];
    // (eps, dt) -> (2 eps, 4 dt) on the same path.
    const double eps2 = 2.0 * cfg.eps;
    std::int64_t below = 0;
    for (std::size_t k = 3; k < path.values.size(); k += 4) {
      if (static_cast<double>(k + 1) * cfg.dt > horizon) break;
      if (path.values[k] <= eps2) ++below;
    }
    coarse_mean += static_cast<double>(below) * (4.0 * cfg.dt) / (c_alpha * eps2);
  }
  fine_mean /= n;
  coarse_mean /= n;
  CHECK(std::fabs(fine_mean - coarse_mean) < 0.01);
}
