#include <doctest.h>

#include <cmath>
#include <vector>

#include "intermit/map_core.hpp"
#include "intermit/rng.hpp"
#include "intermit/return_map.hpp"
#include "intermit/special.hpp"

using namespace intermit::maps;
using intermit::Rng;

TEST_CASE("boole_eval: fixed points, midpoint, rational value") {
  CHECK(boole_eval(0.0) == 0.0);
  CHECK(boole_eval(1.0) == 1.0);
  CHECK(boole_eval(0.5) == 1.0);  // (1/4)/(1/4), exact in binary arithmetic
  CHECK(boole_eval(0.3) == doctest::Approx(21.0 / 61.0).epsilon(1e-15));
}

TEST_CASE("boole symmetry T(1-x) = 1 - T(x)") {
  Rng rng(30001);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.uniform();
    CHECK(boole_eval(1.0 - x) == doctest::Approx(1.0 - boole_eval(x)).epsilon(4e-15));
  }
}

TEST_CASE("boole branch inverse and derivatives") {
  Rng rng(30003);
  for (int i = 0; i < 500; ++i) {
    const double x = 0.5 * rng.uniform();
    const double y = boole_eval(x);
    CHECK(boole_branch1_inverse(y) == doctest::Approx(x).epsilon(1e-12));
    // Derivative against central differences.
    const double h = 1e-6;
    if (x > h && x < 0.5 - h) {
      const double fd = (boole_eval(x + h) - boole_eval(x - h)) / (2.0 * h);
      CHECK(boole_branch1_derivative(x) == doctest::Approx(fd).epsilon(1e-7));
      const double fd2 = (boole_branch1_derivative(x + h) - boole_branch1_derivative(x - h)) /
                         (2.0 * h);
      CHECK(boole_branch1_second_derivative(x) == doctest::Approx(fd2).epsilon(1e-5));
    }
  }
  CHECK(boole_branch1_derivative(0.0) == 1.0);
  CHECK(boole_branch1_derivative(0.5) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("boole cubic tangency at the fixed point") {
  // T x = x + x^3 / (1 - x - x^2), so |Tx - x| / x^3 -> 1 geometrically.
  double h = 1e-2;
  double prev_dev = 1e9;
  for (int k = 0; k < 6; ++k, h *= 0.25) {
    const double ratio = (boole_eval(h) - h) / (h * h * h);
    const double dev = std::fabs(ratio - 1.0);
    CHECK(dev < prev_dev + 1e-12);
    prev_dev = dev;
  }
  CHECK(prev_dev < 1e-3);
}

TEST_CASE("w-chart conjugacy: w(Tx) = w(x) - 1/w(x)") {
  Rng rng(30005);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.uniform();
    const double w = boole_chart::w_of_x(x);
    if (std::fabs(w) < 1e-6) continue;
    const double lhs = boole_chart::w_of_x(boole_eval(x));
    const double rhs = boole_chart::step(w);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    CHECK(boole_chart::x_of_w(w) == doctest::Approx(x).epsilon(1e-13));
  }
}

TEST_CASE("make_thaler_family: reserved Boole parameterization") {
  const auto spec = make_thaler_family(2, 0.5, {1.0, 1.0}, "boole");
  CHECK(spec.family == IntermittentMapSpec::Family::kBoole);
  Rng rng(30007);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform();
    CHECK(spec.eval(x) == boole_eval(x));
  }
  CHECK_THROWS_AS(make_thaler_family(3, 0.5, {1, 1, 1}, "boole"), std::invalid_argument);
}

TEST_CASE("make_thaler_family: validation") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_thaler_family(1, 0.5, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_thaler_family(2, 1.5, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_thaler_family(2, 0.5, {inf, inf}), std::invalid_argument);
  CHECK_THROWS_AS(make_thaler_family(3, 0.6, {100.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("thaler family satisfies the branch contract") {
  for (const auto& [d, alpha] : {std::pair{2, 0.5}, {3, 0.6}, {4, 0.35}}) {
    std::vector<double> c(d, 1.0);
    c[0] = 2.0;
    const auto spec = make_thaler_family(d, alpha, c);
    const auto v = validate_spec(spec);
    CHECK(v.monotone);
    CHECK(v.max_roundtrip_error < 1e-12);
    CHECK(v.worst_ratio_deviation < 0.05);
    // Branch endpoints map onto [0,1].
    for (int j = 0; j < d; ++j) {
      CHECK(spec.branch(j, spec.a[j]) == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(spec.branch(j, spec.a[j + 1]) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(spec.branch(j, spec.xfix[j]) == doctest::Approx(spec.xfix[j]).epsilon(1e-12));
      CHECK(spec.branch_derivative(j, spec.xfix[j]) == 1.0);
    }
  }
}

TEST_CASE("thaler family local asymptotics |Tx - x| ~ c_j h^{1+1/alpha}") {
  const auto spec = make_thaler_family(3, 0.6, {2.0, 1.0, 3.0});
  for (int j = 0; j < 3; ++j) {
    for (int sgn : {-1, 1}) {
      const double xf = spec.xfix[j];
      if ((sgn < 0 && j == 0) || (sgn > 0 && j == 2)) continue;
      double h = 1e-3;
      double last = 0.0;
      for (int k = 0; k < 14; ++k, h *= 0.5) {
        last = spec.branch_increment(j, xf + sgn * h) / (spec.c[j] * spec.psi(h));
      }
      CHECK(last == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("infinite-c ray uses a steeper exponent and passes validation") {
  const double inf = std::numeric_limits<double>::infinity();
  const auto spec = make_thaler_family(3, 0.5, {1.0, inf, 1.0});
  const auto v = validate_spec(spec);
  CHECK(v.monotone);
  CHECK(v.max_roundtrip_error < 1e-12);
  // |Tx - x| / Psi must diverge on the infinite ray.
  const double x1 = spec.xfix[1] + 1e-3;
  const double x2 = spec.xfix[1] + 1e-5;
  const double r1 = std::fabs(spec.eval(x1) - x1) / spec.psi(1e-3);
  const double r2 = std::fabs(spec.eval(x2) - x2) / spec.psi(1e-5);
  CHECK(r2 > 5.0 * r1);
}

TEST_CASE("invariant density of Boole's map") {
  CHECK(invariant_density_boole(0.5) == 8.0);
  CHECK_THROWS_AS(invariant_density_boole(0.0), std::domain_error);
  CHECK_THROWS_AS(invariant_density_boole(1.0), std::domain_error);
}

TEST_CASE("transfer operator fixes the invariant density") {
  const auto spec = boole_spec();
  for (const double y : {0.37, 0.12, 0.5, 0.83}) {
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double x = spec.branch_inverse(j, y);
      acc += invariant_density_boole(x) / spec.branch_derivative(j, x);
    }
    CHECK(acc == doctest::Approx(invariant_density_boole(y)).epsilon(1e-10));
  }
}

TEST_CASE("transfer-operator residual below 1e-9 on a grid") {
  const auto spec = boole_spec();
  double worst = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double y = static_cast<double>(i) / 1000.0;
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double x = spec.branch_inverse(j, y);
      acc += invariant_density_boole(x) / spec.branch_derivative(j, x);
    }
    worst = std::max(worst, std::fabs(acc - invariant_density_boole(y)) /
                                invariant_density_boole(y));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("invariant mass of Y equals sqrt(2), twice over") {
  const double gamma = std::sqrt(2.0) - 1.0;
  // Closed-form antiderivative...
  const double closed = invariant_density_boole_antiderivative(1.0 - gamma) -
                        invariant_density_boole_antiderivative(gamma);
  CHECK(closed == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // ...and independent quadrature.
  const double quad = intermit::integrate(
      [](double x) { return invariant_density_boole(x); }, gamma, 1.0 - gamma, 1e-12);
  CHECK(quad == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("iterate: midpoint reaches the fixed point at 1") {
  OrbitConfig cfg;
  cfg.x0 = 0.5;
  cfg.n_steps = 4;
  const auto orbit = iterate(boole_spec(), cfg);
  REQUIRE(orbit.points.size() == 5);
  CHECK(orbit.points[0] == 0.5);
  CHECK(orbit.points[1] == 1.0);
  CHECK(orbit.points[2] == 1.0);
  CHECK(orbit.points[4] == 1.0);
}

TEST_CASE("iterate: orbit stays inside the unit interval") {
  Rng rng(30011);
  const auto spec = boole_spec();
  for (int rep = 0; rep < 5; ++rep) {
    OrbitConfig cfg;
    cfg.x0 = rng.uniform();
    cfg.n_steps = 10000;
    cfg.stall_policy = StallPolicy::kAnalyticTail;
    const auto orbit = iterate(spec, cfg);
    for (const double x : orbit.points) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
}

TEST_CASE("stall policies near the indifferent fixed point") {
  const auto spec = boole_spec();
  OrbitConfig cfg;
  cfg.x0 = 1e-9;  // T x == x in doubles
  cfg.n_steps = 10;
  CHECK_THROWS_AS((void)iterate(spec, cfg), StallDetected);

  cfg.stall_policy = StallPolicy::kAnalyticTail;
  Orbit orbit(spec, cfg);
  orbit.step();
  // ODE surrogate: about (1/2)(y^-2 - eps0^-2) steps skipped.
  CHECK(orbit.last_skip() > 4e17);
  CHECK(orbit.last_skip() < 6e17);
  CHECK(orbit.current() == doctest::Approx(cfg.stall_exit).epsilon(1e-12));
}

TEST_CASE("occupation counting on the seven-step example sequence") {
  const auto spec = boole_spec();
  const auto part = intermit::induced::build_partition(spec);
  // Pattern Y A1 Y A2 A2 Y Y realized by representative points.
  const std::vector<double> pts{0.5, 0.2, 0.45, 0.7, 0.8, 0.5, 0.52};
  const auto rec = occupation_from_points(pts, part, {0, 6});
  CHECK(rec.s_a[0][0] == 0);
  CHECK(rec.g_y[0] == 0);
  CHECK(rec.s_a[0][1] == 1);
  CHECK(rec.s_a[1][1] == 2);
  CHECK(rec.s_y[1] == 3);
  CHECK(rec.g_y[1] == 6);
  CHECK(rec.d_y_censored[1]);
  CHECK_FALSE(rec.d_y_censored[0]);
  CHECK(rec.d_y[0] == 2);
}

TEST_CASE("occupation process: decomposition, monotonicity, bracketing") {
  const auto spec = boole_spec();
  const auto part = intermit::induced::build_partition(spec);
  Rng rng(30013);
  for (int rep = 0; rep < 3; ++rep) {
    OrbitConfig cfg;
    cfg.x0 = rng.uniform();
    cfg.n_steps = 20000;
    cfg.stall_policy = StallPolicy::kAnalyticTail;
    std::vector<std::int64_t> times;
    for (std::int64_t t = 0; t <= cfg.n_steps; t += 997) times.push_back(t);
    const auto rec = occupation_process(spec, part, cfg, times);
    std::int64_t prev_sum = -1;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      const std::int64_t sum = rec.s_a[0][i] + rec.s_a[1][i] + rec.s_y[i];
      CHECK(sum == rec.times[i]);  // exact decomposition
      CHECK(sum >= prev_sum);
      prev_sum = sum;
      CHECK(rec.g_y[i] <= rec.times[i]);
      if (!rec.d_y_censored[i]) CHECK(rec.d_y[i] > rec.times[i]);
      if (i > 0) {
        CHECK(rec.s_a[0][i] >= rec.s_a[0][i - 1]);
        CHECK(rec.s_y[i] >= rec.s_y[i - 1]);
        CHECK(rec.g_y[i] >= rec.g_y[i - 1]);
      }
    }
  }
}

TEST_CASE("Birkhoff: junction occupation fraction is tiny at 1e6 steps") {
  const auto spec = boole_spec();
  const auto part = intermit::induced::build_partition(spec);
  OrbitConfig cfg;
  cfg.x0 = 0.1;
  cfg.n_steps = 1000000;
  cfg.stall_policy = StallPolicy::kAnalyticTail;
  const auto rec = occupation_process(spec, part, cfg, {cfg.n_steps});
  CHECK(static_cast<double>(rec.s_y[0]) / static_cast<double>(cfg.n_steps) < 0.02);
}
