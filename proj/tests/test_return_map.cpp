#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "intermit/map_core.hpp"
#include "intermit/return_map.hpp"
#include "intermit/rng.hpp"
#include "intermit/special.hpp"

using namespace intermit::induced;
using namespace intermit::maps;
using intermit::Rng;

namespace {

const IntermittentMapSpec& boole() {
  static const IntermittentMapSpec spec = boole_spec();
  return spec;
}

const RaysPartition& boole_partition() {
  static const RaysPartition part = build_partition(boole());
  return part;
}

}  // namespace

TEST_CASE("periodic point of Boole's map is sqrt(2) - 1") {
  const double gamma = find_periodic_gamma(boole());
  CHECK(gamma == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(boole_eval(boole_eval(gamma)) == doctest::Approx(gamma).epsilon(1e-12));
  CHECK(boole_eval(gamma) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("periodic point of an asymmetric d=2 family member") {
  const auto spec = make_thaler_family(2, 0.6, {1.0, 2.5});
  const double gamma = find_periodic_gamma(spec);
  CHECK(gamma < spec.a[1]);
  CHECK(spec.eval(gamma) > spec.a[1]);
  CHECK(spec.eval(spec.eval(gamma)) == doctest::Approx(gamma).epsilon(1e-9));
  CHECK(spec.eval(gamma) != doctest::Approx(gamma));
}

TEST_CASE("partition geometry for d = 2 and d >= 3") {
  const auto& part2 = boole_partition();
  CHECK(part2.gamma == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(part2.t_gamma == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(part2.classify(0.1) == 0);
  CHECK(part2.classify(0.5) == -1);
  CHECK(part2.classify(0.9) == 1);

  const auto spec3 = make_thaler_family(3, 0.6, {1.0, 1.0, 1.0});
  const auto part3 = build_partition(spec3);
  for (int j = 0; j < 3; ++j) {
    // Every ray contains a neighborhood of its fixed point.
    const auto& iv = part3.rays[j].front();
    const double xf = spec3.xfix[j];
    CHECK(iv.lo <= xf);
    CHECK(iv.hi >= xf);
    if (j > 0) CHECK(iv.lo < xf);
    if (j < 2) CHECK(iv.hi > xf);
    CHECK(part3.classify(0.5 * (iv.lo + iv.hi)) == j);
  }
  // Junction margins sit at the branch ends.
  CHECK(part3.junction.size() >= 2);
}

TEST_CASE("dynamical separation audit finds no violations") {
  CHECK(separation_audit(boole(), boole_partition(), 10000, 40001) == 0);
  const auto spec3 = make_thaler_family(3, 0.5, {1.0, 2.0, 1.0});
  const auto part3 = build_partition(spec3);
  CHECK(separation_audit(spec3, part3, 10000, 40003) == 0);
}

TEST_CASE("excursion records of the seven-step example") {
  const std::vector<double> pts{0.5, 0.2, 0.45, 0.7, 0.8, 0.5, 0.52};
  const auto trace = trace_from_points(pts, boole_partition());
  REQUIRE(trace.records() == 3);
  CHECK(trace.stationary_begin == 0);
  CHECK(trace.ray[0] == 0);
  CHECK(trace.len[0] == 1);
  CHECK(trace.phi[0] == 2);
  CHECK(trace.ray[1] == 1);
  CHECK(trace.len[1] == 2);
  CHECK(trace.phi[1] == 3);
  CHECK(trace.ray[2] == -1);
  CHECK(trace.len[2] == 0);
  CHECK(trace.phi[2] == 1);
}

TEST_CASE("trace identities on a real orbit") {
  Rng rng(40005);
  const auto trace =
      excursion_trace(boole(), boole_partition(), 0.5 - 0.05 * rng.uniform(), 500);
  REQUIRE(trace.records() >= 500);
  // phi = 1 + sum_j ell_j per record, and the cumulative (d-W0) identity.
  const auto eta = trace.eta_functions();
  const auto phi = trace.phi_function();
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(trace.records()); ++t) {
    const double td = static_cast<double>(t);
    CHECK(phi(td) == static_cast<double>(t + 1) + eta[0](td) + eta[1](td));
  }
}

TEST_CASE("single-ray excursions never touch the other ray") {
  Rng rng(40007);
  const auto trace = excursion_trace(boole(), boole_partition(), 0.47, 2000);
  for (std::size_t k = 0; k < trace.records(); ++k) {
    if (trace.ray[k] >= 0) CHECK(trace.len[k] > 0);
    if (trace.ray[k] < 0) CHECK(trace.len[k] == 0);
    CHECK(trace.phi[k] == trace.len[k] + 1);
  }
}

TEST_CASE("exact identity suite on one long orbit") {
  const auto rep = check_identities_on_orbit(boole(), boole_partition(), 0.371, 20000);
  CHECK(rep.decomposition_checks == 20000);
  CHECK(rep.decomposition_violations == 0);
  CHECK(rep.eta_match_violations == 0);
  CHECK(rep.williams.checks > 50);
  CHECK(rep.williams.violations == 0);
}

TEST_CASE("cell table thresholds are monotone and match direct iteration") {
  const auto table = cell_table(boole(), boole_partition(), 4000);
  REQUIRE(table.sides().size() == 2);
  for (const auto& side : table.sides()) {
    const auto& th = side.thresholds;
    for (std::size_t i = 1; i < th.size(); ++i) {
      if (side.sign > 0) CHECK(th[i] < th[i - 1]);
      else CHECK(th[i] > th[i - 1]);
    }
  }

  Rng rng(40009);
  const auto& spec = boole();
  const auto& part = boole_partition();
  int checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    // Entry point in a known band, off the boundaries.
    const auto& side = table.sides()[rep % 2];
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 1500.0);
    const double frac = 0.01 + 0.98 * rng.uniform();
    const double y = side.thresholds[m] +
                     frac * (side.thresholds[m - 1] - side.thresholds[m]);
    const auto looked = table.remaining_steps(y);
    REQUIRE(looked.has_value());
    std::int64_t direct = 0;
    double x = y;
    while (part.classify(x) >= 0) {
      x = spec.eval(x);
      ++direct;
    }
    CHECK(*looked == direct);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("d=2 junction cells match the first-return time") {
  const auto table = cell_table(boole(), boole_partition(), 64);
  const auto& spec = boole();
  const auto& part = boole_partition();
  for (int ray = 0; ray < 2; ++ray) {
    for (std::int64_t n = 1; n < 20; ++n) {
      const auto cell = table.cell_p(ray, n);
      CHECK(cell.lo < cell.hi);
      const double x = 0.5 * (cell.lo + cell.hi);
      CHECK(part.classify(x) == -1);  // P_{j,n} sits inside Y
      const auto rm = return_map_at(spec, part, x);
      CHECK(rm.phi == n + 1);
    }
  }
}

TEST_CASE("Lebesgue size of P_{1,n} decays with index -(1 + alpha)") {
  const auto table = cell_table(boole(), boole_partition(), 12000);
  std::vector<double> xs, ys;
  for (std::int64_t n = 100; n <= 10000; n = static_cast<std::int64_t>(n * 1.5)) {
    const auto cell = table.cell_p(0, n);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(cell.hi - cell.lo));
  }
  const double slope = intermit::ls_slope(xs, ys);
  // alpha = 1/2: the cell measure mu_Y[phi = n+1] is regularly varying of
  // index -(1+alpha), and the density is bounded on Y.
  CHECK(slope == doctest::Approx(-1.5).epsilon(0.02));
}

TEST_CASE("induced map expansion and distortion bounds hold numerically") {
  const auto rep = check_return_map_conditions(boole(), boole_partition(), 40);
  CHECK(rep.cells_sampled > 50);
  CHECK(rep.inf_derivative > 1.0 + 1e-6);
  CHECK(rep.expansion_ok);
  CHECK(rep.distortion_ok);
  // Distortion plateau under table growth.
  const auto rep2 = check_return_map_conditions(boole(), boole_partition(), 80);
  CHECK(rep2.sup_distortion == doctest::Approx(rep.sup_distortion).epsilon(0.25));
}

TEST_CASE("chain-rule derivative of the induced map matches finite differences") {
  const auto table = cell_table(boole(), boole_partition(), 16);
  const auto& spec = boole();
  const auto& part = boole_partition();
  const auto cell = table.cell_p(0, 3);
  const double x = 0.5 * (cell.lo + cell.hi);
  const auto rm = return_map_at(spec, part, x);
  const double h = 1e-4 * (cell.hi - cell.lo);
  const auto plus = return_map_at(spec, part, x + h);
  const auto minus = return_map_at(spec, part, x - h);
  REQUIRE(plus.phi == rm.phi);
  REQUIRE(minus.phi == rm.phi);
  const double fd = (plus.value - minus.value) / (2.0 * h);
  CHECK(rm.derivative == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("fast Boole engine: excursion lengths against the backward cells") {
  // run_excursion must reproduce the cell-table remaining time exactly.
  const auto table = cell_table(boole(), boole_partition(), 3000);
  Rng rng(40011);
  const auto& side = table.sides()[0];
  for (int rep = 0; rep < 400; ++rep) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 2500.0);
    const double frac = 0.02 + 0.96 * rng.uniform();
    const double y = side.thresholds[m] + frac * (side.thresholds[m - 1] - side.thresholds[m]);
    const double w = boole_chart::w_of_x(y);
    REQUIRE(w > fastboole::kWY);
    const auto exc = fastboole::run_excursion(w);
    CHECK(exc.len == static_cast<std::int64_t>(m));
    CHECK(std::fabs(exc.w_exit) <= fastboole::kWY);
  }
}

TEST_CASE("fast Boole engine agrees with exact stepping on deep excursions") {
  // Entry deep enough that the flow-map jump engages; compare against the
  // plain w-iteration.
  for (const double w0 : {300.0, 1234.5, 9876.0}) {
    const auto fast = fastboole::run_excursion(w0);
    double w = w0;
    std::int64_t len = 0;
    while (w > fastboole::kWY) {
      w = boole_chart::step(w);
      ++len;
    }
    CHECK(std::llabs(fast.len - len) <= 1);
    // The plain double iteration itself carries O(w0^3 eps) exit noise, so
    // the comparison band has to grow with the entry depth.
    const double band = std::max(1e-9, 3e-16 * w0 * w0 * w0);
    CHECK(std::fabs(fast.w_exit - w) < band);
  }
}

TEST_CASE("fast engine tails match the cell-table measure prediction") {
  // mu_Y[ell_1 >= n] = |w(f_2(u_{n-1}))| / sqrt(2) with u_k = f_1^k(gamma):
  // the w chart makes the invariant measure Lebesgue, so the tail has a
  // closed form through the backward thresholds.
  const auto table = cell_table(boole(), boole_partition(), 1100);
  const auto& spec = boole();
  auto predicted_tail = [&](std::int64_t n) {
    const double u = table.sides()[0].thresholds[static_cast<std::size_t>(n - 1)];
    const double edge = spec.branch_inverse(1, u);
    return std::fabs(boole_chart::w_of_x(edge)) / std::sqrt(2.0);
  };

  Rng rng(40013);
  const double x0 = boole_chart::x_of_w(fastboole::sample_mu_y_w(rng));
  const auto trace = excursion_trace(boole(), boole_partition(), x0, 1000000,
                                     TraceEngine::kFastBoole);
  const auto r = static_cast<double>(trace.stationary_records());
  for (const std::int64_t n : {10, 100, 1000}) {
    std::int64_t count = 0;
    for (std::size_t k = trace.stationary_begin; k < trace.records(); ++k) {
      if (trace.ray[k] == 0 && trace.len[k] >= n) ++count;
    }
    const double p_hat = static_cast<double>(count) / r;
    const double p = predicted_tail(n);
    const double se = std::sqrt(p * (1.0 - p) / r);
    CHECK(std::fabs(p_hat - p) < 5.0 * se + 1e-9);
  }
}

TEST_CASE("tail statistics recover alpha and beta for Boole") {
  Rng rng(40015);
  const double x0 = boole_chart::x_of_w(fastboole::sample_mu_y_w(rng));
  const auto trace = excursion_trace(boole(), boole_partition(), x0, 200000,
                                     TraceEngine::kFastBoole);
  const double mu_y = std::sqrt(2.0);
  const auto rep = tail_statistics(trace, mu_y, 0.5);
  CHECK(rep.alpha_hat > 0.42);
  CHECK(rep.alpha_hat < 0.58);
  CHECK(rep.alpha_hill > 0.42);
  CHECK(rep.alpha_hill < 0.58);
  CHECK(rep.beta_hat[0] == doctest::Approx(0.5).epsilon(0.06));
  CHECK(rep.beta_hat[0] + rep.beta_hat[1] == doctest::Approx(1.0).epsilon(1e-12));

  // w(n+1) - w(n) = mu(Y) mu_Y[phi > n]: exact identity of the estimator on
  // the unit-spaced part of the grid.
  for (std::size_t i = 0; i + 1 < rep.grid.size() && rep.grid[i + 1] == rep.grid[i] + 1; ++i) {
    CHECK(rep.w_rate[i + 1] - rep.w_rate[i] ==
          doctest::Approx(mu_y * rep.phi_tail[i]).epsilon(1e-9));
  }

  // b_n estimator tracks the closed form mu(Y) sqrt(n/(2 pi)) within 10%.
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    const double n = static_cast<double>(rep.grid[i]);
    if (n < 100.0 || n > 10000.0) continue;
    const double target = mu_y * std::sqrt(n / (2.0 * std::numbers::pi));
    CHECK(rep.b_n_hat[i] / target > 0.9);
    CHECK(rep.b_n_hat[i] / target < 1.1);
  }
}

TEST_CASE("tail statistics demand enough returns") {
  Rng rng(40017);
  const auto trace = excursion_trace(boole(), boole_partition(), 0.5, 100,
                                     TraceEngine::kFastBoole);
  CHECK_THROWS_AS((void)tail_statistics(trace, std::sqrt(2.0), 0.5), InsufficientData);
}
