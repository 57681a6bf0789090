#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "intermit/cadlag.hpp"
#include "intermit/map_core.hpp"
#include "intermit/rng.hpp"

namespace intermit::induced {

using maps::IntermittentMapSpec;
using maps::RaysPartition;

struct NoPeriodicPoint : std::runtime_error {
  NoPeriodicPoint() : std::runtime_error("find_periodic_gamma: no bracket for T^2 x = x") {}
};
struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const char* w) : std::runtime_error(w) {}
};

// gamma in J_1 with T(gamma) in J_2 and T^2(gamma) = gamma (d = 2 only).
// Symmetric maps reduce to T(gamma) = 1 - gamma; otherwise T^2 is bracketed
// directly on [f_1(a_1), a_1].
double find_periodic_gamma(const IntermittentMapSpec& spec);

// d = 2: A_1 = [0,gamma), Y = [gamma, T gamma], A_2 = (T gamma, 1].
// d >= 3: A_j = J_j intersected with T^{-1} J_j = f_j(J_j), Y the complement.
RaysPartition build_partition(const IntermittentMapSpec& spec);

// Samples short random orbit segments and counts direct A_i -> A_j passages
// (i != j) without an intermediate Y visit; returns the number of violations.
std::int64_t separation_audit(const IntermittentMapSpec& spec, const RaysPartition& partition,
                              std::int64_t n_segments, std::uint64_t seed);

// Sequence of first-return records.  Each record is one excursion: the ray
// visited (-1 when the next iterate is already back in Y), the time spent on
// that ray, and the return time phi = 1 + len.  Records before
// stationary_begin come from the initial segment of an orbit started outside
// Y and are excluded from stationary statistics.
struct ExcursionTrace {
  int d = 2;
  std::vector<std::int32_t> ray;
  std::vector<std::int64_t> len;
  std::vector<std::int64_t> phi;
  std::size_t stationary_begin = 0;
  double x0 = 0.0;

  std::size_t records() const { return ray.size(); }
  std::size_t stationary_records() const { return ray.size() - stationary_begin; }

  // Cumulative views as pure-step cadlag functions (record index time scale):
  // eta_j(t) = sum_{k <= floor(t)} len_k 1{ray_k = j}, phi(t) likewise.
  std::vector<cadlag::StepFunction> eta_functions() const;
  cadlag::StepFunction phi_function() const;
};

enum class TraceEngine { kExact, kFastBoole };

// First n_returns excursion records of the orbit of x0.  The exact engine
// applies the map stepwise (analytic-tail stall handling); the fast engine is
// Boole-only and completes deep excursions through the w-chart flow map.
ExcursionTrace excursion_trace(const IntermittentMapSpec& spec, const RaysPartition& partition,
                               double x0, std::int64_t n_returns,
                               TraceEngine engine = TraceEngine::kExact);

// Trace of an explicit point sequence x_0..x_m (records up to the last Y visit).
ExcursionTrace trace_from_points(std::span<const double> points, const RaysPartition& partition);

// --- accelerated Boole engine (w = 1/x - 1/(1-x) chart) ---------------------
//
// In the w chart the map is S(w) = w - 1/w with Lebesgue invariant measure;
// Y = [-1/sqrt2, 1/sqrt2].  Deep excursions are fast-forwarded with the
// telescoping potential F(v) = v/2 + ln(v)/4 + 1/(8v) - 5/(96 v^2) of
// v = w^2 (per-step defect O(v^-4)); the last ~2k steps of every excursion
// are always iterated exactly.
namespace fastboole {

inline constexpr double kWY = 0.70710678118654752;  // w(gamma) = 1/sqrt(2)

struct Excursion {
  std::int64_t len;
  double w_exit;  // in [-kWY, kWY]
};

// Runs an excursion entered at magnitude w0 > kWY until it lands in Y.
Excursion run_excursion(double w0);

// Steps in Y until leaving, then completes the excursion: one T_Y
// application.  w must lie in [-kWY, kWY].
struct ReturnRecord {
  std::int32_t ray;  // 0, 1, or -1 for an immediate return
  std::int64_t len;
  std::int64_t phi;
  double w_next;
};
ReturnRecord t_y_step(double w);

// First Y-visit epoch strictly after `epoch` for the state x at that epoch.
std::int64_t next_visit_epoch(double x, std::int64_t epoch);

// mu_Y draw in the w chart (Lebesgue on [-kWY, kWY]).
double sample_mu_y_w(Rng& rng);

}  // namespace fastboole

// --- cells ------------------------------------------------------------------

// Backward-iterated cell boundaries.  Entry tables give, per (ray, side),
// the thresholds f_j^n(boundary) used to read off the remaining time to Y of
// an excursion point by binary search; Y-cell endpoints (P_{j,n} for d = 2,
// P_{i,j,sigma,n} via f_i-images for d >= 3) derive from them.
class CellTable {
 public:
  struct Side {
    int ray;
    int sign;                        // +1: cells to the right of x_j
    std::vector<double> thresholds;  // thresholds[0] = outer A/Y boundary
  };

  CellTable(const IntermittentMapSpec& spec, const RaysPartition& partition,
            std::int64_t n_max);

  std::int64_t n_max() const { return n_max_; }
  const std::vector<Side>& sides() const { return sides_; }

  // Remaining time to Y of an excursion point y (a point of some A_j), or
  // nullopt when it exceeds n_max.  Ties at cell boundaries resolve to the
  // smaller count.
  std::optional<std::int64_t> remaining_steps(double y) const;

  // d = 2 cells inside Y: endpoints of P_{j,n} (paper ordering, j in {1,2}).
  struct Cell {
    double lo, hi;
  };
  Cell cell_p(int ray, std::int64_t n) const;

  const IntermittentMapSpec& spec() const { return spec_; }
  const RaysPartition& partition() const { return part_; }

 private:
  const IntermittentMapSpec& spec_;
  const RaysPartition& part_;
  std::int64_t n_max_;
  std::vector<Side> sides_;
};

CellTable cell_table(const IntermittentMapSpec& spec, const RaysPartition& partition,
                     std::int64_t n_max);

// T_Y at x together with the return time and the chain-rule derivative
// (product of branch derivatives along the excursion).
struct ReturnMapValue {
  double value;
  std::int64_t phi;
  double derivative;
};
ReturnMapValue return_map_at(const IntermittentMapSpec& spec, const RaysPartition& partition,
                             double x, std::int64_t max_steps = 1 << 22);

// Numerical check of the induced-map expansion and distortion bounds:
// inf T_Y' over sampled cell interiors > 1 and sup |T_Y''| / (T_Y')^2 finite.
struct ConditionsReport {
  double inf_derivative = 0.0;
  double sup_distortion = 0.0;
  std::int64_t cells_sampled = 0;
  bool expansion_ok = false;   // inf > 1 + 1e-6
  bool distortion_ok = false;  // sup < 1e6
  bool passed() const { return expansion_ok && distortion_ok; }
};
ConditionsReport check_return_map_conditions(const IntermittentMapSpec& spec,
                                             const RaysPartition& partition,
                                             std::int64_t n_max);

// --- tail statistics ---------------------------------------------------------

// Empirical tails of phi and the per-ray excursion lengths, the log-log and
// Hill estimates of alpha, tail-ratio estimates of beta, and the
// reconstructed wandering rates  w(n+1) - w(n) = mu(Y) mu_Y[phi > n].
struct TailReport {
  double alpha_hat = 0.0;       // log-log slope on the detected window
  double alpha_hill = 0.0;      // Hill cross-check
  std::vector<double> beta_hat;
  std::int64_t window_lo = 0, window_hi = 0;
  std::int64_t n_star = 0;  // tail-ratio threshold used for beta
  std::int64_t records = 0;

  std::vector<std::int64_t> grid;        // n values
  std::vector<double> phi_tail;          // mu_Y[phi > n]
  std::vector<std::vector<double>> ell_tail;  // mu_Y[ell_j >= n]
  std::vector<double> w_rate;            // w(n) on the grid
  std::vector<std::vector<double>> w_rate_ray;
  std::vector<double> b_n_hat;           // 1/(Gamma(1-alpha) mu_Y[phi >= n])
  double mu_y = 0.0;                     // mu(Y) used for w reconstruction
};
TailReport tail_statistics(const ExcursionTrace& trace, double mu_y, double alpha);

// --- exact identity checks ----------------------------------------------------

// Builds S_{A_j}, eta_j and phi from one orbit and verifies the decomposition
// sum_j S_{A_j}(u) + S_Y(u) = u at every epoch, eta_j(t) = S_{A_j}(phi(t)),
// and the discrete Williams identities on the full integer grid.
struct IdentityReport {
  cadlag::WilliamsReport williams;
  std::int64_t decomposition_checks = 0;
  std::int64_t decomposition_violations = 0;
  std::int64_t eta_match_checks = 0;
  std::int64_t eta_match_violations = 0;
  bool passed() const {
    return williams.passed() && decomposition_violations == 0 && eta_match_violations == 0;
  }
};
IdentityReport check_identities_on_orbit(const IntermittentMapSpec& spec,
                                         const RaysPartition& partition, double x0,
                                         std::int64_t horizon);

}  // namespace intermit::induced
