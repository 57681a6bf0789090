#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace intermit::maps {

struct StallDetected : std::runtime_error {
  StallDetected(double x, std::int64_t epoch)
      : std::runtime_error("orbit stalled in working precision"), where(x), at_epoch(epoch) {}
  double where;
  std::int64_t at_epoch;
};

// --- Boole's map -----------------------------------------------------------
//
//   T x = x(1-x)/(1-x-x^2)   (x <= 1/2),      T x = 1 - T(1-x)   (x > 1/2),
//
// with indifferent fixed points 0 and 1 and invariant density
// x^{-2} + (1-x)^{-2}.  The substitution w = 1/x - 1/(1-x) conjugates T to
// w -> w - 1/w with Lebesgue invariant measure; branch formulas below are the
// closed forms in x, the w-chart is used by the accelerated excursion engine.

double boole_eval(double x);

// dT/dx of the lower branch; the upper branch mirrors it.
double boole_branch1_derivative(double x);
double boole_branch1_second_derivative(double x);
// Inverse of the lower branch in the cancellation-free form
// f_1(y) = 2y / (1 + y + sqrt(5y^2 - 2y + 1)).
double boole_branch1_inverse(double y);

// x^{-2} + (1-x)^{-2}; unbounded at the endpoints.
double invariant_density_boole(double x);
// Antiderivative 1/(1-x) - 1/x of the invariant density.
double invariant_density_boole_antiderivative(double x);

namespace boole_chart {
double w_of_x(double x);  // 1/x - 1/(1-x), decreasing [0,1] -> [-inf, inf]
double x_of_w(double w);  // stable inverse 2/((w+2) + sqrt(w^2+4))
inline double step(double w) { return w - 1.0 / w; }
}  // namespace boole_chart

// --- d-branch intermittent interval maps ------------------------------------

// Branch structure of a d-branch map with indifferent fixed points:
// 0 = a_0 = x_1 < a_1 < x_2 < ... < x_d = a_d = 1, each branch T_j an
// increasing C^2 bijection of the closed J_j = [a_{j-1}, a_j] onto [0,1]
// fixing x_j with unit derivative, and |Tx - x| ~ c_j |x - x_j|^{1+1/alpha}
// near x_j.  Branches of the built-in family are the closed forms
//   T(x) = x +- s^{e_j} (c_j + b_j s),   s = |x - x_j|,
// where e_j = 1 + 1/alpha and b_j is fixed per side by T_j(a_j) = 1 resp.
// T_j(a_{j-1}) = 0.  Rays with c_j = +inf use the steeper exponent
// e_j = 1 + 2/(1+alpha) and unit coefficient.
struct IntermittentMapSpec {
  enum class Family { kBoole, kThaler };

  Family family = Family::kThaler;
  int d = 2;
  double alpha = 0.5;
  std::vector<double> a;     // d+1 partition points
  std::vector<double> xfix;  // d indifferent fixed points
  std::vector<double> c;     // asymptotic constants, entries may be +inf

  // Per-branch closed-form data (kThaler only).
  std::vector<double> expo;                    // e_j
  std::vector<double> coef_right, lin_right;   // c, b on the right piece
  std::vector<double> coef_left, lin_left;     // c, b on the left piece

  double psi(double s) const;  // Psi(s) = s^{1+1/alpha}

  int branch_index(double x) const;
  double branch(int j, double x) const;
  double branch_inverse(int j, double y) const;
  // T_j(x) - x in closed form (no cancellation near the fixed point).
  double branch_increment(int j, double x) const;
  double branch_derivative(int j, double x) const;
  double eval(double x) const { return branch(branch_index(x), x); }
};

// Construction of the built-in family; the reserved parameterization
// (d=2, alpha=1/2, c=(1,1), family="boole") returns Boole's map itself.
// Rejects c with every entry infinite, and geometry/coefficient combinations
// that break monotonicity or one-sided convexity of a branch.
IntermittentMapSpec make_thaler_family(int d, double alpha, const std::vector<double>& c,
                                       const std::string& family = "thaler");

IntermittentMapSpec boole_spec();

// Result of the numerical spec validation: f_j o T_j identity, sampled
// monotonicity, and the |Tx-x| / (c_j Psi) -> 1 ratio on a geometric grid.
struct SpecValidation {
  double max_roundtrip_error = 0.0;
  bool monotone = true;
  double worst_ratio_deviation = 0.0;  // over finite-c rays
  bool passed(double roundtrip_tol = 1e-12, double ratio_tol = 0.05) const {
    return monotone && max_roundtrip_error < roundtrip_tol &&
           worst_ratio_deviation < ratio_tol;
  }
};
SpecValidation validate_spec(const IntermittentMapSpec& spec);

// --- partition and occupation ----------------------------------------------

// Measurable decomposition [0,1] = A_1 + ... + A_d + Y.  Each set is a
// finite union of intervals; classification is by sorted boundaries.
struct RaysPartition {
  struct Interval {
    double lo, hi;
  };
  int d = 0;
  std::vector<std::vector<Interval>> rays;  // A_j
  std::vector<Interval> junction;           // Y
  double gamma = 0.0;                       // 2-periodic point (d = 2 only)
  double t_gamma = 0.0;                     // T(gamma)

  // Ray index in [0,d) or -1 for Y.
  int classify(double x) const;
  double junction_length() const;
};

enum class StallPolicy { kError, kAnalyticTail };

struct OrbitConfig {
  double x0 = 0.5;
  std::int64_t n_steps = 0;
  StallPolicy stall_policy = StallPolicy::kError;
  // Exit threshold epsilon_0 of the analytic tail completion.
  double stall_exit = 1e-4;
};

// Deterministic orbit stream.  step() applies the map once; under the
// analytic-tail policy a stalled excursion advances the epoch by the ODE
// surrogate count n ~ (alpha/c_j)(y^{-1/alpha} - eps0^{-1/alpha}) in a single
// call and resumes at x_j +- eps0.
class Orbit {
 public:
  Orbit(const IntermittentMapSpec& spec, const OrbitConfig& cfg);

  double step();
  double current() const { return x_; }
  std::int64_t epoch() const { return epoch_; }
  // Steps skipped analytically during the last step() call (0 if none).
  std::int64_t last_skip() const { return last_skip_; }

 private:
  const IntermittentMapSpec& spec_;
  OrbitConfig cfg_;
  double x_;
  std::int64_t epoch_ = 0;
  std::int64_t last_skip_ = 0;
};

// First n_steps+1 orbit points x, Tx, ..., T^n x (analytic-tail skips
// collapse into a single entry; epochs track the true time).
struct OrbitSample {
  std::vector<double> points;
  std::vector<std::int64_t> epochs;
};
OrbitSample iterate(const IntermittentMapSpec& spec, const OrbitConfig& cfg);

struct OccupationRecord {
  std::vector<std::int64_t> times;               // sample epochs t
  std::vector<std::vector<std::int64_t>> s_a;    // [ray][sample]
  std::vector<std::int64_t> s_y;
  std::vector<std::int64_t> g_y;                 // last Y visit <= t (0 if none)
  std::vector<std::int64_t> d_y;                 // first Y visit  > t
  std::vector<bool> d_y_censored;                // D_Y beyond horizon
  std::int64_t horizon = 0;

  // Scaled views for given (n, b_n): S_A/n, S_Y/b_n, G/n, D/n.
  std::vector<double> scaled_s_a(int ray, double n) const;
  std::vector<double> scaled_s_y(double b_n) const;
};

// Occupation counts of the orbit of cfg.x0 per S_A(t) = #{k <= t: T^k x in A},
// with G_Y/D_Y bookkeeping (max empty = 0, min empty censored).
OccupationRecord occupation_process(const IntermittentMapSpec& spec,
                                    const RaysPartition& partition, const OrbitConfig& cfg,
                                    const std::vector<std::int64_t>& sample_times);

// Same counting applied to an explicit point sequence x_0, ..., x_m.
OccupationRecord occupation_from_points(std::span<const double> points,
                                        const RaysPartition& partition,
                                        const std::vector<std::int64_t>& sample_times);

}  // namespace intermit::maps
