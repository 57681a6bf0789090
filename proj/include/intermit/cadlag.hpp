#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace intermit::cadlag {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct NotProper : std::runtime_error {
  NotProper() : std::runtime_error("cadlag: function is bounded, inverse is not proper") {}
};
struct HorizonExceeded : std::runtime_error {
  explicit HorizonExceeded(const char* what) : std::runtime_error(what) {}
};

// Nondecreasing cadlag function on [0, domain_end()), stored as a sorted
// breakpoint list.  On [t_k, t_{k+1}) the value is v_k + s_k (t - t_k); a
// jump occurs at t_{k+1} whenever v_{k+1} exceeds the left limit there.
// Counting processes are the pure-step case (all slopes zero); subordinators
// with a small-jump compensation drift use nonzero slopes.  Evaluation is
// binary search, never grid sampling, so identities on integer data are
// exact.
class StepFunction {
 public:
  struct Segment {
    double t;  // segment start
    double v;  // value at start (right-continuous)
    double s;  // slope on the segment
  };

  StepFunction() : segs_{{0.0, 0.0, 0.0}} {}

  // Pure step function: value `initial` on [0, t_1), then values[k] from
  // jump_times[k] on.  Non-increasing inputs are rejected.
  static StepFunction steps(const std::vector<double>& jump_times,
                            const std::vector<double>& values, double initial = 0.0);

  // x(t) = v0 + slope * t on all of [0, inf).
  static StepFunction ramp(double slope = 1.0, double v0 = 0.0);

  static StepFunction constant(double v) { return ramp(0.0, v); }

  // Marks the function as known only on [0, end).
  void restrict_domain(double end);

  double domain_end() const { return domain_end_; }
  bool proper() const { return domain_end_ == kInf && segs_.back().s > 0.0; }

  double operator()(double t) const;
  double left_limit(double t) const;
  // Left limit at domain_end (sup of the function over its known domain).
  double value_sup() const;
  double value_at_zero() const { return segs_.front().v; }

  // Right-continuous inverse  x^{-1}(u) = inf{t > 0 : x(t) > u}.  Throws
  // NotProper for a function that is bounded on all of [0, inf).  For a
  // function known only on [0, T) the inverse is known on [0, x(T-)).
  StepFunction inverse() const;

  // G(t) = sup{values in the closure of the range <= t} with sup empty = 0;
  // D(t) = inf{range values > t} with inf empty = +inf (censored).
  double g_op(double t) const;
  double d_op(double t) const;

  // Pointwise sum; breakpoints are merged, domain is the intersection.
  StepFunction& operator+=(const StepFunction& other);
  friend StepFunction operator+(StepFunction a, const StepFunction& b) { return a += b; }

  // Adds slope * t to the function.
  void add_ramp(double slope);

  // t -> outer(inner(t)) for nondecreasing piecewise-linear arguments.
  static StepFunction compose(const StepFunction& outer, const StepFunction& inner);

  const std::vector<Segment>& segments() const { return segs_; }
  std::size_t breakpoint_count() const { return segs_.size(); }

 private:
  // Index of the segment containing t.
  std::size_t locate(double t) const;
  void push_level(std::vector<Segment>& out, double t, double v, double s) const;
  double segment_end_value(std::size_t k) const;
  double segment_end_time(std::size_t k) const;

  std::vector<Segment> segs_;   // segs_[0].t == 0, times strictly increasing
  double domain_end_ = kInf;
};

// y(x^{-1}(t)); right-continuous convention throughout.
double compose_inverse(const StepFunction& y, const StepFunction& x, double t);

// Result of the discrete Williams identity verification; exact integer
// comparisons, so `violations` should be zero on any consistently derived
// orbit/trace pair.
struct WilliamsReport {
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::int64_t first_bad_t = -1;
  int first_bad_ray = -1;
  bool passed() const { return violations == 0 && checks > 0; }
};

// Verifies, at every t in t_grid and every ray j,
//   S_{A_j}^{-1}(t) = floor(t+1) + sum_{i != j} eta_i(eta_j^{-1}(t)) + eta_j^{-1}(t)
// and phi(t) = floor(t+1) + sum_i eta_i(t).  All inputs are pure-step
// functions carrying integer values.
WilliamsReport williams_discrete_check(const std::vector<StepFunction>& s_a,
                                       const std::vector<StepFunction>& eta,
                                       const StepFunction& phi,
                                       const std::vector<std::int64_t>& t_grid);

// Upper bound for the Skorokhod J1 distance between two pure-step elements
// of D restricted to [0, horizon]: minimizes max(gamma(lambda), capped sup
// distance) over piecewise-linear time changes anchored at monotone jump
// matchings.  The true infimum over all Lipschitz time changes is not
// computed; the returned value only ever overestimates it.
double j1_upper_bound(const StepFunction& x, const StepFunction& y, double horizon);

}  // namespace intermit::cadlag
