#include "intermit/map_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intermit::maps {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double boole_eval(double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("boole_eval: x outside [0,1]");
  if (x <= 0.5) return x * (1.0 - x) / (1.0 - x - x * x);
  const double y = 1.0 - x;
  return 1.0 - y * (1.0 - y) / (1.0 - y - y * y);
}

double boole_branch1_derivative(double x) {
  const double den = 1.0 - x - x * x;
  return (1.0 - 2.0 * x + 2.0 * x * x) / (den * den);
}

double boole_branch1_second_derivative(double x) {
  const double den = 1.0 - x - x * x;
  return 2.0 * x * (3.0 - 3.0 * x + 2.0 * x * x) / (den * den * den);
}

double boole_branch1_inverse(double y) {
  return 2.0 * y / (1.0 + y + std::sqrt(5.0 * y * y - 2.0 * y + 1.0));
}

double invariant_density_boole(double x) {
  if (x <= 0.0 || x >= 1.0)
    throw std::domain_error("invariant_density_boole: density unbounded at {0,1}");
  const double u = 1.0 - x;
  return 1.0 / (x * x) + 1.0 / (u * u);
}

double invariant_density_boole_antiderivative(double x) {
  if (x <= 0.0 || x >= 1.0)
    throw std::domain_error("invariant_density_boole_antiderivative: endpoint");
  return 1.0 / (1.0 - x) - 1.0 / x;
}

namespace boole_chart {

double w_of_x(double x) {
  if (x == 0.0) return kInf;
  if (x == 1.0) return -kInf;
  return 1.0 / x - 1.0 / (1.0 - x);
}

double x_of_w(double w) {
  // Root of w x^2 - (w+2) x + 1 = 0 inside [0,1]; each sign gets the
  // cancellation-free form.
  if (w >= 0.0) return 2.0 / ((w + 2.0) + std::sqrt(w * w + 4.0));
  return ((w + 2.0) - std::sqrt(w * w + 4.0)) / (2.0 * w);
}

}  // namespace boole_chart

double IntermittentMapSpec::psi(double s) const { return std::pow(s, 1.0 + 1.0 / alpha); }

int IntermittentMapSpec::branch_index(double x) const {
  if (family == Family::kBoole) return x <= 0.5 ? 0 : 1;
  auto it = std::upper_bound(a.begin(), a.end(), x);
  int j = static_cast<int>(it - a.begin()) - 1;
  return std::clamp(j, 0, d - 1);
}

double IntermittentMapSpec::branch(int j, double x) const {
  if (family == Family::kBoole) {
    if (j == 0) return x * (1.0 - x) / (1.0 - x - x * x);
    const double y = 1.0 - x;
    return 1.0 - y * (1.0 - y) / (1.0 - y - y * y);
  }
  const double xf = xfix[j];
  double t;
  if (x >= xf) {
    const double s = x - xf;
    t = x + std::pow(s, expo[j]) * (coef_right[j] + lin_right[j] * s);
  } else {
    const double s = xf - x;
    t = x - std::pow(s, expo[j]) * (coef_left[j] + lin_left[j] * s);
  }
  return std::clamp(t, 0.0, 1.0);
}

double IntermittentMapSpec::branch_derivative(int j, double x) const {
  if (family == Family::kBoole) {
    return j == 0 ? boole_branch1_derivative(x) : boole_branch1_derivative(1.0 - x);
  }
  const double xf = xfix[j];
  const double e = expo[j];
  const double s = std::fabs(x - xf);
  const double cc = x >= xf ? coef_right[j] : coef_left[j];
  const double bb = x >= xf ? lin_right[j] : lin_left[j];
  if (s == 0.0) return 1.0;
  return 1.0 + e * cc * std::pow(s, e - 1.0) + (e + 1.0) * bb * std::pow(s, e);
}

double IntermittentMapSpec::branch_increment(int j, double x) const {
  if (family == Family::kBoole) {
    if (j == 0) return x * x * x / (1.0 - x - x * x);
    const double y = 1.0 - x;
    return y * y * y / (1.0 - y - y * y);
  }
  const double xf = xfix[j];
  const double s = std::fabs(x - xf);
  const double cc = x >= xf ? coef_right[j] : coef_left[j];
  const double bb = x >= xf ? lin_right[j] : lin_left[j];
  return std::pow(s, expo[j]) * (cc + bb * s);
}

double IntermittentMapSpec::branch_inverse(int j, double y) const {
  if (y < 0.0 || y > 1.0) throw std::domain_error("branch_inverse: y outside [0,1]");
  if (y == 0.0) return a[j];
  if (y == 1.0) return a[j + 1];
  if (family == Family::kBoole) {
    if (j == 0) return boole_branch1_inverse(y);
    return 1.0 - boole_branch1_inverse(1.0 - y);
  }
  const double xf = xfix[j];
  double lo, hi;
  if (y >= xf) {
    lo = xf;
    hi = a[j + 1];
  } else {
    lo = a[j];
    hi = xf;
  }
  // Newton from the midpoint with a bisection bracket.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = branch(j, x) - y;
    if (fx > 0.0) hi = x;
    else lo = x;
    const double dfx = branch_derivative(j, x);
    double nx = x - fx / dfx;
    if (!(nx > lo) || !(nx < hi)) nx = 0.5 * (lo + hi);
    if (std::fabs(nx - x) <= 1e-16 * (1.0 + std::fabs(x))) return nx;
    x = nx;
  }
  return x;
}

IntermittentMapSpec boole_spec() {
  IntermittentMapSpec s;
  s.family = IntermittentMapSpec::Family::kBoole;
  s.d = 2;
  s.alpha = 0.5;
  s.a = {0.0, 0.5, 1.0};
  s.xfix = {0.0, 1.0};
  s.c = {1.0, 1.0};
  s.expo = {3.0, 3.0};
  return s;
}

IntermittentMapSpec make_thaler_family(int d, double alpha, const std::vector<double>& c,
                                       const std::string& family) {
  if (d < 2) throw std::invalid_argument("make_thaler_family: d must be >= 2");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("make_thaler_family: alpha must lie in (0,1)");
  if (static_cast<int>(c.size()) != d)
    throw std::invalid_argument("make_thaler_family: need one c_j per branch");
  bool any_finite = false;
  for (double cj : c) {
    if (!(cj > 0.0)) throw std::invalid_argument("make_thaler_family: c_j must be positive");
    if (cj < kInf) any_finite = true;
  }
  if (!any_finite)
    throw std::invalid_argument("make_thaler_family: all c_j infinite is excluded");

  if (family == "boole") {
    if (d != 2 || alpha != 0.5 || c[0] != 1.0 || c[1] != 1.0)
      throw std::invalid_argument("make_thaler_family: family=boole is reserved for "
                                  "(d=2, alpha=1/2, c=(1,1))");
    return boole_spec();
  }
  if (family != "thaler")
    throw std::invalid_argument("make_thaler_family: unknown family " + family);

  IntermittentMapSpec s;
  s.family = IntermittentMapSpec::Family::kThaler;
  s.d = d;
  s.alpha = alpha;
  s.c = c;
  s.a.resize(d + 1);
  for (int j = 0; j <= d; ++j) s.a[j] = static_cast<double>(j) / d;
  s.xfix.resize(d);
  s.xfix[0] = 0.0;
  s.xfix[d - 1] = 1.0;
  for (int j = 1; j < d - 1; ++j) s.xfix[j] = 0.5 * (s.a[j] + s.a[j + 1]);

  s.expo.resize(d);
  s.coef_right.assign(d, 0.0);
  s.lin_right.assign(d, 0.0);
  s.coef_left.assign(d, 0.0);
  s.lin_left.assign(d, 0.0);
  for (int j = 0; j < d; ++j) {
    const bool finite = c[j] < kInf;
    s.expo[j] = finite ? 1.0 + 1.0 / alpha : 1.0 + 2.0 / (1.0 + alpha);
    const double cj = finite ? c[j] : 1.0;
    const double e = s.expo[j];
    if (j < d - 1) {  // right piece up to a_{j+1}
      const double span = s.a[j + 1] - s.xfix[j];
      const double b = (1.0 - s.a[j + 1] - cj * std::pow(span, e)) / std::pow(span, e + 1.0);
      s.coef_right[j] = cj;
      s.lin_right[j] = b;
      if ((e - 1.0) * cj + (e + 1.0) * b * span <= 0.0)
        throw std::invalid_argument("make_thaler_family: c_j too large for the branch "
                                    "geometry (convexity fails on the right piece)");
    }
    if (j > 0) {  // left piece down to a_j
      const double span = s.xfix[j] - s.a[j];
      const double b = (s.a[j] - cj * std::pow(span, e)) / std::pow(span, e + 1.0);
      s.coef_left[j] = cj;
      s.lin_left[j] = b;
      if ((e - 1.0) * cj + (e + 1.0) * b * span <= 0.0)
        throw std::invalid_argument("make_thaler_family: c_j too large for the branch "
                                    "geometry (concavity fails on the left piece)");
    }
  }
  return s;
}

SpecValidation validate_spec(const IntermittentMapSpec& spec) {
  SpecValidation v;
  for (int j = 0; j < spec.d; ++j) {
    const double lo = spec.a[j];
    const double hi = spec.a[j + 1];
    double prev = -kInf;
    for (int i = 0; i <= 200; ++i) {
      const double x = lo + (hi - lo) * i / 200.0;
      const double t = spec.branch(j, x);
      if (t < prev) v.monotone = false;
      prev = t;
      const double back = spec.branch_inverse(j, t);
      v.max_roundtrip_error = std::max(v.max_roundtrip_error, std::fabs(back - x));
    }
    // |Tx - x| / (c_j Psi(|x - x_j|)) -> 1 along a geometric grid approaching
    // x_j; the closed-form increment avoids the x + tiny rounding loss.
    if (spec.c[j] < kInf) {
      const double xf = spec.xfix[j];
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        if (sgn < 0 && xf <= lo) continue;
        if (sgn > 0 && xf >= hi) continue;
        double h = (sgn > 0 ? hi - xf : xf - lo) / 64.0;
        double dev = kInf;
        for (int k = 0; k < 24; ++k, h *= 0.5) {
          const double ratio = spec.branch_increment(j, xf + sgn * h) /
                               (spec.c[j] * spec.psi(h));
          dev = std::fabs(ratio - 1.0);
        }
        v.worst_ratio_deviation = std::max(v.worst_ratio_deviation, dev);
      }
    }
  }
  return v;
}

int RaysPartition::classify(double x) const {
  if (d == 2) {
    if (x < gamma) return 0;
    if (x <= t_gamma) return -1;
    return 1;
  }
  for (int j = 0; j < d; ++j) {
    for (const auto& iv : rays[j]) {
      if (x >= iv.lo && x <= iv.hi) return j;
    }
  }
  return -1;
}

double RaysPartition::junction_length() const {
  double len = 0.0;
  for (const auto& iv : junction) len += iv.hi - iv.lo;
  return len;
}

Orbit::Orbit(const IntermittentMapSpec& spec, const OrbitConfig& cfg)
    : spec_(spec), cfg_(cfg), x_(cfg.x0) {
  if (cfg.x0 < 0.0 || cfg.x0 > 1.0) throw std::domain_error("Orbit: x0 outside [0,1]");
  if (cfg.n_steps < 0) throw std::invalid_argument("Orbit: n_steps must be >= 0");
}

double Orbit::step() {
  last_skip_ = 0;
  const double next = spec_.eval(x_);
  if (next != x_) {
    x_ = next;
    ++epoch_;
    return x_;
  }
  // Fixed in working precision: either a genuine indifferent fixed point or
  // a stalled deep excursion.
  for (double xf : spec_.xfix) {
    if (x_ == xf) {
      ++epoch_;
      return x_;
    }
  }
  if (cfg_.stall_policy == StallPolicy::kError) throw StallDetected(x_, epoch_);

  // Analytic tail: the excursion obeys dx/dk ~ +- c_j |x - x_j|^{1+1/alpha},
  // so the time to move from |y| to eps0 is ~ (alpha/c_j)(y^{-1/a} - eps0^{-1/a}).
  int j = spec_.branch_index(x_);
  const double xf = spec_.xfix[j];
  const double y = std::fabs(x_ - xf);
  const double eps0 = std::max(cfg_.stall_exit, 2.0 * y);
  const double inv_a = 1.0 / spec_.alpha;
  const double cj = spec_.c[j] < kInf ? spec_.c[j] : 1.0;
  double skip = spec_.alpha / cj * (std::pow(y, -inv_a) - std::pow(eps0, -inv_a));
  if (skip < 1.0) skip = 1.0;
  last_skip_ = static_cast<std::int64_t>(skip);
  epoch_ += last_skip_;
  x_ = x_ > xf ? xf + eps0 : xf - eps0;
  x_ = std::clamp(x_, 0.0, 1.0);
  return x_;
}

OrbitSample iterate(const IntermittentMapSpec& spec, const OrbitConfig& cfg) {
  Orbit orbit(spec, cfg);
  OrbitSample out;
  out.points.push_back(cfg.x0);
  out.epochs.push_back(0);
  while (orbit.epoch() < cfg.n_steps) {
    out.points.push_back(orbit.step());
    out.epochs.push_back(orbit.epoch());
  }
  return out;
}

namespace {

// Single pass over classified points; shared by the orbit and the synthetic
// point-sequence entries.
class OccupationCounter {
 public:
  OccupationCounter(const RaysPartition& partition, const std::vector<std::int64_t>& times,
                    std::int64_t horizon)
      : part_(partition), times_(times) {
    rec_.times = times;
    rec_.horizon = horizon;
    rec_.s_a.assign(part_.d, std::vector<std::int64_t>(times.size(), 0));
    rec_.s_y.assign(times.size(), 0);
    rec_.g_y.assign(times.size(), 0);
    rec_.d_y.assign(times.size(), 0);
    rec_.d_y_censored.assign(times.size(), false);
    counts_.assign(part_.d, 0);
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < 0 || times[i] > horizon)
        throw std::invalid_argument("occupation: sample time outside [0, horizon]");
      if (i > 0 && times[i] < times[i - 1])
        throw std::invalid_argument("occupation: sample times must be sorted");
    }
    flush_zero();
  }

  // Epochs k_from..k_to all classified like x (an analytic skip stays on one
  // ray, so a single classification covers the run).
  void feed_run(std::int64_t k_from, std::int64_t k_to, double x) {
    const int ray = part_.classify(x);
    if (ray < 0) {
      for (std::int64_t k = k_from; k <= k_to; ++k) feed(k, x);
      return;
    }
    counts_[ray] += k_to - k_from + 1;
    while (next_sample_ < times_.size() && times_[next_sample_] <= k_to) {
      for (int j = 0; j < part_.d; ++j) rec_.s_a[j][next_sample_] = counts_[j];
      rec_.s_a[ray][next_sample_] -= k_to - times_[next_sample_];
      rec_.s_y[next_sample_] = count_y_;
      rec_.g_y[next_sample_] = last_y_;
      ++next_sample_;
    }
  }

  void feed(std::int64_t k, double x) {
    const int ray = part_.classify(x);
    if (ray >= 0) {
      ++counts_[ray];
    } else {
      ++count_y_;
      last_y_ = k;
      // Resolve pending D_Y entries.
      while (pending_d_ < times_.size() && times_[pending_d_] < k) {
        rec_.d_y[pending_d_] = k;
        ++pending_d_;
      }
    }
    while (next_sample_ < times_.size() && times_[next_sample_] == k) {
      for (int j = 0; j < part_.d; ++j) rec_.s_a[j][next_sample_] = counts_[j];
      rec_.s_y[next_sample_] = count_y_;
      rec_.g_y[next_sample_] = last_y_;
      ++next_sample_;
    }
  }

  OccupationRecord finish() {
    while (pending_d_ < times_.size()) {
      rec_.d_y_censored[pending_d_] = true;
      ++pending_d_;
    }
    return std::move(rec_);
  }

 private:
  void flush_zero() {
    while (next_sample_ < times_.size() && times_[next_sample_] == 0) ++next_sample_;
  }

  const RaysPartition& part_;
  const std::vector<std::int64_t>& times_;
  OccupationRecord rec_;
  std::vector<std::int64_t> counts_;
  std::int64_t count_y_ = 0;
  std::int64_t last_y_ = 0;
  std::size_t next_sample_ = 0;
  std::size_t pending_d_ = 0;
};

}  // namespace

OccupationRecord occupation_process(const IntermittentMapSpec& spec,
                                    const RaysPartition& partition, const OrbitConfig& cfg,
                                    const std::vector<std::int64_t>& sample_times) {
  OccupationCounter counter(partition, sample_times, cfg.n_steps);
  Orbit orbit(spec, cfg);
  while (orbit.epoch() < cfg.n_steps) {
    const std::int64_t before = orbit.epoch();
    const double x = orbit.step();
    const std::int64_t upto = std::min(orbit.epoch(), cfg.n_steps);
    if (orbit.last_skip() > 1) {
      counter.feed_run(before + 1, upto, x);
    } else {
      counter.feed(upto, x);
    }
  }
  return counter.finish();
}

OccupationRecord occupation_from_points(std::span<const double> points,
                                        const RaysPartition& partition,
                                        const std::vector<std::int64_t>& sample_times) {
  if (points.empty()) throw std::invalid_argument("occupation_from_points: empty sequence");
  const std::int64_t horizon = static_cast<std::int64_t>(points.size()) - 1;
  OccupationCounter counter(partition, sample_times, horizon);
  for (std::int64_t k = 1; k <= horizon; ++k) counter.feed(k, points[k]);
  return counter.finish();
}

std::vector<double> OccupationRecord::scaled_s_a(int ray, double n) const {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = s_a[ray][i] / n;
  return out;
}

std::vector<double> OccupationRecord::scaled_s_y(double b_n) const {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = s_y[i] / b_n;
  return out;
}

}  // namespace intermit::maps
