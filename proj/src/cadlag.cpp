#include "intermit/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace intermit::cadlag {

StepFunction StepFunction::steps(const std::vector<double>& jump_times,
                                 const std::vector<double>& values, double initial) {
  if (jump_times.size() != values.size())
    throw std::invalid_argument("StepFunction::steps: size mismatch");
  StepFunction f;
  f.segs_.clear();
  f.segs_.push_back({0.0, initial, 0.0});
  double prev_t = 0.0;
  double prev_v = initial;
  for (std::size_t k = 0; k < jump_times.size(); ++k) {
    const double t = jump_times[k];
    const double v = values[k];
    if (!(t > prev_t) && !(t == 0.0 && k == 0))
      throw std::invalid_argument("StepFunction::steps: jump times must increase");
    if (v < prev_v) throw std::invalid_argument("StepFunction::steps: values must not decrease");
    if (t == 0.0) {
      f.segs_.back().v = v;
    } else if (v > prev_v) {
      f.segs_.push_back({t, v, 0.0});
    }
    prev_t = t;
    prev_v = v;
  }
  return f;
}

StepFunction StepFunction::ramp(double slope, double v0) {
  if (slope < 0.0) throw std::invalid_argument("StepFunction::ramp: slope must be >= 0");
  StepFunction f;
  f.segs_[0] = {0.0, v0, slope};
  return f;
}

void StepFunction::restrict_domain(double end) {
  if (!(end > 0.0)) throw std::invalid_argument("restrict_domain: end must be positive");
  domain_end_ = end;
  while (segs_.size() > 1 && segs_.back().t >= end) segs_.pop_back();
}

std::size_t StepFunction::locate(double t) const {
  auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                             [](double u, const Segment& s) { return u < s.t; });
  return static_cast<std::size_t>(it - segs_.begin()) - 1;
}

double StepFunction::segment_end_time(std::size_t k) const {
  return k + 1 < segs_.size() ? segs_[k + 1].t : domain_end_;
}

double StepFunction::segment_end_value(std::size_t k) const {
  const double end = segment_end_time(k);
  if (end == kInf) return segs_[k].s > 0.0 ? kInf : segs_[k].v;
  return segs_[k].v + segs_[k].s * (end - segs_[k].t);
}

double StepFunction::operator()(double t) const {
  if (t < 0.0) throw std::domain_error("StepFunction: negative time");
  if (t >= domain_end_) throw HorizonExceeded("StepFunction: evaluation beyond known domain");
  const Segment& s = segs_[locate(t)];
  return s.v + s.s * (t - s.t);
}

double StepFunction::left_limit(double t) const {
  if (t <= 0.0) return segs_.front().v;
  if (t > domain_end_) throw HorizonExceeded("StepFunction: left limit beyond known domain");
  const std::size_t k = t == domain_end_ ? segs_.size() - 1 : locate(t);
  const Segment& s = segs_[k];
  if (t > s.t) return s.v + s.s * (t - s.t);
  // t is the breakpoint itself: left limit comes from the previous segment.
  const Segment& p = segs_[k - 1];
  return p.v + p.s * (t - p.t);
}

double StepFunction::value_sup() const {
  if (domain_end_ == kInf) return segment_end_value(segs_.size() - 1);
  return left_limit(domain_end_);
}

StepFunction StepFunction::inverse() const {
  if (domain_end_ == kInf && segs_.back().s == 0.0) throw NotProper();

  StepFunction inv;
  inv.segs_.clear();
  double cur_level = 0.0;
  const double v0 = segs_.front().v;
  if (v0 > 0.0) {
    inv.segs_.push_back({0.0, 0.0, 0.0});
    cur_level = v0;
  }
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    const Segment& s = segs_[k];
    if (s.v > cur_level || (inv.segs_.empty() && s.v == 0.0)) {
      // Jump of x at s.t (or the initial point): inverse is flat at s.t.
      push_level(inv.segs_, cur_level, s.t, 0.0);
      cur_level = s.v;
    }
    const double hi = segment_end_value(k);
    if (s.s > 0.0 && hi > s.v) {
      push_level(inv.segs_, s.v, s.t, 1.0 / s.s);
      cur_level = hi;
    }
  }
  if (inv.segs_.empty()) inv.segs_.push_back({0.0, 0.0, 0.0});
  const double sup = value_sup();
  if (sup < kInf) inv.restrict_domain(sup);
  return inv;
}

void StepFunction::push_level(std::vector<Segment>& out, double t, double v, double s) const {
  if (!out.empty() && out.back().t == t) {
    out.back().v = v;
    out.back().s = s;
    return;
  }
  if (!out.empty() && out.back().t > t) return;  // zero-length remnant
  out.push_back({t, v, s});
}

double StepFunction::g_op(double t) const {
  // Closure of the range is the union of [v_k, end_value_k].
  if (t < segs_.front().v) return 0.0;
  auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                             [](double u, const Segment& s) { return u < s.v; });
  const std::size_t k = static_cast<std::size_t>(it - segs_.begin()) - 1;
  const double hi = segment_end_value(k);
  return t <= hi ? t : hi;
}

double StepFunction::d_op(double t) const {
  if (t < segs_.front().v) return segs_.front().v;
  auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                             [](double u, const Segment& s) { return u < s.v; });
  std::size_t k = static_cast<std::size_t>(it - segs_.begin()) - 1;
  const double hi_open = segment_end_value(k);
  // Values strictly above t inside segment k exist iff t lies below its
  // left limit at the segment end.
  if (t < hi_open) return t < segs_[k].v ? segs_[k].v : t;
  if (k + 1 < segs_.size()) return segs_[k + 1].v;
  return kInf;
}

StepFunction& StepFunction::operator+=(const StepFunction& other) {
  std::vector<Segment> merged;
  merged.reserve(segs_.size() + other.segs_.size());
  std::size_t i = 0, j = 0;
  const auto& a = segs_;
  const auto& b = other.segs_;
  while (i < a.size() || j < b.size()) {
    double t;
    if (j >= b.size()) t = a[i].t;
    else if (i >= a.size()) t = b[j].t;
    else t = std::min(a[i].t, b[j].t);
    // Advance indices past breakpoints at t.
    if (i < a.size() && a[i].t == t) ++i;
    if (j < b.size() && b[j].t == t) ++j;
    const Segment& sa = a[i == 0 ? 0 : i - 1];
    const Segment& sb = b[j == 0 ? 0 : j - 1];
    const double va = sa.v + sa.s * (t - sa.t);
    const double vb = sb.v + sb.s * (t - sb.t);
    Segment m{t, va + vb, sa.s + sb.s};
    if (!merged.empty() && merged.back().t == t) merged.back() = m;
    else merged.push_back(m);
  }
  segs_ = std::move(merged);
  domain_end_ = std::min(domain_end_, other.domain_end_);
  while (segs_.size() > 1 && segs_.back().t >= domain_end_) segs_.pop_back();
  return *this;
}

void StepFunction::add_ramp(double slope) {
  for (auto& s : segs_) {
    s.v += slope * s.t;
    s.s += slope;
  }
}

StepFunction StepFunction::compose(const StepFunction& outer, const StepFunction& inner) {
  StepFunction out;
  out.segs_.clear();
  double domain_end = inner.domain_end_;
  const double outer_end = outer.domain_end_;

  for (std::size_t k = 0; k < inner.segs_.size(); ++k) {
    const auto& seg = inner.segs_[k];
    const double t_hi = inner.segment_end_time(k);
    if (seg.v >= outer_end) {
      domain_end = std::min(domain_end, seg.t);
      break;
    }
    if (seg.s == 0.0) {
      out.push_level(out.segs_, seg.t, outer(seg.v), 0.0);
      continue;
    }
    // Rising piece: walk the outer breakpoints inside the swept value range.
    double w = seg.v;
    double t = seg.t;
    const double w_hi = inner.segment_end_value(k);
    while (t < t_hi) {
      if (w >= outer_end) {
        domain_end = std::min(domain_end, t);
        break;
      }
      const std::size_t ko = outer.locate(w);
      const auto& os = outer.segs_[ko];
      out.push_level(out.segs_, t, os.v + os.s * (w - os.t), os.s * seg.s);
      const double next_w = std::min({outer.segment_end_time(ko), w_hi, outer_end});
      if (next_w >= w_hi || next_w == kInf) break;
      t = seg.t + (next_w - seg.v) / seg.s;
      w = next_w;
      if (t >= t_hi) break;
    }
    if (domain_end <= seg.t) break;
  }
  if (out.segs_.empty()) out.segs_.push_back({0.0, outer.segs_.front().v, 0.0});
  if (domain_end < kInf) out.restrict_domain(domain_end);
  return out;
}

double compose_inverse(const StepFunction& y, const StepFunction& x, double t) {
  return y(x.inverse()(t));
}

WilliamsReport williams_discrete_check(const std::vector<StepFunction>& s_a,
                                       const std::vector<StepFunction>& eta,
                                       const StepFunction& phi,
                                       const std::vector<std::int64_t>& t_grid) {
  if (s_a.size() != eta.size()) throw std::invalid_argument("williams: ray count mismatch");
  const int d = static_cast<int>(s_a.size());
  WilliamsReport rep;

  std::vector<StepFunction> s_a_inv;
  std::vector<StepFunction> eta_inv;
  s_a_inv.reserve(d);
  eta_inv.reserve(d);
  for (int j = 0; j < d; ++j) {
    s_a_inv.push_back(s_a[j].inverse());
    eta_inv.push_back(eta[j].inverse());
  }

  auto record = [&rep](bool ok, std::int64_t t, int ray) {
    ++rep.checks;
    if (!ok) {
      ++rep.violations;
      if (rep.first_bad_t < 0) {
        rep.first_bad_t = t;
        rep.first_bad_ray = ray;
      }
    }
  };

  for (const std::int64_t t : t_grid) {
    const double td = static_cast<double>(t);
    // (d-W0): phi(t) = floor(t+1) + sum_i eta_i(t)
    double rhs0 = static_cast<double>(t + 1);
    for (int i = 0; i < d; ++i) rhs0 += eta[i](td);
    record(phi(td) == rhs0, t, -1);

    for (int j = 0; j < d; ++j) {
      const double nj = eta_inv[j](td);
      double rhs = static_cast<double>(t + 1) + nj;
      for (int i = 0; i < d; ++i) {
        if (i != j) rhs += eta[i](nj);
      }
      record(s_a_inv[j](td) == rhs, t, j);
    }
  }
  return rep;
}

namespace {

struct Jump {
  double t;
  double level_after;
};

// Events between two anchors, walked in time order to find the largest
// plateau discrepancy |x - y o lambda|.
double plateau_max(const std::vector<Jump>& xj, std::size_t xi0, std::size_t xi1,
                   const std::vector<Jump>& yj, std::size_t yj0, std::size_t yj1,
                   double x_level, double y_level, double t0, double s0, double slope) {
  double best = std::fabs(x_level - y_level);
  std::size_t i = xi0;
  std::size_t j = yj0;
  double cx = x_level;
  double cy = y_level;
  while (i < xi1 || j < yj1) {
    // y-jump times pulled back to the x clock through the linear segment.
    const double tx = i < xi1 ? xj[i].t : kInf;
    const double ty = j < yj1 ? t0 + (yj[j].t - s0) / slope : kInf;
    if (tx <= ty) {
      cx = xj[i].level_after;
      ++i;
    } else {
      cy = yj[j].level_after;
      ++j;
    }
    best = std::max(best, std::fabs(cx - cy));
  }
  return best;
}

std::vector<Jump> extract_jumps(const StepFunction& f, double horizon) {
  std::vector<Jump> out;
  const auto& segs = f.segments();
  for (std::size_t k = 1; k < segs.size(); ++k) {
    if (segs[k].t >= horizon) break;
    if (segs[k].s != 0.0 || segs[k - 1].s != 0.0)
      throw std::invalid_argument("j1_upper_bound: pure step functions required");
    out.push_back({segs[k].t, segs[k].v});
  }
  return out;
}

}  // namespace

double j1_upper_bound(const StepFunction& x, const StepFunction& y, double horizon) {
  const std::vector<Jump> xj = extract_jumps(x, horizon);
  const std::vector<Jump> yj = extract_jumps(y, horizon);
  const std::size_t m = xj.size();
  const std::size_t n = yj.size();
  const double x0 = x.value_at_zero();
  const double y0 = y.value_at_zero();

  auto level_x = [&](std::size_t i) { return i == 0 ? x0 : xj[i - 1].level_after; };
  auto level_y = [&](std::size_t j) { return j == 0 ? y0 : yj[j - 1].level_after; };
  auto cap = [](double v) { return v > 1.0 ? 1.0 : v; };

  // dp[i][j]: minimal max-cost over matchings whose most recent anchor pairs
  // x-jump i with y-jump j (1-based; (0,0) is the start anchor at the origin).
  const double kBig = kInf;
  std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, kBig));
  dp[0][0] = 0.0;

  auto transition = [&](std::size_t ia, std::size_t ja, std::size_t ib, std::size_t jb,
                        double t1, double s1) -> double {
    const double t0 = ia == 0 ? 0.0 : xj[ia - 1].t;
    const double s0 = ja == 0 ? 0.0 : yj[ja - 1].t;
    if (t1 <= t0 || s1 <= s0) return kBig;
    const double slope = (s1 - s0) / (t1 - t0);
    const double gamma = std::fabs(std::log(slope));
    const double plat = plateau_max(xj, ia, ib, yj, ja, jb, level_x(ia), level_y(ja),
                                    t0, s0, slope);
    return std::max(gamma, cap(plat));
  };

  double best = kBig;
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (dp[i][j] == kBig) continue;
      // Close the matching: identity-anchored final segment to (horizon, horizon).
      {
        const double c = transition(i, j, m, n, horizon, horizon);
        best = std::min(best, std::max(dp[i][j], c));
      }
      // Extend with a further match (i', j').
      for (std::size_t i2 = i + 1; i2 <= m; ++i2) {
        for (std::size_t j2 = j + 1; j2 <= n; ++j2) {
          const double c = transition(i, j, i2 - 1, j2 - 1, xj[i2 - 1].t, yj[j2 - 1].t);
          if (c == kBig) continue;
          const double val = std::max(dp[i][j], c);
          if (val < dp[i2][j2]) dp[i2][j2] = val;
        }
      }
    }
  }
  return best;
}

}  // namespace intermit::cadlag
