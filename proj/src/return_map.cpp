#include "intermit/return_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "intermit/special.hpp"

namespace intermit::induced {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double find_periodic_gamma(const IntermittentMapSpec& spec) {
  if (spec.d != 2) throw std::invalid_argument("find_periodic_gamma: d = 2 only");

  double lo, hi;
  bool symmetric = spec.family == IntermittentMapSpec::Family::kBoole;
  if (symmetric) {
    // T(gamma) = 1 - gamma; symmetry T(1-x) = 1 - T(x) upgrades the solution
    // to a 2-periodic point.
    lo = 1e-12;
    hi = spec.a[1];
    auto h = [&](double x) { return spec.branch(0, x) - (1.0 - x); };
    if (!(h(lo) < 0.0) || !(h(hi) > 0.0)) throw NoPeriodicPoint();
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < 0.0 ? lo : hi) = mid;
    }
  } else {
    // Bracket T_2(T_1(x)) = x on [f_1(a_1), a_1].
    lo = spec.branch_inverse(0, spec.a[1]);
    hi = spec.a[1];
    auto h = [&](double x) { return spec.branch(1, spec.branch(0, x)) - x; };
    if (!(h(lo) < 0.0) || !(h(hi) > 0.0)) throw NoPeriodicPoint();
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < 0.0 ? lo : hi) = mid;
    }
  }
  const double gamma = 0.5 * (lo + hi);
  const double t2 = spec.eval(spec.eval(gamma));
  if (std::fabs(t2 - gamma) > 1e-9 || spec.eval(gamma) <= spec.a[1]) throw NoPeriodicPoint();
  return gamma;
}

RaysPartition build_partition(const IntermittentMapSpec& spec) {
  RaysPartition part;
  part.d = spec.d;
  part.rays.resize(spec.d);
  if (spec.d == 2) {
    const double gamma = find_periodic_gamma(spec);
    const double t_gamma = spec.eval(gamma);
    part.gamma = gamma;
    part.t_gamma = t_gamma;
    part.rays[0] = {{0.0, gamma}};
    part.rays[1] = {{t_gamma, 1.0}};
    part.junction = {{gamma, t_gamma}};
    return part;
  }
  // A_j = f_j(J_j); the margins of every J_j fall to Y.
  std::vector<double> lo(spec.d), hi(spec.d);
  for (int j = 0; j < spec.d; ++j) {
    lo[j] = spec.branch_inverse(j, spec.a[j]);
    hi[j] = spec.branch_inverse(j, spec.a[j + 1]);
    part.rays[j] = {{lo[j], hi[j]}};
  }
  for (int j = 0; j < spec.d; ++j) {
    const double gap_lo = hi[j];
    const double gap_hi = j + 1 < spec.d ? lo[j + 1] : 1.0;
    if (gap_hi > gap_lo) part.junction.push_back({gap_lo, gap_hi});
  }
  return part;
}

std::int64_t separation_audit(const IntermittentMapSpec& spec, const RaysPartition& partition,
                              std::int64_t n_segments, std::uint64_t seed) {
  Rng rng(seed);
  std::int64_t violations = 0;
  for (std::int64_t s = 0; s < n_segments; ++s) {
    double x = rng.uniform();
    int prev = partition.classify(x);
    for (int k = 0; k < 64; ++k) {
      x = spec.eval(x);
      const int cur = partition.classify(x);
      if (cur >= 0 && prev >= 0 && cur != prev) ++violations;
      prev = cur;
    }
  }
  return violations;
}

std::vector<cadlag::StepFunction> ExcursionTrace::eta_functions() const {
  std::vector<cadlag::StepFunction> out;
  out.reserve(d);
  const std::size_t r = records();
  for (int j = 0; j < d; ++j) {
    std::vector<double> times;
    std::vector<double> values;
    double initial = 0.0;
    double cum = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      if (ray[k] == j) cum += static_cast<double>(len[k]);
      if (k == 0) initial = cum;
      else if (ray[k] == j && len[k] > 0) {
        times.push_back(static_cast<double>(k));
        values.push_back(cum);
      }
    }
    auto f = cadlag::StepFunction::steps(times, values, initial);
    f.restrict_domain(static_cast<double>(r));
    out.push_back(std::move(f));
  }
  return out;
}

cadlag::StepFunction ExcursionTrace::phi_function() const {
  const std::size_t r = records();
  std::vector<double> times;
  std::vector<double> values;
  double cum = 0.0;
  double initial = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    cum += static_cast<double>(phi[k]);
    if (k == 0) initial = cum;
    else {
      times.push_back(static_cast<double>(k));
      values.push_back(cum);
    }
  }
  auto f = cadlag::StepFunction::steps(times, values, initial);
  f.restrict_domain(static_cast<double>(r));
  return f;
}

namespace {

// Appends one record, verifying the per-record identity phi = 1 + sum_j ell_j
// and single-ray purity as it goes.
struct TraceBuilder {
  explicit TraceBuilder(int d) { trace.d = d; }

  void start_point(double x0, bool in_y) {
    trace.x0 = x0;
    trace.stationary_begin = in_y ? 0 : 1;
  }

  void visit(int ray, std::int64_t steps_in_ray, std::int64_t phi) {
    if (phi != steps_in_ray + 1)
      throw std::logic_error("excursion_trace: phi != 1 + excursion length");
    trace.ray.push_back(steps_in_ray == 0 ? -1 : ray);
    trace.len.push_back(steps_in_ray);
    trace.phi.push_back(phi);
  }

  ExcursionTrace trace;
};

ExcursionTrace exact_trace(const IntermittentMapSpec& spec, const RaysPartition& partition,
                           double x0, std::int64_t n_returns) {
  TraceBuilder builder(spec.d);
  builder.start_point(x0, partition.classify(x0) < 0);
  const std::int64_t want =
      n_returns + static_cast<std::int64_t>(builder.trace.stationary_begin);

  maps::OrbitConfig cfg;
  cfg.x0 = x0;
  cfg.n_steps = std::numeric_limits<std::int64_t>::max();
  cfg.stall_policy = maps::StallPolicy::kAnalyticTail;
  maps::Orbit orbit(spec, cfg);

  std::int64_t last_y_epoch = 0;
  std::int64_t in_ray = 0;
  int cur_ray = -1;
  while (static_cast<std::int64_t>(builder.trace.records()) < want) {
    const double x = orbit.step();
    const std::int64_t skip = std::max<std::int64_t>(orbit.last_skip(), 1);
    const int cls = partition.classify(x);
    if (cls < 0) {
      builder.visit(cur_ray, in_ray, orbit.epoch() - last_y_epoch);
      last_y_epoch = orbit.epoch();
      in_ray = 0;
      cur_ray = -1;
    } else {
      if (cur_ray >= 0 && cls != cur_ray)
        throw std::logic_error("excursion_trace: dynamical separation violated");
      cur_ray = cls;
      in_ray += skip;
    }
  }
  return builder.trace;
}

ExcursionTrace fast_boole_trace(const IntermittentMapSpec& spec, const RaysPartition& partition,
                                double x0, std::int64_t n_returns) {
  if (spec.family != IntermittentMapSpec::Family::kBoole)
    throw std::invalid_argument("excursion_trace: fast engine is Boole-only");
  TraceBuilder builder(2);
  (void)partition;
  // The chart is authoritative for membership here; the x-space boundary can
  // disagree by an ulp.
  double w = maps::boole_chart::w_of_x(x0);
  const bool in_y = std::fabs(w) <= fastboole::kWY;
  builder.start_point(x0, in_y);

  if (!in_y) {
    // Initial segment: x0 itself sits mid-excursion.
    const auto exc = fastboole::run_excursion(std::fabs(w));
    const int ray = w > 0.0 ? 0 : 1;
    builder.visit(ray, exc.len - 1, exc.len);
    w = w > 0.0 ? exc.w_exit : -exc.w_exit;
  }
  for (std::int64_t r = 0; r < n_returns; ++r) {
    const auto rec = fastboole::t_y_step(w);
    builder.visit(rec.ray, rec.len, rec.phi);
    w = rec.w_next;
  }
  return builder.trace;
}

}  // namespace

ExcursionTrace excursion_trace(const IntermittentMapSpec& spec, const RaysPartition& partition,
                               double x0, std::int64_t n_returns, TraceEngine engine) {
  if (n_returns < 0) throw std::invalid_argument("excursion_trace: n_returns < 0");
  return engine == TraceEngine::kExact ? exact_trace(spec, partition, x0, n_returns)
                                       : fast_boole_trace(spec, partition, x0, n_returns);
}

ExcursionTrace trace_from_points(std::span<const double> points, const RaysPartition& partition) {
  if (points.empty()) throw std::invalid_argument("trace_from_points: empty sequence");
  TraceBuilder builder(partition.d);
  builder.start_point(points[0], partition.classify(points[0]) < 0);
  std::int64_t last_y = 0;
  std::int64_t in_ray = 0;
  int cur_ray = -1;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const int cls = partition.classify(points[k]);
    if (cls < 0) {
      builder.visit(cur_ray, in_ray, static_cast<std::int64_t>(k) - last_y);
      last_y = static_cast<std::int64_t>(k);
      in_ray = 0;
      cur_ray = -1;
    } else {
      if (cur_ray >= 0 && cls != cur_ray)
        throw std::logic_error("trace_from_points: dynamical separation violated");
      cur_ray = cls;
      ++in_ray;
    }
  }
  return builder.trace;
}

namespace fastboole {

namespace {

constexpr double kVCut = 4096.0;     // hand off to exact iteration below this v = w^2
constexpr double kVJump = 16384.0;   // fast-forward only well above the handoff
constexpr double kLenCap = 4.0e18;   // saturate astronomically deep excursions

// Telescoping potential of v_{k+1} = v_k - 2 + 1/v_k: F(v_{k+1}) = F(v_k) - 1
// with per-step defect O(v^{-4}).
inline double potential(double v) {
  return 0.5 * v + 0.25 * std::log(v) + 0.125 / v - 5.0 / (96.0 * v * v);
}
inline double potential_deriv(double v) {
  return 0.5 + 0.25 / v - 0.125 / (v * v) + 5.0 / (48.0 * v * v * v);
}

}  // namespace

Excursion run_excursion(double w0) {
  if (!(w0 > kWY)) throw std::invalid_argument("run_excursion: entry must lie outside Y");
  double len = 0.0;
  double w = w0;
  const double v0 = w > 1.3e154 ? kInf : w * w;
  if (v0 > kVJump) {
    // Steps needed to reach the handoff level; the fractional phase anchors
    // the Newton target near potential(kVCut), so no large-magnitude
    // cancellation enters the solve.
    const double pv = potential(v0) - potential(kVCut);
    double n_jump = std::floor(pv);
    double frac = pv - n_jump;
    if (!std::isfinite(pv) || n_jump > kLenCap) {
      // Deeper than any horizon we can count: saturate the length and hand
      // off at an arbitrary phase.
      n_jump = kLenCap;
      frac = 0.5;
    }
    if (!(frac >= 0.0 && frac < 1.0)) frac = 0.5;  // phase unresolvable in doubles
    if (n_jump >= 1.0) {
      const double target = potential(kVCut) + frac;
      double z = kVCut + 2.0 * frac;
      for (int it = 0; it < 6; ++it) z -= (potential(z) - target) / potential_deriv(z);
      w = std::sqrt(std::max(z, 1.0));
      len += n_jump;
    }
  }
  while (w > kWY) {
    w -= 1.0 / w;
    len += 1.0;
  }
  if (len > kLenCap) len = kLenCap;
  if (w < -kWY) w = -kWY;  // exit rounds at most an ulp past the boundary
  return {static_cast<std::int64_t>(len), w};
}

ReturnRecord t_y_step(double w) {
  if (std::fabs(w) > kWY) throw std::invalid_argument("t_y_step: state must lie in Y");
  if (w == 0.0) w = 1e-300;
  const double w1 = w - 1.0 / w;
  if (std::fabs(w1) <= kWY) return {-1, 0, 1, w1};
  const int ray = w1 > 0.0 ? 0 : 1;
  const Excursion exc = run_excursion(std::fabs(w1));
  return {ray, exc.len, exc.len + 1, w1 > 0.0 ? exc.w_exit : -exc.w_exit};
}

std::int64_t next_visit_epoch(double x, std::int64_t epoch) {
  double w = maps::boole_chart::w_of_x(x);
  if (std::fabs(w) <= kWY) {
    if (w == 0.0) w = 1e-300;
    const double w1 = w - 1.0 / w;
    if (std::fabs(w1) <= kWY) return epoch + 1;
    return epoch + 1 + run_excursion(std::fabs(w1)).len;
  }
  return epoch + run_excursion(std::fabs(w)).len;
}

double sample_mu_y_w(Rng& rng) { return kWY * (2.0 * rng.uniform() - 1.0); }

}  // namespace fastboole

CellTable::CellTable(const IntermittentMapSpec& spec, const RaysPartition& partition,
                     std::int64_t n_max)
    : spec_(spec), part_(partition), n_max_(n_max) {
  if (n_max < 1) throw std::invalid_argument("CellTable: n_max must be >= 1");
  auto backward = [&](int branch, double p0, std::size_t count) {
    std::vector<double> th;
    th.reserve(count + 1);
    th.push_back(p0);
    for (std::size_t n = 1; n <= count; ++n) th.push_back(spec_.branch_inverse(branch, th.back()));
    return th;
  };
  const auto count = static_cast<std::size_t>(n_max);
  if (spec.d == 2) {
    sides_.push_back({0, +1, backward(0, partition.gamma, count)});
    sides_.push_back({1, -1, backward(1, partition.t_gamma, count)});
    return;
  }
  for (int j = 0; j < spec.d; ++j) {
    const double lo = part_.rays[j].front().lo;
    const double hi = part_.rays[j].front().hi;
    if (spec.xfix[j] > lo) sides_.push_back({j, -1, backward(j, lo, count)});
    if (spec.xfix[j] < hi) sides_.push_back({j, +1, backward(j, hi, count)});
  }
}

std::optional<std::int64_t> CellTable::remaining_steps(double y) const {
  const int ray = part_.classify(y);
  if (ray < 0) return 0;
  for (const auto& side : sides_) {
    if (side.ray != ray) continue;
    const double xf = spec_.xfix[ray];
    const bool right_side = y >= xf;
    if ((side.sign > 0) != right_side) continue;
    const auto& th = side.thresholds;
    // th moves monotonically toward x_j; remaining = m for y in the band
    // bounded by th[m-1] and th[m], ties resolved to the smaller m.
    if (side.sign > 0) {
      if (y > th.front()) return 0;
      auto it = std::lower_bound(th.begin(), th.end(), y, std::greater<double>());
      const auto m = static_cast<std::int64_t>(it - th.begin());
      if (m > n_max_ || it == th.end()) return std::nullopt;
      return m;
    }
    if (y < th.front()) return 0;
    auto it = std::lower_bound(th.begin(), th.end(), y);
    const auto m = static_cast<std::int64_t>(it - th.begin());
    if (m > n_max_ || it == th.end()) return std::nullopt;
    return m;
  }
  return std::nullopt;
}

CellTable::Cell CellTable::cell_p(int ray, std::int64_t n) const {
  if (spec_.d != 2) throw std::invalid_argument("cell_p: d = 2 cells only");
  if (n < 1 || n >= n_max_) throw std::out_of_range("cell_p: n outside table");
  const auto idx = static_cast<std::size_t>(n);
  if (ray == 0) {
    const auto& u = sides_[0].thresholds;
    return {spec_.branch_inverse(1, u[idx]), spec_.branch_inverse(1, u[idx - 1])};
  }
  const auto& u = sides_[1].thresholds;
  return {spec_.branch_inverse(0, u[idx - 1]), spec_.branch_inverse(0, u[idx])};
}

CellTable cell_table(const IntermittentMapSpec& spec, const RaysPartition& partition,
                     std::int64_t n_max) {
  return CellTable(spec, partition, n_max);
}

ReturnMapValue return_map_at(const IntermittentMapSpec& spec, const RaysPartition& partition,
                             double x, std::int64_t max_steps) {
  double cur = x;
  double deriv = 1.0;
  for (std::int64_t k = 1; k <= max_steps; ++k) {
    const int j = spec.branch_index(cur);
    deriv *= spec.branch_derivative(j, cur);
    cur = spec.branch(j, cur);
    if (partition.classify(cur) < 0) return {cur, k, deriv};
  }
  throw std::runtime_error("return_map_at: no return within max_steps");
}

ConditionsReport check_return_map_conditions(const IntermittentMapSpec& spec,
                                             const RaysPartition& partition,
                                             std::int64_t n_max) {
  const CellTable table(spec, partition, n_max);
  ConditionsReport rep;
  rep.inf_derivative = kInf;

  // Cell interiors per (side, n), log-spaced in n; three interior points each.
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 1; n <= n_max; n = std::max(n + 1, (n * 5) / 4)) ns.push_back(n);
  const double offsets[3] = {0.25, 0.5, 0.75};

  for (const auto& side : table.sides()) {
    for (const std::int64_t n : ns) {
      if (n >= table.n_max()) continue;
      const auto idx = static_cast<std::size_t>(n);
      // Entry band for remaining time n on this side, pulled back into Y
      // through every feeding branch.
      const double e_lo = std::min(side.thresholds[idx], side.thresholds[idx - 1]);
      const double e_hi = std::max(side.thresholds[idx], side.thresholds[idx - 1]);
      for (int i = 0; i < spec.d; ++i) {
        if (i == side.ray) continue;
        for (const double off : offsets) {
          const double y = e_lo + (e_hi - e_lo) * off;
          const double x = spec.branch_inverse(i, y);
          if (partition.classify(x) >= 0) continue;  // feeding branch lands in a ray
          const auto rm = return_map_at(spec, partition, x);
          const double h = std::max(1e-9 * (e_hi - e_lo), 1e-14);
          ReturnMapValue plus, minus;
          try {
            plus = return_map_at(spec, partition, x + h);
            minus = return_map_at(spec, partition, x - h);
          } catch (const std::exception&) {
            continue;
          }
          if (plus.phi != rm.phi || minus.phi != rm.phi) continue;  // straddled a boundary
          const double second = (plus.derivative - minus.derivative) / (2.0 * h);
          const double distortion = std::fabs(second) / (rm.derivative * rm.derivative);
          rep.inf_derivative = std::min(rep.inf_derivative, rm.derivative);
          rep.sup_distortion = std::max(rep.sup_distortion, distortion);
          ++rep.cells_sampled;
        }
      }
    }
  }
  rep.expansion_ok = rep.inf_derivative > 1.0 + 1e-6;
  rep.distortion_ok = rep.sup_distortion < 1e6;
  return rep;
}

TailReport tail_statistics(const ExcursionTrace& trace, double mu_y, double alpha) {
  const std::size_t begin = trace.stationary_begin;
  const auto r = static_cast<std::int64_t>(trace.records() - begin);
  if (r < 10000) throw InsufficientData("tail_statistics: need >= 1e4 returns");

  TailReport rep;
  rep.records = r;
  rep.mu_y = mu_y;

  std::vector<double> phi_sorted;
  phi_sorted.reserve(r);
  std::vector<std::vector<double>> len_sorted(trace.d);
  for (std::size_t k = begin; k < trace.records(); ++k) {
    phi_sorted.push_back(static_cast<double>(trace.phi[k]));
    if (trace.ray[k] >= 0) len_sorted[trace.ray[k]].push_back(static_cast<double>(trace.len[k]));
  }
  std::sort(phi_sorted.begin(), phi_sorted.end());
  for (auto& v : len_sorted) std::sort(v.begin(), v.end());
  std::vector<double> phi_prefix(phi_sorted.size() + 1, 0.0);
  for (std::size_t i = 0; i < phi_sorted.size(); ++i)
    phi_prefix[i + 1] = phi_prefix[i] + phi_sorted[i];
  std::vector<std::vector<double>> len_prefix(trace.d);
  for (int j = 0; j < trace.d; ++j) {
    len_prefix[j].assign(len_sorted[j].size() + 1, 0.0);
    for (std::size_t i = 0; i < len_sorted[j].size(); ++i)
      len_prefix[j][i + 1] = len_prefix[j][i] + len_sorted[j][i];
  }

  auto tail_count = [](const std::vector<double>& sorted, double n) {
    return static_cast<double>(sorted.end() -
                               std::upper_bound(sorted.begin(), sorted.end(), n));
  };
  const double rd = static_cast<double>(r);

  // Grid: n = 1..10 then geometric.
  const double n_top = std::min(phi_sorted.back(), 3.0e7);
  for (std::int64_t n = 1; n <= 10; ++n) rep.grid.push_back(n);
  for (double g = 12.0; g <= n_top; g *= 1.25)
    rep.grid.push_back(static_cast<std::int64_t>(g));
  rep.grid.erase(std::unique(rep.grid.begin(), rep.grid.end()), rep.grid.end());

  rep.phi_tail.reserve(rep.grid.size());
  rep.ell_tail.assign(trace.d, {});
  rep.w_rate.reserve(rep.grid.size());
  rep.w_rate_ray.assign(trace.d, {});
  rep.b_n_hat.reserve(rep.grid.size());
  const double gamma_factor = std::tgamma(1.0 - alpha);
  for (const std::int64_t n : rep.grid) {
    const double nd = static_cast<double>(n);
    rep.phi_tail.push_back(tail_count(phi_sorted, nd) / rd);
    for (int j = 0; j < trace.d; ++j)
      rep.ell_tail[j].push_back(tail_count(len_sorted[j], nd - 1.0) / rd);
    // w(n) = mu(Y)/R * sum_i min(phi_i, n)  (exact partial-sum identity).
    const auto below =
        std::upper_bound(phi_sorted.begin(), phi_sorted.end(), nd) - phi_sorted.begin();
    const double sum_min = phi_prefix[below] + nd * (rd - static_cast<double>(below));
    rep.w_rate.push_back(mu_y / rd * sum_min);
    for (int j = 0; j < trace.d; ++j) {
      const auto& lj = len_sorted[j];
      const auto bl = std::upper_bound(lj.begin(), lj.end(), nd - 1.0) - lj.begin();
      rep.w_rate_ray[j].push_back(
          mu_y / rd *
          (len_prefix[j][static_cast<std::size_t>(bl)] +
           (nd - 1.0) * static_cast<double>(lj.size() - static_cast<std::size_t>(bl))));
    }
    const double tail_geq = tail_count(phi_sorted, nd - 1.0) / rd;
    rep.b_n_hat.push_back(tail_geq > 0.0 ? 1.0 / (gamma_factor * tail_geq) : 0.0);
  }

  // Window selection: three-octave windows, slope stability across halves.
  double best_mismatch = kInf;
  for (std::int64_t lo = 16; lo * 8 <= n_top; lo *= 2) {
    const std::int64_t hi = lo * 8;
    if (tail_count(phi_sorted, static_cast<double>(hi)) < 300.0) break;
    auto slope_on = [&](double a, double b) {
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        const double n = static_cast<double>(rep.grid[i]);
        if (n >= a && n <= b && rep.phi_tail[i] > 0.0) {
          xs.push_back(std::log(n));
          ys.push_back(std::log(rep.phi_tail[i]));
        }
      }
      return xs.size() >= 3 ? ls_slope(xs, ys) : 0.0;
    };
    const double s1 = slope_on(lo, lo * 2.83);
    const double s2 = slope_on(lo * 2.83, hi);
    const double mism = std::fabs(s1 - s2);
    if (s1 != 0.0 && s2 != 0.0 && mism < best_mismatch) {
      best_mismatch = mism;
      rep.window_lo = lo;
      rep.window_hi = hi;
    }
  }
  if (rep.window_lo == 0) {
    rep.window_lo = 16;
    rep.window_hi = 128;
  }
  {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
      const double n = static_cast<double>(rep.grid[i]);
      if (n >= rep.window_lo && n <= rep.window_hi && rep.phi_tail[i] > 0.0) {
        xs.push_back(std::log(n));
        ys.push_back(std::log(rep.phi_tail[i]));
      }
    }
    rep.alpha_hat = xs.size() >= 2 ? -ls_slope(xs, ys) : 0.0;
  }

  // Hill estimator over exceedances of the window floor.
  {
    const double u = static_cast<double>(rep.window_lo);
    double s = 0.0;
    std::int64_t k = 0;
    for (auto it = std::upper_bound(phi_sorted.begin(), phi_sorted.end(), u);
         it != phi_sorted.end(); ++it) {
      s += std::log(*it / u);
      ++k;
    }
    rep.alpha_hill = k > 0 ? static_cast<double>(k) / s : 0.0;
  }

  // beta from tail ratios at the window midpoint.
  rep.n_star = static_cast<std::int64_t>(std::sqrt(static_cast<double>(rep.window_lo) *
                                                   static_cast<double>(rep.window_hi)));
  rep.beta_hat.assign(trace.d, 0.0);
  double total = 0.0;
  for (int j = 0; j < trace.d; ++j) {
    rep.beta_hat[j] = tail_count(len_sorted[j], static_cast<double>(rep.n_star) - 1.0);
    total += rep.beta_hat[j];
  }
  if (total > 0.0)
    for (auto& b : rep.beta_hat) b /= total;
  return rep;
}

IdentityReport check_identities_on_orbit(const IntermittentMapSpec& spec,
                                         const RaysPartition& partition, double x0,
                                         std::int64_t horizon) {
  IdentityReport rep;

  // Classify the exact orbit once.
  std::vector<std::int8_t> cls(static_cast<std::size_t>(horizon) + 1);
  std::vector<std::int64_t> counts(spec.d, 0);
  std::int64_t count_y = 0;
  double x = x0;
  cls[0] = static_cast<std::int8_t>(partition.classify(x0));
  for (std::int64_t k = 1; k <= horizon; ++k) {
    x = spec.eval(x);
    const int c = partition.classify(x);
    cls[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(c);
    if (c < 0) ++count_y;
    else ++counts[c];
    ++rep.decomposition_checks;
    std::int64_t sum = count_y;
    for (int j = 0; j < spec.d; ++j) sum += counts[j];
    if (sum != k) ++rep.decomposition_violations;
  }

  // S_{A_j} and S_Y as step functions of the epoch.
  std::vector<cadlag::StepFunction> s_a;
  std::vector<std::vector<std::int64_t>> ray_epochs(spec.d);
  for (std::int64_t k = 1; k <= horizon; ++k) {
    const int c = cls[static_cast<std::size_t>(k)];
    if (c >= 0) ray_epochs[c].push_back(k);
  }
  for (int j = 0; j < spec.d; ++j) {
    std::vector<double> times(ray_epochs[j].size());
    std::vector<double> vals(ray_epochs[j].size());
    for (std::size_t i = 0; i < ray_epochs[j].size(); ++i) {
      times[i] = static_cast<double>(ray_epochs[j][i]);
      vals[i] = static_cast<double>(i + 1);
    }
    auto f = cadlag::StepFunction::steps(times, vals);
    f.restrict_domain(static_cast<double>(horizon + 1));
    s_a.push_back(std::move(f));
  }

  // Trace records from the stored classifications; trace_from_points wants a
  // point sequence, so feed it one representative point per class.
  std::vector<double> pts(cls.size());
  std::vector<double> rep_pt(spec.d);
  for (int j = 0; j < spec.d; ++j)
    rep_pt[j] = 0.5 * (partition.rays[j].front().lo + partition.rays[j].front().hi);
  const double y_pt = partition.d == 2 ? 0.5 * (partition.gamma + partition.t_gamma)
                                       : 0.5 * (partition.junction.front().lo +
                                                partition.junction.front().hi);
  for (std::size_t k = 0; k < cls.size(); ++k)
    pts[k] = cls[k] < 0 ? y_pt : rep_pt[static_cast<std::size_t>(cls[k])];
  ExcursionTrace trace = trace_from_points(pts, partition);

  const auto r = static_cast<std::int64_t>(trace.records());
  if (r < 2) return rep;
  auto eta = trace.eta_functions();
  auto phi = trace.phi_function();

  // eta_j(t) = S_{A_j}(phi(t)) for every record index t.
  for (std::int64_t t = 0; t < r; ++t) {
    const double ph = phi(static_cast<double>(t));
    for (int j = 0; j < spec.d; ++j) {
      ++rep.eta_match_checks;
      if (eta[j](static_cast<double>(t)) != s_a[j](ph)) ++rep.eta_match_violations;
    }
  }

  // Williams grid: keep every needed evaluation inside the data horizon.
  double t_max = static_cast<double>(r - 2);
  for (int j = 0; j < spec.d; ++j)
    t_max = std::min(t_max, eta[j](static_cast<double>(r - 1)) - 1.0);
  std::vector<std::int64_t> grid;
  for (std::int64_t t = 0; t <= static_cast<std::int64_t>(t_max); ++t) grid.push_back(t);
  rep.williams = cadlag::williams_discrete_check(s_a, eta, phi, grid);
  return rep;
}

}  // namespace intermit::induced
