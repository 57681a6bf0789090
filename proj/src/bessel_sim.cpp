#include "intermit/bessel_sim.hpp"

#include <algorithm>
#include <cmath>

namespace intermit::bessel {

double bessel_clock_constant(double alpha) {
  return std::pow(2.0, alpha) * std::tgamma(alpha) / std::tgamma(1.0 - alpha);
}

cadlag::StepFunction SubordinatorPath::eta_function(int ray) const {
  const auto& ep = epochs[ray];
  const auto& sz = sizes[ray];
  std::vector<double> times;
  std::vector<double> values;
  times.reserve(ep.size());
  values.reserve(ep.size());
  double cum = 0.0;
  double initial = 0.0;
  for (std::size_t i = 0; i < ep.size(); ++i) {
    cum += sz[i];
    if (ep[i] == 0.0) {
      initial = cum;
      continue;
    }
    times.push_back(ep[i]);
    values.push_back(cum);
  }
  auto f = cadlag::StepFunction::steps(times, values, initial);
  if (drift[ray] > 0.0) f.add_ramp(drift[ray]);
  f.restrict_domain(s_max);
  return f;
}

cadlag::StepFunction SubordinatorPath::eta_total() const {
  cadlag::StepFunction total = eta_function(0);
  for (int j = 1; j < rays(); ++j) total += eta_function(j);
  return total;
}

SubordinatorPath subordinator_paths(const StableParams& params, double j_min, double s_max,
                                    Rng& rng) {
  if (!(s_max > 0.0)) throw std::invalid_argument("subordinator_paths: s_max must be positive");
  const double alpha = params.alpha;
  const double gamma1ma = std::tgamma(1.0 - alpha);
  if (j_min <= 0.0) {
    // Median of the largest jump over [0, s_max]:
    // P[max <= M] = exp(-s_max M^-alpha / Gamma(1-alpha)).
    const double median_max = std::pow(s_max / (gamma1ma * std::log(2.0)), 1.0 / alpha);
    j_min = 1e-6 * median_max;
  }
  SubordinatorPath path;
  path.alpha = alpha;
  path.beta = params.beta;
  path.s_max = s_max;
  path.j_min = j_min;
  const int d = params.rays();
  path.epochs.resize(d);
  path.sizes.resize(d);
  path.drift.resize(d);
  for (int j = 0; j < d; ++j) {
    const double bj = params.beta[j];
    path.drift[j] = bj * alpha * std::pow(j_min, 1.0 - alpha) / ((1.0 - alpha) * gamma1ma);
    if (bj == 0.0) continue;
    const double rate = bj * std::pow(j_min, -alpha) / gamma1ma;
    const std::int64_t n = rng.poisson(rate * s_max);
    auto& ep = path.epochs[j];
    auto& sz = path.sizes[j];
    ep.resize(n);
    sz.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
      ep[i] = s_max * rng.uniform();
      sz[i] = j_min * std::pow(rng.uniform(), -1.0 / alpha);
    }
    std::sort(ep.begin(), ep.end());
  }
  return path;
}

OccupationFunctionals occupation_from_subordinators(const SubordinatorPath& path,
                                                    const std::vector<double>& t_grid) {
  OccupationFunctionals out;
  out.t_grid = t_grid;
  const int d = path.rays();
  std::vector<cadlag::StepFunction> eta(d);
  for (int j = 0; j < d; ++j) eta[j] = path.eta_function(j);
  cadlag::StepFunction total = eta[0];
  for (int j = 1; j < d; ++j) total += eta[j];

  const double reach = total.value_sup();
  for (double t : t_grid) {
    if (!(t < reach)) throw HorizonExceeded();
  }

  try {
    const auto inv_total = total.inverse();
    out.l.reserve(t_grid.size());
    out.g.reserve(t_grid.size());
    out.d.reserve(t_grid.size());
    for (double t : t_grid) {
      out.l.push_back(inv_total(t));
      out.g.push_back(total.g_op(t));
      out.d.push_back(total.d_op(t));
    }
    out.z.assign(d, {});
    for (int j = 0; j < d; ++j) {
      // Williams: (Z_j)^{-1}(u) = u + sum_{i != j} eta_i(eta_j^{-1}(u)).
      cadlag::StepFunction others;
      bool first = true;
      for (int i = 0; i < d; ++i) {
        if (i == j) continue;
        if (first) {
          others = eta[i];
          first = false;
        } else {
          others += eta[i];
        }
      }
      cadlag::StepFunction zinv;
      if (first) {
        zinv = cadlag::StepFunction::ramp(1.0);  // d = 1: (Z_1)^{-1}(u) = u
      } else {
        zinv = cadlag::StepFunction::compose(others, eta[j].inverse());
        zinv.add_ramp(1.0);
      }
      const auto zj = zinv.inverse();
      out.z[j].reserve(t_grid.size());
      for (double t : t_grid) out.z[j].push_back(zj(t));
    }
  } catch (const cadlag::HorizonExceeded&) {
    throw HorizonExceeded();
  }
  return out;
}

double besq_step(double x, double dt, double alpha, Rng& rng) {
  if (x < 0.0 || !(dt > 0.0)) throw std::invalid_argument("besq_step: bad state or step");
  const double delta = 2.0 - 2.0 * alpha;
  const std::int64_t n = rng.poisson(x / (2.0 * dt));
  return 2.0 * dt * rng.gamma(0.5 * delta + static_cast<double>(n));
}

DiffusionPath simulate_skew_path(const StableParams& params, const SkewPathConfig& cfg,
                                 const std::vector<double>& t_grid, Rng& rng) {
  if (!(cfg.dt > 0.0) || !(cfg.eps > 0.0))
    throw std::invalid_argument("simulate_skew_path: dt and eps must be positive");
  const int d = params.rays();
  DiffusionPath path;
  path.dt = cfg.dt;
  path.eps = cfg.eps;
  path.c_alpha = bessel_clock_constant(params.alpha);
  path.stored = cfg.store_path;
  path.t_grid = t_grid;
  path.z.assign(d, std::vector<double>(t_grid.size(), 0.0));
  path.l.assign(t_grid.size(), 0.0);
  path.g.assign(t_grid.size(), 0.0);
  path.d.assign(t_grid.size(), cfg.horizon);

  const double l_scale =
      (2.0 - 2.0 * params.alpha) / (path.c_alpha * std::pow(cfg.eps, 2.0 - 2.0 * params.alpha));

  auto draw_ray = [&]() {
    const double r = rng.uniform();
    double c = 0.0;
    for (int j = 0; j < d; ++j) {
      c += params.beta[j];
      if (r <= c) return j;
    }
    return d - 1;
  };

  std::vector<double> z(d, 0.0);
  double below_time = 0.0;      // total time with modulus <= eps
  double pending = 0.0;         // open sub-eps stretch, assigned to prev_tag
  int prev_tag = -1;            // ray of the latest closed excursion
  double last_below = 0.0;      // last grid time with modulus <= eps
  bool above = false;
  double x = 0.0;               // squared modulus
  double t = 0.0;
  std::size_t next_q = 0;       // marginal sample pointer
  std::size_t pending_d = 0;    // first sub-eps time > t_grid[pending_d]

  while (t < cfg.horizon) {
    const double dt = t < cfg.refine_until ? cfg.dt : cfg.coarse_dt;
    x = besq_step(x, dt, params.alpha, rng);
    t += dt;
    const double r = std::sqrt(x);
    if (path.stored) path.values.push_back(r);

    if (r <= cfg.eps) {
      below_time += dt;
      if (above) above = false;
      pending += dt;
      last_below = t;
      while (pending_d < t_grid.size() && t_grid[pending_d] < t) {
        path.d[pending_d] = t;
        ++pending_d;
      }
    } else {
      if (!above) {
        // New excursion: settle the sub-eps stretch, draw the ray tag.
        const int tag = draw_ray();
        if (prev_tag < 0) prev_tag = tag;
        z[prev_tag] += pending;
        pending = 0.0;
        prev_tag = tag;
        path.ray_tags.push_back(tag);
        above = true;
      }
      z[prev_tag] += dt;
    }

    while (next_q < t_grid.size() && t_grid[next_q] <= t + 1e-9) {
      for (int j = 0; j < d; ++j) path.z[j][next_q] = z[j];
      if (pending > 0.0 && prev_tag >= 0) path.z[prev_tag][next_q] += pending;
      path.l[next_q] = below_time * l_scale;
      path.g[next_q] = last_below;
      ++next_q;
    }
    if (next_q >= t_grid.size() && pending_d >= t_grid.size()) break;
  }
  return path;
}

}  // namespace intermit::bessel
