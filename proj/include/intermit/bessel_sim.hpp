#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "intermit/cadlag.hpp"
#include "intermit/rng.hpp"
#include "intermit/stable_limits.hpp"

namespace intermit::bessel {

using stable::StableParams;

struct HorizonExceeded : std::runtime_error {
  HorizonExceeded() : std::runtime_error("occupation grid outruns eta(s_max)") {}
};

// Per-ray jump data of the independent alpha-stable subordinators
// eta_1 .. eta_d on the local-time interval [0, s_max].  Jumps of size
// >= j_min are drawn from the truncated Levy measure
// beta_j alpha r^{-1-alpha} / Gamma(1-alpha) dr as a Poisson random measure;
// the mean of the discarded sub-threshold jumps is restored as the
// deterministic drift per unit local time.
struct SubordinatorPath {
  double alpha = 0.5;
  std::vector<double> beta;
  double s_max = 1.0;
  double j_min = 0.0;

  std::vector<std::vector<double>> epochs;  // [ray], sorted
  std::vector<std::vector<double>> sizes;   // [ray]
  std::vector<double> drift;                // [ray], small-jump compensation

  int rays() const { return static_cast<int>(beta.size()); }
  cadlag::StepFunction eta_function(int ray) const;
  cadlag::StepFunction eta_total() const;
};

// j_min <= 0 picks the default cutoff 1e-6 * (median largest jump).
SubordinatorPath subordinator_paths(const StableParams& params, double j_min, double s_max,
                                    Rng& rng);

// Occupation functionals of the skew Bessel path determined by the
// subordinators, all derived through the cadlag algebra:
//   Z_j from the Williams formula (Z_j)^{-1}(t) = t + sum_{i!=j} eta_i(eta_j^{-1}(t)),
//   L = eta^{-1},  G/D from the range of eta.
struct OccupationFunctionals {
  std::vector<std::vector<double>> z;  // [ray][grid]
  std::vector<double> l, g, d;
  std::vector<double> t_grid;
};
OccupationFunctionals occupation_from_subordinators(const SubordinatorPath& path,
                                                    const std::vector<double>& t_grid);

// Exact transition of the squared Bessel process of dimension 2-2alpha over
// dt: the noncentral chi-square mixture 2 dt Gamma(delta/2 + N),
// N ~ Poisson(x / (2 dt)).  Nonnegative by construction.
double besq_step(double x, double dt, double alpha, Rng& rng);

// SDE construction of the skew Bessel diffusion: exact BESQ modulus steps,
// excursions detected as maximal stretches with modulus > eps, each tagged
// with ray j w.p. beta_j; local time accumulates as the eps-neighborhood
// occupation scaled by (2-2alpha)/(C^(alpha) eps^{2-2alpha}).
struct DiffusionPath {
  double dt = 0.0;
  double eps = 0.0;
  double c_alpha = 0.0;
  std::vector<double> values;         // modulus at grid times (when stored)
  std::vector<std::int32_t> ray_tags; // tag per excursion, in order
  bool stored = false;

  // Functionals at the requested grid times.  Each sub-eps stretch counts
  // toward the excursion preceding it (the stretch before the first excursion
  // goes to the first), so the z components always sum to t.
  std::vector<std::vector<double>> z;
  std::vector<double> l, g, d;
  std::vector<double> t_grid;
};

struct SkewPathConfig {
  double dt = 1e-4;
  double eps = 0.05;
  double horizon = 1.0;
  // Coarser step beyond this time (first-passage tracking for D only).
  double refine_until = 1.2;
  double coarse_dt = 1e-3;
  bool store_path = false;
};

DiffusionPath simulate_skew_path(const StableParams& params, const SkewPathConfig& cfg,
                                 const std::vector<double>& t_grid, Rng& rng);

// 2^alpha Gamma(alpha) / Gamma(1-alpha), the local-time normalization.
double bessel_clock_constant(double alpha);

}  // namespace intermit::bessel
