#pragma once

#include <cstdint>
#include <iosfwd>

#include "intermit/config.hpp"
#include "intermit/stats.hpp"

namespace intermit::accept {

// Scales and thresholds of the acceptance battery.  Defaults are the shipped
// full-scale values; configs may widen the scales but every threshold ships
// pinned here.
struct AcceptanceConfig {
  std::uint64_t master_seed = 20260808;
  int threads = 0;

  std::int64_t identity_orbits = 1000;
  std::int64_t identity_len = 100000;
  std::int64_t n = 1000000;
  std::int64_t replicas = 10000;
  std::int64_t sampler_n = 100000;
  std::int64_t sde_paths = 10000;
  std::int64_t returns = 1000000;

  double bessel_dt = 1e-4;
  double bessel_eps = 0.05;

  double tol_arcsine = 0.02;
  double tol_halfgauss = 0.03;
  double tol_beta = 0.02;
  double tol_dtail = 0.1;
  double tol_zg = 0.02;
  double tol_cross = 0.02;
  double tol_sde = 0.05;
  double alpha_band_lo = 0.45, alpha_band_hi = 0.55;
  double beta_band_lo = 0.47, beta_band_hi = 0.53;
  double tol_density = 1e-6;
  double tol_ml = 1e-8;
  double two_sample_p = 0.01;

  static AcceptanceConfig from_config(const config::Config& cfg);
};

// Runs the full battery on Boole's map, printing one pass/fail line per
// criterion to `progress` as it completes.
harness::StatReport run_acceptance(const AcceptanceConfig& cfg, std::ostream& progress);

}  // namespace intermit::accept
