#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intermit/map_core.hpp"
#include "intermit/return_map.hpp"
#include "intermit/stable_limits.hpp"

namespace intermit::harness {

struct EmptySample : std::runtime_error {
  EmptySample() : std::runtime_error("statistic of an empty sample") {}
};

// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
// Two-sample KS distance and its asymptotic p-value.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_two_sample_pvalue(double d, double n_a, double n_b);
// Empirical Laplace transform E[exp(-lambda X)] at each lambda.
std::vector<double> empirical_laplace(const std::vector<double>& samples,
                                      const std::vector<double>& lambdas);

enum class InitialLaw { kUniform, kMuY };

struct ExperimentConfig {
  maps::IntermittentMapSpec spec = maps::boole_spec();
  InitialLaw initial_law = InitialLaw::kUniform;
  std::int64_t n = 1000000;
  std::int64_t replicas = 10000;
  std::vector<double> t_grid = {0.5, 1.0, 2.0};
  std::vector<double> lambda_grid = {0.5, 1.0, 2.0};
  std::uint64_t master_seed = 20260808;
  double d_horizon_factor = 10.0;  // D_Y searched up to n (1 + factor)
  int threads = 0;                 // 0 = hardware, capped by INTERMIT_THREADS
  std::map<std::string, double> tolerances;

  double tol(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }
};

struct TestResult {
  std::string name;
  std::int64_t sample_size = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::int64_t censored = 0;
  double runtime_ms = 0.0;
  std::string note;
};

struct StatReport {
  std::vector<TestResult> tests;
  std::uint64_t master_seed = 0;

  bool all_passed() const;
  void add(TestResult r) { tests.push_back(std::move(r)); }
  // CSV: name,sample_size,statistic,threshold,pass,censored,runtime_ms,note
  void write_csv(std::ostream& out) const;
  // One JSON object per line.
  void write_records(std::ostream& out) const;
};

// Derived quantities of a map used by the experiments: the partition, mu(Y),
// the skewness vector, and the S_Y normalization b_n.  Closed forms for
// Boole (mu(Y) = sqrt 2, b_n = sqrt(n/2pi), beta = (1/2,1/2)); a pilot
// excursion run calibrates generic maps.
struct MapContext {
  maps::IntermittentMapSpec spec;
  maps::RaysPartition partition;
  double mu_y = 0.0;
  std::vector<double> beta;
  bool boole = false;
  // sorted pilot return times (generic maps only)
  std::vector<double> pilot_phi;
  std::vector<double> mu_y_pool;  // empirical mu_Y states (generic maps)

  // b_n of the general normalization 1/(Gamma(1-alpha) mu_Y[phi >= n]);
  // S_Y(n)/b_general(n) converges to L(1).
  double b_general(double n) const;
};
MapContext make_context(const maps::IntermittentMapSpec& spec, std::uint64_t seed);

// Per-replica scaled marginals at the horizon n.
struct MarginalSamples {
  std::vector<std::vector<double>> z;  // [ray]: S_{A_j}(n)/n
  std::vector<double> l;               // S_Y(n)/b_general(n)
  std::vector<double> g;               // G_Y(n)/n
  std::vector<double> d;               // D_Y(n)/n, capped at 1 + factor
  std::vector<char> d_censored;
  std::vector<double> zg;              // S_{A_1}(G_Y(n))/G_Y(n), 0 when G = 0
  std::int64_t g_zero = 0;
  std::int64_t audit_violations = 0;   // decomposition / ray-purity failures
  std::int64_t d_censored_count = 0;
  double d_cap = 0.0;
};
MarginalSamples simulate_marginals(const ExperimentConfig& cfg, const MapContext& ctx);

// Corollary-level marginal test battery for one initial law.
StatReport run_marginal_experiment(const ExperimentConfig& cfg);
StatReport run_marginal_experiment(const ExperimentConfig& cfg, const MapContext& ctx,
                                   const MarginalSamples& samples);

// Finite-dimensional functional checks on the time grid plus the increment
// Laplace comparison against the subordinator construction.
StatReport run_functional_experiment(const ExperimentConfig& cfg);

// Least-squares tail exponent of P[X > w] on a geometric w-window.
double tail_exponent_fit(const std::vector<double>& samples, double w_lo, double w_hi,
                         int points = 9);

int resolve_threads(int requested);

}  // namespace intermit::harness
