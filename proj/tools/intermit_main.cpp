// intermit: simulation and distributional verification for intermittent
// interval maps and their skew Bessel scaling limits.
//
// CSV schemas
//   simulate-map    t,s_a1..s_ad,s_y,g_y,d_y        (d_y = -1 when censored)
//   excursions      trace: record,ray,len,phi
//                   tails: n,phi_tail,ell_tail_1..d,w,b_n
//   simulate-bessel t,modulus,ray,local_time
//   sample-limits   z1..zd,l,g,d,zg1..zgd
//   verify/report   name,sample_size,statistic,threshold,pass,censored,runtime_ms,note

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "intermit/acceptance.hpp"
#include "intermit/bessel_sim.hpp"
#include "intermit/config.hpp"
#include "intermit/map_core.hpp"
#include "intermit/return_map.hpp"
#include "intermit/stable_limits.hpp"
#include "intermit/stats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

intermit::config::Config load_config(const std::string& path,
                                     const std::vector<std::string>& overrides) {
  auto cfg = path.empty() ? intermit::config::Config::defaults()
                          : intermit::config::Config::from_file(path);
  for (const auto& kv : overrides) cfg.apply_override(kv);
  return cfg;
}

intermit::maps::IntermittentMapSpec spec_from(const intermit::config::Config& cfg) {
  const std::string family = cfg.get_string("map.family", "boole");
  if (family == "boole") return intermit::maps::boole_spec();
  const int d = static_cast<int>(cfg.get_int("map.d", 2));
  const double alpha = cfg.get_double("map.alpha", 0.5);
  const auto c = cfg.get_list("map.c", std::vector<double>(d, 1.0));
  return intermit::maps::make_thaler_family(d, alpha, c, family);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name);
  if (!out) throw std::runtime_error("cannot open output file " + name + " under " + dir);
  return out;
}

int cmd_simulate_map(const intermit::config::Config& cfg, const std::string& outdir) {
  const auto spec = spec_from(cfg);
  const auto partition = intermit::induced::build_partition(spec);
  intermit::maps::OrbitConfig ocfg;
  ocfg.n_steps = cfg.get_int("experiment.n", 100000);
  ocfg.stall_policy = intermit::maps::StallPolicy::kAnalyticTail;
  intermit::Rng rng(static_cast<std::uint64_t>(cfg.get_int("seed", 20260808)));
  ocfg.x0 = rng.uniform();
  std::vector<std::int64_t> times;
  for (std::int64_t t = 0; t <= ocfg.n_steps; t += std::max<std::int64_t>(1, ocfg.n_steps / 1000))
    times.push_back(t);
  const auto rec = intermit::maps::occupation_process(spec, partition, ocfg, times);
  auto out = open_out(outdir, "occupation.csv");
  out << "t";
  for (int j = 1; j <= spec.d; ++j) out << ",s_a" << j;
  out << ",s_y,g_y,d_y\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    out << rec.times[i];
    for (int j = 0; j < spec.d; ++j) out << ',' << rec.s_a[j][i];
    out << ',' << rec.s_y[i] << ',' << rec.g_y[i] << ','
        << (rec.d_y_censored[i] ? -1 : rec.d_y[i]) << '\n';
  }
  std::cout << "occupation: horizon " << ocfg.n_steps << ", " << rec.times.size()
            << " samples -> " << outdir << "/occupation.csv\n";
  return kExitOk;
}

int cmd_excursions(const intermit::config::Config& cfg, const std::string& outdir) {
  const auto spec = spec_from(cfg);
  const auto partition = intermit::induced::build_partition(spec);
  const auto n_returns = cfg.get_int("accept.returns", 100000);
  const bool boole = spec.family == intermit::maps::IntermittentMapSpec::Family::kBoole;
  intermit::Rng rng(static_cast<std::uint64_t>(cfg.get_int("seed", 20260808)));
  double x0;
  if (boole) {
    x0 = intermit::maps::boole_chart::x_of_w(intermit::induced::fastboole::sample_mu_y_w(rng));
  } else {
    x0 = 0.5 * (partition.junction.front().lo + partition.junction.front().hi);
  }
  const auto trace = intermit::induced::excursion_trace(
      spec, partition, x0, n_returns,
      boole ? intermit::induced::TraceEngine::kFastBoole
            : intermit::induced::TraceEngine::kExact);
  {
    auto out = open_out(outdir, "trace.csv");
    out << "record,ray,len,phi\n";
    for (std::size_t k = 0; k < trace.records(); ++k)
      out << k << ',' << trace.ray[k] << ',' << trace.len[k] << ',' << trace.phi[k] << '\n';
  }
  const double mu_y =
      boole ? intermit::maps::invariant_density_boole_antiderivative(partition.t_gamma) -
                  intermit::maps::invariant_density_boole_antiderivative(partition.gamma)
            : 1.0;
  const auto tails = intermit::induced::tail_statistics(trace, mu_y, spec.alpha);
  {
    auto out = open_out(outdir, "tails.csv");
    out << "n,phi_tail";
    for (int j = 1; j <= spec.d; ++j) out << ",ell_tail_" << j;
    out << ",w,b_n\n";
    for (std::size_t i = 0; i < tails.grid.size(); ++i) {
      out << tails.grid[i] << ',' << fmt(tails.phi_tail[i]);
      for (int j = 0; j < spec.d; ++j) out << ',' << fmt(tails.ell_tail[j][i]);
      out << ',' << fmt(tails.w_rate[i]) << ',' << fmt(tails.b_n_hat[i]) << '\n';
    }
  }
  std::cout << "excursions: " << trace.records() << " records, alpha_hat "
            << tails.alpha_hat << " (hill " << tails.alpha_hill << "), beta_hat (";
  for (int j = 0; j < spec.d; ++j) std::cout << (j ? "," : "") << tails.beta_hat[j];
  std::cout << ") -> " << outdir << "/{trace,tails}.csv\n";
  return kExitOk;
}

int cmd_simulate_bessel(const intermit::config::Config& cfg, const std::string& outdir) {
  const double alpha = cfg.get_double("map.alpha", 0.5);
  const auto beta = cfg.get_list("map.c", {0.5, 0.5});  // reused as skewness weights
  double total = 0.0;
  for (double b : beta) total += b;
  std::vector<double> bnorm(beta);
  for (double& b : bnorm) b /= total;
  const intermit::stable::StableParams params(alpha, bnorm);
  intermit::bessel::SkewPathConfig scfg;
  scfg.dt = cfg.get_double("bessel.dt", 1e-4);
  scfg.eps = cfg.get_double("bessel.eps", 0.05);
  scfg.horizon = cfg.get_double("bessel.s_max", 1.0);
  scfg.refine_until = scfg.horizon;
  scfg.store_path = true;
  intermit::Rng rng(static_cast<std::uint64_t>(cfg.get_int("seed", 20260808)));
  const auto path = intermit::bessel::simulate_skew_path(params, scfg, {scfg.horizon}, rng);

  auto out = open_out(outdir, "bessel_path.csv");
  out << "t,modulus,ray,local_time\n";
  const double l_scale = (2.0 - 2.0 * alpha) /
                         (path.c_alpha * std::pow(scfg.eps, 2.0 - 2.0 * alpha));
  double l = 0.0;
  std::size_t exc = 0;
  bool above = false;
  int ray = -1;
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    const double t = static_cast<double>(k + 1) * scfg.dt;
    const double r = path.values[k];
    if (r <= scfg.eps) {
      l += scfg.dt * l_scale;
      above = false;
      ray = -1;
    } else if (!above) {
      above = true;
      ray = exc < path.ray_tags.size() ? path.ray_tags[exc++] : -1;
    }
    out << fmt(t) << ',' << fmt(r) << ',' << ray << ',' << fmt(l) << '\n';
  }
  std::cout << "bessel path: " << path.values.size() << " steps, "
            << path.ray_tags.size() << " excursions -> " << outdir << "/bessel_path.csv\n";
  return kExitOk;
}

int cmd_sample_limits(double alpha, const std::vector<double>& beta, std::int64_t n,
                      std::uint64_t seed, const std::string& outdir) {
  const intermit::stable::StableParams params(alpha, beta);
  intermit::Rng rng(seed);
  auto zgs = intermit::stable::sample_zg_joint(params, static_cast<std::size_t>(n), rng);
  auto out = open_out(outdir, "limits.csv");
  const int d = params.rays();
  for (int j = 1; j <= d; ++j) out << "z" << j << ',';
  out << "l,g,d";
  for (int j = 1; j <= d; ++j) out << ",zg" << j;
  out << '\n';
  intermit::Rng rng2(seed + 1);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto joint = intermit::stable::sample_lamperti_joint(params, rng2);
    const auto& zg = zgs[static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j) out << fmt(joint.z[j]) << ',';
    out << fmt(joint.l) << ',' << fmt(zg.g) << ',' << fmt(zg.dv);
    for (int j = 0; j < d; ++j) out << ',' << fmt(zg.zg[j]);
    out << '\n';
  }
  std::cout << "sample-limits: " << n << " rows -> " << outdir << "/limits.csv\n";
  return kExitOk;
}

int cmd_verify(const intermit::config::Config& cfg, const std::string& outdir) {
  const auto acfg = intermit::accept::AcceptanceConfig::from_config(cfg);
  const auto report = intermit::accept::run_acceptance(acfg, std::cout);
  {
    auto out = open_out(outdir, "report.csv");
    report.write_csv(out);
  }
  {
    auto out = open_out(outdir, "report.ndjson");
    report.write_records(out);
  }
  std::cout << (report.all_passed() ? "verify: all criteria passed\n"
                                    : "verify: FAILURES present\n");
  return report.all_passed() ? kExitOk : kExitTestFailure;
}

int cmd_report(const std::string& records_path, const std::string& outdir) {
  std::ifstream in(records_path);
  if (!in) throw intermit::config::ConfigError("cannot open records file: " + records_path);
  intermit::harness::StatReport rep;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    intermit::harness::TestResult t;
    t.name = j.value("name", "");
    t.sample_size = j.value("sample_size", std::int64_t{0});
    t.statistic = j.value("statistic", 0.0);
    t.threshold = j.value("threshold", 0.0);
    t.pass = j.value("pass", false);
    t.censored = j.value("censored", std::int64_t{0});
    t.runtime_ms = j.value("runtime_ms", 0.0);
    t.note = j.value("note", "");
    rep.add(std::move(t));
  }
  auto out = open_out(outdir, "report.csv");
  rep.write_csv(out);
  std::cout << "report: " << rep.tests.size() << " entries, "
            << (rep.all_passed() ? "all passed" : "failures present") << '\n';
  return rep.all_passed() ? kExitOk : kExitTestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intermittent-map occupation statistics and skew Bessel limits"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string outdir = "out";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "config file (key = value, schema 1)");
  app.add_option("--out", outdir, "output directory");
  app.add_option("--set", overrides, "override config entries (key=value)");

  auto* sim_map = app.add_subcommand("simulate-map", "orbit occupation counts to CSV");
  auto* excur = app.add_subcommand("excursions", "first-return trace and tail report");
  auto* sim_bes = app.add_subcommand("simulate-bessel", "skew Bessel SDE path to CSV");
  auto* limits = app.add_subcommand("sample-limits", "exact limit-law samples to CSV");
  auto* verify = app.add_subcommand("verify", "run the full acceptance battery");
  auto* report = app.add_subcommand("report", "render a report from NDJSON records");

  double alpha = 0.5;
  std::vector<double> beta{0.5, 0.5};
  std::int64_t n_rows = 1000;
  std::uint64_t seed = 20260808;
  limits->add_option("--alpha", alpha, "stable index in (0,1)");
  limits->add_option("--beta", beta, "skewness vector (comma separated)")->delimiter(',');
  limits->add_option("--n", n_rows, "number of rows");
  limits->add_option("--seed", seed, "random seed");

  std::string records_path;
  report->add_option("--records", records_path, "NDJSON records file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto cfg = load_config(config_path, overrides);
    if (sim_map->parsed()) return cmd_simulate_map(cfg, outdir);
    if (excur->parsed()) return cmd_excursions(cfg, outdir);
    if (sim_bes->parsed()) return cmd_simulate_bessel(cfg, outdir);
    if (limits->parsed()) return cmd_sample_limits(alpha, beta, n_rows, seed, outdir);
    if (verify->parsed()) return cmd_verify(cfg, outdir);
    if (report->parsed()) return cmd_report(records_path, outdir);
  } catch (const intermit::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTestFailure;
  }
  return kExitUsage;
}
