// Acceptance battery: runs every verification criterion at full scale on
// Boole's map and prints one pass/fail line per criterion.  Exits nonzero if
// any criterion fails.

#include <iostream>
#include <string>

#include "intermit/acceptance.hpp"
#include "intermit/config.hpp"

int main(int argc, char** argv) {
  std::string config_path = std::string(INTERMIT_CONFIG_DIR) + "/boole.cfg";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) config_path = argv[++i];
  }
  try {
    const auto cfg = intermit::config::Config::from_file(config_path);
    const auto acfg = intermit::accept::AcceptanceConfig::from_config(cfg);
    const auto report = intermit::accept::run_acceptance(acfg, std::cout);
    const bool ok = report.all_passed();
    std::cout << (ok ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL") << " ("
              << report.tests.size() << " checks)\n";
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: error: " << e.what() << '\n';
    return 1;
  }
}
