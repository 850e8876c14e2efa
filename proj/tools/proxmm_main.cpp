#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "proxmm/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Composite convex solver driver: proximal multiplier methods, "
               "ADMM, and a forward-backward Newton baseline"};
  std::string config_path;
  app.add_option("config", config_path, "Run configuration file (key = value lines)")
      ->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; any usage problem maps onto the config-error status.
    const int code = app.exit(e);
    return code == 0 ? 0 : proxmm::kExitError;
  }
  return proxmm::run_config_file(config_path, std::cout, std::cerr);
}
