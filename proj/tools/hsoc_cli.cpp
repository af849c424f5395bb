#include "hsoc/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Optimal control with a curve fidelity term: solve, eoc, geomcheck and compare "
               "experiments driven by a key = value configuration file."};
  std::string config_path;
  app.add_option("config", config_path, "Configuration file")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return hsoc::run_config_file(config_path, std::cerr);
}
