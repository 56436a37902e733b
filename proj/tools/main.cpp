#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pointersim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pointersim: spin-1/2 system-apparatus measurement model, "
               "analytic kernels vs spectral propagator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  double tolerance = -1.0;
  unsigned threads = 1;
  unsigned seed = 0;

  for (const char* name : {"analytic", "evolve", "compare", "sweep", "classify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario JSON file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--tolerance", tolerance, "override comparison tolerance");
    sub->add_option("--threads", threads, "worker threads for sweep");
    sub->add_option("--seed", seed, "accepted for interface stability (unused)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "config error: cannot open " << config_path << "\n";
      return psim::cli::kInvalidConfig;
    }
    try {
      in >> config;
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return psim::cli::kInvalidConfig;
    }
  } else if (sub != "classify") {
    std::cerr << "config error: --config is required for '" << sub << "'\n";
    return psim::cli::kInvalidConfig;
  }

  std::optional<double> tol;
  if (tolerance > 0.0) tol = tolerance;
  return psim::cli::run(sub, config, out_dir, tol, threads, seed);
}
