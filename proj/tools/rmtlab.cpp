#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmtlab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local eigenvalue statistics of Wigner matrices"};
  app.set_version_flag("--version", std::string(rmtlab::kVersion));
  app.require_subcommand(1, 1);

  const std::map<std::string, std::string> help{
      {"sample", "eigenvalue samples from an ensemble"},
      {"kernel", "correlation kernel on a grid"},
      {"gap", "window count probabilities from the kernel"},
      {"independence", "joint window counts at two bulk energies"},
      {"universality", "independence experiment across ensembles"},
      {"dbm", "Dyson Brownian motion eigenvalue paths"},
      {"hessian-audit", "quadratic-form lower bound on random instances"},
      {"decouple-scan", "decoupling remainder fluctuation versus n and N"},
  };

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  for (const auto& name : rmtlab::command_names()) {
    const auto it = help.find(name);
    auto* sub = app.add_subcommand(name, it == help.end() ? "" : it->second);
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
  }
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json config = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      config = nlohmann::json::parse(f);
    }
    const auto* sub = app.get_subcommands().front();
    const auto manifest = rmtlab::run_command(sub->get_name(), config, seed, out_dir);
    for (const auto& o : manifest.outputs) std::cout << o.path << '\n';
    std::cout << (std::filesystem::path(out_dir) / "manifest.json").string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "rmtlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
