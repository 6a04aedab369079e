// Command-line front end: run / validate / list-scenarios.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "toroid/errors.hpp"
#include "toroid/runner.hpp"
#include "toroid/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw toroid::ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven toroidal nanostructure simulator"};
  app.require_subcommand(1);

  std::string config, output_dir, scenario_dir = "scenarios";
  int threads = 0;
  double scale = 1.0;

  auto* run = app.add_subcommand("run", "Run the experiment described by a scenario file");
  run->add_option("config", config, "Scenario file")->required();
  run->add_option("--output-dir", output_dir, "Directory for exports (overrides [output] dir)");
  run->add_option("--threads", threads, "OpenMP threads, 0 = default")->check(CLI::NonNegativeNumber);
  run->add_option("--resolution-scale", scale, "Multiplies all grid counts")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a scenario file and print resolved parameters");
  validate->add_option("config", config, "Scenario file")->required();

  auto* list = app.add_subcommand("list-scenarios", "List experiment kinds and bundled scenario files");
  list->add_option("--dir", scenario_dir, "Directory searched for *.ini");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      std::cout << "experiments:\n";
      for (const auto& [name, kind] : toroid::experiment_names()) std::cout << "  " << name << "\n";
      std::vector<std::string> files;
      if (std::filesystem::is_directory(scenario_dir))
        for (const auto& e : std::filesystem::directory_iterator(scenario_dir))
          if (e.path().extension() == ".ini") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      std::cout << "scenario files (" << scenario_dir << "):\n";
      for (const auto& f : files) {
        std::string kind = "?";
        try {
          kind = toroid::experiment_name(toroid::load_scenario(read_file(f)).experiment);
        } catch (const toroid::ConfigError&) {
          kind = "invalid";
        }
        std::cout << "  " << f << "  [" << kind << "]\n";
      }
      return 0;
    }
    const toroid::Scenario sc = toroid::load_scenario(read_file(config));
    if (*validate) {
      std::cout << "ok: " << config << "\n";
      for (const auto& [k, v] : sc.resolved()) std::cout << "  " << k << " = " << v << "\n";
      return 0;
    }
    toroid::RunOptions opt;
    opt.output_dir = output_dir;
    opt.threads = threads;
    opt.resolution_scale = scale;
    const toroid::RunReport rep = toroid::run(sc, opt);
    std::cout << "wrote " << rep.files.size() << " files + manifest.txt to " << rep.directory.string() << " ("
              << rep.wall_seconds << " s)\n";
    return 0;
  } catch (const toroid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const toroid::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
