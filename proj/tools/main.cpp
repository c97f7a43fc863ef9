#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "donorspin/errors.hpp"
#include "donorspin/run.hpp"

// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
int main(int argc, char** argv) {
  CLI::App app{"Donor-spin CPT spectroscopy and defect-energetics toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int threads_override = 0;
  const std::pair<const char*, const char*> subs[] = {
      {"cpt-sweep", "Steady-state probe sweep with dip report"},
      {"power-series", "Dip separation and nuclear polarization vs pump power"},
      {"energetics", "Formation-energy diagrams, transition levels, binding"},
      {"extrapolate", "Dilute-limit hyperfine fit and rigid shift"},
      {"levels", "Level diagram, optical transitions, equilibrium polarization"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--config", config_path, "JSON configuration file")->required();
    sc->add_option("--out", out_override, "Output directory (overrides config)");
    sc->add_option("--threads", threads_override, "Worker threads (overrides config)")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    donorspin::RunConfig cfg = donorspin::parse_config(config_path);
    const std::string requested = app.get_subcommands().front()->get_name();
    if (donorspin::subcommand_name(cfg.subcommand) != requested)
      throw donorspin::ValidationError("config selects subcommand '" +
                                       donorspin::subcommand_name(cfg.subcommand) +
                                       "' but the command line requested '" + requested + "'");
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads_override > 0) cfg.threads = threads_override;

    const donorspin::RunResult result = donorspin::run(cfg);
    for (const std::string& path : result.artifacts) std::cout << "wrote " << path << "\n";
    return 0;
  } catch (const donorspin::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const donorspin::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
