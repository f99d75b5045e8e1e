#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "fastlight/cli/commands.hpp"
#include "fastlight/cli/config.hpp"
#include "fastlight/errors.hpp"

int main(int argc, char** argv) {
  using namespace fastlight;

  CLI::App app{"Superluminal probe propagation in a Raman gain medium"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::size_t> grid_n;
  std::optional<double> window_factor;

  for (const std::string& name : cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--grid-n", grid_n, "minimum grid size (power of two)");
    sub->add_option("--window-factor", window_factor, "time window in pulse FWHMs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
    if (grid_n) cfg.grid_n = *grid_n;
    if (window_factor) cfg.window_factor = *window_factor;

    const cli::RunReport report = cli::run_command(command, cfg, out_dir);
    for (const cli::CriterionResult& c : report.criteria) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " in ["
                << c.lower << ", " << c.upper << "]\n";
    }
    std::cout << "wrote " << out_dir << "/" << command << ".{csv,json}\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
