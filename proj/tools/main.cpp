#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "sphertess/cli.hpp"
#include "sphertess/parallel.hpp"

int main(int argc, char** argv) {
  namespace cli = sphertess::cli;
  std::string commands;
  for (const auto& c : cli::subcommands()) commands += "\n  " + c;

  CLI::App app{"Poisson tessellations of the sphere: simulation and verification experiments.\n"
               "The config file is a JSON object whose \"command\" is one of:" + commands};
  app.footer(cli::columns_help());
  app.set_version_flag("--version", std::string(cli::kVersion));

  std::string config;
  int threads = 0;
  app.add_option("config", config, "experiment config (JSON)")->required();
  app.add_option("-j,--threads", threads, "worker threads (default: SPHERTESS_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? 0 : (code == 0 ? 0 : cli::kConfigError);
  }
  if (threads > 0) sphertess::set_thread_count(static_cast<unsigned>(threads));
  return cli::run_file(config, std::cout, std::cerr);
}
