#include <cstdlib>
#include <iostream>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "thermo/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"thermo-lab: pressure, rate functions, local large deviations and decay scans on subshifts"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"pressure", "topological and flow pressure, centering, achievable range"},
      {"rates", "rate function table over the [rates] grid"},
      {"ldp", "shrinking-window probabilities against the sharp asymptote"},
      {"scan", "decay of twisted transfer-operator iterates over (b, kappa)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: $THREADS or 1)")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : thermo::exit_validation;
  }

  thermo::CommandOptions opts;
  opts.out_dir = out_dir;
  opts.threads = threads;
  if (opts.threads == 0) {
    opts.threads = 1;
    if (const char* env = std::getenv("THREADS")) {
      try {
        const int v = std::stoi(env);
        if (v > 0) opts.threads = static_cast<unsigned>(v);
      } catch (const std::exception&) {
        std::cerr << "ignoring malformed THREADS=" << env << "\n";
      }
    }
  }
  return thermo::run_command(app.get_subcommands().front()->get_name(), config, opts, std::cout, std::cerr);
}
