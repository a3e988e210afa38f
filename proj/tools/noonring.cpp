#include <CLI11.hpp>
#include <iostream>

#include "noonring/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = noonring::cli;
  CLI::App app{"NOON-state toolkit for a Tonks-Girardeau gas on a ring"};
  app.require_subcommand(0, 1);

  bool list = false;
  app.add_flag("--list", list, "print every experiment with its parameter schema");

  cli::RunRequest req;
  std::string config;
  std::uint64_t seed = 0;
  for (const auto& spec : cli::experiments()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.summary);
    sub->add_option("--config", config, "flat JSON config file");
    sub->add_option("--set", req.overrides, "override key=value (repeatable)");
    sub->add_option("--out", req.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "run seed (overrides the config)");
    sub->add_option("--threads", req.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&, name = spec.name, sub] {
      req.experiment = name;
      if (!config.empty()) req.config_path = config;
      if (sub->count("--seed")) req.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  if (list || req.experiment.empty()) {
    cli::list_experiments(std::cout);
    return 0;
  }
  return cli::run(req, std::cout, std::cerr);
}
