#include "gkm/runconfig.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"GKM-sheaf section engine"};
  app.require_subcommand(1);
  gkm::RunConfig cfg;

  CLI::App* compute = app.add_subcommand(
      "compute", "Compute one table row (Hilbert numerators per character orbit)");
  compute->add_option("--group", cfg.group,
                      "registry key (A2..F4, SO3, U2) or root-datum JSON path")
      ->required();
  compute->add_option("--g", cfg.g, "number of generators (surface parameter)")
      ->check(CLI::PositiveNumber);
  compute->add_option("--c", cfg.c, "central element: regular or a registered name");
  compute->add_option("--character", cfg.character,
                      "restrict to one orbit representative (bit string)");
  compute->add_option("--D", cfg.D, "truncation degree (default per group)");
  compute->add_flag("--weyl", cfg.weyl, "Weyl-invariants route (relative to P_t(BK))");
  compute->add_option("--workers", cfg.workers, "worker thread count");
  compute->add_option("--format", cfg.format, "json | text")
      ->check(CLI::IsMember({"json", "text"}));
  compute->add_option("--output", cfg.output, "write to file instead of stdout");

  CLI::App* verify =
      app.add_subcommand("verify", "Compare computed rows against a golden table");
  verify->add_option("golden", cfg.path, "golden-table TOML path")->required();
  verify->add_option("--tier", cfg.tier, "mandatory | extended")
      ->check(CLI::IsMember({"mandatory", "extended"}));
  verify->add_option("--workers", cfg.workers, "worker thread count");

  CLI::App* sheaf = app.add_subcommand(
      "sheaf", "Global sections of a JSON sheaf descriptor (monodromy or BM)");
  sheaf->add_option("descriptor", cfg.path, "descriptor JSON path")->required();
  sheaf->add_option("--D", cfg.D, "truncation degree");
  sheaf->add_option("--workers", cfg.workers, "worker thread count");
  sheaf->add_option("--output", cfg.output, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return gkm::run_command(cfg, std::cout, std::cerr);
}
