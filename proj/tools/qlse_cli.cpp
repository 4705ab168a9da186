// Command line front end. Talks to the library only through qlse.h.
#include <cstdio>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qlse/qlse.h"

namespace {

void print_log(const char* text, void*) { std::fputs(text, stdout); }

int report_error(qlse_status status) {
  std::fprintf(stderr, "qlse: %s error: %s\n", qlse_status_name(status), qlse_last_error());
  return qlse_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states and nonradial bound states of -Du - u D(u^2)/2 = h(u)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qlse_version()));

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool refine = false;
  bool timing = false;
  bool inject_fault = false;

  auto* verify_g = app.add_subcommand("verify-g", "Check the properties of the dual transform g");
  verify_g->add_flag("--inject-fault", inject_fault, "Use a deliberately broken g (test hook)")
      ->group("");

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"verify-h", "Check the structural conditions on the configured nonlinearity"},
      {"solve", "Compute a ground state in the configured symmetry sector"},
      {"oracle", "Radial shooting oracle for the configured problem"},
      {"paths", "Tune the path family and export its profiles"},
      {"sweep", "Solve over the [sweep] parameter lists"},
  };
  CLI::Option* seed_opts[std::size(specs)] = {};
  std::size_t i = 0;
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    seed_opts[i++] = sub->add_option("--seed", seed, "Random seed (overrides [random] seed)");
    sub->add_flag("--refine", refine, "Halve the grid spacing");
    sub->add_flag("--timing", timing, "Record wall time in the summary");
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  qlse_run_options opt{};
  opt.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();
  for (auto* o : seed_opts) {
    if (o && o->count() > 0) opt.has_seed = 1;
  }
  opt.seed = seed;
  opt.refine = refine;
  opt.timing = timing;
  opt.inject_fault = inject_fault;

  qlse_config* config = nullptr;
  if (command != "verify-g") {
    const qlse_status st = qlse_config_load(config_path.c_str(), &config);
    if (st != QLSE_OK) return report_error(st);
  }
  const qlse_status st = qlse_run(command.c_str(), config, &opt, print_log, nullptr);
  qlse_config_free(config);
  std::fflush(stdout);
  if (st == QLSE_VERIFY_FAILED) {
    std::fprintf(stderr, "qlse: %s: a check failed (see report above)\n", command.c_str());
    return qlse_exit_code(st);
  }
  if (st != QLSE_OK) return report_error(st);
  return 0;
}
