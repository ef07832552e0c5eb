// degen command-line driver. Links only the C interface.
//
// Exit codes: 0 pass, 2 certification failure (including failed checks),
// 3 configuration or argument error, 1 anything else.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "degen/degen.h"

namespace {

int exit_code(degen_status s) {
  switch (s) {
    case DEGEN_OK: return 0;
    case DEGEN_CHECK_FAILED:
    case DEGEN_ERR_CERTIFICATION:
    case DEGEN_ERR_MODEL: return 2;
    case DEGEN_ERR_CONFIG:
    case DEGEN_ERR_ARGUMENT:
    case DEGEN_ERR_DIMENSION: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate eddy-current and evolutionary-equation experiments"};
  app.set_version_flag("--version", degen_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned seed = 0;
  int threads = 0;
  bool compact = false;

  for (size_t i = 0; i < degen_command_count(); ++i) {
    CLI::App* sub = app.add_subcommand(degen_command_name(i));
    sub->add_option("--config,-c", config_path, "Experiment config file")->required();
    sub->add_option("--out,-o", out_dir, "Directory for report.json and CSV files");
    sub->add_option("--seed", seed, "RNG seed, overrides [run] seed");
    sub->add_option("--threads", threads, "Worker threads, overrides [run] threads")->check(CLI::PositiveNumber);
    sub->add_flag("--compact", compact, "Print the report on one line");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const bool has_seed = app.get_subcommands().front()->count("--seed") > 0;

  degen_config* config = nullptr;
  degen_status s = degen_config_load(config_path.c_str(), &config);
  if (s != DEGEN_OK) {
    std::fprintf(stderr, "error (%s): %s\n", degen_status_name(s), degen_last_error());
    return exit_code(s);
  }

  const degen_run_options options{has_seed ? 1 : 0, seed, threads, out_dir.c_str()};
  degen_report* report = nullptr;
  s = degen_run(command.c_str(), config, &options, &report);
  degen_config_free(config);
  if (!report) {
    std::fprintf(stderr, "error (%s): %s\n", degen_status_name(s), degen_last_error());
    return exit_code(s);
  }
  std::printf("%s\n", degen_report_json(report, compact ? -1 : 2));
  if (s == DEGEN_CHECK_FAILED) std::fprintf(stderr, "%s: one or more checks failed\n", command.c_str());
  degen_report_free(report);
  return exit_code(s);
}
