#pragma once

// Command orchestration behind the CLI: each command reads its blocks from a
// Config, runs the solvers and checks, and returns a JSON report. With an
// output directory it also writes report.json and the command's CSV files.
//
// CSV floats use %.16e. Field histories have the columns
//   step,time,index,x,y,z,axis,value

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degen/config.hpp"

namespace degen {

struct RunOptions {
  std::optional<unsigned> seed;  // overrides [run] seed
  std::optional<int> threads;    // overrides [run] threads
  std::string out_dir;           // overrides [output] dir; empty = no files
};

struct RunResult {
  nlohmann::json report;
  bool pass = false;
  std::vector<std::string> files;  // written paths
};

/// check, solve-eddy, saddle, limit-study, bidomain, decompose.
const std::vector<std::string>& experiment_commands();

/// Throws Config for schema violations, Certification if setup fails a
/// hypothesis (the check command reports those instead), Argument for an
/// unknown command.
RunResult run_experiment(const std::string& command, const Config& config, const RunOptions& options = {});

}  // namespace degen
