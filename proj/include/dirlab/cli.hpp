#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dirlab/config.hpp"

namespace dirlab {

/// Runs the experiment named by config.subcommand, writes its reports and the
/// manifest into config.out and prints a short summary. Returns the exit code
/// for a completed run (0); errors propagate as exceptions.
int run_experiment(const ExperimentConfig& config, int threads, std::ostream& out);

/// Full command line: parsing, config layering, error to exit-code mapping
/// (0 success, 1 invalid input, 2 budget exhausted).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace dirlab
