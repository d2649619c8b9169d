#pragma once

#include <string>

#include "hexband/config.hpp"

namespace hexband {

// Executes one pipeline and writes CSV/JSON artifacts under
// <out_root>/<command>/<config-hash>/. Returns the process exit status;
// failures leave a structured error.json behind.
int run_command(const std::string& command, const ExperimentConfig& cfg,
                const std::string& out_root, int threads);

}  // namespace hexband
