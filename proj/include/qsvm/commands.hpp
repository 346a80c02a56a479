#pragma once

#include "qsvm/config.hpp"

namespace qsvm {

// Subcommand bodies behind the CLI, also driven directly by tests.
// Each reads/writes the file paths named in the config.
void cmd_collect_stats(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_predict(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);

}  // namespace qsvm
