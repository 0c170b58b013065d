#pragma once

#include "rbfnet/config.hpp"

namespace rbfnet {

// each command reads what it needs under the config's data dir, writes a
// JSON report (plus plot-ready CSVs where rows are natural) under the
// config's out dir, and echoes the report to stdout. wall-clock numbers live
// only under the report's "timing" key.
int cmd_gen_data(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_detect(const RunConfig& cfg);
int cmd_poison(const RunConfig& cfg);
int cmd_clean(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_bench(const RunConfig& cfg);

}  // namespace rbfnet
