#pragma once

#include <filesystem>

#include "synmix/experiment/bundle.h"
#include "synmix/experiment/config.h"

namespace synmix::experiment {

/// Deterministic given the config (seed included).
ResultBundle run_experiment(const ExperimentConfig& cfg);

/// <dir>/<table>.csv for every table, <dir>/<plot>.svg for every plot and
/// <dir>/summary.json. Returns the files written.
std::vector<std::filesystem::path> write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir);

}  // namespace synmix::experiment
