#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "synmix/experiment/config.h"
#include "synmix/experiment/report.h"

namespace synmix::experiment {

struct ResultBundle {
    std::string experiment;
    TableSet tables;  // deque: add_table references stay valid
    /// {"config": ..., "metadata": ..., "results": ...}
    nlohmann::json summary;
    std::vector<Plot> plots;

    Table& add_table(std::string name, std::vector<std::string> columns);
    [[nodiscard]] const Table& table(const std::string& name) const;
};

/// Starts a bundle whose summary already carries the resolved config and
/// build metadata.
ResultBundle start_bundle(const ExperimentConfig& cfg);

}  // namespace synmix::experiment
