#include "synmix/experiment/bundle.h"

#include <algorithm>

#include "synmix/error.h"
#include "synmix/kernels.h"

namespace synmix::experiment {

Table& ResultBundle::add_table(std::string name, std::vector<std::string> columns)
{
    require(std::none_of(tables.begin(), tables.end(), [&](const Table& t) { return t.name == name; }),
            "ResultBundle: duplicate table " + name);
    tables.emplace_back(std::move(name), std::move(columns));
    return tables.back();
}

const Table& ResultBundle::table(const std::string& name) const
{
    const auto it = std::find_if(tables.begin(), tables.end(), [&](const Table& t) { return t.name == name; });
    require(it != tables.end(), "ResultBundle: no table " + name);
    return *it;
}

ResultBundle start_bundle(const ExperimentConfig& cfg)
{
    ResultBundle b;
    b.experiment = cfg.experiment();
    b.summary["config"] = cfg.to_json();
    b.summary["metadata"] = {
        {"version", SYNMIX_VERSION},
        {"compiler", __VERSION__},
        {"kernels", kernels::active_kernels().name},
        {"seed", cfg.integer("seed")},
        {"rng", "philox4x32-10; stream tree rep -> panel -> {data, mix}"},
    };
    b.summary["results"] = nlohmann::json::object();
    return b;
}

}  // namespace synmix::experiment
