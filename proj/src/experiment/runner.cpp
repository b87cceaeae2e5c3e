#include "synmix/experiment/runner.h"

#include <functional>
#include <map>

#include "synmix/error.h"
#include "synmix/experiment/gaussian.h"
#include "synmix/experiment/toy.h"

namespace synmix::experiment {

ResultBundle run_experiment(const ExperimentConfig& cfg)
{
    static const std::map<std::string, std::function<ResultBundle(const ExperimentConfig&)>> runners{
        {"gauss-known-known", run_gauss_known_known},
        {"gauss-unknown-known", run_gauss_unknown_known},
        {"gauss-known-mean", run_gauss_known_mean},
        {"gauss-sweep", run_gauss_sweep},
        {"gauss-correction", run_gauss_correction},
        {"rate-check", run_rate_check},
        {"toy-dp-logreg", run_toy_dp_logreg},
        {"toy-sweep", run_toy_sweep},
        {"coverage-study", run_coverage_study},
    };
    cfg.validate();
    const auto it = runners.find(cfg.experiment());
    if (it == runners.end()) {
        // defaults() already rejects unknown names; this guards the table.
        (void)ExperimentConfig::defaults(cfg.experiment());
        throw Error("no runner registered for " + cfg.experiment());
    }
    return it->second(cfg);
}

std::vector<std::filesystem::path> write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& t : bundle.tables) {
        written.push_back(dir / (t.name + ".csv"));
        write_text_file(written.back(), t.to_csv());
    }
    for (const auto& p : bundle.plots) {
        written.push_back(dir / (p.name + ".svg"));
        write_text_file(written.back(), render_svg(p, bundle.tables));
    }
    written.push_back(dir / "summary.json");
    write_text_file(written.back(), bundle.summary.dump(2) + "\n");
    return written;
}

}  // namespace synmix::experiment
