#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "synmix/error.h"
#include "synmix/experiment/config.h"

using namespace synmix::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("synmix_cfg_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("every registered experiment has valid defaults")
{
    REQUIRE(!experiment_names().empty());
    for (const auto& name : experiment_names()) {
        CAPTURE(name);
        const auto cfg = ExperimentConfig::defaults(name);
        CHECK_NOTHROW(cfg.validate());
        CHECK(!experiment_description(name).empty());
        CHECK(cfg.count("seed") > 0);
    }
    CHECK_THROWS_AS(ExperimentConfig::defaults("no-such-thing"), synmix::InvalidArgument);
}

TEST_CASE("key = value lines, comments, lists and hyphenated keys")
{
    const auto cfg = parse_config_text(R"(
# a comment
experiment = gauss-known-known
m = 50            # trailing comment
c = 2.5
analyst-known-variances = 4, 1, 0.25
)",
                                       ".");
    CHECK(cfg.experiment() == "gauss-known-known");
    CHECK(cfg.count("m") == 50);
    CHECK(cfg.real("c") == 2.5);
    CHECK(cfg.reals("analyst_known_variances") == std::vector<double>{4.0, 1.0, 0.25});
}

TEST_CASE("malformed configs are rejected")
{
    CHECK_THROWS(parse_config_text("m = 5\n", "."));  // no experiment
    CHECK_THROWS(parse_config_text("experiment = gauss-sweep\nbogus = 1\n", "."));
    CHECK_THROWS(parse_config_text("experiment = gauss-sweep\nm 5\n", "."));
    CHECK_THROWS(parse_config_text("experiment = gauss-sweep\nm = many\n", "."));
    CHECK_THROWS(parse_config_text("experiment = gauss-sweep\nm = 2.5\n", "."));
    CHECK_THROWS(parse_config_text("experiment = gauss-sweep\nm = -3\n", "."));
    auto cfg = ExperimentConfig::defaults("gauss-sweep");
    cfg.set_value("c", -1.0);
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("includes resolve relative to the including file")
{
    const auto dir = scratch_dir("include");
    fs::create_directories(dir / "privacy");
    write(dir / "privacy" / "strict.conf", "epsilons = 0.25\ndelta = 1e-6\n");
    write(dir / "run.conf", "experiment = toy-dp-logreg\ninclude \"privacy/strict.conf\"\nm = 12\n");
    const auto cfg = parse_config_file(dir / "run.conf");
    CHECK(cfg.reals("epsilons") == std::vector<double>{0.25});
    CHECK(cfg.real("delta") == 1e-6);
    CHECK(cfg.count("m") == 12);

    // Later lines override earlier ones, including included values.
    write(dir / "override.conf", "experiment = toy-dp-logreg\ninclude privacy/strict.conf\nepsilons = 2\n");
    CHECK(parse_config_file(dir / "override.conf").reals("epsilons") == std::vector<double>{2.0});

    write(dir / "a.conf", "experiment = gauss-sweep\ninclude b.conf\n");
    write(dir / "b.conf", "include a.conf\n");
    CHECK_THROWS(parse_config_file(dir / "a.conf"));
    CHECK_THROWS(parse_config_file(dir / "missing.conf"));
}

TEST_CASE("json round trip")
{
    auto cfg = ExperimentConfig::defaults("coverage-study");
    cfg.set("levels", "0.5, 0.9");
    cfg.set("n_x", "123");
    const auto back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back == cfg);
}

TEST_CASE("environment variable overrides the output directory")
{
    const auto cfg = ExperimentConfig::defaults("gauss-sweep");
    ::unsetenv(kOutputDirEnv);
    CHECK(cfg.output_dir() == fs::path(cfg.text("output_dir")));
    ::setenv(kOutputDirEnv, "/tmp/elsewhere", 1);
    CHECK(cfg.output_dir() == fs::path("/tmp/elsewhere"));
    ::unsetenv(kOutputDirEnv);
}
