#pragma once

// Experiment configuration: a typed key/value table whose keys and defaults
// depend on the experiment, read from a flat `key = value` text format.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace synmix::experiment {

using ParamValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>, std::vector<std::int64_t>>;

struct ParamSpec {
    std::string key;
    ParamValue default_value;
    std::string help;
    bool positive = false;  // numeric value(s) must be > 0
};

/// Overrides the configured output directory when set.
inline constexpr const char* kOutputDirEnv = "SYNMIX_OUTPUT_DIR";

const std::vector<std::string>& experiment_names();
std::string experiment_description(std::string_view name);

/// Keys accepted by an experiment, with their defaults.
const std::vector<ParamSpec>& experiment_params(std::string_view name);

class ExperimentConfig {
public:
    /// Defaults for a named experiment; throws listing the valid names otherwise.
    static ExperimentConfig defaults(std::string_view experiment);

    [[nodiscard]] const std::string& experiment() const noexcept { return experiment_; }

    /// Parses `raw` according to the key's declared type.
    void set(std::string_view key, std::string_view raw);
    void set_value(std::string_view key, ParamValue value);

    [[nodiscard]] bool flag(std::string_view key) const;
    [[nodiscard]] std::int64_t integer(std::string_view key) const;
    [[nodiscard]] std::size_t count(std::string_view key) const;
    [[nodiscard]] double real(std::string_view key) const;
    [[nodiscard]] const std::string& text(std::string_view key) const;
    [[nodiscard]] const std::vector<double>& reals(std::string_view key) const;
    [[nodiscard]] const std::vector<std::int64_t>& integers(std::string_view key) const;
    [[nodiscard]] std::vector<std::size_t> counts(std::string_view key) const;

    [[nodiscard]] const std::map<std::string, ParamValue>& values() const noexcept { return values_; }

    /// Throws when a positive-only value is not positive or a list is empty.
    void validate() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);

    /// `output_dir`, unless the SYNMIX_OUTPUT_DIR environment variable is set.
    [[nodiscard]] std::filesystem::path output_dir() const;

    bool operator==(const ExperimentConfig&) const = default;

private:
    const ParamValue& get(std::string_view key) const;

    std::string experiment_;
    std::map<std::string, ParamValue> values_;
};

std::string format_value(const ParamValue& v);

ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// `base_dir` resolves relative include paths.
ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                                   std::string_view source_name = "<config>");

}  // namespace synmix::experiment
