#include "synmix/experiment/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "synmix/error.h"

namespace synmix::experiment {

namespace {

using Ints = std::vector<std::int64_t>;
using Reals = std::vector<double>;

struct ExperimentEntry {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
};

void append(std::vector<ParamSpec>& out, std::initializer_list<ParamSpec> specs)
{
    for (const auto& s : specs) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ParamSpec& p) { return p.key == s.key; });
        if (it != out.end()) {
            *it = s;  // later groups override defaults
        } else {
            out.push_back(s);
        }
    }
}

std::vector<ParamSpec> common(std::string_view name, std::int64_t reps)
{
    return {
        {"seed", std::int64_t{20240611}, "master seed; every stream derives from it"},
        {"repetitions", reps, "independent replicates (fresh real data each)", true},
        {"output_dir", "results/" + std::string(name), "bundle directory (SYNMIX_OUTPUT_DIR overrides)"},
        {"samples_per_dataset", std::int64_t{250}, "k pooled posterior draws per synthetic data set", true},
        {"grid_points", std::int64_t{4096}, "points in the density grid", true},
    };
}

void add_gauss_data(std::vector<ParamSpec>& p)
{
    append(p, {
                  {"n_x", std::int64_t{100}, "real data size", true},
                  {"true_mean", 1.0, "mean of the real-data distribution"},
                  {"true_variance", 4.0, "variance of the real-data distribution", true},
                  {"m", std::int64_t{400}, "number of synthetic data sets", true},
                  {"c", 20.0, "synthetic size ratio n*/n_x", true},
              });
}

void add_mean_model(std::vector<ParamSpec>& p)
{
    append(p, {
                  {"prior_mean", 0.0, "normal prior mean for mu (both parties)"},
                  {"prior_variance", 100.0, "normal prior variance for mu (both parties)", true},
                  {"provider_known_variance", 4.0, "data provider's known variance", true},
              });
}

void add_nix(std::vector<ParamSpec>& p)
{
    append(p, {
                  {"nix_mu0", 0.0, "provider NIX prior location"},
                  {"nix_kappa0", 0.04, "provider NIX prior pseudo-count for mu", true},
                  {"nix_nu0", 1.0, "provider NIX prior degrees of freedom", true},
                  {"nix_sigma0_sq", 4.0, "provider NIX prior scale", true},
              });
}

void add_toy(std::vector<ParamSpec>& p)
{
    append(p, {
                  {"n_x", std::int64_t{2000}, "real data size", true},
                  {"coeffs", Reals{1.0, 0.0}, "true regression coefficients"},
                  {"epsilons", Reals{0.5, 1.0}, "privacy epsilons (one panel each)", true},
                  {"delta", 2.5e-7, "privacy delta", true},
                  {"sensitivity", std::numbers::sqrt2, "L2 sensitivity of the query vector", true},
                  {"arities", Ints{2, 2, 2}, "variable arities (last variable is the label)", true},
                  {"query_set", std::string("full-one-hot"), "marginal query set"},
                  {"m", std::int64_t{100}, "number of synthetic data sets", true},
                  {"c", 10.0, "synthetic size ratio n*/n_x", true},
                  {"napsu_prior_scale", 10.0, "max-ent prior sd", true},
                  {"napsu_chains", std::int64_t{4}, "HMC chains", true},
                  {"napsu_warmup", std::int64_t{200}, "HMC warmup iterations per chain", true},
                  {"napsu_draws", std::int64_t{500}, "HMC kept draws per chain", true},
                  {"napsu_target_accept", 0.8, "dual-averaging target acceptance", true},
                  {"logreg_prior_variance", 10.0, "downstream prior N(0, v I)", true},
                  {"intercept", false, "add an intercept column downstream"},
              });
}

void add_mwg(std::vector<ParamSpec>& p)
{
    append(p, {
                  {"mwg_hmc_step", 0.05, "exact sampler: theta HMC step size", true},
                  {"mwg_leapfrog_steps", std::int64_t{20}, "exact sampler: leapfrog steps", true},
                  {"mwg_count_move_repeats", std::int64_t{30}, "exact sampler: +-1 pairs per count move", true},
                  {"mwg_total_samples", std::int64_t{20000}, "exact sampler: iterations over all chains", true},
                  {"mwg_chains", std::int64_t{4}, "exact sampler: chains", true},
                  {"mwg_warmup_fraction", 0.2, "exact sampler: warmup fraction dropped", true},
                  {"mwg_prior_scale", 10.0, "exact sampler: theta prior sd", true},
                  {"target_components", std::int64_t{2000}, "count draws (strided) forming the target mixture", true},
              });
}

std::vector<ExperimentEntry> build_registry()
{
    std::vector<ExperimentEntry> reg;
    {
        auto p = common("gauss-known-known", 1);
        add_gauss_data(p);
        add_mean_model(p);
        append(p, {{"analyst_known_variances", Reals{4.0, 1.0}, "analyst known variance, one panel each", true}});
        reg.push_back({"gauss-known-known", "known-variance generator, known-variance analyst (congenial and not)",
                       std::move(p)});
    }
    {
        auto p = common("gauss-unknown-known", 1);
        add_gauss_data(p);
        add_mean_model(p);
        add_nix(p);
        append(p, {{"analyst_known_variances", Reals{4.0, 1.0}, "analyst known variance, one panel each", true}});
        reg.push_back({"gauss-unknown-known", "unknown-variance (NIX) generator, known-variance analyst", std::move(p)});
    }
    {
        auto p = common("gauss-known-mean", 1);
        add_gauss_data(p);
        append(p, {
                      {"provider_known_mean", 1.0, "data provider's known mean"},
                      {"analyst_known_means", Reals{1.0, 0.0}, "analyst known mean, one panel each"},
                      {"invchi_nu0", 1.0, "scaled-inv-chi2 prior dof (both parties)", true},
                      {"invchi_sigma0_sq", 1.0, "scaled-inv-chi2 prior scale (both parties)", true},
                  });
        reg.push_back({"gauss-known-mean", "variance estimation with known means, with mean correction", std::move(p)});
    }
    {
        auto p = common("gauss-sweep", 1);
        add_gauss_data(p);
        add_mean_model(p);
        append(p, {
                      {"analyst_known_variance", 4.0, "analyst known variance", true},
                      {"sweep_m", Ints{10, 100, 400}, "m values (rows)", true},
                      {"sweep_c", Reals{1.0, 5.0, 20.0}, "n*/n_x values (columns)", true},
                  });
        reg.push_back({"gauss-sweep", "congenial known-variance mixture over an (m, c) grid", std::move(p)});
    }
    {
        auto p = common("gauss-correction", 1);
        add_gauss_data(p);
        add_mean_model(p);
        add_nix(p);
        append(p, {
                      {"c", 1.0, "synthetic size ratio n*/n_x", true},
                      {"analyst_known_variance", 4.0, "analyst known variance", true},
                  });
        reg.push_back({"gauss-correction", "variance-corrected Gaussian vs raw mixture at small n*", std::move(p)});
    }
    {
        auto p = common("rate-check", 5);
        add_gauss_data(p);
        add_mean_model(p);
        append(p, {
                      {"m", std::int64_t{2000}, "number of synthetic data sets", true},
                      {"analyst_known_variance", 4.0, "analyst known variance", true},
                      {"rate_n_star", Ints{100, 1000, 10000}, "synthetic data sizes", true},
                  });
        reg.push_back({"rate-check", "log-log slope of TV against synthetic data size", std::move(p)});
    }
    {
        auto p = common("toy-dp-logreg", 1);
        add_toy(p);
        add_mwg(p);
        append(p, {{"m", std::int64_t{400}, "number of synthetic data sets", true},
                   {"c", 20.0, "synthetic size ratio n*/n_x", true}});
        reg.push_back({"toy-dp-logreg", "DP toy logistic regression: mixture vs exact private posterior", std::move(p)});
    }
    {
        auto p = common("toy-sweep", 20);
        add_toy(p);
        add_mwg(p);
        append(p, {
                      {"sweep_m", Ints{10, 50, 100}, "m values", true},
                      {"sweep_c", Reals{2.0, 5.0, 10.0}, "n*/n_x values", true},
                  });
        reg.push_back({"toy-sweep", "toy-data TV to the exact private posterior over an (m, c) grid", std::move(p)});
    }
    {
        auto p = common("coverage-study", 20);
        add_toy(p);
        append(p, {{"levels", Reals{0.5, 0.8, 0.9, 0.95}, "credible levels", true}});
        reg.push_back({"coverage-study", "credible-interval coverage and width over repetitions", std::move(p)});
    }
    return reg;
}

const std::vector<ExperimentEntry>& registry()
{
    static const std::vector<ExperimentEntry> reg = build_registry();
    return reg;
}

const ExperimentEntry& entry(std::string_view name)
{
    for (const auto& e : registry()) {
        if (e.name == name) {
            return e;
        }
    }
    std::string msg = "unknown experiment '" + std::string(name) + "'; valid names:";
    for (const auto& e : registry()) {
        msg += " " + e.name;
    }
    throw InvalidArgument(msg);
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string normalize_key(std::string_view key)
{
    std::string k = trim(key);
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

template <class T>
T parse_number(std::string_view raw, std::string_view key)
{
    const std::string s = trim(raw);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidArgument("config: cannot parse '" + s + "' for key '" + std::string(key) + "'");
    }
    return v;
}

template <class T>
std::vector<T> parse_list(std::string_view raw, std::string_view key)
{
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto end = raw.find(',', start);
        if (end == std::string_view::npos) {
            end = raw.size();
        }
        out.push_back(parse_number<T>(raw.substr(start, end - start), key));
        start = end + 1;
    }
    return out;
}

bool parse_bool(std::string_view raw, std::string_view key)
{
    const std::string s = trim(raw);
    if (s == "true" || s == "yes" || s == "1") {
        return true;
    }
    if (s == "false" || s == "no" || s == "0") {
        return false;
    }
    throw InvalidArgument("config: expected true/false for key '" + std::string(key) + "', got '" + s + "'");
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ",";
        }
        if constexpr (std::is_same_v<T, double>) {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, v[i]);
            out.append(buf, res.ptr);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

struct Assignment {
    std::string key;
    std::string value;
    std::string where;
};

void collect(std::string_view text, const std::filesystem::path& base_dir, std::string_view source,
             std::vector<Assignment>& out, std::set<std::filesystem::path>& open_files)
{
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = std::string(source) + ":" + std::to_string(lineno);
        // Comments run from '#' to end of line.
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        if (body.rfind("include", 0) == 0 && (body.size() == 7 || body[7] == ' ' || body[7] == '\t')) {
            std::string target = trim(std::string_view(body).substr(7));
            if (target.size() >= 2 && target.front() == '"' && target.back() == '"') {
                target = target.substr(1, target.size() - 2);
            }
            if (target.empty()) {
                throw InvalidArgument(where + ": include needs a path");
            }
            std::filesystem::path p = target;
            if (p.is_relative()) {
                p = base_dir / p;
            }
            std::error_code ec;
            auto canon = std::filesystem::weakly_canonical(p, ec);
            if (ec) {
                canon = p;
            }
            if (open_files.count(canon)) {
                throw InvalidArgument(where + ": include cycle through " + p.string());
            }
            std::ifstream f(p);
            if (!f) {
                throw InvalidArgument(where + ": cannot open included file " + p.string());
            }
            std::stringstream buf;
            buf << f.rdbuf();
            open_files.insert(canon);
            collect(buf.str(), p.parent_path(), p.string(), out, open_files);
            open_files.erase(canon);
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument(where + ": expected 'key = value' or 'include <path>'");
        }
        Assignment a{normalize_key(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)),
                     where};
        if (a.key.empty()) {
            throw InvalidArgument(where + ": empty key");
        }
        out.push_back(std::move(a));
    }
}

}  // namespace

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) {
            n.push_back(e.name);
        }
        return n;
    }();
    return names;
}

std::string experiment_description(std::string_view name) { return entry(name).description; }

const std::vector<ParamSpec>& experiment_params(std::string_view name) { return entry(name).params; }

ExperimentConfig ExperimentConfig::defaults(std::string_view experiment)
{
    const auto& e = entry(experiment);
    ExperimentConfig cfg;
    cfg.experiment_ = e.name;
    for (const auto& p : e.params) {
        cfg.values_.emplace(p.key, p.default_value);
    }
    return cfg;
}

const ParamValue& ExperimentConfig::get(std::string_view key) const
{
    const auto it = values_.find(std::string(key));
    if (it == values_.end()) {
        throw InvalidArgument("config: experiment '" + experiment_ + "' has no parameter '" + std::string(key) + "'");
    }
    return it->second;
}

void ExperimentConfig::set(std::string_view key_in, std::string_view raw)
{
    const std::string key = normalize_key(key_in);
    const ParamValue& current = get(key);
    ParamValue parsed = std::visit(
        [&](const auto& cur) -> ParamValue {
            using T = std::decay_t<decltype(cur)>;
            if constexpr (std::is_same_v<T, bool>) {
                return parse_bool(raw, key);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return parse_number<std::int64_t>(raw, key);
            } else if constexpr (std::is_same_v<T, double>) {
                return parse_number<double>(raw, key);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return trim(raw);
            } else if constexpr (std::is_same_v<T, Reals>) {
                return parse_list<double>(raw, key);
            } else {
                return parse_list<std::int64_t>(raw, key);
            }
        },
        current);
    values_[key] = std::move(parsed);
}

void ExperimentConfig::set_value(std::string_view key_in, ParamValue value)
{
    const std::string key = normalize_key(key_in);
    const ParamValue& current = get(key);
    if (current.index() != value.index()) {
        // Accept an integer where a real is declared (JSON writes 4.0 as 4.0,
        // but hand-written JSON may not).
        if (std::holds_alternative<double>(current) && std::holds_alternative<std::int64_t>(value)) {
            value = static_cast<double>(std::get<std::int64_t>(value));
        } else {
            throw InvalidArgument("config: wrong value type for key '" + key + "'");
        }
    }
    values_[key] = std::move(value);
}

bool ExperimentConfig::flag(std::string_view key) const { return std::get<bool>(get(key)); }

std::int64_t ExperimentConfig::integer(std::string_view key) const { return std::get<std::int64_t>(get(key)); }

std::size_t ExperimentConfig::count(std::string_view key) const
{
    const auto v = integer(key);
    require(v > 0, "config: '" + std::string(key) + "' must be positive");
    return static_cast<std::size_t>(v);
}

double ExperimentConfig::real(std::string_view key) const { return std::get<double>(get(key)); }

const std::string& ExperimentConfig::text(std::string_view key) const { return std::get<std::string>(get(key)); }

const std::vector<double>& ExperimentConfig::reals(std::string_view key) const { return std::get<Reals>(get(key)); }

const std::vector<std::int64_t>& ExperimentConfig::integers(std::string_view key) const
{
    return std::get<Ints>(get(key));
}

std::vector<std::size_t> ExperimentConfig::counts(std::string_view key) const
{
    std::vector<std::size_t> out;
    for (auto v : integers(key)) {
        require(v > 0, "config: entries of '" + std::string(key) + "' must be positive");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void ExperimentConfig::validate() const
{
    for (const auto& spec : experiment_params(experiment_)) {
        const ParamValue& v = get(spec.key);
        const std::string bad = "config: '" + spec.key + "' must be positive";
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>) {
                    if (spec.positive && !(x > 0)) {
                        throw InvalidArgument(bad);
                    }
                    if constexpr (std::is_same_v<T, double>) {
                        require(std::isfinite(x), "config: '" + spec.key + "' must be finite");
                    }
                } else if constexpr (std::is_same_v<T, Reals> || std::is_same_v<T, Ints>) {
                    require(!x.empty(), "config: '" + spec.key + "' must not be empty");
                    for (auto e : x) {
                        if (spec.positive && !(e > 0)) {
                            throw InvalidArgument(bad);
                        }
                    }
                }
            },
            v);
    }
    if (values_.count("mwg_warmup_fraction")) {
        const double w = real("mwg_warmup_fraction");
        require(w < 1.0, "config: mwg_warmup_fraction must lie in (0, 1)");
    }
    if (values_.count("levels")) {
        for (double l : reals("levels")) {
            require(l > 0.0 && l < 1.0, "config: levels must lie in (0, 1)");
        }
    }
    if (values_.count("delta")) {
        require(real("delta") < 1.0, "config: delta must lie in (0, 1)");
    }
    if (values_.count("query_set")) {
        require(text("query_set") == "full-one-hot", "config: only query_set = full-one-hot is supported");
    }
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : values_) {
        std::visit([&, key = k](const auto& x) { params[key] = x; }, v);
    }
    return {{"experiment", experiment_}, {"params", params}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg = defaults(j.at("experiment").get<std::string>());
    for (const auto& [key, val] : j.at("params").items()) {
        const ParamValue& cur = cfg.get(key);
        ParamValue v = std::visit(
            [&](const auto& c) -> ParamValue {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, double>) {
                    return val.get<double>();
                } else {
                    return val.get<T>();
                }
            },
            cur);
        cfg.set_value(key, std::move(v));
    }
    return cfg;
}

std::filesystem::path ExperimentConfig::output_dir() const
{
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return text("output_dir");
}

std::string format_value(const ParamValue& v)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else if constexpr (std::is_same_v<T, double>) {
                return join(std::vector<double>{x});
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else {
                return join(x);
            }
        },
        v);
}

ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                                   std::string_view source_name)
{
    std::vector<Assignment> assignments;
    std::set<std::filesystem::path> open_files;
    collect(text, base_dir, source_name, assignments, open_files);

    const auto exp = std::find_if(assignments.rbegin(), assignments.rend(),
                                  [](const Assignment& a) { return a.key == "experiment"; });
    if (exp == assignments.rend()) {
        throw InvalidArgument(std::string(source_name) + ": missing 'experiment = <name>'");
    }
    ExperimentConfig cfg = ExperimentConfig::defaults(exp->value);
    for (const auto& a : assignments) {
        if (a.key == "experiment") {
            continue;
        }
        try {
            cfg.set(a.key, a.value);
        } catch (const std::exception& e) {
            throw InvalidArgument(a.where + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw InvalidArgument("cannot open config file " + path.string());
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path.parent_path(), path.string());
}

}  // namespace synmix::experiment
