#include "synmix/experiment/gaussian.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synmix/error.h"
#include "synmix/experiment/analysis.h"
#include "synmix/parallel.h"

namespace synmix::experiment {

namespace {

constexpr std::size_t kPlotPoints = 512;

DownstreamAnalyzer known_variance_analyzer(const KnownVarModel& analyst)
{
    return {"gauss-known-variance", [analyst](const Dataset& d) {
                const auto* x = std::get_if<std::vector<double>>(&d);
                require(x != nullptr, "gauss-known-variance: expects real-valued data");
                return ComponentPosterior{posterior_known_variance(analyst, DataSummary::of(*x))};
            }};
}

DownstreamAnalyzer known_mean_analyzer(const KnownMeanModel& analyst)
{
    return {"gauss-known-mean", [analyst](const Dataset& d) {
                const auto* x = std::get_if<std::vector<double>>(&d);
                require(x != nullptr, "gauss-known-mean: expects real-valued data");
                return ComponentPosterior{posterior_known_mean(analyst, DataSummary::of(*x))};
            }};
}

std::size_t synthetic_size(std::size_t n_x, double c)
{
    const double n = std::round(c * static_cast<double>(n_x));
    require(n >= 1.0, "n* = c * n_x must be at least 1");
    return static_cast<std::size_t>(n);
}

void add_density_rows(Table& t, const std::string& panel, const std::string& series, const GridDensity& d)
{
    const std::size_t stride = std::max<std::size_t>(1, d.size() / kPlotPoints);
    for (std::size_t i = 0; i < d.size(); i += stride) {
        t.add_row({panel, series, d.grid()[i], d.values()[i]});
    }
}

Series density_series(const std::string& label, const std::string& panel, const std::string& series,
                      bool dashed = false)
{
    return Series{label, "densities", "x", "density", {{"panel", panel}, {"series", series}}, dashed};
}

template <class T>
std::string num(T v)
{
    return format_value(ParamValue(static_cast<std::conditional_t<std::is_integral_v<T>, std::int64_t, double>>(v)));
}

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

nlohmann::json stat(const std::vector<double>& v)
{
    return {{"mean", mean_of(v)}, {"sd", sd_of(v)}, {"n", v.size()}};
}

}  // namespace

std::vector<double> simulate_real_data(double mean, double variance, std::size_t n, RngStream rng)
{
    return sample_gaussian(GaussianDist(mean, variance), n, rng);
}

RngStream repetition_stream(const ExperimentConfig& cfg, std::size_t rep)
{
    return RngStream(static_cast<std::uint64_t>(cfg.integer("seed")), 0).substream(rep);
}

MeanPanelSpec mean_panel_spec(const ExperimentConfig& cfg, double analyst_variance, std::size_t m, double c)
{
    MeanPanelSpec s;
    const GaussianDist prior(cfg.real("prior_mean"), cfg.real("prior_variance"));
    s.provider = KnownVarModel{prior, cfg.real("provider_known_variance")};
    s.analyst = KnownVarModel{prior, analyst_variance};
    if (cfg.values().count("nix_mu0")) {
        s.provider_nix = NixModel{cfg.real("nix_mu0"), cfg.real("nix_kappa0"), cfg.real("nix_nu0"),
                                  cfg.real("nix_sigma0_sq")};
    }
    s.m = m;
    s.n_star = synthetic_size(cfg.count("n_x"), c);
    s.samples_per_dataset = cfg.count("samples_per_dataset");
    s.grid_points = cfg.count("grid_points");
    return s;
}

MeanPanelResult run_mean_panel(const MeanPanelSpec& spec, const std::vector<double>& real, const RngStream& rng)
{
    const DataSummary summary = DataSummary::of(real);
    MeanPanelResult r;
    DatasetGenerator generator;
    if (spec.generator == MeanGenerator::known_variance) {
        const GaussianDist post = posterior_known_variance(spec.provider, summary);
        r.provider_mean = post.mean();
        r.provider_variance = post.variance();
        r.provider_pdf = [post](double x) { return post.pdf(x); };
        generator = [model = spec.provider, post](std::size_t, std::size_t n, RngStream& s) -> Dataset {
            return posterior_predictive_sample(model, post, n, s);
        };
    } else {
        const NixPosterior post = posterior_nix(spec.provider_nix, summary);
        const StudentT marginal = nix_marginal_mean(post);
        const auto var = marginal.variance();
        require(var.has_value(), "provider marginal posterior has no variance (dof <= 2)");
        r.provider_mean = marginal.location();
        r.provider_variance = *var;
        r.provider_pdf = [marginal](double x) { return marginal.pdf(x); };
        generator = [model = spec.provider_nix, post](std::size_t, std::size_t n, RngStream& s) -> Dataset {
            return posterior_predictive_sample(model, post, n, s);
        };
    }
    r.analyst_real = posterior_known_variance(spec.analyst, summary);
    r.mixture = synthesize_and_mix(generator, known_variance_analyzer(spec.analyst), spec.m, spec.n_star,
                                   spec.samples_per_dataset, rng.substream(0), rng.substream(1));
    r.moments = mixture_moments(r.mixture);

    const std::vector<GaussianDist> span{GaussianDist(r.provider_mean, r.provider_variance), r.analyst_real,
                                         GaussianDist(r.moments.mean, r.moments.variance)};
    const auto grid = covering_grid(span, spec.grid_points);
    r.mixture_density = mixture_density(r.mixture, grid);
    r.provider_density = GridDensity::tabulate(grid, r.provider_pdf);
    r.analyst_density = GridDensity::tabulate(grid, [a = r.analyst_real](double x) { return a.pdf(x); });
    r.tv_provider = tv_distance_grid(r.mixture_density, r.provider_density);
    r.tv_analyst = tv_distance_grid(r.mixture_density, r.analyst_density);
    return r;
}

CorrectionResult correct_panel(const MeanPanelResult& panel, double c)
{
    CorrectionResult out;
    out.mixture_variance = panel.moments.variance;
    out.expected_component_variance = panel.moments.expected_component_variance;
    out.provider_variance = panel.provider_variance;
    out.inflation = out.mixture_variance / out.provider_variance;
    out.tv_raw = panel.tv_provider;
    try {
        out.corrected_variance = variance_correction(out.mixture_variance, out.expected_component_variance, c);
    } catch (const Error&) {
        out.corrected_variance.reset();
    }
    if (out.corrected_variance) {
        const GaussianDist corrected(panel.moments.mean, *out.corrected_variance);
        std::vector<double> grid(panel.provider_density.grid().begin(), panel.provider_density.grid().end());
        const auto d = GridDensity::tabulate(std::move(grid), [&](double x) { return corrected.pdf(x); });
        out.tv_corrected = tv_distance_grid(d, panel.provider_density);
    } else {
        out.tv_corrected = std::nan("");
    }
    return out;
}

VariancePanelResult run_variance_panel(const VariancePanelSpec& spec, const std::vector<double>& real,
                                       const RngStream& rng)
{
    const DataSummary summary = DataSummary::of(real);
    VariancePanelResult r;
    r.provider_real = posterior_known_mean(spec.provider, summary);
    r.analyst_real = posterior_known_mean(spec.analyst, summary);
    const auto pm = r.provider_real.mean();
    require(pm.has_value(), "provider posterior has no mean");
    r.provider_mean = *pm;

    const DatasetGenerator generator = [model = spec.provider, post = r.provider_real](std::size_t, std::size_t n,
                                                                                         RngStream& s) -> Dataset {
        return posterior_predictive_sample(model, post, n, s);
    };
    r.mixture = synthesize_and_mix(generator, known_mean_analyzer(spec.analyst), spec.m, spec.n_star,
                                   spec.samples_per_dataset, rng.substream(0), rng.substream(1));
    const MixtureMoments mm = mixture_moments(r.mixture);
    r.mixture_mean = mm.mean;

    const auto pooled = r.mixture.pooled_column(0);
    r.pooled_mean = mean_of(pooled);
    const auto corrected = mean_correction_known_mean(pooled, spec.provider.known_mean, spec.analyst.known_mean);
    r.corrected_pooled_mean = mean_of(corrected.samples);
    r.negative_after_correction = corrected.negative_count;
    const double d = spec.provider.known_mean - spec.analyst.known_mean;
    r.offset = d * d;

    const auto moments_of = [](const ScaledInvChiSq& s) {
        return GaussianDist(s.mean().value_or(s.scale()), s.variance().value_or(s.scale() * s.scale()));
    };
    const std::vector<GaussianDist> span{moments_of(r.provider_real), moments_of(r.analyst_real),
                                         GaussianDist(mm.mean, mm.variance),
                                         GaussianDist(mm.mean - r.offset, mm.variance)};
    auto grid = covering_grid(span, spec.grid_points);
    // Variances live on (0, inf); start the grid just above zero if needed.
    if (grid.front() <= 0.0) {
        grid = linspace(1e-9 * grid.back(), grid.back(), spec.grid_points);
    }
    r.mixture_density = mixture_density(r.mixture, grid);
    r.corrected_density = mixture_density(r.mixture, grid, 0, r.offset);
    r.provider_density = GridDensity::tabulate(grid, [p = r.provider_real](double x) { return p.pdf(x); });
    r.analyst_density = GridDensity::tabulate(grid, [a = r.analyst_real](double x) { return a.pdf(x); });
    r.tv_provider = tv_distance_grid(r.mixture_density, r.provider_density);
    r.tv_analyst = tv_distance_grid(r.mixture_density, r.analyst_density);
    r.tv_corrected_provider = tv_distance_grid(r.corrected_density, r.provider_density);
    return r;
}

namespace {

ResultBundle run_mean_experiment(const ExperimentConfig& cfg, MeanGenerator generator)
{
    ResultBundle b = start_bundle(cfg);
    const auto& variances = cfg.reals("analyst_known_variances");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t n_x = cfg.count("n_x");
    const std::size_t panels = variances.size();

    std::vector<std::vector<MeanPanelResult>> results(reps, std::vector<MeanPanelResult>(panels));
    parallel_for(reps * panels, [&](std::size_t idx) {
        const std::size_t rep = idx / panels, p = idx % panels;
        const RngStream root = repetition_stream(cfg, rep);
        const auto real = simulate_real_data(cfg.real("true_mean"), cfg.real("true_variance"), n_x, root.substream(0));
        MeanPanelSpec spec = mean_panel_spec(cfg, variances[p], cfg.count("m"), cfg.real("c"));
        spec.generator = generator;
        results[rep][p] = run_mean_panel(spec, real, root.substream(1 + p));
    });

    Table& tv = b.add_table("tv", {"rep", "panel", "analyst_known_variance", "tv_mixture_provider",
                                   "tv_mixture_analyst", "mixture_mean", "mixture_variance", "provider_mean",
                                   "provider_variance", "analyst_mean", "analyst_variance"});
    Table& dens = b.add_table("densities", {"panel", "series", "x", "density"});
    Plot plot{"densities", {}, static_cast<int>(std::min<std::size_t>(panels, 2))};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t p = 0; p < panels; ++p) {
        const std::string panel = "analyst_var=" + num(variances[p]);
        std::vector<double> tvp, tva;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto& r = results[rep][p];
            tv.add_row({static_cast<std::int64_t>(rep), panel, variances[p], r.tv_provider, r.tv_analyst,
                        r.moments.mean, r.moments.variance, r.provider_mean, r.provider_variance,
                        r.analyst_real.mean(), r.analyst_real.variance()});
            tvp.push_back(r.tv_provider);
            tva.push_back(r.tv_analyst);
        }
        const auto& r0 = results[0][p];
        add_density_rows(dens, panel, "analyst-on-real", r0.analyst_density);
        add_density_rows(dens, panel, "provider-on-real", r0.provider_density);
        add_density_rows(dens, panel, "mixture", r0.mixture_density);
        plot.panels.push_back(Panel{panel + " (rep 0)",
                                    "mu",
                                    "density",
                                    {density_series("analyst p(mu|X)", panel, "analyst-on-real"),
                                     density_series("provider p(mu|X)", panel, "provider-on-real", true),
                                     density_series("mixture", panel, "mixture")},
                                    {cfg.real("true_mean")}});
        res.push_back({{"panel", panel},
                       {"analyst_known_variance", variances[p]},
                       {"tv_mixture_provider", stat(tvp)},
                       {"tv_mixture_analyst", stat(tva)}});
    }
    b.plots.push_back(std::move(plot));
    b.summary["results"]["panels"] = res;
    b.summary["metadata"]["generator"] =
        generator == MeanGenerator::known_variance ? "known-variance" : "unknown-variance (NIX)";
    b.summary["metadata"]["n_star"] = synthetic_size(n_x, cfg.real("c"));
    return b;
}

}  // namespace

ResultBundle run_gauss_known_known(const ExperimentConfig& cfg)
{
    return run_mean_experiment(cfg, MeanGenerator::known_variance);
}

ResultBundle run_gauss_unknown_known(const ExperimentConfig& cfg)
{
    return run_mean_experiment(cfg, MeanGenerator::unknown_variance);
}

ResultBundle run_gauss_known_mean(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const auto& means = cfg.reals("analyst_known_means");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t n_x = cfg.count("n_x");
    const std::size_t panels = means.size();
    const ScaledInvChiSq prior(cfg.real("invchi_nu0"), cfg.real("invchi_sigma0_sq"));

    std::vector<std::vector<VariancePanelResult>> results(reps, std::vector<VariancePanelResult>(panels));
    parallel_for(reps * panels, [&](std::size_t idx) {
        const std::size_t rep = idx / panels, p = idx % panels;
        const RngStream root = repetition_stream(cfg, rep);
        const auto real = simulate_real_data(cfg.real("true_mean"), cfg.real("true_variance"), n_x, root.substream(0));
        VariancePanelSpec spec;
        spec.provider = KnownMeanModel{prior, cfg.real("provider_known_mean")};
        spec.analyst = KnownMeanModel{prior, means[p]};
        spec.m = cfg.count("m");
        spec.n_star = synthetic_size(n_x, cfg.real("c"));
        spec.samples_per_dataset = cfg.count("samples_per_dataset");
        spec.grid_points = cfg.count("grid_points");
        results[rep][p] = run_variance_panel(spec, real, root.substream(1 + p));
    });

    Table& tv = b.add_table("tv", {"rep", "panel", "analyst_known_mean", "tv_mixture_provider", "tv_mixture_analyst",
                                   "tv_corrected_provider", "provider_mean", "mixture_mean", "mean_gap", "offset",
                                   "pooled_mean", "corrected_pooled_mean", "negative_after_correction"});
    Table& dens = b.add_table("densities", {"panel", "series", "x", "density"});
    Plot plot{"densities", {}, static_cast<int>(std::min<std::size_t>(panels, 2))};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t p = 0; p < panels; ++p) {
        const std::string panel = "analyst_mean=" + num(means[p]);
        std::vector<double> gap_ratio, corrected_rel;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto& r = results[rep][p];
            const double gap = r.mixture_mean - r.provider_mean;
            tv.add_row({static_cast<std::int64_t>(rep), panel, means[p], r.tv_provider, r.tv_analyst,
                        r.tv_corrected_provider, r.provider_mean, r.mixture_mean, gap, r.offset, r.pooled_mean,
                        r.corrected_pooled_mean, static_cast<std::int64_t>(r.negative_after_correction)});
            if (r.offset > 0.0) {
                gap_ratio.push_back(gap / r.offset);
            }
            corrected_rel.push_back(std::abs(r.corrected_pooled_mean - r.provider_mean) / r.provider_mean);
        }
        const auto& r0 = results[0][p];
        add_density_rows(dens, panel, "analyst-on-real", r0.analyst_density);
        add_density_rows(dens, panel, "provider-on-real", r0.provider_density);
        add_density_rows(dens, panel, "mixture", r0.mixture_density);
        add_density_rows(dens, panel, "mixture-mean-corrected", r0.corrected_density);
        plot.panels.push_back(Panel{panel + " (rep 0)",
                                    "sigma^2",
                                    "density",
                                    {density_series("analyst p(s2|X)", panel, "analyst-on-real"),
                                     density_series("provider p(s2|X)", panel, "provider-on-real", true),
                                     density_series("mixture", panel, "mixture"),
                                     density_series("mixture, mean-corrected", panel, "mixture-mean-corrected")},
                                    {cfg.real("true_variance")}});
        nlohmann::json pr = {{"panel", panel},
                             {"analyst_known_mean", means[p]},
                             {"corrected_mean_relative_error", stat(corrected_rel)}};
        if (!gap_ratio.empty()) {
            pr["mean_gap_over_offset"] = stat(gap_ratio);
        }
        res.push_back(pr);
    }
    b.plots.push_back(std::move(plot));
    b.summary["results"]["panels"] = res;
    return b;
}

ResultBundle run_gauss_sweep(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const auto ms = cfg.counts("sweep_m");
    const auto& cs = cfg.reals("sweep_c");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t n_x = cfg.count("n_x");
    const std::size_t cells = ms.size() * cs.size();

    std::vector<std::vector<MeanPanelResult>> results(reps, std::vector<MeanPanelResult>(cells));
    parallel_for(reps * cells, [&](std::size_t idx) {
        const std::size_t rep = idx / cells, cell = idx % cells;
        const RngStream root = repetition_stream(cfg, rep);
        const auto real = simulate_real_data(cfg.real("true_mean"), cfg.real("true_variance"), n_x, root.substream(0));
        const MeanPanelSpec spec =
            mean_panel_spec(cfg, cfg.real("analyst_known_variance"), ms[cell / cs.size()], cs[cell % cs.size()]);
        results[rep][cell] = run_mean_panel(spec, real, root.substream(1 + cell));
    });

    Table& tv = b.add_table("tv", {"rep", "m", "c", "tv_mixture_target"});
    Table& tvm = b.add_table("tv_mean", {"m", "c", "mean_tv", "sd_tv"});
    Table& dens = b.add_table("densities", {"panel", "series", "x", "density"});
    Plot plot{"sweep", {}, static_cast<int>(cs.size())};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto m = static_cast<std::int64_t>(ms[cell / cs.size()]);
        const double c = cs[cell % cs.size()];
        std::vector<double> v;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            tv.add_row({static_cast<std::int64_t>(rep), m, c, results[rep][cell].tv_provider});
            v.push_back(results[rep][cell].tv_provider);
        }
        tvm.add_row({m, c, mean_of(v), sd_of(v)});
        const std::string panel = "m=" + num(m) + ",c=" + num(c);
        add_density_rows(dens, panel, "target", results[0][cell].provider_density);
        add_density_rows(dens, panel, "mixture", results[0][cell].mixture_density);
        plot.panels.push_back(Panel{panel,
                                    "mu",
                                    "density",
                                    {density_series("p(mu|X)", panel, "target", true),
                                     density_series("mixture", panel, "mixture")},
                                    {}});
        res.push_back({{"m", m}, {"c", c}, {"tv", stat(v)}});
    }
    b.plots.push_back(std::move(plot));
    b.summary["results"]["cells"] = res;
    return b;
}

ResultBundle run_gauss_correction(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t n_x = cfg.count("n_x");
    const double c = cfg.real("c");
    const MeanGenerator gens[2] = {MeanGenerator::known_variance, MeanGenerator::unknown_variance};
    const char* gen_names[2] = {"known-variance", "unknown-variance"};

    std::vector<std::vector<MeanPanelResult>> results(reps, std::vector<MeanPanelResult>(2));
    parallel_for(reps * 2, [&](std::size_t idx) {
        const std::size_t rep = idx / 2, g = idx % 2;
        const RngStream root = repetition_stream(cfg, rep);
        const auto real = simulate_real_data(cfg.real("true_mean"), cfg.real("true_variance"), n_x, root.substream(0));
        MeanPanelSpec spec = mean_panel_spec(cfg, cfg.real("analyst_known_variance"), cfg.count("m"), c);
        spec.generator = gens[g];
        results[rep][g] = run_mean_panel(spec, real, root.substream(1 + g));
    });

    Table& tab = b.add_table("correction", {"rep", "generator", "mixture_variance", "expected_component_variance",
                                            "provider_variance", "inflation", "corrected_variance",
                                            "corrected_relative_error", "tv_raw", "tv_corrected"});
    Table& dens = b.add_table("densities", {"panel", "series", "x", "density"});
    Plot plot{"correction", {}, 2};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t g = 0; g < 2; ++g) {
        std::vector<double> infl, rel, tvr, tvc;
        std::size_t infeasible = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto cr = correct_panel(results[rep][g], c);
            const double cv = cr.corrected_variance.value_or(std::nan(""));
            const double re = std::abs(cv - cr.provider_variance) / cr.provider_variance;
            tab.add_row({static_cast<std::int64_t>(rep), std::string(gen_names[g]), cr.mixture_variance,
                         cr.expected_component_variance, cr.provider_variance, cr.inflation, cv, re, cr.tv_raw,
                         cr.tv_corrected});
            infl.push_back(cr.inflation);
            tvr.push_back(cr.tv_raw);
            if (cr.corrected_variance) {
                rel.push_back(re);
                tvc.push_back(cr.tv_corrected);
            } else {
                ++infeasible;
            }
        }
        const auto& r0 = results[0][g];
        const std::string panel = gen_names[g];
        add_density_rows(dens, panel, "target", r0.provider_density);
        add_density_rows(dens, panel, "mixture", r0.mixture_density);
        const auto cr0 = correct_panel(r0, c);
        if (cr0.corrected_variance) {
            const GaussianDist corrected(r0.moments.mean, *cr0.corrected_variance);
            std::vector<double> grid(r0.provider_density.grid().begin(), r0.provider_density.grid().end());
            add_density_rows(dens, panel, "corrected-gaussian",
                             GridDensity::tabulate(std::move(grid), [&](double x) { return corrected.pdf(x); }));
        }
        plot.panels.push_back(Panel{panel + " generator (rep 0)",
                                    "mu",
                                    "density",
                                    {density_series("p(mu|X)", panel, "target", true),
                                     density_series("mixture", panel, "mixture"),
                                     density_series("corrected Gaussian", panel, "corrected-gaussian")},
                                    {}});
        nlohmann::json pr = {{"generator", panel},
                             {"inflation", stat(infl)},
                             {"tv_raw", stat(tvr)},
                             {"infeasible_corrections", infeasible}};
        if (!rel.empty()) {
            pr["corrected_relative_error"] = stat(rel);
            pr["tv_corrected"] = stat(tvc);
        }
        res.push_back(pr);
    }
    b.plots.push_back(std::move(plot));
    b.summary["results"]["generators"] = res;
    return b;
}

ResultBundle run_rate_check(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const auto sizes = cfg.counts("rate_n_star");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t n_x = cfg.count("n_x");

    std::vector<std::vector<double>> tvs(reps, std::vector<double>(sizes.size()));
    parallel_for(reps * sizes.size(), [&](std::size_t idx) {
        const std::size_t rep = idx / sizes.size(), j = idx % sizes.size();
        const RngStream root = repetition_stream(cfg, rep);
        const auto real = simulate_real_data(cfg.real("true_mean"), cfg.real("true_variance"), n_x, root.substream(0));
        MeanPanelSpec spec = mean_panel_spec(cfg, cfg.real("analyst_known_variance"), cfg.count("m"), 1.0);
        spec.n_star = sizes[j];
        tvs[rep][j] = run_mean_panel(spec, real, root.substream(1 + j)).tv_provider;
    });

    Table& tv = b.add_table("tv", {"rep", "n_star", "tv_mixture_target"});
    Table& tvm = b.add_table("tv_mean", {"n_star", "mean_tv", "sd_tv"});
    std::vector<double> ns, means;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        std::vector<double> v;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            tv.add_row({static_cast<std::int64_t>(rep), static_cast<std::int64_t>(sizes[j]), tvs[rep][j]});
            v.push_back(tvs[rep][j]);
        }
        tvm.add_row({static_cast<std::int64_t>(sizes[j]), mean_of(v), sd_of(v)});
        ns.push_back(static_cast<double>(sizes[j]));
        means.push_back(mean_of(v));
    }
    const RateFit fit = rate_fit(ns, means);
    b.summary["results"]["slope"] = fit.slope;
    b.summary["results"]["slope_se"] = fit.slope_se;
    b.summary["results"]["intercept"] = fit.intercept;
    b.summary["results"]["reference_slope"] = -0.5;
    b.plots.push_back(Plot{"rate",
                           {Panel{"TV vs synthetic size",
                                  "n*",
                                  "mean TV",
                                  {Series{"mean TV", "tv_mean", "n_star", "mean_tv", {}, false}},
                                  {},
                                  true,
                                  true}},
                           1});
    return b;
}

}  // namespace synmix::experiment
