#include "synmix/experiment/toy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synmix/error.h"
#include "synmix/experiment/analysis.h"
#include "synmix/experiment/gaussian.h"
#include "synmix/grid.h"
#include "synmix/parallel.h"

namespace synmix::experiment {

namespace {

constexpr std::size_t kPlotPoints = 512;

std::size_t synthetic_size(std::size_t n_x, double c)
{
    const double n = std::round(c * static_cast<double>(n_x));
    require(n >= 1.0, "n* = c * n_x must be at least 1");
    return static_cast<std::size_t>(n);
}

std::string num(double v) { return format_value(ParamValue(v)); }

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> marginal_grid(const MixturePosterior& a, const MixturePosterior& b, std::size_t coord,
                                  std::size_t points)
{
    const std::vector<GaussianDist> span{moment_matched(a, coord), moment_matched(b, coord)};
    // The widest single component sets the padding as well, since a very
    // spiky mixture can have small moment-matched spread.
    double widest = 0.0;
    for (const auto* mix : {&a, &b}) {
        for (const auto& c : mix->components) {
            widest = std::max(widest, marginal_variance(c, coord));
        }
    }
    std::vector<GaussianDist> all = span;
    all.emplace_back(span[0].mean(), std::max(widest, 1e-12));
    return covering_grid(all, points);
}

void add_density_rows(Table& t, const std::string& panel, const std::string& series, const GridDensity& d)
{
    const std::size_t stride = std::max<std::size_t>(1, d.size() / kPlotPoints);
    for (std::size_t i = 0; i < d.size(); i += stride) {
        t.add_row({panel, series, d.grid()[i], d.values()[i]});
    }
}

}  // namespace

ToySetup toy_setup(const ExperimentConfig& cfg, double epsilon)
{
    ToySetup s;
    std::vector<std::uint32_t> arities;
    for (auto a : cfg.integers("arities")) {
        arities.push_back(static_cast<std::uint32_t>(a));
    }
    require(arities == std::vector<std::uint32_t>{2, 2, 2},
            "toy experiments: the toy data has exactly three binary variables (arities = 2,2,2)");
    require(cfg.text("query_set") == "full-one-hot", "toy experiments: only the full one-hot query set is supported");
    s.domain = DiscreteDomain(arities);
    s.qm = QueryModel::full_one_hot(s.domain);
    s.n_x = cfg.count("n_x");
    const auto& coeffs = cfg.reals("coeffs");
    require(coeffs.size() == 2, "toy experiments: coeffs must have two entries");
    s.coeffs = Eigen::Vector2d(coeffs[0], coeffs[1]);
    s.privacy = PrivacyParams{epsilon, cfg.real("delta"), cfg.real("sensitivity")};
    s.privacy.validate();

    s.napsu.prior_scale = cfg.real("napsu_prior_scale");
    s.napsu.hmc.chains = static_cast<int>(cfg.count("napsu_chains"));
    s.napsu.hmc.warmup = static_cast<int>(cfg.count("napsu_warmup"));
    s.napsu.hmc.draws = static_cast<int>(cfg.count("napsu_draws"));
    s.napsu.hmc.target_accept = cfg.real("napsu_target_accept");

    if (cfg.values().count("mwg_hmc_step")) {
        s.mwg.hmc_step = cfg.real("mwg_hmc_step");
        s.mwg.hmc_leapfrog_steps = static_cast<int>(cfg.count("mwg_leapfrog_steps"));
        s.mwg.count_move_repeats = static_cast<int>(cfg.count("mwg_count_move_repeats"));
        s.mwg.total_samples = cfg.count("mwg_total_samples");
        s.mwg.chains = static_cast<int>(cfg.count("mwg_chains"));
        s.mwg.warmup_fraction = cfg.real("mwg_warmup_fraction");
        s.mwg.prior_scale = cfg.real("mwg_prior_scale");
        s.target_components = cfg.count("target_components");
    }
    s.intercept = cfg.flag("intercept");
    s.prior = LogRegPrior::isotropic(s.intercept ? 3 : 2, cfg.real("logreg_prior_variance"));
    s.samples_per_dataset = cfg.count("samples_per_dataset");
    s.grid_points = cfg.count("grid_points");
    return s;
}

ToyRelease toy_release(const ToySetup& setup, RngStream rng)
{
    ToyRelease r;
    r.real = simulate_toy_data(setup.n_x, setup.coeffs, rng);
    r.records = toy_records(r.real);
    const Eigen::VectorXd q = setup.qm.query_values(r.records);
    r.true_counts.assign(q.data(), q.data() + q.size());
    const double sigma = calibrate_sigma(setup.privacy);
    r.noisy = gaussian_mechanism(r.true_counts, sigma, rng, setup.privacy);
    return r;
}

NapsuPosterior toy_napsu(const ToySetup& setup, const ToyRelease& release, const RngStream& rng)
{
    return napsu_fit(setup.qm, release.noisy, setup.n_x, setup.napsu, rng);
}

MixturePosterior toy_mixture(const ToySetup& setup, const NapsuPosterior& posterior, std::size_t m,
                             std::size_t n_star, const RngStream& rng)
{
    return synthesize_and_mix(maxent_generator(posterior, setup.qm, m),
                              logreg_laplace_analyzer(setup.domain, setup.prior, setup.intercept), m, n_star,
                              setup.samples_per_dataset, rng.substream(0), rng.substream(1));
}

ExactTarget toy_exact_target(const ToySetup& setup, const ToyRelease& release, const RngStream& rng)
{
    ExactTarget t{MixturePosterior{}, mwg_sample(setup.qm, release.noisy, static_cast<std::int64_t>(setup.n_x),
                                                 setup.mwg, rng.substream(0))};
    const std::size_t draws = t.chain.counts.size();
    const std::size_t comps = std::min(setup.target_components, draws);
    std::vector<ComponentPosterior> components(comps, ComponentPosterior{GaussianDist(0.0, 1.0)});
    parallel_for(comps, [&](std::size_t i) {
        // Order of reconstructed records cannot change the fit, so the
        // counts are fitted directly.
        const CountVector& s = t.chain.counts[i * draws / comps];
        const LaplacePosterior post = laplace_fit(counts_to_logreg(s.s, setup.domain, setup.intercept), setup.prior);
        components[i] = MvGaussian(post.mode, post.covariance);
    });
    t.mixture = mix_components(std::move(components), setup.samples_per_dataset, rng.substream(1));
    return t;
}

LaplacePosterior toy_real_posterior(const ToySetup& setup, const ToyRelease& release)
{
    return laplace_fit(records_to_logreg(release.records, setup.domain, setup.intercept), setup.prior);
}

Eigen::VectorXd toy_truth(const ToySetup& setup)
{
    if (!setup.intercept) {
        return setup.coeffs;
    }
    return Eigen::Vector3d(0.0, setup.coeffs(0), setup.coeffs(1));
}

std::vector<double> marginal_tvs(const MixturePosterior& a, const MixturePosterior& b, std::size_t grid_points)
{
    require(a.dim() == b.dim(), "marginal_tvs: mixtures differ in dimension");
    std::vector<double> out;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const auto grid = marginal_grid(a, b, j, grid_points);
        out.push_back(tv_distance_grid(mixture_density(a, grid, j), mixture_density(b, grid, j)));
    }
    return out;
}

ResultBundle run_toy_dp_logreg(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const auto& eps = cfg.reals("epsilons");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t m = cfg.count("m");
    const std::size_t n_star = synthetic_size(cfg.count("n_x"), cfg.real("c"));

    struct Run {
        ToyRelease release;
        NapsuPosterior napsu;
        MixturePosterior mixture;
        ExactTarget target;
        LaplacePosterior real;
        std::vector<double> tv_mix, tv_real;
    };
    std::vector<std::vector<Run>> runs(reps, std::vector<Run>(eps.size()));
    parallel_for(reps * eps.size(), [&](std::size_t idx) {
        const std::size_t rep = idx / eps.size(), e = idx % eps.size();
        const ToySetup setup = toy_setup(cfg, eps[e]);
        const RngStream root = repetition_stream(cfg, rep).substream(e);
        Run& r = runs[rep][e];
        r.release = toy_release(setup, root.substream(0));
        r.napsu = toy_napsu(setup, r.release, root.substream(1));
        r.target = toy_exact_target(setup, r.release, root.substream(2));
        r.mixture = toy_mixture(setup, r.napsu, m, n_star, root.substream(3));
        r.real = toy_real_posterior(setup, r.release);
        r.tv_mix = marginal_tvs(r.mixture, r.target.mixture, setup.grid_points);
        const MixturePosterior real_mix = mix_components({MvGaussian(r.real.mode, r.real.covariance)}, 1, root);
        r.tv_real = marginal_tvs(real_mix, r.target.mixture, setup.grid_points);
    });

    const ToySetup setup0 = toy_setup(cfg, eps.front());
    const Eigen::VectorXd truth = toy_truth(setup0);
    Table& tv = b.add_table("tv", {"epsilon", "rep", "coef", "tv_mixture_target", "tv_realdata_target"});
    Table& diag = b.add_table("diagnostics", {"epsilon", "rep", "sigma_dp", "napsu_acceptance",
                                              "mwg_theta_acceptance", "mwg_count_acceptance"});
    Table& dens = b.add_table("densities", {"panel", "series", "x", "density"});
    Plot plot{"posteriors", {}, static_cast<int>(truth.size())};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t e = 0; e < eps.size(); ++e) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const Run& r = runs[rep][e];
            for (std::size_t j = 0; j < r.tv_mix.size(); ++j) {
                tv.add_row({eps[e], static_cast<std::int64_t>(rep), static_cast<std::int64_t>(j), r.tv_mix[j],
                            r.tv_real[j]});
            }
            diag.add_row({eps[e], static_cast<std::int64_t>(rep), r.release.noisy.noise_sd(), r.napsu.acceptance_rate,
                          r.target.chain.theta_acceptance(), r.target.chain.count_acceptance()});
        }
        const Run& r0 = runs[0][e];
        const MixturePosterior real_mix = mix_components({MvGaussian(r0.real.mode, r0.real.covariance)}, 1,
                                                         RngStream(0));
        for (std::size_t j = 0; j < r0.tv_mix.size(); ++j) {
            const std::string panel = "eps=" + num(eps[e]) + ",coef=" + std::to_string(j);
            const auto grid = marginal_grid(r0.mixture, r0.target.mixture, j, setup0.grid_points);
            add_density_rows(dens, panel, "mixture", mixture_density(r0.mixture, grid, j));
            add_density_rows(dens, panel, "exact-target", mixture_density(r0.target.mixture, grid, j));
            add_density_rows(dens, panel, "real-data", mixture_density(real_mix, grid, j));
            plot.panels.push_back(
                Panel{panel + " (rep 0)",
                      "coefficient " + std::to_string(j),
                      "density",
                      {Series{"mixture", "densities", "x", "density", {{"panel", panel}, {"series", "mixture"}}},
                       Series{"p(Q|s~)", "densities", "x", "density", {{"panel", panel}, {"series", "exact-target"}},
                              true},
                       Series{"non-DP", "densities", "x", "density", {{"panel", panel}, {"series", "real-data"}}}},
                      {truth(static_cast<Eigen::Index>(j))}});
            std::vector<double> v;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                v.push_back(runs[rep][e].tv_mix[j]);
            }
            res.push_back({{"epsilon", eps[e]}, {"coef", j}, {"mean_tv_mixture_target", mean_of(v)}});
        }
    }
    b.plots.push_back(std::move(plot));
    b.summary["results"]["tv"] = res;
    b.summary["metadata"]["target_estimator"] =
        "mixture of Laplace posteriors over strided Metropolis-within-Gibbs count draws of p(X|s~)";
    b.summary["metadata"]["mwg_mass_matrix"] = "identity";
    b.summary["metadata"]["mwg_theta_init_sd"] = 1.0;
    b.summary["metadata"]["n_star"] = n_star;
    return b;
}

ResultBundle run_toy_sweep(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const auto& eps = cfg.reals("epsilons");
    const auto ms = cfg.counts("sweep_m");
    const auto& cs = cfg.reals("sweep_c");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t n_x = cfg.count("n_x");
    const std::size_t cells = ms.size() * cs.size();

    // tvs[e][rep][cell][coef]
    std::vector<std::vector<std::vector<std::vector<double>>>> tvs(
        eps.size(), std::vector<std::vector<std::vector<double>>>(reps, std::vector<std::vector<double>>(cells)));
    parallel_for(reps * eps.size(), [&](std::size_t idx) {
        const std::size_t rep = idx / eps.size(), e = idx % eps.size();
        const ToySetup setup = toy_setup(cfg, eps[e]);
        const RngStream root = repetition_stream(cfg, rep).substream(e);
        const ToyRelease release = toy_release(setup, root.substream(0));
        const NapsuPosterior napsu = toy_napsu(setup, release, root.substream(1));
        const ExactTarget target = toy_exact_target(setup, release, root.substream(2));
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const std::size_t m = ms[cell / cs.size()];
            const double c = cs[cell % cs.size()];
            const auto mix = toy_mixture(setup, napsu, m, synthetic_size(n_x, c), root.substream(3 + cell));
            tvs[e][rep][cell] = marginal_tvs(mix, target.mixture, setup.grid_points);
        }
    });

    const std::size_t dims = tvs[0][0][0].size();
    Table& tv = b.add_table("tv", {"epsilon", "rep", "m", "c", "coef", "tv_mixture_target"});
    Table& tvm = b.add_table("tv_mean", {"epsilon", "m", "c", "coef", "mean_tv"});
    Plot plot{"tv_sweep", {}, static_cast<int>(dims)};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t e = 0; e < eps.size(); ++e) {
        for (std::size_t j = 0; j < dims; ++j) {
            Panel panel{"eps=" + num(eps[e]) + ", coef " + std::to_string(j), "c = n*/n_x", "mean TV", {}, {}};
            std::vector<std::vector<double>> grid_means(ms.size(), std::vector<double>(cs.size()));
            for (std::size_t cell = 0; cell < cells; ++cell) {
                const auto m = static_cast<std::int64_t>(ms[cell / cs.size()]);
                const double c = cs[cell % cs.size()];
                std::vector<double> v;
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    tv.add_row({eps[e], static_cast<std::int64_t>(rep), m, c, static_cast<std::int64_t>(j),
                                tvs[e][rep][cell][j]});
                    v.push_back(tvs[e][rep][cell][j]);
                }
                grid_means[cell / cs.size()][cell % cs.size()] = mean_of(v);
                tvm.add_row({eps[e], m, c, static_cast<std::int64_t>(j), mean_of(v)});
            }
            for (auto m : ms) {
                panel.series.push_back(Series{"m=" + std::to_string(m),
                                              "tv_mean",
                                              "c",
                                              "mean_tv",
                                              {{"epsilon", eps[e]},
                                               {"m", static_cast<std::int64_t>(m)},
                                               {"coef", static_cast<std::int64_t>(j)}}});
            }
            plot.panels.push_back(std::move(panel));
            // Diagonal of the grid: (m_i, c_i) for i along the shorter side.
            std::vector<double> diagonal;
            for (std::size_t i = 0; i < std::min(ms.size(), cs.size()); ++i) {
                diagonal.push_back(grid_means[i][i]);
            }
            bool monotone = true;
            for (std::size_t i = 1; i < diagonal.size(); ++i) {
                monotone = monotone && diagonal[i] <= diagonal[i - 1] + 0.02;
            }
            res.push_back({{"epsilon", eps[e]}, {"coef", j}, {"diagonal_mean_tv", diagonal},
                           {"diagonal_monotone_within_0.02", monotone}});
        }
    }
    b.plots.push_back(std::move(plot));
    b.summary["results"]["diagonals"] = res;
    b.summary["metadata"]["target_estimator"] =
        "mixture of Laplace posteriors over strided Metropolis-within-Gibbs count draws of p(X|s~)";
    b.summary["metadata"]["mwg_mass_matrix"] = "identity";
    b.summary["metadata"]["mwg_theta_init_sd"] = 1.0;
    return b;
}

ResultBundle run_coverage_study(const ExperimentConfig& cfg)
{
    ResultBundle b = start_bundle(cfg);
    const auto& eps = cfg.reals("epsilons");
    const auto& levels = cfg.reals("levels");
    const std::size_t reps = cfg.count("repetitions");
    const std::size_t m = cfg.count("m");
    const std::size_t n_star = synthetic_size(cfg.count("n_x"), cfg.real("c"));

    // intervals[e][rep][level][coef]
    std::vector<std::vector<std::vector<std::vector<Interval>>>> intervals(
        eps.size(), std::vector<std::vector<std::vector<Interval>>>(reps));
    std::vector<std::vector<double>> acceptance(eps.size(), std::vector<double>(reps));
    parallel_for(reps * eps.size(), [&](std::size_t idx) {
        const std::size_t rep = idx / eps.size(), e = idx % eps.size();
        const ToySetup setup = toy_setup(cfg, eps[e]);
        const RngStream root = repetition_stream(cfg, rep).substream(e);
        const ToyRelease release = toy_release(setup, root.substream(0));
        const NapsuPosterior napsu = toy_napsu(setup, release, root.substream(1));
        acceptance[e][rep] = napsu.acceptance_rate;
        const MixturePosterior mix = toy_mixture(setup, napsu, m, n_star, root.substream(3));
        auto& out = intervals[e][rep];
        for (double level : levels) {
            std::vector<Interval> per_coef;
            for (std::size_t j = 0; j < mix.dim(); ++j) {
                per_coef.push_back(credible_interval(mix, level, j));
            }
            out.push_back(std::move(per_coef));
        }
    });

    const Eigen::VectorXd truth_v = toy_truth(toy_setup(cfg, eps.front()));
    const std::vector<double> truth(truth_v.data(), truth_v.data() + truth_v.size());
    Table& iv = b.add_table("intervals", {"epsilon", "rep", "level", "coef", "lo", "hi", "truth", "covered"});
    Table& cov = b.add_table("coverage", {"epsilon", "level", "coef", "coverage", "mean_width", "repetitions"});
    Table& ideal = b.add_table("ideal", {"level", "coverage"});
    for (double l : levels) {
        ideal.add_row({l, l});
    }
    Plot cplot{"coverage", {}, static_cast<int>(std::min<std::size_t>(eps.size(), 2))};
    Plot wplot{"width", {}, static_cast<int>(std::min<std::size_t>(eps.size(), 2))};
    nlohmann::json res = nlohmann::json::array();
    for (std::size_t e = 0; e < eps.size(); ++e) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            for (std::size_t l = 0; l < levels.size(); ++l) {
                for (std::size_t j = 0; j < truth.size(); ++j) {
                    const Interval& x = intervals[e][rep][l][j];
                    iv.add_row({eps[e], static_cast<std::int64_t>(rep), levels[l], static_cast<std::int64_t>(j), x.lo,
                                x.hi, truth[j], static_cast<std::int64_t>(x.contains(truth[j]) ? 1 : 0)});
                }
            }
        }
        const auto rows = coverage_width_report(intervals[e], truth, levels);
        Panel cp{"coverage, eps=" + num(eps[e]), "credible level", "empirical coverage", {}, {}};
        Panel wp{"width, eps=" + num(eps[e]), "credible level", "mean width", {}, {}};
        cp.series.push_back(Series{"ideal", "ideal", "level", "coverage", {}, true});
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const std::vector<std::pair<std::string, Cell>> where{{"epsilon", eps[e]},
                                                                  {"coef", static_cast<std::int64_t>(j)}};
            cp.series.push_back(Series{"coef " + std::to_string(j), "coverage", "level", "coverage", where});
            wp.series.push_back(Series{"coef " + std::to_string(j), "coverage", "level", "mean_width", where});
        }
        cplot.panels.push_back(std::move(cp));
        wplot.panels.push_back(std::move(wp));
        for (const auto& r : rows) {
            cov.add_row({eps[e], r.level, static_cast<std::int64_t>(r.coefficient), r.coverage, r.mean_width,
                         static_cast<std::int64_t>(r.repetitions)});
            res.push_back({{"epsilon", eps[e]},
                           {"level", r.level},
                           {"coef", r.coefficient},
                           {"coverage", r.coverage},
                           {"mean_width", r.mean_width}});
        }
        b.summary["results"]["napsu_mean_acceptance"][num(eps[e])] = mean_of(acceptance[e]);
    }
    b.plots.push_back(std::move(cplot));
    b.plots.push_back(std::move(wplot));
    b.summary["results"]["coverage"] = res;
    b.summary["metadata"]["n_star"] = n_star;
    return b;
}

}  // namespace synmix::experiment
