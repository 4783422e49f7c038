// Benchmark/verification CLI.
//
// Subcommands:
//   run     parse a config, run every (optimizer, seed) trial, write CSV
//           telemetry + summary (+ optional SVG loss plot)
//   verify  run the built-in property/oracle suite
//   sde     continuous-time momentum simulation sweep -> CSV
//   bv      Monte Carlo bias/variance report for the gradient estimators
//
// Exit codes: 0 success, 1 trial/criterion failure(s), 2 bad configuration.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgdf/acceptance.hpp"
#include "sgdf/analysis.hpp"
#include "sgdf/config.hpp"
#include "sgdf/csv.hpp"
#include "sgdf/experiment.hpp"
#include "sgdf/filter.hpp"
#include "sgdf/svg.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& arg) {
    std::vector<std::uint64_t> out;
    std::string cur;
    std::istringstream in(arg);
    while (std::getline(in, cur, ',')) {
        std::size_t pos = 0;
        out.push_back(std::stoull(cur, &pos));
        if (pos != cur.size()) throw std::runtime_error("bad seed '" + cur + "'");
    }
    if (out.empty()) throw std::runtime_error("--seeds must name at least one seed");
    return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir_override,
            const std::string& seeds_override, std::size_t jobs) {
    sgdf::ExperimentConfig cfg;
    try {
        cfg = sgdf::parse_config(read_file(config_path));
        if (!seeds_override.empty()) cfg.run.seeds = parse_seed_list(seeds_override);
        if (!out_dir_override.empty()) cfg.run.out_dir = out_dir_override;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    const std::filesystem::path out_dir(cfg.run.out_dir);
    std::filesystem::create_directories(out_dir);

    const sgdf::ExperimentResult result = sgdf::run_experiment(cfg, jobs);

    bool any_failed = false;
    for (const sgdf::TrialResult& tr : result.trials) {
        const std::string file =
            tr.optimizer_name + "_seed" + std::to_string(tr.seed) + ".csv";
        sgdf::write_trajectory_csv(tr.records, (out_dir / file).string());
        if (tr.failed) {
            any_failed = true;
            std::cerr << "trial failed: " << tr.optimizer_name << " seed " << tr.seed
                      << " at step " << tr.failed_step << " (" << tr.failure_reason << ")\n";
        }
    }
    sgdf::write_csv(sgdf::kSummaryHeader, sgdf::summary_rows(result),
                    (out_dir / "summary.csv").string());

    for (const sgdf::OptimizerSummary& s : result.summaries) {
        std::cout << s.name << ": final loss " << s.final_loss_mean << " +- " << s.final_loss_std
                  << ", best loss " << s.best_loss_mean << " +- " << s.best_loss_std;
        if (s.n_failed) std::cout << " (" << s.n_failed << "/" << s.n_trials << " trials failed)";
        std::cout << '\n';
    }

    if (cfg.run.svg) {
        std::vector<sgdf::PlotSeries> series;
        for (const sgdf::OptimizerSummary& s : result.summaries) {
            sgdf::PlotSeries ps;
            ps.label = s.name;
            sgdf::mean_loss_curve(result, s.name, ps.x, ps.y);
            if (!ps.x.empty()) series.push_back(std::move(ps));
        }
        if (!series.empty()) {
            sgdf::AxesSpec axes;
            axes.title = "mean loss across seeds";
            axes.x_label = "step";
            axes.y_label = "loss";
            bool positive = true;
            for (const sgdf::PlotSeries& ps : series)
                for (double v : ps.y)
                    if (!(v > 0.0)) positive = false;
            axes.log_y = positive;
            sgdf::emit_svg_plot(series, axes, (out_dir / "loss.svg").string());
        }
    }

    return any_failed ? 1 : 0;
}

int cmd_verify() {
    const sgdf::AcceptanceReport report = sgdf::run_acceptance_suite(std::cout);
    return report.all_passed() ? 0 : 1;
}

int cmd_sde(double beta, double u, double alpha, double sigma, double dt, double t_end,
            std::uint64_t seed, const std::string& out_path) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        std::cerr << "--beta must lie in [0,1)\n";
        return 2;
    }
    sgdf::RngStream rng(seed, 0);
    sgdf::SdeOptions opts;
    opts.theta0 = sgdf::Vector{1.0};
    opts.record_stride = 10;
    sgdf::SdeTrajectory traj;
    try {
        // Gradient of the scalar test well f(x) = x^2/2.
        const sgdf::GradFn grad = [](const sgdf::Vector& th) { return sgdf::Vector{th[0]}; };
        traj = sgdf::sde_simulate(beta, u, alpha, sigma, grad, dt, t_end, rng, opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        rows.push_back({sgdf::format_double(traj.times[i]), sgdf::format_double(traj.m[i][0]),
                        sgdf::format_double(traj.theta[i][0])});
    }
    sgdf::write_csv({"t", "m", "theta"}, rows, out_path);
    std::cout << "wrote " << traj.times.size() << " states to " << out_path << '\n';
    return 0;
}

int cmd_bv(std::size_t trials, std::size_t steps, double beta1, double sigma,
           std::uint64_t seed) {
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        std::cerr << "--beta1 must lie in [0,1)\n";
        return 2;
    }
    if (trials < 100) {
        std::cerr << "--trials must be >= 100\n";
        return 2;
    }
    const double c = 1.0;
    struct Row {
        const char* name;
        bool want_ghat;
    };
    const Row rows[] = {{"ema", false}, {"filtered", true}};
    std::cout << "estimator,trials,bias_sq,variance,mse,std_error\n";
    for (const Row& row : rows) {
        auto fn = [&](std::uint64_t trial) {
            sgdf::RngStream rng(seed, trial);
            sgdf::FilterState st(1);
            sgdf::Vector gh(1), mh(1), kk(1), g(1);
            for (std::size_t t = 0; t < steps; ++t) {
                g[0] = c + sigma * rng.gaussian();
                sgdf::filter_step(st, g, beta1, 0.999, 1e-8, 1.0, false, gh, mh, kk);
            }
            return sgdf::Vector{row.want_ghat ? gh[0] : mh[0]};
        };
        const sgdf::BiasVarianceReport rep =
            sgdf::mc_bias_variance(fn, sgdf::Vector{c}, trials);
        std::cout << row.name << ',' << rep.n_trials << ',' << sgdf::format_double(rep.bias_sq)
                  << ',' << sgdf::format_double(rep.variance) << ','
                  << sgdf::format_double(rep.mse) << ',' << sgdf::format_double(rep.std_error)
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradient-filtering optimizer benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir_override, seeds_override;
    std::size_t jobs = 1;
    CLI::App* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out-dir", out_dir_override, "override [run] out_dir");
    run->add_option("--seeds", seeds_override, "override [run] seeds (comma-separated)");
    run->add_option("--jobs", jobs, "worker threads (results stay deterministic)");

    CLI::App* verify = app.add_subcommand("verify", "run the property/oracle suite");

    double beta = 0.9, u = 1.0, alpha = 0.0, sigma = 1.0, dt = 0.01, t_end = 100.0;
    std::uint64_t sde_seed = 0;
    std::string sde_out = "sde.csv";
    CLI::App* sde = app.add_subcommand("sde", "simulate the continuous-time momentum model");
    sde->add_option("--beta", beta, "momentum coefficient in [0,1)");
    sde->add_option("--u", u, "momentum coupling");
    sde->add_option("--alpha", alpha, "parameter step size (0 freezes theta)");
    sde->add_option("--sigma", sigma, "gradient noise std");
    sde->add_option("--dt", dt, "Euler step (must be <= 0.01/(1-beta))");
    sde->add_option("--t-end", t_end, "simulated time horizon");
    sde->add_option("--seed", sde_seed, "noise seed");
    sde->add_option("--out", sde_out, "output CSV path");

    std::size_t bv_trials = 1000, bv_steps = 200;
    double bv_beta1 = 0.9, bv_sigma = 1.0;
    std::uint64_t bv_seed = 0;
    CLI::App* bv = app.add_subcommand("bv", "bias/variance report for the estimators");
    bv->add_option("--trials", bv_trials, "Monte Carlo trials (>= 100)");
    bv->add_option("--steps", bv_steps, "filter steps per trial");
    bv->add_option("--beta1", bv_beta1, "first-moment coefficient");
    bv->add_option("--sigma", bv_sigma, "gradient noise std");
    bv->add_option("--seed", bv_seed, "base seed (trial index is the stream id)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir_override, seeds_override, jobs);
        if (verify->parsed()) return cmd_verify();
        if (sde->parsed())
            return cmd_sde(beta, u, alpha, sigma, dt, t_end, sde_seed, sde_out);
        if (bv->parsed()) return cmd_bv(bv_trials, bv_steps, bv_beta1, bv_sigma, bv_seed);
    } catch (const sgdf::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
