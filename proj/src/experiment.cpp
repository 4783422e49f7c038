#include "sgdf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "sgdf/common.hpp"
#include "sgdf/rng.hpp"

namespace sgdf {

namespace {

bool variant_has_gain(Variant v) {
    return v == Variant::sgdf || v == Variant::filter_adam || v == Variant::sign_sgdf;
}

TrialResult run_trial(const ExperimentConfig& cfg, const StochasticObjective& obj,
                      const NamedOptimizer& named, std::uint64_t seed) {
    TrialResult out;
    out.optimizer_name = named.name;
    out.seed = seed;

    const Vector theta0 = cfg.run.theta0 ? *cfg.run.theta0 : default_theta0(cfg.objective);
    RngStream rng(seed, 0);
    Optimizer opt(named.config, theta0);

    const bool has_gain = variant_has_gain(named.config.variant);
    const std::optional<Vector> theta_star = obj.optimum();
    const double f_star = theta_star ? obj.loss(*theta_star) : 0.0;

    out.best_loss = std::numeric_limits<double>::infinity();
    double cum_regret = 0.0;

    for (std::uint64_t t = 1; t <= cfg.run.steps; ++t) {
        try {
            const Vector g = obj.noisy_grad(opt.theta(), rng);
            opt.step(g);
        } catch (const numeric_error& e) {
            out.failed = true;
            out.failed_step = t;
            out.failure_reason = e.what();
            return out;
        }

        const double loss = obj.loss(opt.theta());
        out.best_loss = std::min(out.best_loss, loss);
        if (theta_star) cum_regret += loss - f_star;

        if (t % cfg.run.record_every == 0 || t == cfg.run.steps) {
            TrajectoryRecord rec;
            rec.step = t;
            rec.loss = loss;
            const Vector grad = obj.true_grad(opt.theta());
            rec.grad_norm_sq = dot(grad, grad);
            rec.theta_norm = norm2(opt.theta());
            if (has_gain && !opt.state().gain.empty()) {
                const Vector& k = opt.state().gain;
                double kmin = k[0], kmax = k[0], ksum = 0.0;
                for (double v : k) {
                    kmin = std::min(kmin, v);
                    kmax = std::max(kmax, v);
                    ksum += v;
                }
                rec.k_mean = ksum / static_cast<double>(k.size());
                rec.k_min = kmin;
                rec.k_max = kmax;
            }
            if (theta_star) rec.cum_regret = cum_regret;
            out.records.push_back(rec);
        }
    }

    out.final_loss = obj.loss(opt.theta());
    out.theta_final = opt.theta();
    return out;
}

void mean_std(const std::vector<double>& xs, double& mean, double& std_out) {
    mean = 0.0;
    std_out = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    std_out = std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
    if (cfg.optimizers.empty()) throw std::invalid_argument("run_experiment: no optimizers");
    if (cfg.run.steps < 1) throw std::invalid_argument("run_experiment: steps must be >= 1");
    if (cfg.run.seeds.empty()) throw std::invalid_argument("run_experiment: seeds must be nonempty");
    if (cfg.run.record_every < 1) {
        throw std::invalid_argument("run_experiment: record_every must be >= 1");
    }
    for (const NamedOptimizer& n : cfg.optimizers) n.config.validate();

    const ObjectivePtr obj = make_objective(cfg.objective);

    struct Task {
        std::size_t opt_index;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t oi = 0; oi < cfg.optimizers.size(); ++oi)
        for (std::uint64_t seed : cfg.run.seeds) tasks.push_back(Task{oi, seed});

    ExperimentResult result;
    result.trials.resize(tasks.size());

    const std::size_t n_workers = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            try {
                result.trials[i] =
                    run_trial(cfg, *obj, cfg.optimizers[task.opt_index], task.seed);
            } catch (const std::exception& e) {
                // Defensive: anything escaping run_trial's own handler still
                // only sinks this one trial.
                TrialResult& tr = result.trials[i];
                tr.optimizer_name = cfg.optimizers[task.opt_index].name;
                tr.seed = task.seed;
                tr.failed = true;
                tr.failed_step = 0;
                tr.failure_reason = e.what();
            }
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    // Summaries accumulate in task order (seed order within each optimizer),
    // independent of which worker finished first.
    const std::size_t n_seeds = cfg.run.seeds.size();
    for (std::size_t oi = 0; oi < cfg.optimizers.size(); ++oi) {
        OptimizerSummary s;
        s.name = cfg.optimizers[oi].name;
        std::vector<double> finals, bests;
        for (std::size_t si = 0; si < n_seeds; ++si) {
            const TrialResult& tr = result.trials[oi * n_seeds + si];
            ++s.n_trials;
            if (tr.failed) {
                ++s.n_failed;
            } else {
                finals.push_back(tr.final_loss);
                bests.push_back(tr.best_loss);
            }
        }
        mean_std(finals, s.final_loss_mean, s.final_loss_std);
        mean_std(bests, s.best_loss_mean, s.best_loss_std);
        result.summaries.push_back(std::move(s));
    }
    return result;
}

void mean_loss_curve(const ExperimentResult& result, const std::string& optimizer_name,
                     std::vector<double>& steps_out, std::vector<double>& loss_out) {
    steps_out.clear();
    loss_out.clear();
    std::vector<const TrialResult*> ok;
    for (const TrialResult& tr : result.trials)
        if (tr.optimizer_name == optimizer_name && !tr.failed) ok.push_back(&tr);
    if (ok.empty()) return;
    std::size_t len = ok.front()->records.size();
    for (const TrialResult* tr : ok) len = std::min(len, tr->records.size());
    for (std::size_t i = 0; i < len; ++i) {
        double acc = 0.0;
        for (const TrialResult* tr : ok) acc += tr->records[i].loss;
        steps_out.push_back(static_cast<double>(ok.front()->records[i].step));
        loss_out.push_back(acc / static_cast<double>(ok.size()));
    }
}

const std::vector<std::string> kSummaryHeader = {
    "optimizer", "trials", "failed", "final_loss_mean", "final_loss_std",
    "best_loss_mean", "best_loss_std"};

std::vector<std::vector<std::string>> summary_rows(const ExperimentResult& result) {
    std::vector<std::vector<std::string>> rows;
    for (const OptimizerSummary& s : result.summaries) {
        rows.push_back({s.name, std::to_string(s.n_trials), std::to_string(s.n_failed),
                        format_double(s.final_loss_mean), format_double(s.final_loss_std),
                        format_double(s.best_loss_mean), format_double(s.best_loss_std)});
    }
    return rows;
}

}  // namespace sgdf
