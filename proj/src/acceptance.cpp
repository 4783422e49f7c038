#include "sgdf/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "sgdf/analysis.hpp"
#include "sgdf/filter.hpp"
#include "sgdf/objectives.hpp"
#include "sgdf/optimizer.hpp"
#include "sgdf/rng.hpp"

namespace sgdf {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    if (scale == 0.0) return 0.0;
    return std::fabs(a - b) / scale;
}

// ---- 1: single-step hand trace of the filter ------------------------------
// g1 = 1 with beta1 = 0.9, beta2 = 0.999, eps = 1e-8 must give exactly
// m = 0.1, s = 8.1e-4, mhat = 1, shat = 8.1e-3, K in [0.999998, 1), ghat = 1.
CriterionResult c01_hand_trace() {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8, g1 = 1.0;
    const double tol = 1e-9;

    const Vector g{g1};
    const Vector m = ema_update(Vector{0.0}, g, b1);
    const Vector s = residual_second_moment(Vector{0.0}, g, m, b2);
    const Vector mhat = bias_correct_mean(m, b1, 1);
    const Vector shat = corrected_variance(s, b1, b2, 1);
    const Vector k = wiener_gain(shat, g, mhat, eps);
    const Vector ks = power_scale(k, 0.5);
    const Vector ghat = fuse(mhat, g, ks);

    double err = 0.0;
    err = std::max(err, rel_diff(m[0], 0.1));
    err = std::max(err, rel_diff(s[0], 8.1e-4));
    err = std::max(err, rel_diff(mhat[0], 1.0));
    err = std::max(err, rel_diff(shat[0], 8.1e-3));
    err = std::max(err, rel_diff(ghat[0], 1.0));
    const bool k_in_range = k[0] >= 0.999998 && k[0] < 1.0;

    // The fused kernel must reproduce the composed operations.
    FilterState st(1);
    Vector gh(1), mh(1), kk(1);
    filter_step(st, g, b1, b2, eps, 0.5, false, gh, mh, kk);
    double kernel_err = 0.0;
    kernel_err = std::max(kernel_err, rel_diff(st.m[0], m[0]));
    kernel_err = std::max(kernel_err, rel_diff(st.s[0], s[0]));
    kernel_err = std::max(kernel_err, rel_diff(mh[0], mhat[0]));
    kernel_err = std::max(kernel_err, rel_diff(kk[0], k[0]));
    kernel_err = std::max(kernel_err, rel_diff(gh[0], ghat[0]));

    const bool pass = err <= tol && k_in_range && kernel_err <= 1e-12;
    std::string detail = "max rel err " + fmt(err) + " (tol " + fmt(tol) + "), K=" + fmt(k[0]) +
                         (k_in_range ? " in" : " OUT of") + " [0.999998,1), kernel agreement " +
                         fmt(kernel_err);
    return {1, "filter-hand-trace", pass, detail};
}

// ---- 2: mse = bias^2 + variance ---------------------------------------------
// Five estimator/stream combinations at 1e4 trials each; the decomposition
// gap must stay below 1e-10 + 3 * std_error.
CriterionResult c02_mse_decomposition() {
    const std::size_t trials = 10000;

    struct Combo {
        const char* label;
        std::function<Vector(std::uint64_t)> fn;
        Vector truth;
    };

    auto filtered_estimate = [](std::uint64_t seed, std::uint64_t trial, bool want_ghat) {
        RngStream rng(seed, trial);
        FilterState st(1);
        Vector gh(1), mh(1), kk(1), g(1);
        for (int t = 0; t < 50; ++t) {
            g[0] = 1.0 + rng.gaussian();
            filter_step(st, g, 0.9, 0.999, 1e-8, 1.0, false, gh, mh, kk);
        }
        return Vector{want_ghat ? gh[0] : mh[0]};
    };

    std::vector<Combo> combos;
    combos.push_back({"ema-50step",
                      [&](std::uint64_t i) { return filtered_estimate(101, i, false); },
                      Vector{1.0}});
    combos.push_back({"filtered-50step",
                      [&](std::uint64_t i) { return filtered_estimate(102, i, true); },
                      Vector{1.0}});
    combos.push_back({"raw-gradient",
                      [](std::uint64_t i) {
                          RngStream rng(103, i);
                          return Vector{1.0 + rng.gaussian()};
                      },
                      Vector{1.0}});
    combos.push_back({"sample-mean-30",
                      [](std::uint64_t i) {
                          RngStream rng(104, i);
                          Vector c{1.0, -2.0, 0.5};
                          Vector acc(3, 0.0);
                          for (int k = 0; k < 30; ++k)
                              for (std::size_t j = 0; j < 3; ++j)
                                  acc[j] += c[j] + 2.0 * rng.gaussian();
                          for (double& v : acc) v /= 30.0;
                          return acc;
                      },
                      Vector{1.0, -2.0, 0.5}});
    combos.push_back({"constant",
                      [](std::uint64_t) { return Vector{2.5}; },
                      Vector{1.0}});

    bool pass = true;
    double worst_gap = 0.0, worst_allowed = 0.0;
    std::string worst_label = combos.front().label;
    for (const Combo& c : combos) {
        const BiasVarianceReport rep = mc_bias_variance(c.fn, c.truth, trials);
        const double gap = std::fabs(rep.mse - rep.bias_sq - rep.variance);
        const double allowed = 1e-10 + 3.0 * rep.std_error;
        if (gap > allowed) pass = false;
        if (gap - allowed > worst_gap - worst_allowed) {
            worst_gap = gap;
            worst_allowed = allowed;
            worst_label = c.label;
        }
    }
    std::string detail = std::to_string(combos.size()) + " combos x " + std::to_string(trials) +
                         " trials; worst gap " + fmt(worst_gap) + " vs allowed " +
                         fmt(worst_allowed) + " (" + worst_label + ")";
    return {2, "mse-decomposition", pass, detail};
}

// ---- 3: finite-t variance of the momentum EMA -------------------------------
// Var(m_t) on an iid unit-variance stream at beta1 = 0.9, t = 2000 must match
// (1-b)(1-b^{2t})/(1+b) within 5%, measured over 2e5 independent trials.
CriterionResult c03_variance_correction() {
    const double b1 = 0.9, omb = 1.0 - b1;
    const std::uint64_t t_end = 2000;
    const std::size_t n_trials = 200000;

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t n = 0; n < n_trials; ++n) {
        RngStream rng(202, n);
        double m = 0.0;
        for (std::uint64_t t = 0; t < t_end; ++t) m = b1 * m + omb * rng.gaussian();
        sum += m;
        sumsq += m * m;
    }
    const double nd = static_cast<double>(n_trials);
    const double mean = sum / nd;
    const double var = sumsq / nd - mean * mean;

    const double target = momentum_variance_ratio(b1, t_end);
    const double rel = std::fabs(var - target) / target;
    const bool pass = rel <= 0.05;
    std::string detail = "Var(m_2000)=" + fmt(var) + " vs closed form " + fmt(target) +
                         ", rel err " + fmt(rel) + " (tol 0.05)";
    return {3, "variance-correction", pass, detail};
}

// ---- 4: steady-state variance ordering --------------------------------------
// At beta = 0.9, sigma = 1: EMA 0.0526, SGD 1.0, CM 5.2632, each within 5%,
// and the strict ordering EMA < SGD < CM.
CriterionResult c04_variance_ordering() {
    auto steady_var = [](double beta, double u, std::uint64_t seed) {
        RngStream rng(seed, 0);
        const std::size_t burn = 10000, window = 2000000;
        double m = 0.0;
        for (std::size_t i = 0; i < burn; ++i) m = beta * m + u * rng.gaussian();
        double mean = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < window; ++i) {
            m = beta * m + u * rng.gaussian();
            const double d = m - mean;
            mean += d / static_cast<double>(i + 1);
            m2 += d * (m - mean);
        }
        return m2 / static_cast<double>(window);
    };

    const double ema = steady_var(0.9, 0.1, 301);
    const double sgd = steady_var(0.0, 1.0, 302);
    const double cm = steady_var(0.9, 1.0, 303);

    const double ema_t = closed_form_momentum_variance(0.9, 0.1, 1.0);
    const double sgd_t = 1.0;
    const double cm_t = closed_form_momentum_variance(0.9, 1.0, 1.0);

    const double e1 = std::fabs(ema - ema_t) / ema_t;
    const double e2 = std::fabs(sgd - sgd_t) / sgd_t;
    const double e3 = std::fabs(cm - cm_t) / cm_t;
    const bool ordered = ema < sgd && sgd < cm;
    const bool pass = e1 <= 0.05 && e2 <= 0.05 && e3 <= 0.05 && ordered;
    std::string detail = "ema " + fmt(ema) + "/" + fmt(ema_t) + ", sgd " + fmt(sgd) + "/" +
                         fmt(sgd_t) + ", cm " + fmt(cm) + "/" + fmt(cm_t) +
                         (ordered ? "; ordering ema<sgd<cm holds" : "; ORDERING VIOLATED");
    return {4, "variance-ordering", pass, detail};
}

// ---- 5: the gain minimizes empirical fused MSE ------------------------------
// For 10 random variance pairs, the grid argmin (step 0.01) of the measured
// MSE of (1-K) m + K g must land within +-0.02 of var_m/(var_m+var_g).
CriterionResult c05_gain_optimality() {
    RngStream pick(404, 0);
    const std::size_t n_pairs = 10, n_draws = 200000;
    double max_err = 0.0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const double vm = std::pow(10.0, -2.0 + 4.0 * pick.uniform01());
        const double vg = std::pow(10.0, -2.0 + 4.0 * pick.uniform01());
        const double sm = std::sqrt(vm), sg = std::sqrt(vg);

        RngStream draw(404, 1 + p);
        double a = 0.0, b = 0.0, c = 0.0;  // E dm^2, E dg^2, E dm dg
        for (std::size_t i = 0; i < n_draws; ++i) {
            const double dm = sm * draw.gaussian();
            const double dg = sg * draw.gaussian();
            a += dm * dm;
            b += dg * dg;
            c += dm * dg;
        }
        a /= static_cast<double>(n_draws);
        b /= static_cast<double>(n_draws);
        c /= static_cast<double>(n_draws);

        double best_k = 0.0, best_mse = std::numeric_limits<double>::infinity();
        for (int step = 0; step <= 100; ++step) {
            const double k = 0.01 * step;
            const double mse = (1.0 - k) * (1.0 - k) * a + k * k * b + 2.0 * k * (1.0 - k) * c;
            if (mse < best_mse) {
                best_mse = mse;
                best_k = k;
            }
        }
        const double k_star = optimal_gain_from_variances(vm, vg);
        max_err = std::max(max_err, std::fabs(best_k - k_star));
    }
    const bool pass = max_err <= 0.02;
    std::string detail = std::to_string(n_pairs) + " variance pairs x " +
                         std::to_string(n_draws) + " draws; max |argmin - K*| = " + fmt(max_err) +
                         " (tol 0.02)";
    return {5, "gain-optimality", pass, detail};
}

// ---- 6: scalar Gaussian fusion -----------------------------------------------
// Density-product and linear-combination forms agree to 1e-12; the fused
// variance never exceeds either input and the mean stays between the inputs.
CriterionResult c06_gaussian_fusion() {
    RngStream rng(505, 0);
    const std::size_t n = 10000;
    double max_diff = 0.0;
    bool props = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu_m = -5.0 + 10.0 * rng.uniform01();
        const double mu_g = -5.0 + 10.0 * rng.uniform01();
        const double vm = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
        const double vg = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());

        const GaussianBelief fused = gaussian_fuse({mu_m, vm}, {mu_g, vg});
        const double k = optimal_gain_from_variances(vm, vg);
        const double mean_lin = (1.0 - k) * mu_m + k * mu_g;
        const double var_lin = (1.0 - k) * (1.0 - k) * vm + k * k * vg;

        const double mean_tol = 1e-12 * std::max({1.0, std::fabs(mean_lin), std::fabs(fused.mean)});
        const double var_tol = 1e-12 * std::max({1.0, var_lin, fused.variance});
        max_diff = std::max(max_diff, std::fabs(mean_lin - fused.mean));
        max_diff = std::max(max_diff, std::fabs(var_lin - fused.variance));
        if (std::fabs(mean_lin - fused.mean) > mean_tol) props = false;
        if (std::fabs(var_lin - fused.variance) > var_tol) props = false;

        const double pad = 1e-12 * (1.0 + std::max(std::fabs(mu_m), std::fabs(mu_g)));
        if (fused.variance > std::min(vm, vg) * (1.0 + 1e-12)) props = false;
        if (fused.mean < std::min(mu_m, mu_g) - pad || fused.mean > std::max(mu_m, mu_g) + pad)
            props = false;
    }
    std::string detail = std::to_string(n) + " belief pairs; max form disagreement " +
                         fmt(max_diff) + " (tol 1e-12 scaled); variance/mean bounds " +
                         (props ? "hold" : "VIOLATED");
    return {6, "gaussian-fusion", props, detail};
}

// ---- 7: power scaling as variance inflation ---------------------------------
// sqrt(K) must equal var_m/(var_m + var_g~) with the effective observation
// variance var_g~ = var_m (sqrt(1 + var_g/var_m) - 1), to 1e-12.
CriterionResult c07_power_scaling() {
    RngStream rng(606, 0);
    const std::size_t n = 10000;
    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double vm = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
        const double vg = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
        const double k = optimal_gain_from_variances(vm, vg);
        const double lhs = std::sqrt(k);
        const double vg_eff = effective_observation_variance(vm, vg);
        const double rhs = vm / (vm + vg_eff);
        max_err = std::max(max_err, std::fabs(lhs - rhs));
    }
    const bool pass = max_err <= 1e-12;
    std::string detail = std::to_string(n) + " variance pairs; max |sqrt(K) - K_eff| = " +
                         fmt(max_err) + " (tol 1e-12)";
    return {7, "power-scaling", pass, detail};
}

// ---- 8: continuous-time model conformance -----------------------------------
// (a) noise-free trajectory matches m(t) = uc(1-e^{-(1-b)t})/(1-b) to 5*dt;
// (b) frozen-theta stationary Var(m) within 3% of u^2 s^2/(2(1-b));
// (c) classical-momentum asymptotic bias (u/(1-b) - 1) c within 1%.
CriterionResult c08_sde_conformance() {
    const double beta = 0.9, lambda = 1.0 - beta;

    // (a)
    const double dt_a = 1e-3;
    RngStream rng_a(707, 0);
    SdeOptions opts_a;
    opts_a.theta0 = Vector{0.0};
    opts_a.record_stride = 50;
    const GradFn unit_grad = [](const Vector&) { return Vector{1.0}; };
    const SdeTrajectory traj_a =
        sde_simulate(beta, 1.0, 0.0, 0.0, unit_grad, dt_a, 50.0, rng_a, opts_a);
    double err_a = 0.0;
    for (std::size_t i = 0; i < traj_a.times.size(); ++i) {
        const double closed =
            (1.0 / lambda) * (1.0 - std::exp(-lambda * traj_a.times[i]));
        err_a = std::max(err_a, std::fabs(traj_a.m[i][0] - closed));
    }
    const bool pass_a = err_a <= 5.0 * dt_a;

    // (b)
    bool pass_b = true;
    double worst_b = 0.0;
    std::string b_vals;
    const double us[2] = {0.1, 1.0};
    for (int j = 0; j < 2; ++j) {
        RngStream rng_b(708 + static_cast<std::uint64_t>(j), 0);
        const StationaryMoments mom =
            sde_stationary_moments(beta, us[j], 1.0, 0.0, 0.01, 400.0, 50.0, 2048, rng_b);
        const double target = us[j] * us[j] / (2.0 * lambda);
        const double rel = std::fabs(mom.variance - target) / target;
        worst_b = std::max(worst_b, rel);
        if (rel > 0.03) pass_b = false;
        if (j) b_vals += ", ";
        b_vals += "u=" + fmt(us[j]) + ": " + fmt(mom.variance) + "/" + fmt(target);
    }

    // (c)
    RngStream rng_c(710, 0);
    SdeOptions opts_c;
    opts_c.theta0 = Vector{0.0};
    opts_c.record_stride = 15000;
    const double c_val = 2.0;
    const GradFn c_grad = [c_val](const Vector&) { return Vector{c_val}; };
    const SdeTrajectory traj_c =
        sde_simulate(beta, 1.0, 0.0, 0.0, c_grad, 0.01, 150.0, rng_c, opts_c);
    const double bias_meas = traj_c.m.back()[0] - c_val;
    const double bias_target = (1.0 / lambda - 1.0) * c_val;
    const double rel_c = std::fabs(bias_meas - bias_target) / bias_target;
    const bool pass_c = rel_c <= 0.01;

    const bool pass = pass_a && pass_b && pass_c;
    std::string detail = "(a) max traj err " + fmt(err_a) + " tol " + fmt(5.0 * dt_a) +
                         "; (b) Var(m) " + b_vals + ", worst rel " + fmt(worst_b) +
                         " tol 0.03; (c) bias " + fmt(bias_meas) + " vs " + fmt(bias_target) +
                         ", rel " + fmt(rel_c) + " tol 0.01";
    return {8, "sde-conformance", pass, detail};
}

// ---- 9: sublinear regret growth ----------------------------------------------
// Filtered descent with alpha_t = 0.1/sqrt(t) on a noisy quadratic (d = 20,
// kappa = 10, sigma = 0.5, 10 seeds); the log-log slope of mean R(T) over
// T in [1e2, 1e4] must be <= 0.6.
CriterionResult c09_regret_sublinearity() {
    const ObjectivePtr obj = noisy_quadratic(20, 10.0, 0.5);
    const std::vector<double> sample_t = {100, 178, 316, 562, 1000, 1778, 3162, 5623, 10000};
    std::vector<double> mean_r(sample_t.size(), 0.0);
    const std::size_t n_seeds = 10, t_end = 10000;

    for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
        RngStream rng(seed, 0);
        OptimizerConfig cfg = OptimizerConfig::defaults_for(Variant::sgdf);
        cfg.alpha = Schedule::inverse_sqrt(0.1);
        cfg.gamma = Schedule::inverse_sqrt(0.5);
        Optimizer opt(cfg, Vector(20, 1.0));
        double regret = 0.0;
        std::size_t si = 0;
        for (std::size_t t = 1; t <= t_end; ++t) {
            const Vector g = obj->noisy_grad(opt.theta(), rng);
            opt.step(g);
            regret += obj->loss(opt.theta());  // comparator optimum has loss 0
            if (si < sample_t.size() && static_cast<double>(t) == sample_t[si]) {
                mean_r[si] += regret;
                ++si;
            }
        }
    }
    for (double& v : mean_r) v /= static_cast<double>(n_seeds);

    const double exponent = growth_exponent_fit(sample_t, mean_r);
    const bool pass = exponent <= 0.6;
    std::string detail = "log-log slope of mean R(T), T in [100, 10000]: " + fmt(exponent) +
                         " (required <= 0.6); R(100)=" + fmt(mean_r.front()) + ", R(10000)=" +
                         fmt(mean_r.back());
    return {9, "regret-sublinearity", pass, detail};
}

// ---- 10: running-min gradient-norm decrease ----------------------------------
// Noisy Rosenbrock (sigma = 0.1, 10 seeds, alpha_t = 0.005/sqrt(t)): the
// running min E(T) of the seed-averaged |grad f|^2 must drop by 5x between
// T = 100 and T = 10000.
CriterionResult c10_nonconvex_decrease() {
    const ObjectivePtr obj = rosenbrock(0.1);
    const std::size_t n_seeds = 10, t_end = 10000;
    std::vector<double> mean_gsq(t_end, 0.0);

    for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
        RngStream rng(seed, 0);
        OptimizerConfig cfg = OptimizerConfig::defaults_for(Variant::sgdf);
        cfg.alpha = Schedule::inverse_sqrt(0.005);
        cfg.gamma = Schedule::constant(0.5);
        Optimizer opt(cfg, Vector{0.0, 0.0});
        for (std::size_t t = 1; t <= t_end; ++t) {
            const Vector g = obj->noisy_grad(opt.theta(), rng);
            opt.step(g);
            const Vector grad = obj->true_grad(opt.theta());
            mean_gsq[t - 1] += dot(grad, grad);
        }
    }
    for (double& v : mean_gsq) v /= static_cast<double>(n_seeds);

    const std::vector<double> curve = min_grad_norm_stat(mean_gsq);
    const double e100 = curve[99], e10000 = curve[t_end - 1];
    const double ratio = e100 / e10000;
    const bool pass = e10000 <= 0.2 * e100;
    std::string detail = "E(100)=" + fmt(e100) + ", E(10000)=" + fmt(e10000) +
                         ", improvement " + fmt(ratio) + "x (required >= 5x)";
    return {10, "nonconvex-decrease", pass, detail};
}

// ---- 11: reduction and equivalence identities ---------------------------------
CriterionResult c11_reductions() {
    // (a) beta1 = 0, u = 1 momentum is bitwise SGD on a shared noisy stream.
    bool bitwise = true;
    {
        const ObjectivePtr obj = noisy_quadratic(5, 4.0, 0.3);
        RngStream r1(11, 0), r2(11, 0);
        OptimizerConfig ca = OptimizerConfig::defaults_for(Variant::sgd);
        ca.alpha = Schedule::constant(0.05);
        OptimizerConfig cb = OptimizerConfig::defaults_for(Variant::unified_momentum);
        cb.alpha = Schedule::constant(0.05);
        cb.beta1 = 0.0;
        cb.u = 1.0;
        Optimizer oa(ca, Vector(5, 1.0)), ob(cb, Vector(5, 1.0));
        for (int t = 0; t < 200 && bitwise; ++t) {
            oa.step(obj->noisy_grad(oa.theta(), r1));
            ob.step(obj->noisy_grad(ob.theta(), r2));
            if (std::memcmp(oa.theta().data(), ob.theta().data(), 5 * sizeof(double)) != 0)
                bitwise = false;
        }
    }

    // (b) the first filtered step equals the SGD step to 1e-6 relative.
    double first_step_err = 0.0;
    {
        const Vector theta0{0.7, -1.3, 2.0};
        const Vector g1{1.0, -0.5, 0.25};
        OptimizerConfig cs = OptimizerConfig::defaults_for(Variant::sgd);
        cs.alpha = Schedule::constant(0.05);
        OptimizerConfig cf = OptimizerConfig::defaults_for(Variant::sgdf);
        cf.alpha = Schedule::constant(0.05);
        Optimizer os(cs, theta0), of(cf, theta0);
        os.step(g1);
        of.step(g1);
        for (std::size_t i = 0; i < theta0.size(); ++i) {
            const double da = os.theta()[i] - theta0[i];
            const double db = of.theta()[i] - theta0[i];
            first_step_err = std::max(first_step_err, std::fabs(da - db) / std::fabs(da));
        }
    }

    // (c) the sign update is invariant under positive rescaling (sign(0) = 0).
    bool sign_ok = update_sign(0.0) == 0.0;
    {
        RngStream rng(13, 0);
        for (int i = 0; i < 10000 && sign_ok; ++i) {
            const double v = 3.0 * rng.gaussian();
            const double c = std::pow(10.0, -4.0 + 8.0 * rng.uniform01());
            if (update_sign(c * v) != update_sign(v)) sign_ok = false;
        }
        // and a live step moves every coordinate by exactly -alpha, 0 or +alpha
        OptimizerConfig cfg = OptimizerConfig::defaults_for(Variant::sign_sgdf);
        cfg.alpha = Schedule::constant(0.125);
        Optimizer opt(cfg, Vector{1.0, -2.0, 0.5});
        opt.step(Vector{0.4, -0.2, 0.0});
        const Vector& th = opt.theta();
        const double moves[3] = {th[0] - 1.0, th[1] + 2.0, th[2] - 0.5};
        for (double mv : moves)
            if (mv != 0.125 && mv != -0.125 && mv != 0.0) sign_ok = false;
    }

    // (d) division-free and literal gain agree to 1e-12 relative on a live run.
    double gain_err = 0.0;
    {
        const ObjectivePtr obj = noisy_quadratic(8, 10.0, 0.5);
        RngStream r1(17, 0), r2(17, 0);
        OptimizerConfig cl = OptimizerConfig::defaults_for(Variant::sgdf);
        cl.alpha = Schedule::constant(0.02);
        OptimizerConfig cd = cl;
        cd.division_free_gain = true;
        Optimizer ol(cl, Vector(8, 1.0)), od(cd, Vector(8, 1.0));
        for (int t = 0; t < 500; ++t) {
            ol.step(obj->noisy_grad(ol.theta(), r1));
            od.step(obj->noisy_grad(od.theta(), r2));
            for (std::size_t i = 0; i < 8; ++i)
                gain_err = std::max(gain_err, rel_diff(ol.state().gain[i], od.state().gain[i]));
        }
    }

    const bool pass = bitwise && first_step_err <= 1e-6 && sign_ok && gain_err <= 1e-12;
    std::string detail = std::string("momentum(beta1=0,u=1)==sgd bitwise: ") +
                         (bitwise ? "yes" : "NO") + "; first-step rel err " + fmt(first_step_err) +
                         " (tol 1e-6); sign rescale invariance: " + (sign_ok ? "yes" : "NO") +
                         "; gain-form max rel diff " + fmt(gain_err) + " (tol 1e-12)";
    return {11, "reduction-suite", pass, detail};
}

// ---- 12: filter advantage on a stationary stream ------------------------------
// Frozen parameters, constant gradient c = 1, sigma = 1, beta1 = 0.9,
// gamma = 1, 50 independent streams, 1e5 burn-in steps then a 1e5-step
// measurement window. Required: MSE(ghat) <= MSE(raw gradient) and
// MSE(ghat) <= 1.1 * MSE(bias-corrected EMA).
CriterionResult c12_filter_advantage() {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8, c = 1.0;
    const std::size_t n_streams = 50, burn = 100000, window = 100000;

    double acc_ghat = 0.0, acc_ema = 0.0, acc_raw = 0.0;
    FilterState st;
    Vector gh(1), mh(1), kk(1), g(1);
    for (std::size_t s = 0; s < n_streams; ++s) {
        RngStream rng(9001, s);
        st = FilterState(1);
        for (std::size_t t = 1; t <= burn + window; ++t) {
            g[0] = c + rng.gaussian();
            filter_step(st, g, b1, b2, eps, 1.0, false, gh, mh, kk);
            if (t > burn) {
                const double d1 = gh[0] - c, d2 = mh[0] - c, d3 = g[0] - c;
                acc_ghat += d1 * d1;
                acc_ema += d2 * d2;
                acc_raw += d3 * d3;
            }
        }
    }
    const double denom = static_cast<double>(n_streams) * static_cast<double>(window);
    const double mse_ghat = acc_ghat / denom;
    const double mse_ema = acc_ema / denom;
    const double mse_raw = acc_raw / denom;

    const bool vs_raw = mse_ghat <= mse_raw;
    const bool vs_ema = mse_ghat <= 1.1 * mse_ema;
    const bool pass = vs_raw && vs_ema;
    std::string detail = "MSE ghat=" + fmt(mse_ghat) + ", raw=" + fmt(mse_raw) + " (" +
                         (vs_raw ? "ok" : "VIOLATED") + "), ema=" + fmt(mse_ema) +
                         ", ghat/ema=" + fmt(mse_ghat / mse_ema) + " (required <= 1.1: " +
                         (vs_ema ? "ok" : "VIOLATED") + ")";
    return {12, "filter-advantage", pass, detail};
}

}  // namespace

bool AcceptanceReport::all_passed() const {
    for (const CriterionResult& r : results)
        if (!r.passed) return false;
    return true;
}

std::size_t AcceptanceReport::failed_count() const {
    std::size_t n = 0;
    for (const CriterionResult& r : results)
        if (!r.passed) ++n;
    return n;
}

AcceptanceReport run_acceptance_suite(std::ostream& out) {
    using Check = CriterionResult (*)();
    const Check checks[] = {c01_hand_trace,         c02_mse_decomposition,
                            c03_variance_correction, c04_variance_ordering,
                            c05_gain_optimality,     c06_gaussian_fusion,
                            c07_power_scaling,       c08_sde_conformance,
                            c09_regret_sublinearity, c10_nonconvex_decrease,
                            c11_reductions,          c12_filter_advantage};

    AcceptanceReport report;
    for (Check check : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r = check();
        const auto t1 = std::chrono::steady_clock::now();
        const double secs = std::chrono::duration<double>(t1 - t0).count();
        std::ostringstream line;
        line << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << std::setfill('0')
             << r.index << std::setfill(' ') << ' ' << r.name << ": " << r.detail << " ["
             << std::setprecision(2) << std::fixed << secs << "s]";
        out << line.str() << '\n';
        out.flush();
        report.results.push_back(std::move(r));
    }
    out << "acceptance: " << (report.results.size() - report.failed_count()) << "/"
        << report.results.size() << " criteria passed\n";
    out.flush();
    return report;
}

}  // namespace sgdf
