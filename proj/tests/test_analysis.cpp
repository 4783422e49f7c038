#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "sgdf/analysis.hpp"
#include "sgdf/rng.hpp"

using namespace sgdf;

// ---- Monte Carlo bias/variance ---------------------------------------------------

TEST_CASE("constant estimator decomposes exactly") {
    const auto rep = mc_bias_variance([](std::uint64_t) { return Vector{2.5}; }, {1.0}, 500);
    CHECK(rep.bias_sq == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(rep.variance == 0.0);
    CHECK(rep.mse == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(rep.std_error == 0.0);
    CHECK(rep.n_trials == 500);
}

TEST_CASE("mse = bias_sq + variance is an identity") {
    const Vector truth{1.0, -1.0};
    const auto rep = mc_bias_variance(
        [](std::uint64_t trial) {
            RngStream rng(314, trial);
            return Vector{1.0 + 0.5 * rng.gaussian(), -1.3 + 2.0 * rng.gaussian()};
        },
        truth, 2000);
    CHECK(std::fabs(rep.mse - (rep.bias_sq + rep.variance)) <= 1e-12 * rep.mse);
    CHECK(rep.bias_sq > 0.0);   // the second coordinate is biased by -0.3
    CHECK(rep.variance > 0.0);
}

TEST_CASE("gaussian estimator calibration") {
    // estimate = truth + N(0, 4): variance 4, bias 0, sd(per-trial mse) = sqrt(32)
    const auto rep = mc_bias_variance(
        [](std::uint64_t trial) {
            RngStream rng(2718, trial);
            return Vector{2.0 * rng.gaussian()};
        },
        {0.0}, 10000);
    CHECK(rep.variance == doctest::Approx(4.0).epsilon(0.1));
    CHECK(rep.bias_sq < 0.02);
    CHECK(rep.mse == doctest::Approx(4.0).epsilon(0.1));
    CHECK(rep.std_error > 0.03);  // true value sqrt(32)/100 ~ 0.057
    CHECK(rep.std_error < 0.09);
    CHECK(std::fabs(rep.mse - 4.0) <= 6.0 * rep.std_error);
}

TEST_CASE("mc validation") {
    const auto ok = [](std::uint64_t) { return Vector{0.0}; };
    CHECK_THROWS_AS(mc_bias_variance(ok, {0.0}, 99), std::invalid_argument);
    CHECK_THROWS_AS(mc_bias_variance(ok, {}, 500), std::invalid_argument);
    CHECK_THROWS_AS(
        mc_bias_variance([](std::uint64_t) { return Vector{0.0, 1.0}; }, {0.0}, 500),
        std::invalid_argument);
}

// ---- closed forms ------------------------------------------------------------------

TEST_CASE("closed-form momentum variance oracles") {
    // u^2 sigma^2 / (1 - beta^2): EMA row 1/19, classical momentum row 100/19
    CHECK(closed_form_momentum_variance(0.9, 0.1, 1.0) ==
          doctest::Approx(0.05263157894736842).epsilon(1e-12));
    CHECK(closed_form_momentum_variance(0.9, 1.0, 1.0) ==
          doctest::Approx(5.263157894736842).epsilon(1e-12));
    CHECK(closed_form_momentum_variance(0.0, 1.0, 2.0) ==
          doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(closed_form_momentum_variance(1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_momentum_variance(0.9, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_momentum_variance(0.9, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("theorem bound oracles") {
    // EMA row at L=G=sigma=1, V=0, alpha=0.01, beta=0.9, u=0.1:
    // term1 = 0.1, term2 = 1e-4/(sqrt(2)*0.1^2.5), term3 = 0
    TheoryBounds tb{1.0, 1.0, 0.0, 1.0, 0.01, 0.9, 0.1};
    const BoundValues ema = eval_theorem_bounds(tb);
    CHECK(std::sqrt(ema.bias_bound) ==
          doctest::Approx(0.1223606797749979).epsilon(1e-12));
    CHECK(ema.var_bound == doctest::Approx(0.1).epsilon(1e-12));

    // V enters the variance bound as 2 u^2 V^2/(1-b)^2
    TheoryBounds tbv = tb;
    tbv.V = 2.0;
    CHECK(eval_theorem_bounds(tbv).var_bound == doctest::Approx(8.1).epsilon(1e-12));

    // classical momentum (u = 1) pays the (u/(1-b) - 1) G = 9 lag penalty
    TheoryBounds cm = tb;
    cm.u = 1.0;
    const BoundValues cmv = eval_theorem_bounds(cm);
    CHECK(cmv.bias_bound > ema.bias_bound);
    CHECK(cmv.var_bound == doctest::Approx(10.0).epsilon(1e-12));

    // plain SGD row: b = 0, u = 1
    TheoryBounds sgd = tb;
    sgd.beta = 0.0;
    sgd.u = 1.0;
    const BoundValues sv = eval_theorem_bounds(sgd);
    CHECK(std::sqrt(sv.bias_bound) ==
          doctest::Approx(0.01 + 0.01 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(sv.var_bound == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("theorem bound validation") {
    TheoryBounds tb{1.0, 1.0, 0.0, 1.0, 0.01, 0.9, 0.05};
    CHECK_THROWS_AS(eval_theorem_bounds(tb), std::invalid_argument);  // u < 1-beta
    tb.u = 0.1;
    tb.beta = 1.0;
    CHECK_THROWS_AS(eval_theorem_bounds(tb), std::invalid_argument);
    tb.beta = 0.9;
    tb.L = -1.0;
    CHECK_THROWS_AS(eval_theorem_bounds(tb), std::invalid_argument);
}

// ---- SDE simulation ------------------------------------------------------------------

TEST_CASE("one Euler step by hand") {
    RngStream rng(1, 0);
    SdeOptions opts;
    opts.m0 = {2.0};
    opts.theta0 = {5.0};
    const SdeTrajectory traj =
        sde_simulate(0.9, 1.0, 1.0, 0.0, [](const Vector&) { return Vector{0.0}; }, 0.01,
                     0.01, rng, opts);
    REQUIRE(traj.times.size() == 2);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.times[1] == doctest::Approx(0.01).epsilon(1e-15));
    // theta moves with the pre-update m; m then decays by (1 - (1-beta) dt)
    CHECK(traj.theta[1][0] == doctest::Approx(5.0 - 0.02).epsilon(1e-14));
    CHECK(traj.m[1][0] == doctest::Approx(2.0 * 0.999).epsilon(1e-14));
}

TEST_CASE("noise-free relaxation matches exp(-(1-beta) t)") {
    RngStream rng(2, 0);
    SdeOptions opts;
    opts.m0 = {1.0};
    opts.theta0 = {0.0};
    opts.record_stride = 2000;
    const SdeTrajectory traj =
        sde_simulate(0.5, 1.0, 0.0, 0.0, [](const Vector&) { return Vector{0.0}; }, 0.005,
                     10.0, rng, opts);
    const double final_m = traj.m.back()[0];
    CHECK(final_m == doctest::Approx(std::exp(-5.0)).epsilon(0.01));
    // alpha = 0 freezes theta entirely
    for (const Vector& th : traj.theta) CHECK(th[0] == 0.0);
}

TEST_CASE("record stride keeps the ends") {
    RngStream rng(3, 0);
    SdeOptions opts;
    opts.theta0 = {1.0};
    opts.record_stride = 3;
    const SdeTrajectory traj =
        sde_simulate(0.9, 1.0, 0.1, 0.2, [](const Vector& th) { return th; }, 0.01, 0.10,
                     rng, opts);
    // 10 steps: state 0, steps 3, 6, 9, and the final step 10
    REQUIRE(traj.times.size() == 5);
    CHECK(traj.times[1] == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(traj.times[4] == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("sde validation") {
    RngStream rng(4, 0);
    SdeOptions opts;
    opts.theta0 = {1.0};
    const GradFn zero = [](const Vector&) { return Vector{0.0}; };
    // dt beyond the stability precondition 0.01/(1-beta)
    CHECK_THROWS_AS(sde_simulate(0.9, 1.0, 0.0, 0.0, zero, 0.2, 1.0, rng, opts),
                    std::invalid_argument);
    CHECK_THROWS_AS(sde_simulate(1.0, 1.0, 0.0, 0.0, zero, 0.01, 1.0, rng, opts),
                    std::invalid_argument);
    CHECK_THROWS_AS(sde_simulate(0.9, 0.0, 0.0, 0.0, zero, 0.01, 1.0, rng, opts),
                    std::invalid_argument);
    SdeOptions bad = opts;
    bad.m0 = {1.0, 2.0};
    CHECK_THROWS_AS(sde_simulate(0.9, 1.0, 0.0, 0.0, zero, 0.01, 1.0, rng, bad),
                    std::invalid_argument);
    const GradFn wrong_dim = [](const Vector&) { return Vector{0.0, 0.0}; };
    CHECK_THROWS_AS(sde_simulate(0.9, 1.0, 0.0, 0.0, wrong_dim, 0.01, 1.0, rng, opts),
                    std::invalid_argument);
}

TEST_CASE("sde trajectories are reproducible per stream") {
    SdeOptions opts;
    opts.theta0 = {1.0, -1.0};
    opts.record_stride = 10;
    const GradFn grad = [](const Vector& th) { return th; };
    RngStream ra(5, 0), rb(5, 0);
    const SdeTrajectory a = sde_simulate(0.9, 1.0, 0.1, 0.5, grad, 0.01, 2.0, ra, opts);
    const SdeTrajectory b = sde_simulate(0.9, 1.0, 0.1, 0.5, grad, 0.01, 2.0, rb, opts);
    REQUIRE(a.m.size() == b.m.size());
    for (std::size_t i = 0; i < a.m.size(); ++i) {
        CHECK(a.m[i] == b.m[i]);
        CHECK(a.theta[i] == b.theta[i]);
    }
}

TEST_CASE("stationary moments match the OU closed form") {
    // Var = u^2 sigma^2 / (2 (1-beta)) = 5, mean = u c / (1-beta) = 3
    RngStream rng(6, 0);
    const StationaryMoments sm =
        sde_stationary_moments(0.9, 1.0, 1.0, 0.3, 0.01, 100.0, 10.0, 256, rng);
    CHECK(sm.mean == doctest::Approx(3.0).epsilon(0.08));
    CHECK(sm.variance == doctest::Approx(5.0).epsilon(0.1));
    CHECK(sm.samples == 256 * 9000);

    RngStream rng2(7, 0);
    CHECK_THROWS_AS(sde_stationary_moments(0.9, 1.0, 1.0, 0.3, 0.01, 5.0, 10.0, 4, rng2),
                    std::invalid_argument);
    CHECK_THROWS_AS(sde_stationary_moments(0.9, 1.0, 1.0, 0.3, 0.2, 100.0, 10.0, 4, rng2),
                    std::invalid_argument);
}

// ---- regret / gradient-norm trackers ------------------------------------------------

TEST_CASE("regret curve is the running suboptimality sum") {
    const std::vector<double> r = regret_curve({1.0, 2.0, 3.0}, {0.0, 1.0, 2.0});
    CHECK(r == std::vector<double>{1.0, 2.0, 3.0});
    const std::vector<double> r2 = regret_curve({0.5, 0.75}, {0.0, 0.0});
    CHECK(r2[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r2[1] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK_THROWS_AS(regret_curve({1.0}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(regret_curve({std::nan("")}, {0.0}), numeric_error);
}

TEST_CASE("running minimum gradient norm") {
    const std::vector<double> m = min_grad_norm_stat({3.0, 1.0, 2.0, 0.5});
    CHECK(m == std::vector<double>{3.0, 1.0, 1.0, 0.5});
    CHECK(min_grad_norm_stat({}).empty());
    CHECK_THROWS_AS(min_grad_norm_stat({1.0, -0.1}), std::invalid_argument);
}

TEST_CASE("growth exponent recovers an exact power law") {
    std::vector<double> t, r;
    for (double x : {100.0, 316.0, 1000.0, 3162.0, 10000.0, 31623.0}) {
        t.push_back(x);
        r.push_back(2.0 * std::pow(x, 0.5));
    }
    CHECK(growth_exponent_fit(t, r) == doctest::Approx(0.5).epsilon(1e-12));

    // nonpositive points are dropped before the fit; too few points throw
    std::vector<double> t2{1.0, 2.0, 3.0, 4.0, 0.0, -1.0};
    std::vector<double> r2{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    CHECK_THROWS_AS(growth_exponent_fit(t2, r2), std::invalid_argument);
    CHECK_THROWS_AS(growth_exponent_fit({1.0, 2.0}, {1.0}), std::invalid_argument);
}

// ---- filter/EMA consistency with the closed forms ------------------------------------

TEST_CASE("bias-corrected EMA of a constant stream is exact") {
    // m_t = c (1 - b^t) exactly, so mhat = c to roundoff at every t
    Vector m{0.0};
    const double c = 3.7;
    for (std::uint64_t t = 1; t <= 200; ++t) {
        m[0] = 0.9 * m[0] + 0.1 * c;
        const double mhat = m[0] / (1.0 - std::pow(0.9, static_cast<double>(t)));
        CHECK(mhat == doctest::Approx(c).epsilon(1e-10));
    }
}
