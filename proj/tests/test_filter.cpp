#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "sgdf/filter.hpp"
#include "sgdf/rng.hpp"

using namespace sgdf;

// ---- scalar closed forms -----------------------------------------------------

TEST_CASE("momentum variance ratio oracles") {
    // (1-b)(1-b^2t)/(1+b): one step gives 0.01 at b = 0.9, the t -> inf limit
    // is (1-b)/(1+b) = 1/19.
    CHECK(momentum_variance_ratio(0.9, 1) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(momentum_variance_ratio(0.9, 2000) ==
          doctest::Approx(0.05263157894736842).epsilon(1e-12));
    CHECK(momentum_variance_ratio(0.0, 5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(momentum_variance_ratio(1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(momentum_variance_ratio(-0.1, 5), std::invalid_argument);
    CHECK_THROWS_AS(momentum_variance_ratio(0.9, 0), std::invalid_argument);
}

TEST_CASE("variance correction factor oracle and reciprocal") {
    CHECK(variance_correction_factor(0.9, 0.999, 1) == doctest::Approx(10.0).epsilon(1e-12));
    for (std::uint64_t t : {1ull, 2ull, 7ull, 100ull, 5000ull}) {
        const double prod = variance_correction_factor(0.9, 0.999, t) *
                            gain_denominator_scale(0.9, 0.999, t);
        CHECK(prod == doctest::Approx(1.0).epsilon(1e-12));
    }
    // With beta2^t ~ 0 the factor approaches the raw momentum variance ratio.
    CHECK(variance_correction_factor(0.9, 0.999, 100000) ==
          doctest::Approx(momentum_variance_ratio(0.9, 100000)).epsilon(1e-12));
    CHECK_THROWS_AS(variance_correction_factor(0.9, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(gain_denominator_scale(0.9, 0.999, 0), std::invalid_argument);
}

// ---- element-wise operations --------------------------------------------------

TEST_CASE("first two filter moments by hand") {
    const Vector m1 = ema_update({0.0}, {1.0}, 0.9);
    CHECK(m1[0] == doctest::Approx(0.1).epsilon(1e-14));
    const Vector m2 = ema_update(m1, {1.0}, 0.9);
    CHECK(m2[0] == doctest::Approx(0.19).epsilon(1e-14));

    const Vector s1 = residual_second_moment({0.0}, {1.0}, m1, 0.999);
    CHECK(s1[0] == doctest::Approx(8.1e-4).epsilon(1e-12));

    const Vector mhat1 = bias_correct_mean(m1, 0.9, 1);
    CHECK(mhat1[0] == doctest::Approx(1.0).epsilon(1e-14));

    const Vector shat1 = corrected_variance(s1, 0.9, 0.999, 1);
    CHECK(shat1[0] == doctest::Approx(8.1e-3).epsilon(1e-12));
}

TEST_CASE("element op validation") {
    CHECK_THROWS_AS(ema_update({0.0}, {1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ema_update({0.0}, {1.0, 2.0}, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(residual_second_moment({0.0}, {1.0}, {0.1}, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(bias_correct_mean({0.1}, 0.9, 0), std::invalid_argument);
    CHECK_THROWS_AS(corrected_variance({1e-3}, 0.9, 0.999, 0), std::invalid_argument);
}

TEST_CASE("wiener gain oracles") {
    // zero estimated variance pins the gain to zero regardless of residual
    const Vector zero_gain = wiener_gain({0.0}, {3.0}, {1.0}, 1e-8);
    CHECK(zero_gain[0] == 0.0);
    // shat = 1, residual^2 = 4 -> 1/5
    CHECK(wiener_gain({1.0}, {3.0}, {1.0}, 1e-12)[0] ==
          doctest::Approx(0.2).epsilon(1e-12));
    // zero residual: K = shat/(shat + eps), just below one
    CHECK(wiener_gain({8.1e-3}, {1.0}, {1.0}, 1e-8)[0] ==
          doctest::Approx(0.9999987654336229).epsilon(1e-10));
    CHECK_THROWS_AS(wiener_gain({1.0}, {1.0}, {1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(wiener_gain({1.0}, {1.0}, {1.0}, -1e-8), std::invalid_argument);
}

TEST_CASE("power scale oracles and range checks") {
    CHECK(power_scale({0.25}, 0.5)[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(power_scale({0.0, 1.0}, 0.5) == Vector{0.0, 1.0});
    const Vector k{0.3, 0.9};
    const Vector same = power_scale(k, 1.0);
    CHECK(same[0] == doctest::Approx(k[0]).epsilon(1e-15));
    CHECK(same[1] == doctest::Approx(k[1]).epsilon(1e-15));
    CHECK_THROWS_AS(power_scale(k, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(power_scale(k, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(power_scale({-0.1}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(power_scale({1.1}, 0.5), std::invalid_argument);
}

TEST_CASE("fuse oracle") {
    CHECK(fuse({1.0}, {3.0}, {0.25})[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(fuse({1.0}, {3.0}, {1.25}), std::invalid_argument);
    CHECK_THROWS_AS(fuse({1.0}, {3.0, 4.0}, {0.25}), std::invalid_argument);
}

// ---- fused kernel vs composed ops ---------------------------------------------

namespace {

struct Composed {
    Vector m, s;
    explicit Composed(std::size_t d) : m(d, 0.0), s(d, 0.0) {}

    void step(const Vector& g, double b1, double b2, double eps, double gamma,
              std::uint64_t t, Vector& ghat, Vector& mhat, Vector& k) {
        m = ema_update(m, g, b1);
        s = residual_second_moment(s, g, m, b2);
        mhat = bias_correct_mean(m, b1, t);
        const Vector shat = corrected_variance(s, b1, b2, t);
        k = wiener_gain(shat, g, mhat, eps);
        const Vector kg = power_scale(k, gamma);
        ghat = fuse(mhat, g, kg);
    }
};

// Everything compared here lives on an O(1) scale, so the tolerance floors at
// one: a pure relative gap would explode when fusion cancels to ~0.
bool close12(double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("filter_step equals the composed element ops") {
    for (double gamma : {1.0, 0.5, 0.7}) {
        CAPTURE(gamma);
        const std::size_t d = 3;
        FilterState st(d);
        Composed ref(d);
        Vector ghat(d), mhat(d), k(d), rg(d), rm(d), rk(d);
        RngStream rng(77, 0);
        for (std::uint64_t t = 1; t <= 200; ++t) {
            Vector g(d);
            for (auto& x : g) x = 2.0 * rng.gaussian();
            filter_step(st, g, 0.9, 0.999, 1e-8, gamma, false, ghat, mhat, k);
            ref.step(g, 0.9, 0.999, 1e-8, gamma, t, rg, rm, rk);
            for (std::size_t i = 0; i < d; ++i) {
                CHECK(close12(ghat[i], rg[i]));
                CHECK(close12(mhat[i], rm[i]));
                CHECK(close12(k[i], rk[i]));
                CHECK(close12(st.m[i], ref.m[i]));
                CHECK(close12(st.s[i], ref.s[i]));
            }
        }
        CHECK(st.t == 200);
    }
}

TEST_CASE("division-free gain matches the literal gain") {
    const std::size_t d = 4;
    FilterState lit(d), df(d);
    Vector g1(d), m1(d), k1(d), g2(d), m2(d), k2(d);
    RngStream rng(78, 0);
    for (std::uint64_t t = 1; t <= 300; ++t) {
        Vector g(d);
        for (auto& x : g) x = 1.0 + 0.5 * rng.gaussian();
        filter_step(lit, g, 0.9, 0.999, 1e-8, 0.5, false, g1, m1, k1);
        filter_step(df, g, 0.9, 0.999, 1e-8, 0.5, true, g2, m2, k2);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(close12(k1[i], k2[i]));
            CHECK(close12(g1[i], g2[i]));
        }
    }
    // The standalone division-free op agrees with the literal op too.
    const Vector s{2e-3, 5e-4, 1e-3, 3e-3};
    const Vector g{1.0, -0.5, 0.25, 2.0};
    const Vector mh{0.9, -0.4, 0.3, 1.7};
    const Vector shat = corrected_variance(s, 0.9, 0.999, 7);
    const Vector ka = wiener_gain(shat, g, mh, 1e-8);
    const Vector kb = wiener_gain_division_free(s, g, mh, 0.9, 0.999, 7, 1e-8);
    for (std::size_t i = 0; i < 4; ++i) CHECK(close12(ka[i], kb[i]));
}

TEST_CASE("gain override pins the fusion endpoints") {
    const std::size_t d = 3;
    Vector ghat(d), mhat(d), k(d);
    RngStream rng(79, 0);

    FilterState raw(d);
    for (std::uint64_t t = 1; t <= 20; ++t) {
        Vector g(d);
        for (auto& x : g) x = rng.gaussian();
        filter_step(raw, g, 0.9, 0.999, 1e-8, 0.5, false, ghat, mhat, k, 1.0);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(k[i] == 1.0);
            CHECK(close12(ghat[i], g[i]));
        }
    }

    FilterState pure(d);
    for (std::uint64_t t = 1; t <= 20; ++t) {
        Vector g(d);
        for (auto& x : g) x = rng.gaussian();
        filter_step(pure, g, 0.9, 0.999, 1e-8, 0.5, false, ghat, mhat, k, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(k[i] == 0.0);
            CHECK(ghat[i] == doctest::Approx(mhat[i]).epsilon(1e-15));
        }
    }

    FilterState st(d);
    CHECK_THROWS_AS(
        filter_step(st, Vector(d, 1.0), 0.9, 0.999, 1e-8, 0.5, false, ghat, mhat, k, 1.5),
        std::invalid_argument);
}

TEST_CASE("gain stays in [0,1) on noisy streams") {
    const std::size_t d = 4;
    FilterState st(d);
    Vector ghat(d), mhat(d), k(d);
    RngStream rng(80, 0);
    for (std::uint64_t t = 1; t <= 500; ++t) {
        Vector g(d);
        for (auto& x : g) x = 3.0 + 2.0 * rng.gaussian();
        filter_step(st, g, 0.9, 0.999, 1e-8, 0.5, false, ghat, mhat, k);
        for (double v : k) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("filter_step validation and failure") {
    FilterState st(2);
    Vector ghat(2), mhat(2), k(2);
    CHECK_THROWS_AS(filter_step(st, {1.0}, 0.9, 0.999, 1e-8, 0.5, false, ghat, mhat, k),
                    std::invalid_argument);
    CHECK_THROWS_AS(filter_step(st, {1.0, 2.0}, 0.9, 0.999, 0.0, 0.5, false, ghat, mhat, k),
                    std::invalid_argument);
    CHECK_THROWS_AS(filter_step(st, {1.0, 2.0}, 0.9, 0.999, 1e-8, 0.0, false, ghat, mhat, k),
                    std::invalid_argument);
    const double bad = std::nan("");
    CHECK_THROWS_AS(filter_step(st, {bad, 1.0}, 0.9, 0.999, 1e-8, 0.5, false, ghat, mhat, k),
                    numeric_error);
}

// ---- scalar Gaussian fusion layer ----------------------------------------------

TEST_CASE("gaussian fusion oracle") {
    const GaussianBelief fused = gaussian_fuse({0.0, 1.0}, {4.0, 3.0});
    CHECK(fused.mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fused.variance == doctest::Approx(0.75).epsilon(1e-15));

    const GaussianBelief sym = gaussian_fuse({4.0, 3.0}, {0.0, 1.0});
    CHECK(sym.mean == doctest::Approx(fused.mean).epsilon(1e-15));
    CHECK(sym.variance == doctest::Approx(fused.variance).epsilon(1e-15));

    // a zero-variance prior is already certain: the observation cannot move it
    const GaussianBelief pinned = gaussian_fuse({2.0, 0.0}, {7.0, 3.0});
    CHECK(pinned.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(pinned.variance == 0.0);

    CHECK_THROWS_AS(gaussian_fuse({0.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_fuse({0.0, -1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("fusion equals the optimal-gain linear combination") {
    RngStream rng(81, 0);
    for (int i = 0; i < 200; ++i) {
        const double vm = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
        const double vg = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
        const double mu_m = 5.0 * rng.gaussian();
        const double mu_g = 5.0 * rng.gaussian();
        const double kstar = optimal_gain_from_variances(vm, vg);
        const GaussianBelief fused = gaussian_fuse({mu_m, vm}, {mu_g, vg});
        const double lin_mean = (1.0 - kstar) * mu_m + kstar * mu_g;
        const double lin_var = (1.0 - kstar) * (1.0 - kstar) * vm + kstar * kstar * vg;
        CHECK(std::fabs(fused.mean - lin_mean) <=
              1e-12 * std::max(1.0, std::fabs(lin_mean)));
        CHECK(std::fabs(fused.variance - lin_var) <= 1e-12 * lin_var);
        // fusing never increases uncertainty beyond the sharper input
        CHECK(fused.variance <= std::min(vm, vg) * (1.0 + 1e-12));
    }
}

TEST_CASE("optimal gain minimizes the quadratic risk on a grid") {
    const double vm = 0.7, vg = 2.3;
    const double kstar = optimal_gain_from_variances(vm, vg);
    double best_k = 0.0, best_j = 1e300;
    for (int i = 0; i <= 100; ++i) {
        const double kk = 0.01 * i;
        const double j = (1.0 - kk) * (1.0 - kk) * vm + kk * kk * vg;
        if (j < best_j) {
            best_j = j;
            best_k = kk;
        }
    }
    CHECK(std::fabs(best_k - kstar) <= 0.011);
    CHECK(optimal_gain_from_variances(0.0, 1.0) == 0.0);
    CHECK(optimal_gain_from_variances(1.0, 0.0) == 1.0);
    CHECK_THROWS_AS(optimal_gain_from_variances(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_gain_from_variances(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("effective observation variance turns sqrt(K) into Wiener form") {
    CHECK(effective_observation_variance(1.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(effective_observation_variance(4.0, 12.0) == doctest::Approx(4.0).epsilon(1e-15));
    RngStream rng(82, 0);
    for (int i = 0; i < 500; ++i) {
        const double vm = std::pow(10.0, -2.0 + 4.0 * rng.uniform01());
        const double vg = std::pow(10.0, -2.0 + 4.0 * rng.uniform01());
        const double k = optimal_gain_from_variances(vm, vg);
        const double veff = effective_observation_variance(vm, vg);
        CHECK(std::fabs(std::sqrt(k) - vm / (vm + veff)) <= 1e-12);
    }
    CHECK_THROWS_AS(effective_observation_variance(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(effective_observation_variance(1.0, -1.0), std::invalid_argument);
}
