#include "sgdf/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace sgdf {

namespace {

void check_beta(double beta, const char* what) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument(std::string(what) + ": beta must lie in [0,1)");
    }
}

void check_step(std::uint64_t t, const char* what) {
    // The corrections divide by (1 - beta^t); before the first update they
    // are undefined, so degenerate queries are rejected outright.
    if (t == 0) throw std::invalid_argument(std::string(what) + ": t must be >= 1");
}

double pow_t(double b, std::uint64_t t) { return std::pow(b, static_cast<double>(t)); }

}  // namespace

double momentum_variance_ratio(double beta1, std::uint64_t t) {
    check_beta(beta1, "momentum_variance_ratio");
    check_step(t, "momentum_variance_ratio");
    // Var(m_t) = (1-b1)^2 * sum_{i=1..t} b1^{2(t-i)} * Var(g)
    //          = Var(g) * (1-b1)^2 (1-b1^{2t}) / (1-b1^2).
    return (1.0 - beta1) * (1.0 - pow_t(beta1, 2 * t)) / (1.0 + beta1);
}

double variance_correction_factor(double beta1, double beta2, std::uint64_t t) {
    check_beta(beta1, "variance_correction_factor");
    check_beta(beta2, "variance_correction_factor");
    check_step(t, "variance_correction_factor");
    return momentum_variance_ratio(beta1, t) / (1.0 - pow_t(beta2, t));
}

double gain_denominator_scale(double beta1, double beta2, std::uint64_t t) {
    check_beta(beta1, "gain_denominator_scale");
    check_beta(beta2, "gain_denominator_scale");
    check_step(t, "gain_denominator_scale");
    return (1.0 + beta1) * (1.0 - pow_t(beta2, t)) /
           ((1.0 - beta1) * (1.0 - pow_t(beta1, 2 * t)));
}

Vector ema_update(const Vector& m_prev, const Vector& g, double beta1) {
    check_beta(beta1, "ema_update");
    check_same_dim(m_prev, g, "ema_update");
    Vector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = beta1 * m_prev[i] + (1.0 - beta1) * g[i];
    }
    check_finite(out, "ema_update");
    return out;
}

Vector residual_second_moment(const Vector& s_prev, const Vector& g, const Vector& m,
                              double beta2) {
    check_beta(beta2, "residual_second_moment");
    check_same_dim(s_prev, g, "residual_second_moment");
    check_same_dim(g, m, "residual_second_moment");
    Vector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r = g[i] - m[i];
        out[i] = beta2 * s_prev[i] + (1.0 - beta2) * r * r;
    }
    check_finite(out, "residual_second_moment");
    return out;
}

Vector bias_correct_mean(const Vector& m, double beta1, std::uint64_t t) {
    check_beta(beta1, "bias_correct_mean");
    check_step(t, "bias_correct_mean");
    double denom = 1.0 - pow_t(beta1, t);
    Vector out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] / denom;
    check_finite(out, "bias_correct_mean");
    return out;
}

Vector corrected_variance(const Vector& s, double beta1, double beta2, std::uint64_t t) {
    double factor = variance_correction_factor(beta1, beta2, t);
    Vector out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] * factor;
    check_finite(out, "corrected_variance");
    return out;
}

Vector wiener_gain(const Vector& s_hat, const Vector& g, const Vector& m_hat, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("wiener_gain: eps must be positive");
    check_same_dim(s_hat, g, "wiener_gain");
    check_same_dim(g, m_hat, "wiener_gain");
    Vector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r = g[i] - m_hat[i];
        out[i] = s_hat[i] / (s_hat[i] + r * r + eps);
    }
    check_finite(out, "wiener_gain");
    return out;
}

Vector wiener_gain_division_free(const Vector& s, const Vector& g, const Vector& m_hat,
                                 double beta1, double beta2, std::uint64_t t, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("wiener_gain_division_free: eps must be positive");
    }
    check_same_dim(s, g, "wiener_gain_division_free");
    check_same_dim(g, m_hat, "wiener_gain_division_free");
    double c2 = gain_denominator_scale(beta1, beta2, t);
    Vector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r = g[i] - m_hat[i];
        out[i] = s[i] / (s[i] + c2 * (r * r + eps));
    }
    check_finite(out, "wiener_gain_division_free");
    return out;
}

Vector power_scale(const Vector& k, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("power_scale: gamma must lie in (0,1]");
    }
    Vector out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!(k[i] >= 0.0 && k[i] <= 1.0)) {
            throw std::invalid_argument("power_scale: gain must lie in [0,1]");
        }
        out[i] = std::pow(k[i], gamma);
    }
    check_finite(out, "power_scale");
    return out;
}

Vector fuse(const Vector& m_hat, const Vector& g, const Vector& k_scaled) {
    check_same_dim(m_hat, g, "fuse");
    check_same_dim(g, k_scaled, "fuse");
    Vector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(k_scaled[i] >= 0.0 && k_scaled[i] <= 1.0)) {
            throw std::invalid_argument("fuse: gain must lie in [0,1]");
        }
        out[i] = m_hat[i] + k_scaled[i] * (g[i] - m_hat[i]);
    }
    check_finite(out, "fuse");
    return out;
}

void filter_step(FilterState& st, const Vector& g, double beta1, double beta2, double eps,
                 double gamma, bool division_free, Vector& ghat_out, Vector& mhat_out,
                 Vector& k_out, std::optional<double> gain_override) {
    check_beta(beta1, "filter_step");
    check_beta(beta2, "filter_step");
    if (!(eps > 0.0)) throw std::invalid_argument("filter_step: eps must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("filter_step: gamma must lie in (0,1]");
    }
    if (gain_override && !(*gain_override >= 0.0 && *gain_override <= 1.0)) {
        throw std::invalid_argument("filter_step: gain override must lie in [0,1]");
    }
    check_same_dim(st.m, g, "filter_step");

    const std::uint64_t t = st.t + 1;
    const double bc1 = 1.0 - pow_t(beta1, t);
    // Literal form scales s into s^; division-free multiplies the reciprocal
    // through the denominator. Same number either way (to roundoff).
    const double corr = variance_correction_factor(beta1, beta2, t);
    const double c2 = 1.0 / corr;
    const std::size_t n = g.size();

    for (std::size_t i = 0; i < n; ++i) {
        double m = beta1 * st.m[i] + (1.0 - beta1) * g[i];
        double r0 = g[i] - m;
        double s = beta2 * st.s[i] + (1.0 - beta2) * r0 * r0;
        double mhat = m / bc1;
        double r = g[i] - mhat;
        double k;
        if (gain_override) {
            k = *gain_override;
        } else if (division_free) {
            k = s / (s + c2 * (r * r + eps));
        } else {
            double shat = s * corr;
            k = shat / (shat + r * r + eps);
        }
        double kg;
        if (gamma == 1.0) {
            kg = k;
        } else if (gamma == 0.5) {
            kg = std::sqrt(k);
        } else {
            kg = std::pow(k, gamma);
        }
        double ghat = mhat + kg * r;
        if (!(std::isfinite(m) && std::isfinite(s) && std::isfinite(ghat))) {
            throw numeric_error("filter_step: non-finite value at index " + std::to_string(i) +
                                " (step " + std::to_string(t) + ")");
        }
        st.m[i] = m;
        st.s[i] = s;
        mhat_out[i] = mhat;
        k_out[i] = k;
        ghat_out[i] = ghat;
    }
    st.t = t;
}

double optimal_gain_from_variances(double var_m, double var_g) {
    if (!(var_m >= 0.0) || !(var_g >= 0.0)) {
        throw std::invalid_argument("optimal_gain_from_variances: variances must be >= 0");
    }
    if (var_m + var_g <= 0.0) {
        throw std::invalid_argument("optimal_gain_from_variances: variances are both zero");
    }
    return var_m / (var_m + var_g);
}

GaussianBelief gaussian_fuse(const GaussianBelief& prior, const GaussianBelief& obs) {
    if (!(prior.variance >= 0.0) || !(obs.variance >= 0.0) ||
        !std::isfinite(prior.variance) || !std::isfinite(obs.variance)) {
        throw std::invalid_argument("gaussian_fuse: variances must be finite and >= 0");
    }
    double denom = prior.variance + obs.variance;
    if (denom <= 0.0) {
        throw std::invalid_argument("gaussian_fuse: variances are both zero");
    }
    GaussianBelief out;
    out.mean = (obs.variance * prior.mean + prior.variance * obs.mean) / denom;
    out.variance = prior.variance * obs.variance / denom;
    check_finite(out.mean, "gaussian_fuse mean");
    check_finite(out.variance, "gaussian_fuse variance");
    return out;
}

double effective_observation_variance(double var_m, double var_g) {
    if (!(var_m > 0.0)) {
        throw std::invalid_argument("effective_observation_variance: var_m must be positive");
    }
    if (!(var_g >= 0.0)) {
        throw std::invalid_argument("effective_observation_variance: var_g must be >= 0");
    }
    return var_m * (std::sqrt(1.0 + var_g / var_m) - 1.0);
}

}  // namespace sgdf
