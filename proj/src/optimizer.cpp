#include "sgdf/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgdf {

void OptimizerConfig::validate() const {
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("OptimizerConfig: beta1 must lie in [0,1)");
    }
    if (!(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("OptimizerConfig: beta2 must lie in [0,1)");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("OptimizerConfig: eps must be positive");
    if (variant == Variant::unified_momentum && !(u >= 1.0 - beta1)) {
        throw std::invalid_argument("OptimizerConfig: unified momentum requires u >= 1-beta1");
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("OptimizerConfig: lambda must be >= 0");
    if (!(clip_norm >= 0.0)) {
        throw std::invalid_argument("OptimizerConfig: clip_norm must be >= 0");
    }
    // The gain exponent must stay in (0,1]; schedules only ever decrease from
    // base (constant/inverse-sqrt are the supported gamma kinds), so checking
    // the base bounds every step's value.
    if (!(gamma.base() > 0.0 && gamma.base() <= 1.0)) {
        throw std::invalid_argument("OptimizerConfig: gamma must lie in (0,1]");
    }
    if (gain_override && !(*gain_override >= 0.0 && *gain_override <= 1.0)) {
        throw std::invalid_argument("OptimizerConfig: gain_override must lie in [0,1]");
    }
}

OptimizerConfig OptimizerConfig::defaults_for(Variant v) {
    OptimizerConfig cfg;
    cfg.variant = v;
    switch (v) {
        case Variant::sign_sgdf:
            cfg.gamma = Schedule::constant(1.0);  // the sign update uses the unscaled gain
            break;
        case Variant::unified_momentum:
            cfg.u = 1.0;  // classical momentum unless configured otherwise
            break;
        default:
            break;
    }
    return cfg;
}

void apply_weight_decay(Vector& theta, Vector& g, WeightDecayMode mode, double lambda,
                        double alpha_t) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("apply_weight_decay: lambda must be >= 0");
    if (!(alpha_t > 0.0)) {
        throw std::invalid_argument("apply_weight_decay: alpha_t must be positive");
    }
    check_same_dim(theta, g, "apply_weight_decay");
    switch (mode) {
        case WeightDecayMode::none:
            return;
        case WeightDecayMode::coupled:
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += lambda * theta[i];
            check_finite(g, "apply_weight_decay");
            return;
        case WeightDecayMode::decoupled: {
            double shrink = 1.0 - alpha_t * lambda;
            if (shrink <= 0.0) {
                throw std::invalid_argument(
                    "apply_weight_decay: decoupled decay needs alpha_t*lambda < 1 "
                    "(got " + std::to_string(alpha_t * lambda) + ")");
            }
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] *= shrink;
            return;
        }
    }
}

double clip_global_norm(Vector& g, double max_norm) {
    if (!(max_norm > 0.0)) {
        throw std::invalid_argument("clip_global_norm: max_norm must be positive");
    }
    double n = norm2(g);
    if (n <= max_norm) return 1.0;
    double factor = max_norm / n;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= factor;
    return factor;
}

namespace {

// Shared prologue: bumps the step index, evaluates alpha_t, materializes the
// effective gradient (clip, then coupled decay) in st.work, and applies
// decoupled shrinkage. Returns alpha_t.
double begin_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg) {
    cfg.validate();
    check_same_dim(st.theta, g, "optimizer step");
    check_finite(g, "optimizer step gradient");

    const std::uint64_t t = st.t + 1;
    const double alpha_t = cfg.alpha.value(t);

    st.work = g;
    if (cfg.clip_norm > 0.0) clip_global_norm(st.work, cfg.clip_norm);
    if (cfg.weight_decay == WeightDecayMode::coupled) {
        apply_weight_decay(st.theta, st.work, WeightDecayMode::coupled, cfg.lambda, alpha_t);
    } else if (cfg.weight_decay == WeightDecayMode::decoupled && !cfg.frozen) {
        apply_weight_decay(st.theta, st.work, WeightDecayMode::decoupled, cfg.lambda, alpha_t);
    }
    return alpha_t;
}

void finish_step(OptimizerState& st, std::uint64_t filter_t_expected) {
    check_finite(st.theta, "optimizer step theta");
    st.t += 1;
    // Non-filter variants advance the shared counter themselves so that
    // state.t and filter.t stay consistent across every variant.
    if (st.filter.t != filter_t_expected) st.filter.t = filter_t_expected;
}

void run_filter(OptimizerState& st, const OptimizerConfig& cfg) {
    const std::uint64_t t = st.t + 1;
    const double gamma_t = cfg.gamma.value(t);
    if (!(gamma_t > 0.0 && gamma_t <= 1.0)) {
        throw std::invalid_argument("optimizer step: gamma_t must lie in (0,1]");
    }
    if (st.filter.dim() != st.theta.size()) st.filter = FilterState(st.theta.size());
    if (st.ghat.size() != st.theta.size()) {
        st.ghat.assign(st.theta.size(), 0.0);
        st.mhat.assign(st.theta.size(), 0.0);
        st.gain.assign(st.theta.size(), 0.0);
    }
    filter_step(st.filter, st.work, cfg.beta1, cfg.beta2, cfg.eps, gamma_t,
                cfg.division_free_gain, st.ghat, st.mhat, st.gain, cfg.gain_override);
}

}  // namespace

void sgd_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg) {
    const double alpha_t = begin_step(st, g, cfg);
    if (!cfg.frozen) {
        for (std::size_t i = 0; i < st.theta.size(); ++i) st.theta[i] -= alpha_t * st.work[i];
    }
    finish_step(st, st.t + 1);
}

void unified_momentum_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg) {
    const double alpha_t = begin_step(st, g, cfg);
    if (st.filter.dim() != st.theta.size()) st.filter = FilterState(st.theta.size());
    Vector& m = st.filter.m;
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + cfg.u * st.work[i];
        if (!cfg.frozen) st.theta[i] -= alpha_t * m[i];
    }
    check_finite(m, "unified_momentum_step m");
    finish_step(st, st.t + 1);
}

void sgdf_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg) {
    const double alpha_t = begin_step(st, g, cfg);
    run_filter(st, cfg);
    if (!cfg.frozen) {
        for (std::size_t i = 0; i < st.theta.size(); ++i) st.theta[i] -= alpha_t * st.ghat[i];
    }
    finish_step(st, st.filter.t);
}

void filter_adam_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg) {
    const double alpha_t = begin_step(st, g, cfg);
    run_filter(st, cfg);
    if (st.v.size() != st.theta.size()) st.v.assign(st.theta.size(), 0.0);
    const std::uint64_t t = st.t + 1;
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < st.theta.size(); ++i) {
        double x = cfg.adam_filtered_second_moment ? st.ghat[i] : st.work[i];
        st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * x * x;
        if (!cfg.frozen) {
            double vhat = st.v[i] / bc2;
            st.theta[i] -= alpha_t * st.ghat[i] / (std::sqrt(vhat) + cfg.eps);
        }
    }
    check_finite(st.v, "filter_adam_step v");
    finish_step(st, st.filter.t);
}

void sign_sgdf_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg) {
    const double alpha_t = begin_step(st, g, cfg);
    run_filter(st, cfg);
    if (!cfg.frozen) {
        for (std::size_t i = 0; i < st.theta.size(); ++i) {
            st.theta[i] -= alpha_t * update_sign(st.ghat[i]);
        }
    }
    finish_step(st, st.filter.t);
}

Optimizer::Optimizer(OptimizerConfig cfg, Vector theta0) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (theta0.empty()) throw std::invalid_argument("Optimizer: theta0 must be non-empty");
    check_finite(theta0, "Optimizer theta0");
    st_.theta = std::move(theta0);
    st_.filter = FilterState(st_.theta.size());
    if (cfg_.variant == Variant::filter_adam) st_.v.assign(st_.theta.size(), 0.0);
}

void Optimizer::step(const Vector& g) {
    switch (cfg_.variant) {
        case Variant::sgd:
            sgd_step(st_, g, cfg_);
            return;
        case Variant::unified_momentum:
            unified_momentum_step(st_, g, cfg_);
            return;
        case Variant::sgdf:
            sgdf_step(st_, g, cfg_);
            return;
        case Variant::filter_adam:
            filter_adam_step(st_, g, cfg_);
            return;
        case Variant::sign_sgdf:
            sign_sgdf_step(st_, g, cfg_);
            return;
    }
    throw std::logic_error("Optimizer::step: unknown variant");
}

}  // namespace sgdf
