#pragma once

// Step rules for every update family under study:
//
//   sgd               theta' = theta - alpha_t * g
//   unified_momentum  m' = beta1*m + u*g;  theta' = theta - alpha_t * m'
//                     (u = 1-beta1 is the EMA case, u = 1 classical momentum;
//                      u >= 1-beta1 required)
//   sgdf              theta' = theta - alpha_t * ghat_t   (filtered gradient)
//   filter_adam       Adam with the filtered gradient in the numerator:
//                     v' = beta2*v + (1-beta2)*g^2, vhat = v'/(1-beta2^t),
//                     theta' = theta - alpha_t * ghat / (sqrt(vhat) + eps)
//   sign_sgdf         theta' = theta - alpha_t * sign(ghat), sign(0) = 0,
//                     with the unscaled gain (gamma = 1) by default
//
// Cross-cutting options: coupled (g += lambda*theta) or decoupled
// (theta *= 1 - alpha_t*lambda) weight decay, optional global L2 gradient
// clipping, and a frozen mode that runs the full estimator pipeline while
// holding theta fixed — used to measure estimator bias/variance under a
// stationary gradient distribution.

#include <cstdint>
#include <optional>

#include "sgdf/filter.hpp"
#include "sgdf/schedule.hpp"
#include "sgdf/vec.hpp"

namespace sgdf {

enum class Variant { sgd, unified_momentum, sgdf, filter_adam, sign_sgdf };

enum class WeightDecayMode { none, coupled, decoupled };

struct OptimizerConfig {
    Variant variant = Variant::sgdf;
    Schedule alpha = Schedule::constant(0.01);
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    Schedule gamma = Schedule::constant(0.5);
    double u = 1.0;  // unified_momentum coupling; u >= 1-beta1
    WeightDecayMode weight_decay = WeightDecayMode::none;
    double lambda = 0.0;
    double clip_norm = 0.0;  // global L2 clip threshold; 0 disables
    bool frozen = false;     // estimator mode: run moments/gain, never move theta
    bool adam_filtered_second_moment = false;  // filter_adam: feed ghat (not g) into v
    bool division_free_gain = false;           // evaluate K in the rescaled form
    std::optional<double> gain_override;       // diagnostic: force K constant

    void validate() const;  // throws std::invalid_argument on the first violation
    static OptimizerConfig defaults_for(Variant v);
};

struct OptimizerState {
    Vector theta;
    FilterState filter;  // m/s; m doubles as the unified-momentum buffer
    Vector v;            // Adam second moment (filter_adam only)
    std::uint64_t t = 0;

    // Telemetry from the most recent step (filter variants only).
    Vector ghat;  // filtered gradient
    Vector mhat;  // bias-corrected momentum
    Vector gain;  // raw Wiener gain K_t, before power scaling

    Vector work;  // scratch: the effective gradient after clip/decay
};

// In-place step functions. Each advances state.t (and state.filter.t) by one,
// applies clipping and weight decay, and checks the result for finiteness.
void sgd_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg);
void unified_momentum_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg);
void sgdf_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg);
void filter_adam_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg);
void sign_sgdf_step(OptimizerState& st, const Vector& g, const OptimizerConfig& cfg);

// The sign used by sign_sgdf: -1/0/+1 with sign(0) = 0, so a dead coordinate
// stays put instead of drifting. Invariant under any positive rescaling of
// the argument.
inline double update_sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Weight-decay transform, shared by all variants:
//   coupled:   g += lambda*theta (standard L2, feeds the moment estimates)
//   decoupled: theta *= (1 - alpha_t*lambda) before the gradient step;
//              alpha_t*lambda >= 1 would flip the sign of theta -> error
void apply_weight_decay(Vector& theta, Vector& g, WeightDecayMode mode, double lambda,
                        double alpha_t);

// Scales g to norm2(g) <= max_norm; returns the factor applied (1 if none).
double clip_global_norm(Vector& g, double max_norm);

// Convenience owner: validates the config once, sizes the state, dispatches.
class Optimizer {
public:
    Optimizer(OptimizerConfig cfg, Vector theta0);

    void step(const Vector& g);

    const Vector& theta() const { return st_.theta; }
    const OptimizerState& state() const { return st_; }
    const OptimizerConfig& config() const { return cfg_; }
    std::uint64_t t() const { return st_.t; }

private:
    OptimizerConfig cfg_;
    OptimizerState st_;
};

}  // namespace sgdf
