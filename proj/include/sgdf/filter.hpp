#pragma once

// The gradient filter: EMA first moment, residual second moment, bias and
// variance corrections, Wiener gain, power scaling and fusion — plus the
// closed-form scalar-Gaussian fusion identities the gain is derived from.
//
// Per-coordinate update, with b1 = beta1, b2 = beta2:
//
//   m_t  = b1*m_{t-1} + (1-b1)*g_t
//   s_t  = b2*s_{t-1} + (1-b2)*(g_t - m_t)^2
//   m^_t = m_t / (1 - b1^t)
//   s^_t = s_t * (1-b1)(1-b1^{2t}) / ((1+b1)(1-b2^t))
//   K_t  = s^_t / (s^_t + (g_t - m^_t)^2 + eps)
//   g^_t = m^_t + K_t^gamma * (g_t - m^_t)
//
// s^_t rescales the (bias-corrected) residual second moment into an estimate
// of the momentum's own variance: an EMA of iid noise with coefficient b1 has
// steady-state variance (1-b1)/(1+b1) times the per-sample variance, and the
// (1-b1^{2t}) factor supplies the finite-t transient of that geometric sum.
// K_t then weighs momentum uncertainty against the instantaneous squared
// innovation, which stands in for the observation variance.
//
// The division-free form evaluates the same gain as
//   K_t = s_t / (s_t + c2_t*((g_t - m^_t)^2 + eps)),
//   c2_t = (1+b1)(1-b2^t) / ((1-b1)(1-b1^{2t})),
// which multiplies the correction through the denominator instead of scaling
// s_t; the two are algebraically identical and must agree to 1e-12 relative.

#include <cstdint>
#include <optional>

#include "sgdf/vec.hpp"

namespace sgdf {

// Per-parameter filter state. t counts completed updates and starts at 0;
// queries that need a step index (bias/variance corrections) reject t = 0.
struct FilterState {
    Vector m;         // first moment (gradient units)
    Vector s;         // residual second moment (gradient^2 units)
    std::uint64_t t = 0;

    FilterState() = default;
    explicit FilterState(std::size_t dim) : m(dim, 0.0), s(dim, 0.0) {}
    std::size_t dim() const { return m.size(); }
};

// ---- scalar closed forms -------------------------------------------------

// Var(m_t)/Var(g) for m_t = b1*m_{t-1} + (1-b1)*g_t on iid noise:
// (1-b1)(1-b1^{2t})/(1+b1). Limit (1-b1)/(1+b1) as t -> inf.
double momentum_variance_ratio(double beta1, std::uint64_t t);

// The factor multiplying s_t in the corrected variance:
// (1-b1)(1-b1^{2t}) / ((1+b1)(1-b2^t)).
double variance_correction_factor(double beta1, double beta2, std::uint64_t t);

// c2_t of the division-free gain; reciprocal of variance_correction_factor.
double gain_denominator_scale(double beta1, double beta2, std::uint64_t t);

// ---- element-wise operations ----------------------------------------------

Vector ema_update(const Vector& m_prev, const Vector& g, double beta1);
Vector residual_second_moment(const Vector& s_prev, const Vector& g, const Vector& m,
                              double beta2);
Vector bias_correct_mean(const Vector& m, double beta1, std::uint64_t t);
Vector corrected_variance(const Vector& s, double beta1, double beta2, std::uint64_t t);
Vector wiener_gain(const Vector& s_hat, const Vector& g, const Vector& m_hat, double eps);
Vector wiener_gain_division_free(const Vector& s, const Vector& g, const Vector& m_hat,
                                 double beta1, double beta2, std::uint64_t t, double eps);
Vector power_scale(const Vector& k, double gamma);
Vector fuse(const Vector& m_hat, const Vector& g, const Vector& k_scaled);

// One full filter update (the six lines above as a single fused kernel).
// Advances st by one step and writes the filtered gradient, the
// bias-corrected momentum and the raw (pre-power) gain for telemetry.
// gain_override, when set, replaces K_t with a constant — a diagnostic used
// by reduction tests (K=1 recovers the raw gradient, K=0 pure momentum).
void filter_step(FilterState& st, const Vector& g, double beta1, double beta2, double eps,
                 double gamma, bool division_free, Vector& ghat_out, Vector& mhat_out,
                 Vector& k_out, std::optional<double> gain_override = std::nullopt);

// ---- scalar Gaussian fusion reference layer --------------------------------

struct GaussianBelief {
    double mean = 0.0;
    double variance = 0.0;  // >= 0
};

// K* = var_m / (var_m + var_g): the gain minimizing the fused MSE
// (1-K)^2*var_m + K^2*var_g for independent unbiased inputs.
double optimal_gain_from_variances(double var_m, double var_g);

// Product of two Gaussian densities, renormalized:
// mean = (vg*mu_m + vm*mu_g)/(vm+vg), variance = vm*vg/(vm+vg).
// Equals the moments of (1-K*)*prior + K**obs; tests pin both views.
GaussianBelief gaussian_fuse(const GaussianBelief& prior, const GaussianBelief& obs);

// The observation variance inflation that turns the square-root-scaled gain
// back into plain Wiener form: returns vg~ = vm*(sqrt(1+vg/vm) - 1), so that
// sqrt(K) = vm/(vm + vg~) identically.
double effective_observation_variance(double var_m, double var_g);

}  // namespace sgdf
