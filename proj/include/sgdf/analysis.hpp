#pragma once

// Verification machinery for the estimator theory: Monte Carlo bias/variance
// decomposition, closed-form bound evaluators for the unified-momentum
// family, an Euler-Maruyama simulator for the momentum SDE
//
//     dm = [-(1-beta) m + u grad f(theta)] dt + u sigma dW,
//     dtheta = -alpha m dt,
//
// and the regret / gradient-norm trackers used by the convergence checks.

#include <cstdint>
#include <functional>
#include <vector>

#include "sgdf/rng.hpp"
#include "sgdf/vec.hpp"

namespace sgdf {

// ---- Monte Carlo bias/variance ---------------------------------------------

struct BiasVarianceReport {
    double bias_sq = 0.0;    // |mean(estimates) - truth|^2
    double variance = 0.0;   // mean |estimate - mean(estimates)|^2
    double mse = 0.0;        // mean |estimate - truth|^2  (= bias_sq + variance)
    double std_error = 0.0;  // standard error of the mse estimate
    std::size_t n_trials = 0;
};

// estimator(trial) must return one independent estimate per trial index
// (typically: build RngStream(seed, trial), run a frozen-parameter filter,
// return its final output). Population statistics are used throughout so the
// decomposition mse = bias_sq + variance is an algebraic identity, holding
// to rounding error for any sample.
BiasVarianceReport mc_bias_variance(const std::function<Vector(std::uint64_t)>& estimator,
                                    const Vector& truth, std::size_t trials);

// ---- closed-form bounds -----------------------------------------------------

// Steady-state variance of m_t = beta m_{t-1} + u g_t driven by iid noise of
// std sigma: u^2 sigma^2 / (1 - beta^2). This is the discrete-time analog of
// the SDE's stationary variance u^2 sigma^2 / (2(1-beta)); the two differ by
// the factor (1+beta)/2 (about 5% at beta = 0.9), so tests oracle them
// separately.
double closed_form_momentum_variance(double beta, double u, double sigma);

struct TheoryBounds {
    double L = 0.0;      // gradient Lipschitz constant
    double G = 0.0;      // gradient norm bound
    double V = 0.0;      // true-gradient variance bound
    double sigma = 0.0;  // noise std
    double alpha = 0.0;  // step size
    double beta = 0.0;   // momentum coefficient, < 1
    double u = 0.0;      // momentum coupling, >= 1-beta
};

struct BoundValues {
    double bias_bound = 0.0;  // asymptotic squared-bias bound
    double var_bound = 0.0;   // asymptotic variance bound
};

// bias_bound = (u^2 a L G/(1-b)^3 + u^2 a L s/(sqrt(2)(1-b)^2.5) + (u/(1-b)-1)G)^2
// var_bound  = u^2 s^2/(1-b) + 2 u^2 V^2/(1-b)^2
// Specializations: u = 1-b recovers the EMA row, u = 1 (with b > 0) the
// classical-momentum row, b = 0 the plain-SGD row of the bound table.
BoundValues eval_theorem_bounds(const TheoryBounds& tb);

// ---- SDE simulation ---------------------------------------------------------

using GradFn = std::function<Vector(const Vector&)>;

struct SdeTrajectory {
    std::vector<double> times;
    std::vector<Vector> m;
    std::vector<Vector> theta;
    double dt = 0.0;
};

struct SdeOptions {
    Vector m0;                      // defaults to zeros at theta0's dimension
    Vector theta0;                  // required, fixes the dimension
    std::size_t record_stride = 1;  // keep every k-th step (state 0 and the last always kept)
};

// Euler-Maruyama with frozen coefficients:
//   m_{k+1}     = m_k + (-(1-beta) m_k + u grad(theta_k)) dt + u sigma sqrt(dt) N(0,I)
//   theta_{k+1} = theta_k - alpha m_k dt
// Precondition dt <= 0.01/(1-beta) keeps the discretization well inside the
// stable/accurate regime. Setting alpha = 0 freezes theta (the stationary-
// measurement configuration). Non-finite states abort with the step index.
SdeTrajectory sde_simulate(double beta, double u, double alpha, double sigma,
                           const GradFn& grad, double dt, double t_end, RngStream& rng,
                           const SdeOptions& opts);

struct StationaryMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t samples = 0;
};

// Streaming frozen-theta measurement: runs `dim` independent coordinates of
// the momentum SDE with constant per-coordinate gradient `grad_const`,
// discards t < t_burn, and pools mean/variance of m over the remaining steps
// and coordinates. Equivalent to sde_simulate with alpha = 0 but without
// storing the trajectory, so long averaging windows stay cheap.
StationaryMoments sde_stationary_moments(double beta, double u, double sigma,
                                         double grad_const, double dt, double t_end,
                                         double t_burn, std::size_t dim, RngStream& rng);

// ---- regret / gradient-norm trackers ---------------------------------------

// R(T) = sum_{t<=T} (losses[t] - opt_losses[t]); returned as the running sum.
std::vector<double> regret_curve(const std::vector<double>& losses,
                                 const std::vector<double>& opt_losses);

// Running minimum of per-step E||grad f(theta_t)||^2 samples.
std::vector<double> min_grad_norm_stat(const std::vector<double>& grad_sq_norms);

// Least-squares slope of log R against log T; needs >= 5 strictly positive
// points. R(T) ~ T^p yields p exactly.
double growth_exponent_fit(const std::vector<double>& t_values,
                           const std::vector<double>& r_values);

}  // namespace sgdf
