#include "sgdf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sgdf/common.hpp"

namespace sgdf {

BiasVarianceReport mc_bias_variance(const std::function<Vector(std::uint64_t)>& estimator,
                                    const Vector& truth, std::size_t trials) {
    if (!estimator) throw std::invalid_argument("mc_bias_variance: estimator must be callable");
    if (trials < 100)
        throw std::invalid_argument("mc_bias_variance: trials must be >= 100, got " +
                                    std::to_string(trials));
    check_finite(truth, "mc_bias_variance truth");
    const std::size_t dim = truth.size();
    if (dim == 0) throw std::invalid_argument("mc_bias_variance: truth must be non-empty");

    std::vector<Vector> estimates;
    estimates.reserve(trials);
    for (std::uint64_t i = 0; i < trials; ++i) {
        Vector e = estimator(i);
        if (e.size() != dim)
            throw std::invalid_argument("mc_bias_variance: estimate dim " +
                                        std::to_string(e.size()) + " != truth dim " +
                                        std::to_string(dim) + " at trial " + std::to_string(i));
        check_finite(e, "mc_bias_variance estimate");
        estimates.push_back(std::move(e));
    }

    Vector mean(dim, 0.0);
    for (const Vector& e : estimates)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += e[j];
    for (std::size_t j = 0; j < dim; ++j) mean[j] /= static_cast<double>(trials);

    BiasVarianceReport rep;
    rep.n_trials = trials;
    for (std::size_t j = 0; j < dim; ++j) {
        const double b = mean[j] - truth[j];
        rep.bias_sq += b * b;
    }

    // Per-trial squared errors: around the mean (variance) and around the
    // truth (mse). Population normalization keeps mse = bias_sq + variance
    // exact; std_error reports the spread of the per-trial mse samples.
    double mse_sum = 0.0, mse_sq_sum = 0.0, var_sum = 0.0;
    for (const Vector& e : estimates) {
        double se_truth = 0.0, se_mean = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double dt = e[j] - truth[j];
            const double dm = e[j] - mean[j];
            se_truth += dt * dt;
            se_mean += dm * dm;
        }
        mse_sum += se_truth;
        mse_sq_sum += se_truth * se_truth;
        var_sum += se_mean;
    }
    const double n = static_cast<double>(trials);
    rep.mse = mse_sum / n;
    rep.variance = var_sum / n;
    const double mse_var = std::max(0.0, mse_sq_sum / n - rep.mse * rep.mse);
    rep.std_error = std::sqrt(mse_var / n);
    return rep;
}

double closed_form_momentum_variance(double beta, double u, double sigma) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("closed_form_momentum_variance: beta must be in [0,1), got " +
                                    std::to_string(beta));
    if (!(u > 0.0))
        throw std::invalid_argument("closed_form_momentum_variance: u must be > 0, got " +
                                    std::to_string(u));
    if (!(sigma >= 0.0))
        throw std::invalid_argument("closed_form_momentum_variance: sigma must be >= 0, got " +
                                    std::to_string(sigma));
    return u * u * sigma * sigma / (1.0 - beta * beta);
}

BoundValues eval_theorem_bounds(const TheoryBounds& tb) {
    if (!(tb.beta >= 0.0 && tb.beta < 1.0))
        throw std::invalid_argument("eval_theorem_bounds: beta must be in [0,1), got " +
                                    std::to_string(tb.beta));
    if (!(tb.u >= (1.0 - tb.beta)))
        throw std::invalid_argument("eval_theorem_bounds: u must be >= 1-beta, got u=" +
                                    std::to_string(tb.u));
    if (!(tb.L >= 0.0 && tb.G >= 0.0 && tb.V >= 0.0 && tb.sigma >= 0.0 && tb.alpha >= 0.0))
        throw std::invalid_argument("eval_theorem_bounds: L, G, V, sigma, alpha must be >= 0");

    const double omb = 1.0 - tb.beta;
    const double u2 = tb.u * tb.u;
    const double term1 = u2 * tb.alpha * tb.L * tb.G / (omb * omb * omb);
    const double term2 = u2 * tb.alpha * tb.L * tb.sigma / (std::sqrt(2.0) * std::pow(omb, 2.5));
    const double term3 = (tb.u / omb - 1.0) * tb.G;
    const double root = term1 + term2 + term3;

    BoundValues out;
    out.bias_bound = root * root;
    out.var_bound = u2 * tb.sigma * tb.sigma / omb + 2.0 * u2 * tb.V * tb.V / (omb * omb);
    return out;
}

SdeTrajectory sde_simulate(double beta, double u, double alpha, double sigma,
                           const GradFn& grad, double dt, double t_end, RngStream& rng,
                           const SdeOptions& opts) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("sde_simulate: beta must be in [0,1), got " +
                                    std::to_string(beta));
    if (!(u > 0.0)) throw std::invalid_argument("sde_simulate: u must be > 0");
    if (!(alpha >= 0.0)) throw std::invalid_argument("sde_simulate: alpha must be >= 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sde_simulate: sigma must be >= 0");
    if (!grad) throw std::invalid_argument("sde_simulate: grad must be callable");
    if (!(dt > 0.0)) throw std::invalid_argument("sde_simulate: dt must be > 0");
    const double dt_max = 0.01 / (1.0 - beta);
    if (dt > dt_max)
        throw std::invalid_argument("sde_simulate: dt=" + std::to_string(dt) +
                                    " exceeds stability limit 0.01/(1-beta)=" +
                                    std::to_string(dt_max));
    if (!(t_end > 0.0)) throw std::invalid_argument("sde_simulate: t_end must be > 0");
    if (opts.theta0.empty()) throw std::invalid_argument("sde_simulate: theta0 must be non-empty");
    check_finite(opts.theta0, "sde_simulate theta0");
    const std::size_t dim = opts.theta0.size();
    Vector m = opts.m0.empty() ? Vector(dim, 0.0) : opts.m0;
    if (m.size() != dim)
        throw std::invalid_argument("sde_simulate: m0 dim " + std::to_string(m.size()) +
                                    " != theta0 dim " + std::to_string(dim));
    check_finite(m, "sde_simulate m0");
    const std::size_t stride = opts.record_stride == 0 ? 1 : opts.record_stride;

    Vector theta = opts.theta0;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    const double noise_scale = u * sigma * std::sqrt(dt);
    const double drift = 1.0 - (1.0 - beta) * dt;

    SdeTrajectory traj;
    traj.dt = dt;
    traj.times.push_back(0.0);
    traj.m.push_back(m);
    traj.theta.push_back(theta);

    for (std::size_t k = 0; k < n_steps; ++k) {
        Vector g = grad(theta);
        if (g.size() != dim)
            throw std::invalid_argument("sde_simulate: grad returned dim " +
                                        std::to_string(g.size()) + " != " + std::to_string(dim));
        // theta uses the pre-update m_k; update it before overwriting m.
        for (std::size_t j = 0; j < dim; ++j) theta[j] -= alpha * m[j] * dt;
        for (std::size_t j = 0; j < dim; ++j) {
            m[j] = m[j] * drift + u * g[j] * dt + noise_scale * rng.gaussian();
            if (!std::isfinite(m[j]) || !std::isfinite(theta[j]))
                throw numeric_error("sde_simulate: non-finite state at step " +
                                    std::to_string(k + 1) + ", coordinate " + std::to_string(j));
        }
        if ((k + 1) % stride == 0 || k + 1 == n_steps) {
            traj.times.push_back(static_cast<double>(k + 1) * dt);
            traj.m.push_back(m);
            traj.theta.push_back(theta);
        }
    }
    return traj;
}

StationaryMoments sde_stationary_moments(double beta, double u, double sigma,
                                         double grad_const, double dt, double t_end,
                                         double t_burn, std::size_t dim, RngStream& rng) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("sde_stationary_moments: beta must be in [0,1)");
    if (!(u > 0.0)) throw std::invalid_argument("sde_stationary_moments: u must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sde_stationary_moments: sigma must be >= 0");
    if (!(dt > 0.0) || dt > 0.01 / (1.0 - beta))
        throw std::invalid_argument("sde_stationary_moments: dt must be in (0, 0.01/(1-beta)]");
    if (!(t_end > t_burn) || !(t_burn >= 0.0))
        throw std::invalid_argument("sde_stationary_moments: need 0 <= t_burn < t_end");
    if (dim == 0) throw std::invalid_argument("sde_stationary_moments: dim must be >= 1");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    const auto burn_steps = static_cast<std::size_t>(std::ceil(t_burn / dt - 1e-12));
    const double drift = 1.0 - (1.0 - beta) * dt;
    const double forcing = u * grad_const * dt;
    const double noise_scale = u * sigma * std::sqrt(dt);

    Vector m(dim, 0.0);
    // Welford accumulation over every post-burn (step, coordinate) sample so
    // the pooled second moment stays stable over long windows.
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        for (std::size_t j = 0; j < dim; ++j) {
            m[j] = m[j] * drift + forcing + noise_scale * rng.gaussian();
            if (!std::isfinite(m[j]))
                throw numeric_error("sde_stationary_moments: non-finite state at step " +
                                    std::to_string(k + 1));
            if (k >= burn_steps) {
                ++count;
                const double d = m[j] - mean;
                mean += d / static_cast<double>(count);
                m2 += d * (m[j] - mean);
            }
        }
    }
    if (count < 2)
        throw std::invalid_argument("sde_stationary_moments: averaging window too short");
    StationaryMoments out;
    out.mean = mean;
    out.variance = m2 / static_cast<double>(count);
    out.samples = count;
    return out;
}

std::vector<double> regret_curve(const std::vector<double>& losses,
                                 const std::vector<double>& opt_losses) {
    if (losses.size() != opt_losses.size())
        throw std::invalid_argument("regret_curve: losses size " + std::to_string(losses.size()) +
                                    " != opt_losses size " + std::to_string(opt_losses.size()));
    std::vector<double> out(losses.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (!std::isfinite(losses[i]) || !std::isfinite(opt_losses[i]))
            throw numeric_error("regret_curve: non-finite loss at index " + std::to_string(i));
        acc += losses[i] - opt_losses[i];
        out[i] = acc;
    }
    return out;
}

std::vector<double> min_grad_norm_stat(const std::vector<double>& grad_sq_norms) {
    std::vector<double> out(grad_sq_norms.size());
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grad_sq_norms.size(); ++i) {
        const double v = grad_sq_norms[i];
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("min_grad_norm_stat: entries must be finite and >= 0 "
                                        "(index " + std::to_string(i) + ")");
        running = std::min(running, v);
        out[i] = running;
    }
    return out;
}

double growth_exponent_fit(const std::vector<double>& t_values,
                           const std::vector<double>& r_values) {
    if (t_values.size() != r_values.size())
        throw std::invalid_argument("growth_exponent_fit: size mismatch");
    std::size_t n = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(t_values[i] > 0.0) || !(r_values[i] > 0.0)) continue;  // log undefined
        const double x = std::log(t_values[i]);
        const double y = std::log(r_values[i]);
        ++n;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if (n < 5)
        throw std::invalid_argument("growth_exponent_fit: need >= 5 strictly positive points, "
                                    "got " + std::to_string(n));
    const double nd = static_cast<double>(n);
    const double denom = nd * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0))
        throw std::invalid_argument("growth_exponent_fit: degenerate abscissae");
    return (nd * sxy - sx * sy) / denom;
}

}  // namespace sgdf
