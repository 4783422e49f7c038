#pragma once

// Synthetic stochastic objectives with known ground truth. Each objective is
// an immutable specification: loss/true_grad are pure, and noisy_grad is pure
// given the caller's RngStream, so concurrent trials just use distinct
// streams. Noise is unbiased by construction (additive zero-mean Gaussian,
// or uniform minibatch subsampling for the logistic task).

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sgdf/rng.hpp"
#include "sgdf/vec.hpp"

namespace sgdf {

class StochasticObjective {
public:
    virtual ~StochasticObjective() = default;

    virtual std::size_t dim() const = 0;
    virtual double loss(const Vector& theta) const = 0;        // noise-free f
    virtual Vector true_grad(const Vector& theta) const = 0;   // exact gradient
    virtual Vector noisy_grad(const Vector& theta, RngStream& rng) const = 0;
    virtual std::optional<Vector> optimum() const = 0;         // argmin when known
    virtual double noise_sigma() const = 0;  // additive-noise std; 0 for subsampling noise
};

using ObjectivePtr = std::unique_ptr<StochasticObjective>;

// f(theta) = 1/2 theta' A theta with A diagonal, spectrum log-uniformly
// spaced on [1, kappa] (lambda_i = kappa^(i/(d-1))); noisy gradient adds
// N(0, sigma^2 I). Diagonal on purpose: the filter is element-wise, and a
// rotation would only obscure per-coordinate behavior. dim == 1 requires
// kappa == 1 (a one-point spectrum cannot span a range).
ObjectivePtr noisy_quadratic(std::size_t dim, double kappa, double sigma);

// f(x, y) = (1-x)^2 + 100(y - x^2)^2, optimum (1, 1); additive noise sigma.
ObjectivePtr rosenbrock(double sigma = 0.0);

// A pure gradient stream: true_grad == c everywhere (f(theta) = c'theta),
// noisy draws are c + N(0, sigma^2 I). No optimum. Used for stationary
// estimator analysis where only the gradient distribution matters.
ObjectivePtr constant_grad_stream(Vector c, double sigma);

// Two Gaussian blobs at +/- (margin/2) along the first axis, unit isotropic
// spread, labels +1/-1 split ceil(n/2)/floor(n/2); regenerable from the seed.
struct SyntheticDataset {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> features;  // row-major n x dim
    std::vector<int> labels;       // +1 / -1
    std::uint64_t seed = 0;
    double margin = 0.0;
};

SyntheticDataset make_two_blob_dataset(std::size_t n, std::size_t dim, double margin,
                                       std::uint64_t seed);

// Mean logistic loss over the dataset: mean_i log(1 + exp(-y_i * theta'x_i)).
// noisy_grad averages over a uniformly-sampled batch without replacement.
class LogisticObjective : public StochasticObjective {
public:
    LogisticObjective(SyntheticDataset dataset, std::size_t batch);

    std::size_t dim() const override { return data_.dim; }
    double loss(const Vector& theta) const override;
    Vector true_grad(const Vector& theta) const override;
    Vector noisy_grad(const Vector& theta, RngStream& rng) const override;
    std::optional<Vector> optimum() const override { return std::nullopt; }
    double noise_sigma() const override { return 0.0; }  // subsampling noise only

    // Gradient of the mean loss over an explicit index subset (test hook for
    // the linearity-of-mean property; also the noisy_grad workhorse).
    Vector minibatch_grad(const Vector& theta, const std::vector<std::size_t>& idx) const;

    const SyntheticDataset& dataset() const { return data_; }
    std::size_t batch() const { return batch_; }

private:
    SyntheticDataset data_;
    std::size_t batch_;
};

ObjectivePtr logistic_objective(SyntheticDataset dataset, std::size_t batch);

// Central-difference gradient check on the noise-free loss: returns
// max_i |(f(theta + h e_i) - f(theta - h e_i)) / 2h - true_grad_i|.
double finite_difference_check(const StochasticObjective& obj, const Vector& theta, double h);

}  // namespace sgdf
