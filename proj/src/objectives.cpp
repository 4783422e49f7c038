#include "sgdf/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sgdf {

namespace {

void check_theta(const Vector& theta, std::size_t dim, const char* what) {
    if (theta.size() != dim) {
        throw std::invalid_argument(std::string(what) + ": theta has dimension " +
                                    std::to_string(theta.size()) + ", expected " +
                                    std::to_string(dim));
    }
}

class QuadraticObjective final : public StochasticObjective {
public:
    QuadraticObjective(std::size_t dim, double kappa, double sigma) : sigma_(sigma) {
        if (dim == 0) throw std::invalid_argument("noisy_quadratic: dim must be positive");
        if (!(kappa >= 1.0)) throw std::invalid_argument("noisy_quadratic: kappa must be >= 1");
        if (!(sigma >= 0.0)) throw std::invalid_argument("noisy_quadratic: sigma must be >= 0");
        if (dim == 1 && kappa != 1.0) {
            throw std::invalid_argument("noisy_quadratic: dim == 1 requires kappa == 1");
        }
        spectrum_.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            double frac = (dim == 1) ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
            spectrum_[i] = std::pow(kappa, frac);
        }
    }

    std::size_t dim() const override { return spectrum_.size(); }

    double loss(const Vector& theta) const override {
        check_theta(theta, dim(), "quadratic loss");
        double acc = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            acc += 0.5 * spectrum_[i] * theta[i] * theta[i];
        }
        check_finite(acc, "quadratic loss");
        return acc;
    }

    Vector true_grad(const Vector& theta) const override {
        check_theta(theta, dim(), "quadratic grad");
        Vector g(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) g[i] = spectrum_[i] * theta[i];
        check_finite(g, "quadratic grad");
        return g;
    }

    Vector noisy_grad(const Vector& theta, RngStream& rng) const override {
        Vector g = true_grad(theta);
        if (sigma_ > 0.0) {
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += sigma_ * rng.gaussian();
        }
        return g;
    }

    std::optional<Vector> optimum() const override { return Vector(dim(), 0.0); }
    double noise_sigma() const override { return sigma_; }

    const Vector& spectrum() const { return spectrum_; }

private:
    Vector spectrum_;
    double sigma_;
};

class RosenbrockObjective final : public StochasticObjective {
public:
    explicit RosenbrockObjective(double sigma) : sigma_(sigma) {
        if (!(sigma >= 0.0)) throw std::invalid_argument("rosenbrock: sigma must be >= 0");
    }

    std::size_t dim() const override { return 2; }

    double loss(const Vector& theta) const override {
        check_theta(theta, 2, "rosenbrock loss");
        double x = theta[0], y = theta[1];
        double a = 1.0 - x;
        double b = y - x * x;
        double v = a * a + 100.0 * b * b;
        check_finite(v, "rosenbrock loss");
        return v;
    }

    Vector true_grad(const Vector& theta) const override {
        check_theta(theta, 2, "rosenbrock grad");
        double x = theta[0], y = theta[1];
        double b = y - x * x;
        Vector g{-2.0 * (1.0 - x) - 400.0 * x * b, 200.0 * b};
        check_finite(g, "rosenbrock grad");
        return g;
    }

    Vector noisy_grad(const Vector& theta, RngStream& rng) const override {
        Vector g = true_grad(theta);
        if (sigma_ > 0.0) {
            g[0] += sigma_ * rng.gaussian();
            g[1] += sigma_ * rng.gaussian();
        }
        return g;
    }

    std::optional<Vector> optimum() const override { return Vector{1.0, 1.0}; }
    double noise_sigma() const override { return sigma_; }

private:
    double sigma_;
};

class ConstantStreamObjective final : public StochasticObjective {
public:
    ConstantStreamObjective(Vector c, double sigma) : c_(std::move(c)), sigma_(sigma) {
        if (c_.empty()) throw std::invalid_argument("constant_grad_stream: c must be non-empty");
        if (!(sigma >= 0.0)) {
            throw std::invalid_argument("constant_grad_stream: sigma must be >= 0");
        }
        check_finite(c_, "constant_grad_stream c");
    }

    std::size_t dim() const override { return c_.size(); }

    double loss(const Vector& theta) const override {
        check_theta(theta, dim(), "constant stream loss");
        return dot(c_, theta);  // f(theta) = c'theta, so grad f == c
    }

    Vector true_grad(const Vector& theta) const override {
        check_theta(theta, dim(), "constant stream grad");
        return c_;
    }

    Vector noisy_grad(const Vector& theta, RngStream& rng) const override {
        check_theta(theta, dim(), "constant stream grad");
        Vector g = c_;
        if (sigma_ > 0.0) {
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += sigma_ * rng.gaussian();
        }
        return g;
    }

    std::optional<Vector> optimum() const override { return std::nullopt; }
    double noise_sigma() const override { return sigma_; }

private:
    Vector c_;
    double sigma_;
};

}  // namespace

ObjectivePtr noisy_quadratic(std::size_t dim, double kappa, double sigma) {
    return std::make_unique<QuadraticObjective>(dim, kappa, sigma);
}

ObjectivePtr rosenbrock(double sigma) { return std::make_unique<RosenbrockObjective>(sigma); }

ObjectivePtr constant_grad_stream(Vector c, double sigma) {
    return std::make_unique<ConstantStreamObjective>(std::move(c), sigma);
}

SyntheticDataset make_two_blob_dataset(std::size_t n, std::size_t dim, double margin,
                                       std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("make_two_blob_dataset: need n >= 2");
    if (dim == 0) throw std::invalid_argument("make_two_blob_dataset: dim must be positive");
    if (!(margin >= 0.0)) throw std::invalid_argument("make_two_blob_dataset: margin must be >= 0");

    SyntheticDataset ds;
    ds.n = n;
    ds.dim = dim;
    ds.seed = seed;
    ds.margin = margin;
    ds.features.resize(n * dim);
    ds.labels.resize(n);

    RngStream rng(seed, 0);
    std::size_t n_pos = (n + 1) / 2;  // |n_pos - n_neg| <= 1: balanced by construction
    for (std::size_t i = 0; i < n; ++i) {
        int label = (i < n_pos) ? 1 : -1;
        ds.labels[i] = label;
        double center = 0.5 * margin * static_cast<double>(label);
        for (std::size_t j = 0; j < dim; ++j) {
            double x = rng.gaussian();
            ds.features[i * dim + j] = (j == 0) ? center + x : x;
        }
    }
    return ds;
}

LogisticObjective::LogisticObjective(SyntheticDataset dataset, std::size_t batch)
    : data_(std::move(dataset)), batch_(batch) {
    if (data_.n == 0) throw std::invalid_argument("logistic_objective: empty dataset");
    if (data_.features.size() != data_.n * data_.dim || data_.labels.size() != data_.n) {
        throw std::invalid_argument("logistic_objective: inconsistent dataset shape");
    }
    if (batch_ < 1 || batch_ > data_.n) {
        throw std::invalid_argument("logistic_objective: batch must lie in [1, n]");
    }
}

double LogisticObjective::loss(const Vector& theta) const {
    check_theta(theta, data_.dim, "logistic loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < data_.n; ++i) {
        double z = 0.0;
        const double* x = &data_.features[i * data_.dim];
        for (std::size_t j = 0; j < data_.dim; ++j) z += theta[j] * x[j];
        z *= data_.labels[i];
        // log(1 + exp(-z)) evaluated without overflow on either tail
        acc += (z > 0.0) ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    }
    double v = acc / static_cast<double>(data_.n);
    check_finite(v, "logistic loss");
    return v;
}

Vector LogisticObjective::minibatch_grad(const Vector& theta,
                                         const std::vector<std::size_t>& idx) const {
    check_theta(theta, data_.dim, "logistic grad");
    if (idx.empty()) throw std::invalid_argument("logistic minibatch_grad: empty batch");
    Vector g(data_.dim, 0.0);
    for (std::size_t i : idx) {
        if (i >= data_.n) throw std::invalid_argument("logistic minibatch_grad: index out of range");
        double z = 0.0;
        const double* x = &data_.features[i * data_.dim];
        for (std::size_t j = 0; j < data_.dim; ++j) z += theta[j] * x[j];
        double y = data_.labels[i];
        z *= y;
        // d/dtheta log(1+exp(-y theta'x)) = -y * sigmoid(-z) * x
        double w = -y / (1.0 + std::exp(z));
        for (std::size_t j = 0; j < data_.dim; ++j) g[j] += w * x[j];
    }
    double inv = 1.0 / static_cast<double>(idx.size());
    for (std::size_t j = 0; j < data_.dim; ++j) g[j] *= inv;
    check_finite(g, "logistic grad");
    return g;
}

Vector LogisticObjective::true_grad(const Vector& theta) const {
    std::vector<std::size_t> all(data_.n);
    for (std::size_t i = 0; i < data_.n; ++i) all[i] = i;
    return minibatch_grad(theta, all);
}

Vector LogisticObjective::noisy_grad(const Vector& theta, RngStream& rng) const {
    if (batch_ == data_.n) return true_grad(theta);
    // Uniform sample without replacement (partial Fisher-Yates), so every
    // example is equally likely and the minibatch gradient stays unbiased.
    std::vector<std::size_t> pool(data_.n);
    for (std::size_t i = 0; i < data_.n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < batch_; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(data_.n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(batch_);
    return minibatch_grad(theta, pool);
}

ObjectivePtr logistic_objective(SyntheticDataset dataset, std::size_t batch) {
    return std::make_unique<LogisticObjective>(std::move(dataset), batch);
}

double finite_difference_check(const StochasticObjective& obj, const Vector& theta, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference_check: h must be positive");
    if (theta.size() != obj.dim()) {
        throw std::invalid_argument("finite_difference_check: theta dimension mismatch");
    }
    Vector grad = obj.true_grad(theta);
    Vector probe = theta;
    double worst = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        probe[i] = theta[i] + h;
        double f_plus = obj.loss(probe);
        probe[i] = theta[i] - h;
        double f_minus = obj.loss(probe);
        probe[i] = theta[i];
        double fd = (f_plus - f_minus) / (2.0 * h);
        check_finite(fd, "finite_difference_check");
        worst = std::max(worst, std::fabs(fd - grad[i]));
    }
    return worst;
}

}  // namespace sgdf
