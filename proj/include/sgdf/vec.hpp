#pragma once

// Flat dense vectors and the handful of elementwise helpers the optimizers
// are built from. Everything here is a plain sequential loop on purpose:
// results must be reproducible bitwise across runs on one platform, so no
// reassociating reductions, no fancy kernels.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgdf/common.hpp"

namespace sgdf {

using Vector = std::vector<double>;

inline void check_same_dim(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

// NaN policy: every public operation that writes a Vector runs its result
// through this check and aborts on the first non-finite element.
inline void check_finite(const Vector& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw numeric_error(std::string(what) + ": non-finite value at index " +
                                std::to_string(i));
        }
    }
}

inline void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw numeric_error(std::string(what) + ": non-finite result");
    }
}

inline Vector constant_vector(std::size_t dim, double value) {
    if (dim == 0) throw std::invalid_argument("constant_vector: dim must be positive");
    return Vector(dim, value);
}

inline Vector add(const Vector& a, const Vector& b) {
    check_same_dim(a, b, "add");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    check_finite(out, "add");
    return out;
}

inline Vector sub(const Vector& a, const Vector& b) {
    check_same_dim(a, b, "sub");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    check_finite(out, "sub");
    return out;
}

inline Vector scale(const Vector& a, double c) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
    check_finite(out, "scale");
    return out;
}

inline Vector hadamard(const Vector& a, const Vector& b) {
    check_same_dim(a, b, "hadamard");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    check_finite(out, "hadamard");
    return out;
}

inline double dot(const Vector& a, const Vector& b) {
    check_same_dim(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    check_finite(acc, "dot");
    return acc;
}

inline double norm2(const Vector& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * a[i];
    double n = std::sqrt(acc);
    check_finite(n, "norm2");
    return n;
}

inline double norm_inf(const Vector& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double x = std::fabs(a[i]);
        if (x > m) m = x;
    }
    check_finite(m, "norm_inf");
    return m;
}

}  // namespace sgdf
