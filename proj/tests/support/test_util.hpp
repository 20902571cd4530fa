#pragma once

// Shared helpers for the test suites: grids, finite differences and a
// deterministic RNG for the hand-rolled property tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace modelforge::testing {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

/// Central finite difference of order q (q <= 4) with step h.
inline double central_difference(const std::function<double(double)>& f, double x, int q,
                                 double h) {
    switch (q) {
        case 1: return (f(x + h) - f(x - h)) / (2.0 * h);
        case 2: return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        case 3:
            return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) /
                   (2.0 * h * h * h);
        case 4:
            return (f(x + 2 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2 * h)) /
                   (h * h * h * h);
        default: return 0.0;
    }
}

/// Deterministic uniform double in [lo, hi].
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace modelforge::testing
