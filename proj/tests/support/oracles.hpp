#pragma once

// Independent closed-form and brute-force references used only by tests.
// Nothing here may call into the solver paths it is used to check.

#include <functional>
#include <stdexcept>
#include <string>

namespace modelforge::oracles {

enum class SpaceFormKind { Sphere, Hyperbolic, Euclidean };

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSignChangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-form space-form quantities at curvature scale |k|. `k` follows the
/// warping convention: it is the constant value of G, so k < 0 is the sphere
/// family, k > 0 hyperbolic, k = 0 Euclidean.
struct SpaceFormOracle {
    double k;

    double g(double r) const;
    double dg(double r) const;
    double integral(double r) const;          // int_0^r g
    double alpha(double A, double r) const;   // A*I + 1
    double H(double A, double r) const;       // A*g' / (A*I + 1)
};

/// The three displayed coefficient formulas at unit curvature scale:
///   sphere      A cos r / (-A cos r + 1 + A)
///   hyperbolic  A cosh r / (A cosh r + 1 - A)
///   euclidean   2A / (A r^2 + 2)
/// Throws DomainError when the denominator vanishes.
double oracle_H(SpaceFormKind kind, double A, double r);

/// Deliberately naive bisection, kept separate from the library's event
/// location. Requires f(a)*f(b) < 0; bisects until the bracket width reaches
/// tol. Throws NoSignChangeError.
double brute_root(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace modelforge::oracles
