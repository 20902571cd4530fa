#include "oracles.hpp"

#include <cmath>

namespace modelforge::oracles {

double SpaceFormOracle::g(double r) const {
    if (k < 0.0) {
        const double s = std::sqrt(-k);
        return std::sin(s * r) / s;
    }
    if (k > 0.0) {
        const double s = std::sqrt(k);
        return std::sinh(s * r) / s;
    }
    return r;
}

double SpaceFormOracle::dg(double r) const {
    if (k < 0.0) return std::cos(std::sqrt(-k) * r);
    if (k > 0.0) return std::cosh(std::sqrt(k) * r);
    return 1.0;
}

double SpaceFormOracle::integral(double r) const {
    if (k < 0.0) return (1.0 - std::cos(std::sqrt(-k) * r)) / (-k);
    if (k > 0.0) return (std::cosh(std::sqrt(k) * r) - 1.0) / k;
    return 0.5 * r * r;
}

double SpaceFormOracle::alpha(double A, double r) const { return A * integral(r) + 1.0; }

double SpaceFormOracle::H(double A, double r) const {
    const double den = alpha(A, r);
    if (den == 0.0) throw DomainError("oracle H denominator vanished");
    return A * dg(r) / den;
}

double oracle_H(SpaceFormKind kind, double A, double r) {
    double num = 0.0, den = 0.0;
    switch (kind) {
        case SpaceFormKind::Sphere:
            num = A * std::cos(r);
            den = -A * std::cos(r) + 1.0 + A;
            break;
        case SpaceFormKind::Hyperbolic:
            num = A * std::cosh(r);
            den = A * std::cosh(r) + 1.0 - A;
            break;
        case SpaceFormKind::Euclidean:
            num = 2.0 * A;
            den = A * r * r + 2.0;
            break;
    }
    if (den == 0.0) throw DomainError("oracle H denominator vanished");
    return num / den;
}

double brute_root(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw NoSignChangeError("brute_root: no sign change on the bracket");
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace modelforge::oracles
