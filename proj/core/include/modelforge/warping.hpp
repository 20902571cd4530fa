#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "modelforge/integrate.hpp"
#include "modelforge/profile.hpp"

namespace modelforge {

struct WarpingTriple {
    double g;
    double dg;
    double integral;  // I(t) = int_0^t g
};

/// Solution of the warping problem g'' = G g, g(0) = 0, g'(0) = 1, together
/// with the running integral I = int_0^t g and the detected first positive
/// zero of g (the model radius), when one exists below r_max.
///
/// Immutable and cheap to copy; evaluations are pure and thread-safe.
class WarpingSolution {
public:
    const CurvatureProfile& profile() const;
    double r_end() const;
    std::optional<double> first_zero() const;
    double rel_tol() const;
    double abs_tol() const;

    /// (g, g', I) at t in [0, r_end]; throws OutOfRangeError outside.
    WarpingTriple values(double t) const;
    double g(double t) const { return values(t).g; }
    double dg(double t) const { return values(t).dg; }
    double integral(double t) const { return values(t).integral; }

    /// g^{(order)}(t) for order <= 4. Orders 0 and 1 come from the dense
    /// output; orders 2..4 use the recurrence
    ///   g'' = G g,  g''' = G' g + G g',  g'''' = G'' g + 2 G' g' + G^2 g,
    /// so order q >= 3 needs profile derivatives up to q - 2.
    double derivative(double t, int order) const;

    /// True when backed by exact closed forms instead of a dense mesh.
    bool is_closed_form() const;
    /// The dense numeric solution, or nullptr for closed-form backends.
    const DenseSolution* dense() const;

private:
    friend WarpingSolution solve_warping(const CurvatureProfile&, double, double, double);
    friend WarpingSolution closed_form_warping(double, double);
    friend WarpingSolution deserialize_warping(std::string_view);
    struct Impl;
    explicit WarpingSolution(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// Integrates the augmented system (g, g', I)' = (g', G g, g) from (0, 1, 0)
/// on [0, r_max]. If g has a zero past the guard max(1e-8, 10*abs_tol) it is
/// recorded as first_zero and the exposed domain ends a short guard distance
/// min(0.05, 0.01*first_zero) past it, giving one-sided derivative access at
/// the boundary. Constant profiles are integrated numerically like any other.
WarpingSolution solve_warping(const CurvatureProfile& profile, double r_max,
                              double rel_tol = 1e-12, double abs_tol = 1e-12);

/// Exact space-form warping solutions wrapped in the same interface. The
/// argument is the constant value of G: k < 0 gives the sphere family
/// g = sin(sqrt(-k) t)/sqrt(-k) with first zero pi/sqrt(-k), k > 0 the
/// hyperbolic family, k = 0 the Euclidean g = t.
WarpingSolution closed_form_warping(double k, double r_max);

/// Versioned JSON record carrying the profile, tolerances, mesh, node states
/// and interpolation coefficients; loading reproduces bit-identical
/// evaluations.
std::string serialize_warping(const WarpingSolution& ws);
WarpingSolution deserialize_warping(std::string_view json_text);

}  // namespace modelforge
