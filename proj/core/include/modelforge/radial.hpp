#pragma once

#include <optional>
#include <string>

#include "modelforge/integrate.hpp"
#include "modelforge/warping.hpp"

namespace modelforge {

/// Outcome of the admissible-radius search for a parameter A.
///
/// R_star is the first radius at which the coefficient H genuinely stops
/// being defined: the first zero of the denominator A*I + 1 at which the
/// numerator A*g' does not also vanish. Zeros shared by numerator and
/// denominator are removable (H extends through them by one l'Hopital step),
/// so the search continues past them; the unit sphere with A = -1 is the
/// canonical case. nullopt means no such radius up to r_end.
struct AdmissibilityResult {
    std::optional<double> R_star;
    bool admissible = false;
    std::string note;
};

/// Scans the denominator A*I(t) + 1 for its first non-removable zero. The
/// denominator is monotone between zeros of g, so the scan brackets roots by
/// endpoint signs on each monotone piece and bisects; nothing can hide
/// between samples. Verdict: admissible iff no zero was found up to r_end or
/// the zero lies strictly past the model radius r_{-G}.
AdmissibilityResult admissible_R_star(const WarpingSolution& ws, double A);

/// The one-parameter family of radial systems on a model: coefficient
/// H_A(t) = A g'(t) / (A I(t) + 1), radial solution alpha_A(t) = A I(t) + B.
/// Immutable; all evaluations are pure.
class RadialSystem {
public:
    /// Throws Error when A == 0 (the family is undefined there).
    RadialSystem(WarpingSolution ws, double A, double B = 1.0);

    double A() const noexcept { return a_; }
    double B() const noexcept { return b_; }
    const WarpingSolution& warping() const noexcept { return ws_; }
    const std::optional<double>& R_star() const noexcept { return result_.R_star; }
    bool admissible() const noexcept { return result_.admissible; }
    const AdmissibilityResult& admissibility() const noexcept { return result_; }

    /// H_A(t). When numerator and denominator vanish together (within 1e-10)
    /// one l'Hopital step gives A g''/(A g). Throws DomainExceededError at or
    /// past R_star and at non-removable near-zeros of the denominator.
    double coefficient_H(double t) const;

    /// alpha_A(t) = A I(t) + B on [0, r_end].
    double alpha(double t) const;
    /// alpha_A'(t) = A g(t).
    double alpha_prime(double t) const;

private:
    WarpingSolution ws_;
    double a_;
    double b_;
    AdmissibilityResult result_;
};

/// Flat residual record shared by the verification commands.
struct ResidualReport {
    std::string check;
    std::string profile;
    double A = 0.0;
    double B = 0.0;
    int grid_n = 0;
    double max_residual = 0.0;
    double argmax_t = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Integrates the Cauchy problem y'' = H_A(t) y, y(0) = 1, y'(0) = 0 with an
/// independent adaptive run (H evaluated on demand) and reports the largest
/// deviation from alpha_A on a uniform grid over
/// [0, 0.999*min(R*, r_{-G}, r_end)]. The system must be admissible.
ResidualReport verify_second_order(const RadialSystem& sys, int n_grid, double tol);

struct ThirdOrderResult {
    DenseSolution solution;
    ResidualReport report;
};

/// Integrates y''' = G(s) y', y(0) = B, y'(0) = 0, y''(0) = A as a first-order
/// triple and reports the largest deviation of y from A I + B on a 200-point
/// grid over [0, t_end]. A = 0 is allowed here (y stays at B).
ThirdOrderResult solve_third_order(const WarpingSolution& ws, double A, double B, double t_end,
                                   double tol = 1e-6);

}  // namespace modelforge
