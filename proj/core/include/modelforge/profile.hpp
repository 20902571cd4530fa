#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modelforge/expr.hpp"

namespace modelforge {

enum class ProfileKind { Constant, Expression, Tabulated };

/// Radial curvature profile G(r): an even, smooth function of the distance r.
///
/// Immutable after construction and safe to share across threads; evaluation
/// is pure. Expression and Constant profiles carry symbolic derivatives (the
/// first four are prepared eagerly at construction). Tabulated profiles use
/// monotone cubic interpolation on [0, table_max] with even mirroring and do
/// not support derivatives.
class CurvatureProfile {
public:
    ProfileKind kind() const;
    /// Constant value; only meaningful for the Constant kind.
    double constant_value() const;
    bool evenness_checked() const;
    int max_derivative_order() const;

    /// G^{(order)}(r). Order 0 is plain evaluation. Throws
    /// DerivativeUnavailableError for orders beyond max_derivative_order and
    /// OutOfRangeError outside a table's range.
    double eval(double r, int order = 0) const;
    double operator()(double r) const { return eval(r, 0); }

    /// Printable form: "const:<k>" for constants, the expression text for
    /// expressions, "tabulated" for tables.
    std::string text() const;

    /// Upper end of the sample range (Tabulated only).
    double table_max() const;
    const std::vector<std::pair<double, double>>& samples() const;

    static CurvatureProfile constant(double k);
    /// Samples must start at r = 0 and be strictly increasing in r.
    static CurvatureProfile tabulated(std::vector<std::pair<double, double>> samples);

private:
    friend CurvatureProfile parse_profile(std::string_view);
    struct Impl;
    explicit CurvatureProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Parses profile text: either "const:<number>" or an expression in r (see
/// the grammar in expr.hpp). Runs the evenness audit (32 mirrored samples on
/// [0, 4], tolerance 1e-10) and rejects profiles that are undefined or
/// non-finite at any audit point. Expressions without r collapse to Constant.
CurvatureProfile parse_profile(std::string_view text);

/// Free-function spelling of CurvatureProfile::eval.
double eval_profile(const CurvatureProfile& profile, double r, int order);

}  // namespace modelforge
