#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace modelforge {

/// Vector field y' = f(t, y). Writes the derivative into `dydt`.
using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Scalar event function evaluated along a solution.
using EventFn = std::function<double(double t, std::span<const double> y)>;

struct IntegrationStats {
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t rhs_evaluations = 0;
};

/// Dense solution of an initial value problem on [t_begin, t_end].
///
/// Each accepted step stores a quartic interpolant that matches state and
/// state derivative at both step ends, so dense evaluation is globally C^1.
/// Evaluation at mesh nodes reproduces the stored node states exactly;
/// evaluation outside the span throws OutOfRangeError, never extrapolates.
class DenseSolution {
public:
    std::size_t dimension() const noexcept { return dim_; }
    double t_begin() const noexcept { return times_.front(); }
    double t_end() const noexcept { return times_.back(); }

    std::size_t node_count() const noexcept { return times_.size(); }
    double node_time(std::size_t i) const { return times_[i]; }
    std::span<const double> node_state(std::size_t i) const {
        return {states_.data() + i * dim_, dim_};
    }

    void eval(double t, std::span<double> out) const;
    void eval_derivative(double t, std::span<double> out) const;
    double eval(double t, std::size_t component) const;
    double eval_derivative(double t, std::size_t component) const;

    const IntegrationStats& stats() const noexcept { return stats_; }
    double rel_tol() const noexcept { return rel_tol_; }
    double abs_tol() const noexcept { return abs_tol_; }

    /// Raw interpolation data, exposed for persistence. `step_coeffs` holds
    /// five stacked dim-vectors per step; `step_sizes` keeps the original
    /// step lengths (the last one can exceed the node spacing when the
    /// integration was truncated by a terminal event).
    const std::vector<double>& node_times() const noexcept { return times_; }
    const std::vector<double>& node_states() const noexcept { return states_; }
    const std::vector<double>& step_sizes() const noexcept { return hs_; }
    const std::vector<double>& step_coeffs() const noexcept { return coeffs_; }

    /// Rebuilds a solution from persisted parts. Throws SerializationError on
    /// inconsistent shapes.
    static DenseSolution from_parts(std::size_t dim, std::vector<double> times,
                                    std::vector<double> states, std::vector<double> hs,
                                    std::vector<double> coeffs, double rel_tol, double abs_tol,
                                    IntegrationStats stats);

private:
    friend class DenseBuilder;
    DenseSolution() = default;

    std::size_t locate_step(double t) const;

    std::size_t dim_ = 0;
    std::vector<double> times_;   // node_count entries
    std::vector<double> states_;  // node_count * dim
    std::vector<double> hs_;      // node_count - 1 entries
    std::vector<double> coeffs_;  // (node_count - 1) * 5 * dim
    IntegrationStats stats_;
    double rel_tol_ = 0.0;
    double abs_tol_ = 0.0;
};

/// Terminal condition for integrate_ivp: integration stops at the first time
/// the event crosses zero in the given direction (+1 upward, -1 downward,
/// 0 either way).
struct TerminalEvent {
    EventFn fn;
    int direction = 0;
};

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0) with the Dormand-Prince
/// 5(4) embedded pair and returns the dense solution.
///
/// `component_scales`: optional per-component magnitudes used in the error
/// norm instead of |y| (entries <= 0 keep the automatic choice). This keeps
/// step selection independent of components like angles whose absolute value
/// is meaningless.
///
/// `max_step` caps the step size; with loose tolerances this turns the
/// integrator into a fixed-step method, which the order tests rely on.
///
/// Throws StepSizeUnderflowError and NonFiniteRhsError.
DenseSolution integrate_ivp(const RhsFn& rhs, std::vector<double> y0, double t0, double t1,
                            double rel_tol, double abs_tol,
                            const std::vector<double>& component_scales = {},
                            const TerminalEvent* terminal = nullptr, double max_step = 0.0);

/// Locates the first time strictly after `from` at which `event` crosses zero
/// in the requested direction (+1 upward, -1 downward, 0 any). The root is
/// refined on the dense output by bracketing (bisection sharpened by inverse
/// quadratic steps) to |event| <= 1e-12*scale and bracket width
/// <= 1e-12*(1+|t*|). Returns the crossing time and state, or nullopt if the
/// event does not change sign on the remaining span.
std::optional<std::pair<double, std::vector<double>>> locate_event(const DenseSolution& sol,
                                                                   const EventFn& event,
                                                                   double from, int direction);

}  // namespace modelforge
