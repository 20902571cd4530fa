#include "modelforge/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modelforge/errors.hpp"

namespace modelforge {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - bhat: weights of the embedded error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Shampine's dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr std::size_t kEventSubsamples = 8;
constexpr double kRootTol = 1e-12;
constexpr std::size_t kMaxSteps = 16'000'000;

void check_finite(double t, std::span<const double> y, std::span<const double> dydt) {
    for (double v : dydt) {
        if (!std::isfinite(v)) {
            throw NonFiniteRhsError("right-hand side returned a non-finite value at t = " +
                                        std::to_string(t),
                                    t, std::vector<double>(y.begin(), y.end()));
        }
    }
}

// Quartic interpolant over one step, u(theta) with theta in [0, 1]:
//   u = c0 + theta*(c1 + (1-theta)*(c2 + theta*(c3 + (1-theta)*c4)))
double interp_value(const double* c, std::size_t dim, std::size_t comp, double theta) {
    const double c0 = c[comp], c1 = c[dim + comp], c2 = c[2 * dim + comp], c3 = c[3 * dim + comp],
                 c4 = c[4 * dim + comp];
    return c0 + theta * (c1 + (1.0 - theta) * (c2 + theta * (c3 + (1.0 - theta) * c4)));
}

// d/dtheta of the interpolant:
//   u  = c0 + theta*A,  A = c1 + (1-theta)*B,  B = c2 + theta*C,  C = c3 + (1-theta)*c4
//   u' = A + theta*A',  A' = -B + (1-theta)*B',  B' = C + theta*C',  C' = -c4
double interp_theta_derivative(const double* c, std::size_t dim, std::size_t comp,
                               double theta) {
    const double c1 = c[dim + comp], c2 = c[2 * dim + comp], c3 = c[3 * dim + comp],
                 c4 = c[4 * dim + comp];
    const double C = c3 + (1.0 - theta) * c4;
    const double B = c2 + theta * C;
    const double A = c1 + (1.0 - theta) * B;
    const double dC = -c4;
    const double dB = C + theta * dC;
    const double dA = -B + (1.0 - theta) * dB;
    return A + theta * dA;
}

}  // namespace

std::size_t DenseSolution::locate_step(double t) const {
    if (!(t >= times_.front() && t <= times_.back()))
        throw OutOfRangeError("dense solution evaluated at t = " + std::to_string(t) +
                              " outside [" + std::to_string(times_.front()) + ", " +
                              std::to_string(times_.back()) + "]");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - times_.begin());
    if (idx == 0) return 0;
    if (idx >= times_.size()) return times_.size() - 2;
    return idx - 1;
}

void DenseSolution::eval(double t, std::span<double> out) const {
    if (t == times_.back()) {  // exact node state, no interpolation round-off
        auto s = node_state(times_.size() - 1);
        std::copy(s.begin(), s.end(), out.begin());
        return;
    }
    const std::size_t step = locate_step(t);
    const double theta = (t - times_[step]) / hs_[step];
    const double* c = coeffs_.data() + step * 5 * dim_;
    for (std::size_t k = 0; k < dim_; ++k) out[k] = interp_value(c, dim_, k, theta);
}

void DenseSolution::eval_derivative(double t, std::span<double> out) const {
    std::size_t step;
    if (t == times_.back()) {
        step = times_.size() - 2;
    } else {
        step = locate_step(t);
    }
    const double theta = (t - times_[step]) / hs_[step];
    const double* c = coeffs_.data() + step * 5 * dim_;
    for (std::size_t k = 0; k < dim_; ++k)
        out[k] = interp_theta_derivative(c, dim_, k, theta) / hs_[step];
}

double DenseSolution::eval(double t, std::size_t component) const {
    if (t == times_.back()) return node_state(times_.size() - 1)[component];
    const std::size_t step = locate_step(t);
    const double theta = (t - times_[step]) / hs_[step];
    return interp_value(coeffs_.data() + step * 5 * dim_, dim_, component, theta);
}

double DenseSolution::eval_derivative(double t, std::size_t component) const {
    std::size_t step = (t == times_.back()) ? times_.size() - 2 : locate_step(t);
    const double theta = (t - times_[step]) / hs_[step];
    return interp_theta_derivative(coeffs_.data() + step * 5 * dim_, dim_, component,
                                         theta) /
           hs_[step];
}

DenseSolution DenseSolution::from_parts(std::size_t dim, std::vector<double> times,
                                        std::vector<double> states, std::vector<double> hs,
                                        std::vector<double> coeffs, double rel_tol,
                                        double abs_tol, IntegrationStats stats) {
    if (dim == 0 || times.size() < 2 || states.size() != times.size() * dim ||
        hs.size() != times.size() - 1 || coeffs.size() != (times.size() - 1) * 5 * dim)
        throw SerializationError("dense solution parts have inconsistent shapes");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]) || !(hs[i] > 0))
            throw SerializationError("dense solution mesh is not increasing");
    DenseSolution sol;
    sol.dim_ = dim;
    sol.times_ = std::move(times);
    sol.states_ = std::move(states);
    sol.hs_ = std::move(hs);
    sol.coeffs_ = std::move(coeffs);
    sol.rel_tol_ = rel_tol;
    sol.abs_tol_ = abs_tol;
    sol.stats_ = stats;
    return sol;
}

class DenseBuilder {
public:
    DenseBuilder(std::size_t dim, double t0, std::span<const double> y0, double rtol,
                 double atol) {
        sol_.dim_ = dim;
        sol_.rel_tol_ = rtol;
        sol_.abs_tol_ = atol;
        sol_.times_.push_back(t0);
        sol_.states_.insert(sol_.states_.end(), y0.begin(), y0.end());
    }

    void push_step(double t1, std::span<const double> y1, double h,
                   std::span<const double> rcont) {
        sol_.times_.push_back(t1);
        sol_.states_.insert(sol_.states_.end(), y1.begin(), y1.end());
        sol_.hs_.push_back(h);
        sol_.coeffs_.insert(sol_.coeffs_.end(), rcont.begin(), rcont.end());
    }

    // Replaces the last node with (t*, state at t*) after a terminal event.
    void truncate_last(double t_star, std::span<const double> y_star) {
        const std::size_t dim = sol_.dim_;
        sol_.times_.back() = t_star;
        std::copy(y_star.begin(), y_star.end(), sol_.states_.end() - static_cast<long>(dim));
    }

    DenseSolution finish(IntegrationStats stats) {
        sol_.stats_ = stats;
        return std::move(sol_);
    }

    const DenseSolution& current() const { return sol_; }

private:
    DenseSolution sol_;
};

namespace {

// Bisection sharpened by inverse quadratic interpolation on a scalar function
// with a sign change over [a, b].
double refine_root(const std::function<double(double)>& f, double a, double b, double fa,
                   double fb, double scale) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    double fm_prev = fa, m_prev = a;
    for (int iter = 0; iter < 300; ++iter) {
        if (std::fabs(b - a) <= kRootTol * (1.0 + std::fabs(0.5 * (a + b)))) break;
        double m = 0.5 * (a + b);
        // Inverse quadratic candidate through (a,fa), (b,fb), (m_prev,fm_prev).
        if (fa != fm_prev && fb != fm_prev && fa != fb) {
            const double q = fa / fm_prev, r = fb / fm_prev, s = fb / fa;
            const double num = s * (r * (r - q) * (m_prev - b) - (1.0 - r) * (b - a));
            const double den = (q - 1.0) * (r - 1.0) * (s - 1.0);
            if (den != 0.0) {
                double cand = b + num / den;
                if (cand > std::min(a, b) && cand < std::max(a, b)) m = cand;
            }
        }
        const double fm = f(m);
        if (std::fabs(fm) <= kRootTol * scale &&
            std::fabs(b - a) <= 1e-9 * (1.0 + std::fabs(m)))
            return m;
        m_prev = (fa * fm < 0.0) ? b : a;
        fm_prev = (fa * fm < 0.0) ? fb : fa;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        if (fm == 0.0) return m;
    }
    return 0.5 * (a + b);
}

bool direction_matches(double f_left, double f_right, int direction) {
    const bool up = f_left < 0.0 && f_right > 0.0;
    const bool down = f_left > 0.0 && f_right < 0.0;
    if (direction > 0) return up;
    if (direction < 0) return down;
    return up || down;
}

// Scans [lo, hi] of a dense solution for the first event crossing; assumes
// lo/hi lie within the solution span.
std::optional<double> scan_interval(const DenseSolution& sol, const EventFn& event, double lo,
                                    double hi, int direction, std::vector<double>& buf) {
    if (!(hi > lo)) return std::nullopt;
    auto value_at = [&](double t) {
        sol.eval(t, buf);
        return event(t, buf);
    };
    double prev_t = lo;
    double prev_f = value_at(lo);
    for (std::size_t s = 1; s <= kEventSubsamples; ++s) {
        const double t = (s == kEventSubsamples)
                             ? hi
                             : lo + (hi - lo) * static_cast<double>(s) / kEventSubsamples;
        const double ft = value_at(t);
        if (prev_f == 0.0) {  // root exactly at a sample: direction from the right value
            if ((direction >= 0 && ft > 0.0) || (direction <= 0 && ft < 0.0)) return prev_t;
        } else if (direction_matches(prev_f, ft, direction)) {
            const double scale = std::max({1.0, std::fabs(prev_f), std::fabs(ft)});
            return refine_root(value_at, prev_t, t, prev_f, ft, scale);
        }
        prev_t = t;
        prev_f = ft;
    }
    if (prev_f == 0.0 && direction == 0) return prev_t;
    return std::nullopt;
}

}  // namespace

DenseSolution integrate_ivp(const RhsFn& rhs, std::vector<double> y0, double t0, double t1,
                            double rel_tol, double abs_tol,
                            const std::vector<double>& component_scales,
                            const TerminalEvent* terminal, double max_step) {
    if (!(t1 > t0)) throw Error("integrate_ivp requires t1 > t0");
    const double h_cap = max_step > 0.0 ? max_step : std::numeric_limits<double>::infinity();
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("tolerances must be positive");
    const std::size_t dim = y0.size();
    if (dim == 0) throw Error("empty state");
    if (!component_scales.empty() && component_scales.size() != dim)
        throw Error("component_scales size mismatch");

    IntegrationStats stats;
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    std::vector<double> y(y0), ynew(dim), ystage(dim), err(dim), rcont(5 * dim);

    auto eval_rhs = [&](double t, std::span<const double> yy, std::vector<double>& out) {
        rhs(t, yy, out);
        ++stats.rhs_evaluations;
        check_finite(t, yy, out);
    };

    auto scaled_norm = [&](const std::vector<double>& v, const std::vector<double>& ya,
                           const std::vector<double>& yb) {
        double sum = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double mag = std::max(std::fabs(ya[i]), std::fabs(yb[i]));
            if (!component_scales.empty() && component_scales[i] > 0.0)
                mag = component_scales[i];
            const double sc = abs_tol + rel_tol * mag;
            const double q = v[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / static_cast<double>(dim));
    };

    double t = t0;
    eval_rhs(t, y, k1);

    // Deterministic initial step (Hairer's hinit, simplified).
    double h;
    {
        const double d0 = scaled_norm(y, y, y);
        const double d1n = scaled_norm(k1, y, y);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * (d0 / d1n);
        h0 = std::min(h0, t1 - t0);
        for (std::size_t i = 0; i < dim; ++i) ystage[i] = y[i] + h0 * k1[i];
        eval_rhs(t + h0, ystage, k2);
        for (std::size_t i = 0; i < dim; ++i) err[i] = k2[i] - k1[i];
        const double d2 = scaled_norm(err, y, y) / h0;
        double h1;
        if (std::max(d1n, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1n, d2), 0.2);
        h = std::min({100.0 * h0, h1, t1 - t0, h_cap});
    }

    DenseBuilder builder(dim, t0, y, rel_tol, abs_tol);

    bool done = false;
    while (!done) {
        if (stats.steps_accepted + stats.steps_rejected > kMaxSteps)
            throw Error("integrate_ivp exceeded the step budget");
        if (h < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t)))
            throw StepSizeUnderflowError(
                "step size underflow at t = " + std::to_string(t), t);
        if (t + h >= t1) {
            h = t1 - t;
            done = true;
        }

        for (std::size_t i = 0; i < dim; ++i) ystage[i] = y[i] + h * a21 * k1[i];
        eval_rhs(t + h / 5.0, ystage, k2);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval_rhs(t + 3.0 * h / 10.0, ystage, k3);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval_rhs(t + 4.0 * h / 5.0, ystage, k4);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval_rhs(t + 8.0 * h / 9.0, ystage, k5);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] =
                y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval_rhs(t + h, ystage, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval_rhs(t + h, ynew, k7);  // FSAL stage

        for (std::size_t i = 0; i < dim; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        const double err_norm = scaled_norm(err, y, ynew);

        if (err_norm <= 1.0) {
            // Dense coefficients for this step.
            for (std::size_t i = 0; i < dim; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                rcont[i] = y[i];
                rcont[dim + i] = ydiff;
                rcont[2 * dim + i] = bspl;
                rcont[3 * dim + i] = ydiff - h * k7[i] - bspl;
                rcont[4 * dim + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                          d6 * k6[i] + d7 * k7[i]);
            }
            const double t_new = done ? t1 : t + h;
            builder.push_step(t_new, ynew, h, rcont);
            ++stats.steps_accepted;

            if (terminal && terminal->fn) {
                const DenseSolution& partial = builder.current();
                std::vector<double> buf(dim);
                auto hit = scan_interval(partial, terminal->fn, t, t_new, terminal->direction,
                                         buf);
                if (hit && *hit > t) {
                    partial.eval(*hit, buf);
                    builder.truncate_last(*hit, buf);
                    return builder.finish(stats);
                }
            }

            t = t_new;
            std::swap(y, ynew);
            std::swap(k1, k7);
            const double factor =
                std::clamp(0.9 * std::pow(std::max(err_norm, 1e-30), -0.2), 0.2, 5.0);
            h = std::min(h * factor, h_cap);
        } else {
            ++stats.steps_rejected;
            done = false;
            h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 1.0);
        }
    }

    return builder.finish(stats);
}

std::optional<std::pair<double, std::vector<double>>> locate_event(const DenseSolution& sol,
                                                                   const EventFn& event,
                                                                   double from, int direction) {
    if (from >= sol.t_end()) return std::nullopt;
    from = std::max(from, sol.t_begin());
    std::vector<double> buf(sol.dimension());
    for (std::size_t step = 0; step + 1 < sol.node_count(); ++step) {
        const double lo = std::max(sol.node_time(step), from);
        const double hi = sol.node_time(step + 1);
        if (hi <= from) continue;
        auto hit = scan_interval(sol, event, lo, hi, direction, buf);
        if (hit && *hit > from) {
            sol.eval(*hit, buf);
            return std::make_pair(*hit, buf);
        }
    }
    return std::nullopt;
}

}  // namespace modelforge
