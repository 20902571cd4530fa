#include "modelforge/warping.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <json.hpp>

#include "modelforge/errors.hpp"

namespace modelforge {

namespace {

constexpr char kFormatTag[] = "modelforge.warping/1";

struct ClosedForm {
    double k;  // constant value of G

    WarpingTriple values(double t) const {
        if (k < 0.0) {
            const double s = std::sqrt(-k);
            return {std::sin(s * t) / s, std::cos(s * t), (1.0 - std::cos(s * t)) / (-k)};
        }
        if (k > 0.0) {
            const double s = std::sqrt(k);
            return {std::sinh(s * t) / s, std::cosh(s * t), (std::cosh(s * t) - 1.0) / k};
        }
        return {t, 1.0, 0.5 * t * t};
    }

    double derivative(double t, int order) const {
        const WarpingTriple v = values(t);
        switch (order) {
            case 0: return v.g;
            case 1: return v.dg;
            case 2: return k * v.g;
            case 3: return k * v.dg;
            case 4: return k * k * v.g;
        }
        throw Error("closed-form derivative order out of range");
    }
};

}  // namespace

struct WarpingSolution::Impl {
    CurvatureProfile profile = CurvatureProfile::constant(0.0);
    std::optional<DenseSolution> dense;
    std::optional<ClosedForm> closed;
    std::optional<double> first_zero;
    double r_end = 0.0;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
};

WarpingSolution::WarpingSolution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

const CurvatureProfile& WarpingSolution::profile() const { return impl_->profile; }
double WarpingSolution::r_end() const { return impl_->r_end; }
std::optional<double> WarpingSolution::first_zero() const { return impl_->first_zero; }
double WarpingSolution::rel_tol() const { return impl_->rel_tol; }
double WarpingSolution::abs_tol() const { return impl_->abs_tol; }
bool WarpingSolution::is_closed_form() const { return impl_->closed.has_value(); }
const DenseSolution* WarpingSolution::dense() const {
    return impl_->dense ? &*impl_->dense : nullptr;
}

WarpingTriple WarpingSolution::values(double t) const {
    if (!(t >= 0.0 && t <= impl_->r_end))
        throw OutOfRangeError("warping solution evaluated at t = " + std::to_string(t) +
                              " outside [0, " + std::to_string(impl_->r_end) + "]");
    if (impl_->closed) return impl_->closed->values(t);
    double buf[3];
    impl_->dense->eval(t, buf);
    return {buf[0], buf[1], buf[2]};
}

double WarpingSolution::derivative(double t, int order) const {
    if (order < 0 || order > 4)
        throw Error("warping derivative order must be in [0, 4]");
    if (!(t >= 0.0 && t <= impl_->r_end))
        throw OutOfRangeError("warping derivative requested at t = " + std::to_string(t) +
                              " outside [0, " + std::to_string(impl_->r_end) + "]");
    if (impl_->closed) return impl_->closed->derivative(t, order);

    const WarpingTriple v = values(t);
    switch (order) {
        case 0: return v.g;
        case 1: return v.dg;
        case 2: return impl_->profile.eval(t, 0) * v.g;
        case 3: {
            if (impl_->profile.max_derivative_order() < 1)
                throw DerivativeUnavailableError(
                    "third derivative of g needs the profile's first derivative");
            return impl_->profile.eval(t, 1) * v.g + impl_->profile.eval(t, 0) * v.dg;
        }
        case 4: {
            if (impl_->profile.max_derivative_order() < 2)
                throw DerivativeUnavailableError(
                    "fourth derivative of g needs the profile's second derivative");
            const double G = impl_->profile.eval(t, 0);
            return impl_->profile.eval(t, 2) * v.g + 2.0 * impl_->profile.eval(t, 1) * v.dg +
                   G * G * v.g;
        }
    }
    return 0.0;
}

WarpingSolution solve_warping(const CurvatureProfile& profile, double r_max, double rel_tol,
                              double abs_tol) {
    if (!(r_max > 0.0)) throw Error("solve_warping requires r_max > 0");

    RhsFn rhs = [&profile](double t, std::span<const double> y, std::span<double> dydt) {
        dydt[0] = y[1];
        dydt[1] = profile.eval(t, 0) * y[0];
        dydt[2] = y[0];
    };
    DenseSolution dense = integrate_ivp(rhs, {0.0, 1.0, 0.0}, 0.0, r_max, rel_tol, abs_tol);

    const double guard = std::max(1e-8, 10.0 * abs_tol);
    auto zero = locate_event(
        dense, [](double, std::span<const double> y) { return y[0]; }, guard, -1);

    auto impl = std::make_shared<WarpingSolution::Impl>();
    impl->profile = profile;
    impl->rel_tol = rel_tol;
    impl->abs_tol = abs_tol;
    if (zero) {
        const double fz = zero->first;
        impl->first_zero = fz;
        const double overhang = std::min(0.05, 0.01 * fz);
        impl->r_end = std::min(fz + overhang, r_max);
    } else {
        impl->r_end = r_max;
    }
    impl->dense = std::move(dense);
    return WarpingSolution(std::move(impl));
}

WarpingSolution closed_form_warping(double k, double r_max) {
    if (!(r_max > 0.0)) throw Error("closed_form_warping requires r_max > 0");
    auto impl = std::make_shared<WarpingSolution::Impl>();
    impl->profile = CurvatureProfile::constant(k);
    impl->closed = ClosedForm{k};
    impl->rel_tol = 0.0;
    impl->abs_tol = 0.0;
    if (k < 0.0) {
        const double fz = std::numbers::pi / std::sqrt(-k);
        if (fz <= r_max) {
            impl->first_zero = fz;
            impl->r_end = std::min(fz + std::min(0.05, 0.01 * fz), r_max);
        } else {
            impl->r_end = r_max;
        }
    } else {
        impl->r_end = r_max;
    }
    return WarpingSolution(std::move(impl));
}

std::string serialize_warping(const WarpingSolution& ws) {
    nlohmann::json j;
    j["format"] = kFormatTag;
    j["rel_tol"] = ws.rel_tol();
    j["abs_tol"] = ws.abs_tol();
    j["r_end"] = ws.r_end();
    if (ws.first_zero())
        j["first_zero"] = *ws.first_zero();
    else
        j["first_zero"] = nullptr;

    const CurvatureProfile& p = ws.profile();
    nlohmann::json jp;
    switch (p.kind()) {
        case ProfileKind::Constant:
            jp["kind"] = "constant";
            jp["value"] = p.eval(0.0, 0);
            break;
        case ProfileKind::Expression:
            jp["kind"] = "expression";
            jp["text"] = p.text();
            break;
        case ProfileKind::Tabulated: {
            jp["kind"] = "tabulated";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& [r, v] : p.samples()) rows.push_back({r, v});
            jp["samples"] = std::move(rows);
            break;
        }
    }
    j["profile"] = std::move(jp);

    if (ws.is_closed_form()) {
        j["backend"] = "closed";
        j["k"] = p.eval(0.0, 0);
    } else {
        j["backend"] = "dense";
        const DenseSolution& d = *ws.dense();
        nlohmann::json jd;
        jd["dim"] = d.dimension();
        jd["times"] = d.node_times();
        jd["states"] = d.node_states();
        jd["hs"] = d.step_sizes();
        jd["coeffs"] = d.step_coeffs();
        jd["steps_accepted"] = d.stats().steps_accepted;
        jd["steps_rejected"] = d.stats().steps_rejected;
        jd["rhs_evaluations"] = d.stats().rhs_evaluations;
        j["dense"] = std::move(jd);
    }
    return j.dump();
}

WarpingSolution deserialize_warping(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SerializationError(std::string("malformed warping record: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormatTag)
            throw SerializationError("unknown warping record format '" +
                                     j.at("format").get<std::string>() + "'");

        const auto& jp = j.at("profile");
        const std::string kind = jp.at("kind").get<std::string>();
        CurvatureProfile profile = CurvatureProfile::constant(0.0);
        if (kind == "constant") {
            profile = CurvatureProfile::constant(jp.at("value").get<double>());
        } else if (kind == "expression") {
            profile = parse_profile(jp.at("text").get<std::string>());
        } else if (kind == "tabulated") {
            std::vector<std::pair<double, double>> samples;
            for (const auto& row : jp.at("samples"))
                samples.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
            profile = CurvatureProfile::tabulated(std::move(samples));
        } else {
            throw SerializationError("unknown profile kind '" + kind + "'");
        }

        auto impl = std::make_shared<WarpingSolution::Impl>();
        impl->profile = std::move(profile);
        impl->rel_tol = j.at("rel_tol").get<double>();
        impl->abs_tol = j.at("abs_tol").get<double>();
        impl->r_end = j.at("r_end").get<double>();
        if (!j.at("first_zero").is_null())
            impl->first_zero = j.at("first_zero").get<double>();

        const std::string backend = j.at("backend").get<std::string>();
        if (backend == "closed") {
            impl->closed = ClosedForm{j.at("k").get<double>()};
        } else if (backend == "dense") {
            const auto& jd = j.at("dense");
            IntegrationStats stats;
            stats.steps_accepted = jd.at("steps_accepted").get<std::size_t>();
            stats.steps_rejected = jd.at("steps_rejected").get<std::size_t>();
            stats.rhs_evaluations = jd.at("rhs_evaluations").get<std::size_t>();
            impl->dense = DenseSolution::from_parts(
                jd.at("dim").get<std::size_t>(), jd.at("times").get<std::vector<double>>(),
                jd.at("states").get<std::vector<double>>(),
                jd.at("hs").get<std::vector<double>>(),
                jd.at("coeffs").get<std::vector<double>>(), impl->rel_tol, impl->abs_tol, stats);
        } else {
            throw SerializationError("unknown backend '" + backend + "'");
        }
        return WarpingSolution(std::move(impl));
    } catch (const nlohmann::json::exception& e) {
        throw SerializationError(std::string("incomplete warping record: ") + e.what());
    }
}

}  // namespace modelforge
