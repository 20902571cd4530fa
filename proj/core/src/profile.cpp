#include "modelforge/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "modelforge/errors.hpp"

namespace modelforge {

namespace {

constexpr double kEvennessTol = 1e-10;
constexpr int kAuditSamples = 32;
constexpr double kAuditSpan = 4.0;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Fritsch-Carlson slopes: the classic monotone cubic choice.
std::vector<double> monotone_slopes(const std::vector<std::pair<double, double>>& s) {
    const std::size_t n = s.size();
    std::vector<double> d(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (s[i + 1].second - s[i].second) / (s[i + 1].first - s[i].first);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
            continue;
        }
        double a = m[i] / d[i], b = m[i + 1] / d[i];
        double norm = a * a + b * b;
        if (norm > 9.0) {
            double scale = 3.0 / std::sqrt(norm);
            m[i] = scale * a * d[i];
            m[i + 1] = scale * b * d[i];
        }
    }
    return m;
}

}  // namespace

struct CurvatureProfile::Impl {
    ProfileKind kind = ProfileKind::Constant;
    double constant = 0.0;
    std::string source_text;
    bool evenness_checked = false;
    int max_order = 0;

    // Expression kind: the expression and its first four derivatives.
    std::vector<ExprPtr> derivatives;

    // Tabulated kind.
    std::vector<std::pair<double, double>> samples;
    std::vector<double> slopes;

    double eval_table(double r) const {
        double x = std::fabs(r);
        const double xmax = samples.back().first;
        if (x > xmax * (1.0 + 1e-12))
            throw OutOfRangeError("tabulated profile evaluated at r = " + format_double(r) +
                                  " beyond table end " + format_double(xmax));
        x = std::min(x, xmax);
        auto it = std::upper_bound(samples.begin(), samples.end(), x,
                                   [](double v, const auto& p) { return v < p.first; });
        std::size_t i = it == samples.begin() ? 0 : static_cast<std::size_t>(it - samples.begin()) - 1;
        if (i + 1 >= samples.size()) i = samples.size() - 2;
        const double h = samples[i + 1].first - samples[i].first;
        const double t = (x - samples[i].first) / h;
        const double y0 = samples[i].second, y1 = samples[i + 1].second;
        const double m0 = slopes[i] * h, m1 = slopes[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
};

ProfileKind CurvatureProfile::kind() const { return impl_->kind; }

double CurvatureProfile::constant_value() const {
    if (impl_->kind != ProfileKind::Constant)
        throw Error("constant_value() called on a non-constant profile");
    return impl_->constant;
}

bool CurvatureProfile::evenness_checked() const { return impl_->evenness_checked; }

int CurvatureProfile::max_derivative_order() const { return impl_->max_order; }

double CurvatureProfile::eval(double r, int order) const {
    if (order < 0) throw Error("negative derivative order");
    switch (impl_->kind) {
        case ProfileKind::Constant:
            return order == 0 ? impl_->constant : 0.0;
        case ProfileKind::Expression:
            if (order > impl_->max_order)
                throw DerivativeUnavailableError(
                    "derivative order " + std::to_string(order) + " exceeds supported order " +
                    std::to_string(impl_->max_order));
            return impl_->derivatives[static_cast<std::size_t>(order)]->eval(r);
        case ProfileKind::Tabulated:
            if (order > 0)
                throw DerivativeUnavailableError(
                    "tabulated profiles do not support symbolic derivatives");
            return impl_->eval_table(r);
    }
    return 0.0;
}

std::string CurvatureProfile::text() const { return impl_->source_text; }

double CurvatureProfile::table_max() const {
    if (impl_->kind != ProfileKind::Tabulated)
        throw Error("table_max() called on a non-tabulated profile");
    return impl_->samples.back().first;
}

const std::vector<std::pair<double, double>>& CurvatureProfile::samples() const {
    return impl_->samples;
}

CurvatureProfile CurvatureProfile::constant(double k) {
    auto impl = std::make_shared<Impl>();
    impl->kind = ProfileKind::Constant;
    impl->constant = k;
    impl->source_text = "const:" + format_double(k);
    impl->evenness_checked = true;
    impl->max_order = std::numeric_limits<int>::max();
    return CurvatureProfile(std::move(impl));
}

CurvatureProfile CurvatureProfile::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw Error("tabulated profile needs at least two samples");
    if (samples.front().first != 0.0)
        throw Error("tabulated profile must start at r = 0");
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        if (!(samples[i].first < samples[i + 1].first))
            throw Error("tabulated profile radii must be strictly increasing");
    for (const auto& [r, v] : samples)
        if (!std::isfinite(r) || !std::isfinite(v))
            throw Error("tabulated profile contains a non-finite sample");
    auto impl = std::make_shared<Impl>();
    impl->kind = ProfileKind::Tabulated;
    impl->source_text = "tabulated";
    impl->evenness_checked = true;  // even by mirrored evaluation
    impl->max_order = 0;
    impl->slopes = monotone_slopes(samples);
    impl->samples = std::move(samples);
    return CurvatureProfile(std::move(impl));
}

CurvatureProfile parse_profile(std::string_view text) {
    constexpr std::string_view kConstPrefix = "const:";
    if (text.substr(0, kConstPrefix.size()) == kConstPrefix) {
        std::string rest(text.substr(kConstPrefix.size()));
        char* end = nullptr;
        double k = std::strtod(rest.c_str(), &end);
        while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
        if (end == rest.c_str() || (end && *end))
            throw SyntaxError("expected a number after 'const:'", kConstPrefix.size(), "number");
        return CurvatureProfile::constant(k);
    }

    ExprPtr ast = parse_expression(text);
    if (!ast->depends_on_variable()) {
        double k = ast->eval(0.0);
        if (!std::isfinite(k))
            throw Error("profile evaluates to a non-finite constant");
        return CurvatureProfile::constant(k);
    }

    // Audit: definedness and evenness at mirrored samples. Division by zero or
    // any other non-finite value at an audit point is a hard parse-time error.
    const double at_zero = ast->eval(0.0);
    if (!std::isfinite(at_zero))
        throw Error("profile is undefined at r = 0");
    for (int i = 1; i <= kAuditSamples; ++i) {
        const double r = kAuditSpan * static_cast<double>(i) / kAuditSamples;
        const double plus = ast->eval(r);
        const double minus = ast->eval(-r);
        if (!std::isfinite(plus) || !std::isfinite(minus))
            throw Error("profile is undefined at audit point r = " + format_double(r));
        const double mismatch = std::fabs(plus - minus);
        if (mismatch > kEvennessTol)
            throw NotEvenError("profile is not even: |G(" + format_double(r) + ") - G(-" +
                                   format_double(r) + ")| = " + format_double(mismatch),
                               r, mismatch);
    }

    auto impl = std::make_shared<CurvatureProfile::Impl>();
    impl->kind = ProfileKind::Expression;
    impl->source_text = ast->to_string();
    impl->evenness_checked = true;
    impl->max_order = 4;
    impl->derivatives.reserve(5);
    impl->derivatives.push_back(ast);
    for (int q = 1; q <= 4; ++q)
        impl->derivatives.push_back(impl->derivatives.back()->derivative());
    return CurvatureProfile(std::move(impl));
}

double eval_profile(const CurvatureProfile& profile, double r, int order) {
    return profile.eval(r, order);
}

}  // namespace modelforge
