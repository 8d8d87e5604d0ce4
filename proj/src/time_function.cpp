#include "tdqho/time_function.hpp"

#include <algorithm>
#include <cmath>

#include "tdqho/errors.hpp"

namespace tdqho {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Natural cubic spline second derivatives (tridiagonal solve).
std::vector<double> spline_second_derivatives(const std::vector<double>& x,
                                              const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        const double a = h0 / 6.0;
        const double b = (h0 + h1) / 3.0;
        const double cc = h1 / 6.0;
        const double rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        const double denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = d[i] - c[i] * m[i + 1];
        if (i == 1) break;
    }
    return m;
}

std::size_t segment(const std::vector<double>& x, double t) {
    if (t <= x.front()) return 0;
    if (t >= x.back()) return x.size() - 2;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    return static_cast<std::size_t>(std::distance(x.begin(), it)) - 1;
}

// Returns value, first and second derivative of the interpolant at t.
struct Jet {
    double v, d1, d2;
};

Jet eval_tabulated(const TimeFunction::Tabulated& tab, double t) {
    const auto& x = tab.times;
    const auto& y = tab.values;
    const std::size_t i = segment(x, t);
    const double h = x[i + 1] - x[i];
    if (tab.order == 1) {
        const double slope = (y[i + 1] - y[i]) / h;
        return {y[i] + slope * (t - x[i]), slope, 0.0};
    }
    const auto& m = tab.second;
    const double a = (x[i + 1] - t) / h;
    const double b = (t - x[i]) / h;
    const double v = a * y[i] + b * y[i + 1] +
                     ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    const double d1 = (y[i + 1] - y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m[i] +
                      (3.0 * b * b - 1.0) / 6.0 * h * m[i + 1];
    const double d2 = a * m[i] + b * m[i + 1];
    return {v, d1, d2};
}

double poly_eval(const std::vector<double>& c, double t, int order) {
    // order-th derivative of sum c_k t^k, Horner form
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(order);) {
        double factor = 1.0;
        for (int j = 0; j < order; ++j) factor *= static_cast<double>(k - j);
        acc = acc * t + factor * c[k];
    }
    return acc;
}

}  // namespace

TimeFunction TimeFunction::constant(double value) { return TimeFunction(Kind{Constant{value}}); }

TimeFunction TimeFunction::cosine(double amplitude, double frequency, double phase,
                                  double offset) {
    return TimeFunction(Kind{Cosine{amplitude, frequency, phase, offset}});
}

TimeFunction TimeFunction::exponential(double prefactor, double rate, double offset) {
    return TimeFunction(Kind{Exponential{prefactor, rate, offset}});
}

TimeFunction TimeFunction::polynomial(std::vector<double> coefficients) {
    return TimeFunction(Kind{Polynomial{std::move(coefficients)}});
}

TimeFunction TimeFunction::tabulated(std::vector<double> times, std::vector<double> values,
                                     int order) {
    if (times.size() != values.size())
        throw DomainError("tabulated function: times and values differ in length");
    if (times.size() < 2) throw DomainError("tabulated function: need at least two knots");
    if (order != 1 && order != 3)
        throw DomainError("tabulated function: interpolation order must be 1 or 3");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw DomainError("tabulated function: time grid must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("tabulated function: non-finite value");
    Tabulated tab{std::move(times), std::move(values), order, {}};
    if (order == 3) tab.second = spline_second_derivatives(tab.times, tab.values);
    return TimeFunction(Kind{std::move(tab)});
}

double TimeFunction::value(double t) const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [t](const Cosine& c) {
                return c.offset + c.amplitude * std::cos(c.frequency * t + c.phase);
            },
            [t](const Exponential& e) { return e.offset + e.prefactor * std::exp(e.rate * t); },
            [t](const Polynomial& p) { return poly_eval(p.coefficients, t, 0); },
            [t](const Tabulated& tab) { return eval_tabulated(tab, t).v; },
        },
        kind_);
}

double TimeFunction::derivative(double t) const {
    return std::visit(
        overloaded{
            [](const Constant&) { return 0.0; },
            [t](const Cosine& c) {
                return -c.amplitude * c.frequency * std::sin(c.frequency * t + c.phase);
            },
            [t](const Exponential& e) { return e.prefactor * e.rate * std::exp(e.rate * t); },
            [t](const Polynomial& p) { return poly_eval(p.coefficients, t, 1); },
            [t](const Tabulated& tab) { return eval_tabulated(tab, t).d1; },
        },
        kind_);
}

double TimeFunction::second_derivative(double t) const {
    return std::visit(
        overloaded{
            [](const Constant&) { return 0.0; },
            [t](const Cosine& c) {
                return -c.amplitude * c.frequency * c.frequency *
                       std::cos(c.frequency * t + c.phase);
            },
            [t](const Exponential& e) {
                return e.prefactor * e.rate * e.rate * std::exp(e.rate * t);
            },
            [t](const Polynomial& p) { return poly_eval(p.coefficients, t, 2); },
            [t](const Tabulated& tab) { return eval_tabulated(tab, t).d2; },
        },
        kind_);
}

bool TimeFunction::is_constant() const {
    return std::visit(
        overloaded{
            [](const Constant&) { return true; },
            [](const Cosine& c) { return c.amplitude == 0.0 || c.frequency == 0.0; },
            [](const Exponential& e) { return e.prefactor == 0.0 || e.rate == 0.0; },
            [](const Polynomial& p) {
                return std::all_of(p.coefficients.begin() + std::min<std::size_t>(1, p.coefficients.size()),
                                   p.coefficients.end(), [](double c) { return c == 0.0; });
            },
            [](const Tabulated& tab) {
                return std::all_of(tab.values.begin(), tab.values.end(),
                                   [&](double v) { return v == tab.values.front(); });
            },
        },
        kind_);
}

bool TimeFunction::covers(double horizon) const {
    if (const auto* tab = std::get_if<Tabulated>(&kind_))
        return tab->times.front() <= 0.0 && tab->times.back() >= horizon;
    return true;
}

std::string TimeFunction::kind_name() const {
    return std::visit(overloaded{
                          [](const Constant&) { return std::string("constant"); },
                          [](const Cosine&) { return std::string("cosine"); },
                          [](const Exponential&) { return std::string("exponential"); },
                          [](const Polynomial&) { return std::string("polynomial"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      kind_);
}

}  // namespace tdqho
