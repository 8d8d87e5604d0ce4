#pragma once

#include <string>
#include <variant>
#include <vector>

namespace tdqho {

/// Real coefficient of time with analytic first and second derivatives.
///
/// Closed-form kinds differentiate exactly; the tabulated kind interpolates a
/// strictly increasing grid either linearly or with a natural cubic spline and
/// differentiates the interpolant.
class TimeFunction {
public:
    struct Constant {
        double value = 0.0;
    };
    /// offset + amplitude * cos(frequency * t + phase)
    struct Cosine {
        double amplitude = 0.0;
        double frequency = 0.0;
        double phase = 0.0;
        double offset = 0.0;
    };
    /// offset + prefactor * exp(rate * t)
    struct Exponential {
        double prefactor = 0.0;
        double rate = 0.0;
        double offset = 0.0;
    };
    /// sum_k coefficients[k] * t^k
    struct Polynomial {
        std::vector<double> coefficients;
    };
    struct Tabulated {
        std::vector<double> times;
        std::vector<double> values;
        int order = 3;  // 1 = linear, 3 = natural cubic spline
        std::vector<double> second;  // spline second derivatives at knots
    };

    using Kind = std::variant<Constant, Cosine, Exponential, Polynomial, Tabulated>;

    TimeFunction() : kind_(Constant{}) {}

    static TimeFunction constant(double value);
    static TimeFunction cosine(double amplitude, double frequency, double phase = 0.0,
                               double offset = 0.0);
    static TimeFunction exponential(double prefactor, double rate, double offset = 0.0);
    static TimeFunction polynomial(std::vector<double> coefficients);
    /// Throws DomainError unless times are strictly increasing and sizes match.
    static TimeFunction tabulated(std::vector<double> times, std::vector<double> values,
                                  int order = 3);

    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    bool is_constant() const;
    bool is_closed_form() const { return !std::holds_alternative<Tabulated>(kind_); }
    /// True when a tabulated grid covers [0, horizon]; always true for closed forms.
    bool covers(double horizon) const;
    std::string kind_name() const;

    const Kind& kind() const noexcept { return kind_; }

private:
    explicit TimeFunction(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

}  // namespace tdqho
