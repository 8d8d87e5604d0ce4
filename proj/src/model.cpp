#include "tdqho/model.hpp"

#include <cmath>

#include "tdqho/errors.hpp"

namespace tdqho {

QuadraticParams QuadraticParams::oscillator(double mass, double frequency, double horizon,
                                            double hbar) {
    QuadraticParams p;
    p.m = TimeFunction::constant(mass);
    p.omega = TimeFunction::constant(frequency);
    p.hbar = hbar;
    p.horizon = horizon;
    return p;
}

bool QuadraticParams::time_independent() const {
    return m.is_constant() && omega.is_constant() && alpha_x.is_constant() &&
           alpha_p.is_constant() && alpha_xp.is_constant() && alpha_0.is_constant();
}

MomentState MomentState::ground(double mass, double frequency, double hbar) {
    MomentState s;
    s.var_x = hbar / (2.0 * mass * frequency);
    s.var_p = mass * frequency * hbar / 2.0;
    return s;
}

MomentState MomentState::coherent(double mass, double frequency, double mean_x, double mean_p,
                                  double hbar) {
    MomentState s = ground(mass, frequency, hbar);
    s.mean_x = mean_x;
    s.mean_p = mean_p;
    return s;
}

bool MomentState::physical(double hbar, double tol) const {
    return var_x >= 0.0 && var_p >= 0.0 && robertson_schrodinger() >= hbar * hbar / 4.0 - tol;
}

void check_time(const QuadraticParams& params, double t) {
    const double slack = 1e-9 * params.horizon;
    if (!(t >= -slack && t <= params.horizon + slack))
        throw DomainError("time " + std::to_string(t) + " outside [0, " +
                          std::to_string(params.horizon) + "]");
}

namespace {

void check_positive_mass(double t, double m, double w) {
    if (!(m > 0.0)) throw DomainError("m(t) <= 0 at t=" + std::to_string(t));
    if (!(w > 0.0)) throw DomainError("omega(t) <= 0 at t=" + std::to_string(t));
}

}  // namespace

double kappa(const QuadraticParams& params, double t) {
    check_time(params, t);
    const double m = params.m.value(t);
    const double w = params.omega.value(t);
    check_positive_mass(t, m, w);
    return 0.5 * (params.m.derivative(t) / m + params.omega.derivative(t) / w +
                  4.0 * params.alpha_xp.value(t));
}

double kappa_rate(const QuadraticParams& params, double t) {
    check_time(params, t);
    const double m = params.m.value(t);
    const double w = params.omega.value(t);
    check_positive_mass(t, m, w);
    const double dm = params.m.derivative(t) / m;
    const double dw = params.omega.derivative(t) / w;
    return 0.5 * (params.m.second_derivative(t) / m - dm * dm +
                  params.omega.second_derivative(t) / w - dw * dw +
                  4.0 * params.alpha_xp.derivative(t));
}

EffectiveOscillator effective_m5_omega5(const QuadraticParams& params, double t) {
    const double k = kappa(params, t);
    const double w = params.omega.value(t);
    const double sum = w + k;
    const double w5sq = w * w - k * k;
    if (!(sum > 0.0)) throw ValidityError("m5(t) > 0 and omega5^2(t) > 0", t, sum);
    if (!(w5sq > 0.0)) throw ValidityError("m5(t) > 0 and omega5^2(t) > 0", t, w5sq);
    const double eta = params.m.value(0.0) * params.omega.value(0.0);
    return {eta / sum, w5sq};
}

double m5_log_rate(const QuadraticParams& params, double t) {
    const double k = kappa(params, t);
    const double w = params.omega.value(t);
    return -(params.omega.derivative(t) + kappa_rate(params, t)) / (w + k);
}

double gamma_squeeze(const QuadraticParams& params, double t) {
    check_time(params, t);
    const double mw = params.m.value(t) * params.omega.value(t);
    if (!(mw > 0.0)) throw DomainError("m(t) omega(t) <= 0 at t=" + std::to_string(t));
    return std::sqrt(params.m.value(0.0) * params.omega.value(0.0) / mw);
}

ValidityReport validate(const QuadraticParams& params, int n_samples) {
    if (n_samples < 2) throw DomainError("validate: need at least two samples");
    ValidityReport report;
    report.grid.reserve(static_cast<std::size_t>(n_samples));
    auto flag = [&](double t, const char* name, double value) {
        report.violations.push_back({t, name, value});
    };

    const bool check_static = params.time_independent();
    const double T = params.horizon;
    for (int i = 0; i < n_samples; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        report.grid.push_back(t);
        const double m = params.m.value(t);
        const double w = params.omega.value(t);
        if (!(m > 0.0)) flag(t, "m > 0", m);
        if (!(w > 0.0)) flag(t, "omega > 0", w);
        if (!(m > 0.0) || !(w > 0.0)) continue;
        const double k = 0.5 * (params.m.derivative(t) / m + params.omega.derivative(t) / w +
                                4.0 * params.alpha_xp.value(t));
        if (!(w + k > 0.0)) flag(t, "omega + kappa > 0", w + k);
        if (!(w * w - k * k > 0.0)) flag(t, "omega^2 - kappa^2 > 0", w * w - k * k);
        if (check_static) {
            const double axp = params.alpha_xp.value(t);
            if (!(w * w > 4.0 * axp * axp)) flag(t, "omega^2 > 4 alpha_xp^2", w * w - 4.0 * axp * axp);
        }
    }
    for (const auto* f : {&params.m, &params.omega, &params.alpha_x, &params.alpha_p,
                          &params.alpha_xp, &params.alpha_0})
        if (!f->covers(T)) flag(T, "tabulated grid covers [0, T]", T);
    report.valid = report.violations.empty();
    return report;
}

}  // namespace tdqho
