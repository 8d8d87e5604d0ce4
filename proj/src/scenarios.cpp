#include "tdqho/scenarios.hpp"

#include <cmath>

#include "tdqho/errors.hpp"

namespace tdqho {

namespace {

// Propagates means and central moments through a 2x2 map plus a forced offset.
MomentState apply_map(const MomentState& s0, double t, double A, double B, double D, double E,
                      double x_forced, double p_forced) {
    MomentState s;
    s.t = t;
    s.mean_x = A * s0.mean_x + B * s0.mean_p + x_forced;
    s.mean_p = D * s0.mean_x + E * s0.mean_p + p_forced;
    s.var_x = A * A * s0.var_x + B * B * s0.var_p + 2.0 * A * B * s0.cov_xp;
    s.var_p = D * D * s0.var_x + E * E * s0.var_p + 2.0 * D * E * s0.cov_xp;
    s.cov_xp = A * D * s0.var_x + B * E * s0.var_p + (A * E + B * D) * s0.cov_xp;
    return s;
}

}  // namespace

bool DrivenSpec::resonant() const { return std::abs(omega - drive_frequency) < 1e-12 * omega; }

QuadraticParams driven_params(const DrivenSpec& spec) {
    auto p = QuadraticParams::oscillator(spec.m, spec.omega, spec.horizon, spec.hbar);
    p.alpha_x = TimeFunction::cosine(spec.strength, spec.drive_frequency);
    return p;
}

QuadraticParams ck_params(const CKSpec& spec) {
    auto p = QuadraticParams::oscillator(spec.m, spec.omega, spec.horizon, spec.hbar);
    p.m = TimeFunction::exponential(spec.m, spec.gamma);
    return p;
}

MomentState driven_moments_exact(const DrivenSpec& spec, const MomentState& initial, double t) {
    const double m = spec.m, w = spec.omega, wd = spec.drive_frequency, F = spec.strength;
    const double c = std::cos(w * t), s = std::sin(w * t);

    // response of the zero-mean initial state
    double x_forced, p_forced;
    if (spec.resonant()) {
        x_forced = -F * t * s / (2.0 * m * w);
        p_forced = -F / (2.0 * w) * (w * t * c + s);
    } else {
        const double gap = w * w - wd * wd;
        x_forced = F / (m * gap) * (c - std::cos(wd * t));
        p_forced = -F / gap * (w * s - wd * std::sin(wd * t));
    }
    return apply_map(initial, t, c, s / (m * w), -m * w * s, c, x_forced, p_forced);
}

std::complex<double> coherent_amplitude(const DrivenSpec& spec, const MomentState& state) {
    const double mw = spec.m * spec.omega;
    return {state.mean_x * std::sqrt(mw / (2.0 * spec.hbar)),
            state.mean_p / std::sqrt(2.0 * mw * spec.hbar)};
}

MomentState driven_moments_rwa(const DrivenSpec& spec, std::complex<double> alpha0, double t) {
    using namespace std::complex_literals;
    const double mw = spec.m * spec.omega;
    const double g = spec.strength / std::sqrt(2.0 * mw * spec.hbar);
    const double detuning = spec.omega - spec.drive_frequency;

    // alpha' = -i detuning alpha - i g/2
    std::complex<double> alpha;
    if (spec.resonant()) {
        alpha = alpha0 - 0.5i * g * t;
    } else {
        const std::complex<double> phase = std::exp(-1i * detuning * t);
        alpha = phase * alpha0 - g / (2.0 * detuning) * (1.0 - phase);
    }
    const std::complex<double> lab = alpha * std::exp(-1i * spec.drive_frequency * t);

    MomentState s = MomentState::ground(spec.m, spec.omega, spec.hbar);
    s.t = t;
    s.mean_x = std::sqrt(2.0 * spec.hbar / mw) * lab.real();
    s.mean_p = std::sqrt(2.0 * mw * spec.hbar) * lab.imag();
    return s;
}

CKAux ck_aux(const CKSpec& spec) {
    const double w = spec.omega, g = spec.gamma;
    const double w5sq = w * w - g * g / 4.0;
    if (!(w5sq > 0.0) || !(w + g / 2.0 > 0.0))
        throw ValidityError("|gamma| < 2 omega", 0.0, w5sq);
    CKAux aux;
    aux.omega5 = std::sqrt(w5sq);
    aux.m5 = spec.m * w / (w + g / 2.0);
    const double ratio = spec.m * w / (aux.m5 * aux.omega5);
    aux.gamma_plus = ratio + 1.0 / ratio;
    aux.gamma_minus = ratio - 1.0 / ratio;
    return aux;
}

MomentState ck_moments(const CKSpec& spec, const MomentState& s0, double t) {
    const CKAux aux = ck_aux(spec);
    const double mw = spec.m * spec.omega;
    const double S = std::sin(aux.omega5 * t), C = std::cos(aux.omega5 * t);
    const double S2 = std::sin(2.0 * aux.omega5 * t);
    const double Gp = aux.gamma_plus, Gm = aux.gamma_minus;
    const double decay = std::exp(-spec.gamma * t / 2.0);
    const double grow = 1.0 / decay;
    const double anti = 2.0 * s0.cov_xp;  // <{x,p}> - 2<x><p>

    MomentState s;
    s.t = t;
    s.mean_x = decay / 2.0 * (S * (Gm * s0.mean_x + Gp * s0.mean_p / mw) + 2.0 * C * s0.mean_x);
    s.mean_p = grow / 2.0 * (2.0 * C * s0.mean_p - S * (Gm * s0.mean_p + Gp * mw * s0.mean_x));

    const double cx = 2.0 * C + Gm * S;
    const double cp = 2.0 * C - Gm * S;
    s.var_x = decay * decay / 4.0 *
              (cx * cx * s0.var_x + Gp * Gp / (mw * mw) * S * S * s0.var_p +
               Gp / mw * (Gm * S * S + S2) * anti);
    s.var_p = grow * grow / 4.0 *
              (cp * cp * s0.var_p + mw * mw * Gp * Gp * S * S * s0.var_x +
               mw * Gp * (Gm * S * S - S2) * anti);

    // covariance through the same linear map
    const double A = decay * cx / 2.0, B = decay * Gp * S / (2.0 * mw);
    const double D = -grow * mw * Gp * S / 2.0, E = grow * cp / 2.0;
    s.cov_xp = A * D * s0.var_x + B * E * s0.var_p + (A * E + B * D) * s0.cov_xp;
    return s;
}

double ck_uncertainty(const CKSpec& spec, double t) {
    const auto s = ck_moments(spec, MomentState::ground(spec.m, spec.omega, spec.hbar), t);
    return s.var_x * s.var_p;
}

}  // namespace tdqho
