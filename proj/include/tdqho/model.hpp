#pragma once

#include <string>
#include <vector>

#include "tdqho/time_function.hpp"

namespace tdqho {

/// Coefficients of
///   H(t) = p^2/(2m) + m w^2 x^2/2 + a_x x + a_p p + a_xp {x,p} + a_0
/// on the horizon [0, horizon]. Natural units (hbar = 1) by default.
struct QuadraticParams {
    TimeFunction m = TimeFunction::constant(1.0);
    TimeFunction omega = TimeFunction::constant(1.0);
    TimeFunction alpha_x;
    TimeFunction alpha_p;
    TimeFunction alpha_xp;
    TimeFunction alpha_0;
    double hbar = 1.0;
    double horizon = 1.0;

    static QuadraticParams oscillator(double mass, double frequency, double horizon,
                                      double hbar = 1.0);

    bool time_independent() const;
};

/// First moments and central second moments at one instant.
/// cov_xp = <{x,p}>/2 - <x><p>.
struct MomentState {
    double t = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double cov_xp = 0.0;

    /// Ground state of the oscillator with the given mass and frequency.
    static MomentState ground(double mass, double frequency, double hbar = 1.0);
    /// Coherent state: ground variances, displaced means.
    static MomentState coherent(double mass, double frequency, double mean_x, double mean_p,
                                double hbar = 1.0);

    double uncertainty_product() const { return var_x * var_p; }
    /// var_x var_p - cov_xp^2, bounded below by hbar^2/4.
    double robertson_schrodinger() const { return var_x * var_p - cov_xp * cov_xp; }
    bool physical(double hbar, double tol = 1e-9) const;
};

struct Violation {
    double t;
    std::string constraint;
    double value;
};

struct ValidityReport {
    bool valid = true;
    std::vector<Violation> violations;
    std::vector<double> grid;
};

/// kappa(t) = (m'/m + w'/w + 4 a_xp)/2.
double kappa(const QuadraticParams& params, double t);
/// d kappa / dt from second derivatives of m and omega.
double kappa_rate(const QuadraticParams& params, double t);

struct EffectiveOscillator {
    double m5;
    double omega5_sq;
};

/// m5 = m(0) w(0)/(w + kappa), w5^2 = w^2 - kappa^2. Throws ValidityError.
EffectiveOscillator effective_m5_omega5(const QuadraticParams& params, double t);
/// dm5/dt / m5 = -(w' + kappa')/(w + kappa).
double m5_log_rate(const QuadraticParams& params, double t);

/// gamma(t) = sqrt(m(0) w(0) / (m(t) w(t))).
double gamma_squeeze(const QuadraticParams& params, double t);

/// Grid scan of positivity constraints on [0, horizon].
ValidityReport validate(const QuadraticParams& params, int n_samples = 4096);

/// Throws DomainError unless t lies in [0, horizon] (with round-off slack).
void check_time(const QuadraticParams& params, double t);

}  // namespace tdqho
