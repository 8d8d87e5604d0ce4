#pragma once

#include <complex>

#include "tdqho/model.hpp"

namespace tdqho {

/// Oscillator driven in position: H = p^2/2m + m w^2 x^2/2 + strength cos(w_d t) x.
struct DrivenSpec {
    double m = 1.0;
    double omega = 1.0;
    double strength = 0.1;
    double drive_frequency = 1.0;
    double hbar = 1.0;
    double horizon = 1.0;

    /// |w - w_d| < 1e-12 w selects the secular (resonant) closed forms.
    bool resonant() const;
};

/// Caldirola-Kanai oscillator: mass m e^{gamma t}, constant frequency.
struct CKSpec {
    double m = 1.0;
    double omega = 1.0;
    double gamma = -0.25;
    double hbar = 1.0;
    double horizon = 1.0;
};

struct CKAux {
    double m5;
    double omega5;
    double gamma_plus;
    double gamma_minus;
};

QuadraticParams driven_params(const DrivenSpec& spec);
QuadraticParams ck_params(const CKSpec& spec);

/// Exact moments of the driven oscillator (no rotating-wave approximation).
MomentState driven_moments_exact(const DrivenSpec& spec, const MomentState& initial, double t);

/// Rotating-wave approximation in the frame rotating at the drive frequency,
/// starting from coherent amplitude alpha0. Variances stay at ground values.
MomentState driven_moments_rwa(const DrivenSpec& spec, std::complex<double> alpha0, double t);
/// Coherent amplitude whose means match the given state.
std::complex<double> coherent_amplitude(const DrivenSpec& spec, const MomentState& state);

/// Throws ValidityError when |gamma| >= 2 omega.
CKAux ck_aux(const CKSpec& spec);
MomentState ck_moments(const CKSpec& spec, const MomentState& initial, double t);
/// var_x var_p for the ground initial state.
double ck_uncertainty(const CKSpec& spec, double t);

}  // namespace tdqho
