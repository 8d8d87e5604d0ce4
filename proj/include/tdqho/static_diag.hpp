#pragma once

namespace tdqho {

/// Time-independent quadratic oscillator.
struct StaticParams {
    double m = 1.0;
    double omega = 1.0;
    double alpha_x = 0.0;
    double alpha_p = 0.0;
    double alpha_xp = 0.0;
    double alpha_0 = 0.0;
};

struct Translation {
    double beta_x;
    double beta_p;
};

struct StaticDiagResult {
    double beta_x = 0.0;
    double beta_p = 0.0;
    double l = 0.0;
    double theta_x_sq = 0.0;
    double theta_p_sq = 0.0;
    double M = 0.0;
    double Omega_sq = 0.0;
};

/// Displacement that removes the linear x and p terms. Throws SingularityError
/// at omega^2 = 4 alpha_xp^2.
Translation static_translation(const StaticParams& params);

double accumulation_constant(const StaticParams& params, double beta_x, double beta_p);

/// Coefficients of x and p left over after translating by (beta_x, beta_p);
/// both vanish for the output of static_translation.
Translation linear_term_residual(const StaticParams& params, double beta_x, double beta_p);

/// Rotation with only the position generator (theta_p = 0): M = m.
StaticDiagResult diag_branch_theta_p_zero(const StaticParams& params);
/// Rotation with only the momentum generator (theta_x = 0): M = m w^2/(w^2 - 4 a_xp^2).
StaticDiagResult diag_branch_theta_x_zero(const StaticParams& params);

/// sin(u)/u (theta_x^2 - m^2 w^2 theta_p^2) - m a_xp cos(u), u = 4 theta_x theta_p,
/// scaled by the largest term. Zero on solutions of the rotation condition,
/// including its theta -> 0 limits.
double transcendental_residual(const StaticParams& params, double theta_x, double theta_p);

struct EffectiveMassFrequency {
    double M;
    double Omega_sq;
};

/// General-angle effective mass and frequency. Throws PreconditionError when
/// (theta_x, theta_p) miss the rotation condition by more than 1e-10.
EffectiveMassFrequency effective_mass_frequency(const StaticParams& params, double theta_x,
                                                double theta_p);

}  // namespace tdqho
