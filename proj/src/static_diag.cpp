#include "tdqho/static_diag.hpp"

#include <algorithm>
#include <cmath>

#include "tdqho/errors.hpp"

namespace tdqho {

namespace {

void require_admissible(const StaticParams& p) {
    if (!(p.m > 0.0)) throw DomainError("static params: m must be positive");
    if (!(p.omega > 0.0)) throw DomainError("static params: omega must be positive");
    const double gap = p.omega * p.omega - 4.0 * p.alpha_xp * p.alpha_xp;
    if (!(gap > 0.0)) throw ValidityError("omega^2 > 4 alpha_xp^2", 0.0, gap);
}

double sinc(double u) { return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

}  // namespace

Translation static_translation(const StaticParams& p) {
    const double gap = p.omega * p.omega - 4.0 * p.alpha_xp * p.alpha_xp;
    if (gap == 0.0) throw SingularityError("static translation singular: omega^2 = 4 alpha_xp^2");
    const double bx = (2.0 * p.m * p.alpha_p * p.alpha_xp - p.alpha_x) / (p.m * gap);
    const double bp = p.m * p.alpha_p - 2.0 * p.alpha_xp * (p.alpha_x - 2.0 * p.m * p.alpha_p * p.alpha_xp) / gap;
    return {bx, bp};
}

double accumulation_constant(const StaticParams& p, double bx, double bp) {
    return bp * bp / (2.0 * p.m) + 0.5 * p.m * p.omega * p.omega * bx * bx + p.alpha_x * bx -
           p.alpha_p * bp - 2.0 * p.alpha_xp * bx * bp;
}

Translation linear_term_residual(const StaticParams& p, double bx, double bp) {
    return {p.m * p.omega * p.omega * bx + p.alpha_x - 2.0 * p.alpha_xp * bp,
            -bp / p.m + p.alpha_p + 2.0 * p.alpha_xp * bx};
}

StaticDiagResult diag_branch_theta_p_zero(const StaticParams& p) {
    require_admissible(p);
    const auto [bx, bp] = static_translation(p);
    StaticDiagResult r;
    r.beta_x = bx;
    r.beta_p = bp;
    r.l = accumulation_constant(p, bx, bp);
    r.theta_x_sq = p.m * p.alpha_xp;
    r.theta_p_sq = 0.0;
    r.M = p.m;
    r.Omega_sq = p.omega * p.omega - 4.0 * p.alpha_xp * p.alpha_xp;
    return r;
}

StaticDiagResult diag_branch_theta_x_zero(const StaticParams& p) {
    require_admissible(p);
    const auto [bx, bp] = static_translation(p);
    const double w2 = p.omega * p.omega;
    StaticDiagResult r;
    r.beta_x = bx;
    r.beta_p = bp;
    r.l = accumulation_constant(p, bx, bp);
    r.theta_x_sq = 0.0;
    r.theta_p_sq = -p.alpha_xp / (p.m * w2);
    r.Omega_sq = w2 - 4.0 * p.alpha_xp * p.alpha_xp;
    r.M = p.m * w2 / r.Omega_sq;
    return r;
}

double transcendental_residual(const StaticParams& p, double theta_x, double theta_p) {
    const double u = 4.0 * theta_x * theta_p;
    const double tx2 = theta_x * theta_x;
    const double tp2 = p.m * p.m * p.omega * p.omega * theta_p * theta_p;
    const double drive = p.m * p.alpha_xp;
    const double scale = std::max({tx2, tp2, std::abs(drive), 1e-300});
    return (sinc(u) * (tx2 - tp2) - drive * std::cos(u)) / scale;
}

EffectiveMassFrequency effective_mass_frequency(const StaticParams& p, double theta_x,
                                                double theta_p) {
    require_admissible(p);
    const double residual = transcendental_residual(p, theta_x, theta_p);
    if (!(std::abs(residual) <= 1e-10))
        throw PreconditionError("rotation angles do not satisfy the transcendental condition",
                                residual);
    if (theta_p == 0.0) {
        const auto r = diag_branch_theta_p_zero(p);
        return {r.M, r.Omega_sq};
    }
    if (theta_x == 0.0) {
        const auto r = diag_branch_theta_x_zero(p);
        return {r.M, r.Omega_sq};
    }
    const double m = p.m;
    const double u = 4.0 * theta_x * theta_p;
    const double q = m * m * p.omega * p.omega * theta_p * theta_p / (theta_x * theta_x);
    const double s = 4.0 * m * p.alpha_xp * theta_p / theta_x;
    const double M = 2.0 * m / (1.0 + q + (1.0 - q) * std::cos(u) + s * std::sin(u));
    const double Omega_sq = (theta_x * theta_x) / (theta_p * theta_p) / (2.0 * m * M) *
                            (1.0 + q - (1.0 - q) * std::cos(u) - s * std::sin(u));
    return {M, Omega_sq};
}

}  // namespace tdqho
