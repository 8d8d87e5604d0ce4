#include "tdqho/pipeline.hpp"

#include <cmath>
#include <numbers>

#include "tdqho/errors.hpp"
#include "tdqho/static_diag.hpp"

namespace tdqho {

namespace {

// Coefficient values and rates at one instant.
struct Snapshot {
    double m, dm, w, dw, ax, ap, dap, axp, daxp, a0;
};

Snapshot snapshot(const QuadraticParams& p, double t) {
    return {p.m.value(t),       p.m.derivative(t),     p.omega.value(t),
            p.omega.derivative(t), p.alpha_x.value(t), p.alpha_p.value(t),
            p.alpha_p.derivative(t), p.alpha_xp.value(t), p.alpha_xp.derivative(t),
            p.alpha_0.value(t)};
}

// Second-order displacement equation, returns beta_x''.
double beta_x_accel(const Snapshot& s, double bx, double bx_dot) {
    const double rate = s.dm / s.m;
    const double stiffness = 2.0 * s.daxp - s.w * s.w + 4.0 * s.axp * s.axp + 2.0 * s.axp * rate;
    const double forcing = s.dap - s.ax / s.m + 2.0 * s.ap * s.axp + s.ap * rate;
    return -rate * bx_dot + stiffness * bx + forcing;
}

// First-order momentum displacement channel.
double beta_p_rate(const Snapshot& s, double bx, double bp) {
    return s.m * s.w * s.w * bx + s.ax - 2.0 * s.axp * bp;
}

double ell_at(const Snapshot& s, double bx, double bp) {
    return bp * bp / (2.0 * s.m) + 0.5 * s.m * s.w * s.w * bx * bx + s.ax * bx - s.ap * bp -
           2.0 * s.axp * bx * bp;
}

void require_grid(const QuadraticParams& params, const std::vector<double>& grid) {
    if (grid.size() < 2) throw DomainError("pipeline grid needs at least two samples");
    if (grid.front() != 0.0) throw DomainError("pipeline grid must start at t = 0");
    if (!(params.hbar > 0.0)) throw DomainError("hbar must be positive");
    if (!(params.horizon > 0.0)) throw DomainError("horizon must be positive");
}

void require_admissible(const QuadraticParams& params, const PipelineOptions& options) {
    const auto report = validate(params, options.validity_samples);
    for (const auto& v : report.violations) {
        // the static alpha_xp bound duplicates omega^2 - kappa^2 > 0 for constant inputs
        if (v.constraint == "omega^2 > 4 alpha_xp^2") continue;
        throw ValidityError(v.constraint == "omega + kappa > 0" ||
                                    v.constraint == "omega^2 - kappa^2 > 0"
                                ? "m5(t) > 0 and omega5^2(t) > 0 (" + v.constraint + ")"
                                : v.constraint,
                            v.t, v.value);
    }
}

// Full state: beta_x, beta_x', beta_p, rho, pi = m5 rho', Phi, X, Lambda.
enum : Eigen::Index { kBx, kBxDot, kBp, kRho, kPi, kPhi, kX, kLambda, kFull };

SampledSolution<double> integrate_full(const QuadraticParams& params,
                                       const std::vector<double>& grid,
                                       const PipelineOptions& options) {
    require_grid(params, grid);
    require_admissible(params, options);

    const double eta = params.m.value(0.0) * params.omega.value(0.0);
    const auto eff0 = effective_m5_omega5(params, 0.0);
    const double rho0 = 1.0 / std::sqrt(eff0.m5 * std::sqrt(eff0.omega5_sq));
    const Eigen::Vector3d b0 = beta_initial_conditions(params);

    OdeSystem<double> sys;
    sys.dimension = kFull;
    sys.horizon = params.horizon;
    sys.rhs = [&params, eta](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Snapshot s = snapshot(params, t);
        const double kappa = 0.5 * (s.dm / s.m + s.dw / s.w + 4.0 * s.axp);
        const double m5 = eta / (s.w + kappa);
        const double w5sq = s.w * s.w - kappa * kappa;
        const double rho = y(kRho);
        dy(kBx) = y(kBxDot);
        dy(kBxDot) = beta_x_accel(s, y(kBx), y(kBxDot));
        dy(kBp) = beta_p_rate(s, y(kBx), y(kBp));
        dy(kRho) = y(kPi) / m5;
        dy(kPi) = -m5 * w5sq * rho + 1.0 / (m5 * rho * rho * rho);
        dy(kPhi) = 1.0 / (m5 * rho * rho);
        dy(kX) = s.axp;
        dy(kLambda) = s.a0 + ell_at(s, y(kBx), y(kBp));
    };

    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(kFull);
    y0(kBx) = b0(0);
    y0(kBxDot) = b0(1);
    y0(kBp) = b0(2);
    y0(kRho) = rho0;
    return integrate_adaptive(sys, y0, options.rel_tol, options.abs_tol, grid);
}

BetaSolution beta_from(const SampledSolution<double>& raw) {
    BetaSolution b;
    b.times = raw.times;
    b.beta_x = raw.states.row(kBx).transpose();
    b.beta_x_dot = raw.states.row(kBxDot).transpose();
    b.beta_p = raw.states.row(kBp).transpose();
    b.stats = raw.stats;
    return b;
}

ErmakovSolution ermakov_from(const QuadraticParams& params, const SampledSolution<double>& raw) {
    ErmakovSolution e;
    e.times = raw.times;
    e.rho = raw.states.row(kRho).transpose();
    e.Phi = raw.states.row(kPhi).transpose();
    e.X = raw.states.row(kX).transpose();
    e.Lambda = raw.states.row(kLambda).transpose();
    e.rho_dot.resize(e.rho.size());
    for (Eigen::Index i = 0; i < e.rho.size(); ++i)
        e.rho_dot(i) = raw.states(kPi, i) /
                       effective_m5_omega5(params, raw.times[static_cast<std::size_t>(i)]).m5;
    e.stats = raw.stats;
    return e;
}

}  // namespace

Eigen::Vector3d beta_initial_conditions(const QuadraticParams& params) {
    StaticParams sp;
    sp.m = params.m.value(0.0);
    sp.omega = params.omega.value(0.0);
    sp.alpha_x = params.alpha_x.value(0.0);
    sp.alpha_p = params.alpha_p.value(0.0);
    sp.alpha_xp = params.alpha_xp.value(0.0);
    sp.alpha_0 = params.alpha_0.value(0.0);
    const auto [bx, bp] = static_translation(sp);
    const double bx_dot = 2.0 * sp.alpha_xp * bx + sp.alpha_p - bp / sp.m;
    return {bx, bx_dot, bp};
}

BetaSolution solve_beta(const QuadraticParams& params, const std::vector<double>& grid,
                        const PipelineOptions& options) {
    require_grid(params, grid);
    OdeSystem<double> sys;
    sys.dimension = 3;
    sys.horizon = params.horizon;
    sys.rhs = [&params](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Snapshot s = snapshot(params, t);
        dy(0) = y(1);
        dy(1) = beta_x_accel(s, y(0), y(1));
        dy(2) = beta_p_rate(s, y(0), y(2));
    };
    const Eigen::VectorXd y0 = beta_initial_conditions(params);
    const auto raw = integrate_adaptive(sys, y0, options.rel_tol, options.abs_tol, grid);
    BetaSolution b;
    b.times = raw.times;
    b.beta_x = raw.states.row(0).transpose();
    b.beta_x_dot = raw.states.row(1).transpose();
    b.beta_p = raw.states.row(2).transpose();
    b.stats = raw.stats;
    return b;
}

ErmakovSolution solve_ermakov(const QuadraticParams& params, const std::vector<double>& grid,
                              const PipelineOptions& options) {
    return ermakov_from(params, integrate_full(params, grid, options));
}

PipelineSolution solve_pipeline(const QuadraticParams& params, const std::vector<double>& grid,
                                const PipelineOptions& options) {
    const auto raw = integrate_full(params, grid, options);
    return {params, beta_from(raw), ermakov_from(params, raw)};
}

double ell(const QuadraticParams& params, double t, double beta_x, double beta_p) {
    return ell_at(snapshot(params, t), beta_x, beta_p);
}

double ell(const QuadraticParams& params, const BetaSolution& beta, Eigen::Index i) {
    return ell(params, beta.times[static_cast<std::size_t>(i)], beta.beta_x(i), beta.beta_p(i));
}

double big_omega(const QuadraticParams& params, const ErmakovSolution& ermakov, Eigen::Index i) {
    const double t = ermakov.times[static_cast<std::size_t>(i)];
    const double eta = params.m.value(0.0) * params.omega.value(0.0);
    const double rho = ermakov.rho(i);
    return (params.omega.value(t) + kappa(params, t)) / (eta * rho * rho);
}

PropagatorCoefficients coefficients(const QuadraticParams& params, const BetaSolution& beta,
                                    const ErmakovSolution& ermakov, Eigen::Index i) {
    const double t = ermakov.times[static_cast<std::size_t>(i)];
    PropagatorCoefficients c;
    c.t = t;
    c.eta = params.m.value(0.0) * params.omega.value(0.0);
    const double rho0 = ermakov.rho(0);
    const double rho = ermakov.rho(i);
    const double r0sq = rho0 * rho0;
    const double rsq = rho * rho;
    c.xi = gamma_squeeze(params, t) * rho / rho0;
    c.S = std::sin(ermakov.Phi(i));
    c.C = std::cos(ermakov.Phi(i));
    c.epsilon = effective_m5_omega5(params, t).m5 * ermakov.rho_dot(i) * rho;

    const double eta = c.eta, xi = c.xi, eps = c.epsilon, S = c.S, C = c.C;
    c.A = xi / 2.0 *
          ((eta * r0sq + eps * r0sq / rsq - 1.0 / (eta * rsq)) * S +
           (1.0 + eps / (eta * rsq) + r0sq / rsq) * C);
    c.B = xi / (2.0 * eta) *
          ((eta * r0sq + eps * r0sq / rsq + 1.0 / (eta * rsq)) * S -
           (1.0 + eps / (eta * rsq) - r0sq / rsq) * C);
    c.D = eta / (2.0 * xi) *
          ((1.0 + eps / (eta * r0sq) - rsq / r0sq) * C - (eta * rsq - eps + 1.0 / (eta * r0sq)) * S);
    c.E = 1.0 / (2.0 * xi) *
          ((1.0 - eps / (eta * r0sq) + rsq / r0sq) * C - (eta * rsq - eps - 1.0 / (eta * r0sq)) * S);

    c.beta_x = beta.beta_x(i);
    c.beta_p = beta.beta_p(i);
    c.beta_x0 = beta.beta_x(0);
    c.beta_p0 = beta.beta_p(0);
    return c;
}

MomentState propagate_moments(const MomentState& s0, const PropagatorCoefficients& c) {
    const double dx = s0.mean_x - c.beta_x0;
    const double dp = s0.mean_p + c.beta_p0;
    MomentState s;
    s.t = c.t;
    s.mean_x = c.A * dx + c.B * dp + c.beta_x;
    s.mean_p = c.D * dx + c.E * dp - c.beta_p;
    s.var_x = c.A * c.A * s0.var_x + c.B * c.B * s0.var_p + 2.0 * c.A * c.B * s0.cov_xp;
    s.var_p = c.D * c.D * s0.var_x + c.E * c.E * s0.var_p + 2.0 * c.D * c.E * s0.cov_xp;
    s.cov_xp = c.A * c.D * s0.var_x + c.B * c.E * s0.var_p + (c.A * c.E + c.B * c.D) * s0.cov_xp;
    return s;
}

std::vector<MomentState> propagate_series(const PipelineSolution& sol, const MomentState& initial) {
    std::vector<MomentState> out;
    out.reserve(static_cast<std::size_t>(sol.size()));
    for (Eigen::Index i = 0; i < sol.size(); ++i)
        out.push_back(propagate_moments(initial, coefficients(sol, i)));
    return out;
}

double global_phase(const ErmakovSolution& ermakov, Eigen::Index i, double hbar) {
    return -ermakov.Lambda(i) / hbar;
}

std::vector<double> gaussian_density(const MomentState& state, std::span<const double> x_grid) {
    if (!(state.var_x > 0.0)) throw DomainError("gaussian density needs var_x > 0");
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * state.var_x);
    std::vector<double> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) {
        const double d = x - state.mean_x;
        out.push_back(norm * std::exp(-d * d / (2.0 * state.var_x)));
    }
    return out;
}

double beta_constraint_residual(const QuadraticParams& params, const BetaSolution& beta) {
    double worst = 0.0;
    for (std::size_t i = 0; i < beta.times.size(); ++i) {
        const double t = beta.times[i];
        const auto k = static_cast<Eigen::Index>(i);
        const double predicted =
            params.m.value(t) * (-beta.beta_x_dot(k) + 2.0 * params.alpha_xp.value(t) * beta.beta_x(k) +
                                 params.alpha_p.value(t));
        worst = std::max(worst, std::abs(beta.beta_p(k) - predicted));
    }
    return worst;
}

double ermakov_residual(const QuadraticParams& params, const ErmakovSolution& ermakov) {
    const auto n = static_cast<Eigen::Index>(ermakov.times.size());
    if (n < 7) throw DomainError("ermakov residual needs at least seven samples");
    const double h = ermakov.times[1] - ermakov.times[0];
    for (std::size_t i = 1; i < ermakov.times.size(); ++i)
        if (std::abs(ermakov.times[i] - ermakov.times[i - 1] - h) > 1e-9 * h)
            throw DomainError("ermakov residual needs a uniform grid");

    // sixth-order central first derivative
    constexpr double w1 = 45.0 / 60.0, w2 = -9.0 / 60.0, w3 = 1.0 / 60.0;
    double worst = 0.0;
    for (Eigen::Index i = 3; i + 3 < n; ++i) {
        const auto& v = ermakov.rho_dot;
        const double rho_ddot = (w1 * (v(i + 1) - v(i - 1)) + w2 * (v(i + 2) - v(i - 2)) +
                                 w3 * (v(i + 3) - v(i - 3))) / h;
        const double t = ermakov.times[static_cast<std::size_t>(i)];
        const auto eff = effective_m5_omega5(params, t);
        const double rho = ermakov.rho(i);
        const double r = rho_ddot + m5_log_rate(params, t) * v(i) + eff.omega5_sq * rho -
                         1.0 / (eff.m5 * eff.m5 * rho * rho * rho);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace tdqho
