#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "tdqho/integrators.hpp"
#include "tdqho/model.hpp"

namespace tdqho {

struct PipelineOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int validity_samples = 4096;
};

/// Displacement that removes the linear terms, sampled on the pipeline grid.
///
/// beta_x follows the second-order displacement equation; beta_p is carried as
/// its own first-order channel, so the algebraic constraint
/// beta_p = m (-beta_x' + 2 a_xp beta_x + a_p) is an independent check.
struct BetaSolution {
    std::vector<double> times;
    Eigen::VectorXd beta_x;
    Eigen::VectorXd beta_x_dot;
    Eigen::VectorXd beta_p;
    IntegratorStats stats;
};

/// Ermakov amplitude rho and the running integrals
///   Phi = int Omega, X = int a_xp, Lambda = int (a_0 + ell).
struct ErmakovSolution {
    std::vector<double> times;
    Eigen::VectorXd rho;
    Eigen::VectorXd rho_dot;
    Eigen::VectorXd Phi;
    Eigen::VectorXd X;
    Eigen::VectorXd Lambda;
    IntegratorStats stats;
};

/// Linear phase-space map sending initial to time-t moments:
///   x(t) = A (x0 - bx(0)) + B (p0 + bp(0)) + bx(t)
///   p(t) = D (x0 - bx(0)) + E (p0 + bp(0)) - bp(t)
struct PropagatorCoefficients {
    double t = 0.0;
    double A = 1.0, B = 0.0, D = 0.0, E = 1.0;
    double eta = 1.0;
    double xi = 1.0;
    double epsilon = 0.0;
    double S = 0.0, C = 1.0;
    double beta_x = 0.0, beta_p = 0.0;
    double beta_x0 = 0.0, beta_p0 = 0.0;

    Eigen::Matrix2d map() const {
        Eigen::Matrix2d M;
        M << A, B, D, E;
        return M;
    }
    double determinant() const { return A * E - B * D; }
};

struct PipelineSolution {
    QuadraticParams params;
    BetaSolution beta;
    ErmakovSolution ermakov;

    Eigen::Index size() const { return static_cast<Eigen::Index>(beta.times.size()); }
    double time(Eigen::Index i) const { return beta.times[static_cast<std::size_t>(i)]; }
};

BetaSolution solve_beta(const QuadraticParams& params, const std::vector<double>& grid,
                        const PipelineOptions& options = {});
/// Throws ValidityError if m5 or omega5^2 fails anywhere on the scan grid.
ErmakovSolution solve_ermakov(const QuadraticParams& params, const std::vector<double>& grid,
                              const PipelineOptions& options = {});
/// Displacement, Ermakov and quadratures in one co-integrated solve.
PipelineSolution solve_pipeline(const QuadraticParams& params, const std::vector<double>& grid,
                                const PipelineOptions& options = {});

/// Displacement initial data (beta_x, beta_x', beta_p) at t = 0.
Eigen::Vector3d beta_initial_conditions(const QuadraticParams& params);

/// Energy bias left after the displacement.
double ell(const QuadraticParams& params, double t, double beta_x, double beta_p);
double ell(const QuadraticParams& params, const BetaSolution& beta, Eigen::Index i);

/// Omega(t) = (w + kappa)/(m(0) w(0) rho^2).
double big_omega(const QuadraticParams& params, const ErmakovSolution& ermakov, Eigen::Index i);

PropagatorCoefficients coefficients(const QuadraticParams& params, const BetaSolution& beta,
                                    const ErmakovSolution& ermakov, Eigen::Index i);
inline PropagatorCoefficients coefficients(const PipelineSolution& sol, Eigen::Index i) {
    return coefficients(sol.params, sol.beta, sol.ermakov, i);
}

MomentState propagate_moments(const MomentState& initial, const PropagatorCoefficients& c);
std::vector<MomentState> propagate_series(const PipelineSolution& sol, const MomentState& initial);

/// Accumulated phase -Lambda(t)/hbar.
double global_phase(const ErmakovSolution& ermakov, Eigen::Index i, double hbar);

/// Normal density of the position marginal on x_grid. Throws DomainError if var_x <= 0.
std::vector<double> gaussian_density(const MomentState& state, std::span<const double> x_grid);

/// max |beta_p - m(-beta_x' + 2 a_xp beta_x + a_p)| over the samples.
double beta_constraint_residual(const QuadraticParams& params, const BetaSolution& beta);

/// max |rho'' + (m5'/m5) rho' + w5^2 rho - 1/(m5^2 rho^3)| over interior samples,
/// rho'' from a sixth-order central difference of the sampled rho'.
double ermakov_residual(const QuadraticParams& params, const ErmakovSolution& ermakov);

}  // namespace tdqho
