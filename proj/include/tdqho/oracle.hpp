#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "tdqho/model.hpp"

namespace tdqho {

/// Position and momentum in the number basis of a reference oscillator
/// (m_ref, omega_ref), truncated to N levels.
struct FockOperators {
    int N = 0;
    double m_ref = 1.0;
    double omega_ref = 1.0;
    double hbar = 1.0;
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd x;
    Eigen::MatrixXcd p;
    Eigen::MatrixXcd x2;
    Eigen::MatrixXcd p2;
    Eigen::MatrixXcd xp_anti;  // {x, p}
};

FockOperators build_operators(int N, double m_ref, double omega_ref, double hbar = 1.0);

/// Dense H(t) of the general quadratic oscillator in the truncated basis.
Eigen::MatrixXcd hamiltonian_matrix(const QuadraticParams& params, const FockOperators& ops,
                                    double t);

struct PreparedState {
    Eigen::VectorXcd psi;
    double tail_mass = 0.0;  // probability lost to truncation before renormalising
    bool truncated = false;  // tail_mass > 1e-12
};

PreparedState ground_state(const FockOperators& ops);
PreparedState coherent_state(const FockOperators& ops, std::complex<double> amplitude);
/// Pure Gaussian state D(alpha) S(zeta)|0> with the given moments, built in an
/// enlarged basis and truncated. Throws DomainError for mixed moment sets.
PreparedState gaussian_state(const FockOperators& ops, const MomentState& moments);

MomentState moments_from_state(const Eigen::VectorXcd& psi, const FockOperators& ops, double t = 0.0);

struct OracleOptions {
    double dt = 1e-3;                     // time step
    double truncation_threshold = 1e-8;   // top-decile population alarm
    double norm_abort = 1e-6;             // abort on norm drift beyond this
    bool keep_states = false;
};

struct OracleRun {
    std::vector<double> times;
    std::vector<MomentState> moments;
    std::vector<double> norm;
    std::vector<double> top_population;
    std::vector<Eigen::VectorXcd> states;  // only with keep_states
    double max_top_population = 0.0;
    long steps = 0;
    bool reliable = true;
};

/// Midpoint Magnus: psi <- exp(-i H(t + dt/2) dt / hbar) psi, each exponential
/// from a Hermitian eigendecomposition. The step is shortened to land on
/// every sample time.
OracleRun propagate_state(const Eigen::VectorXcd& psi0, const QuadraticParams& params,
                          const std::vector<double>& grid, const FockOperators& ops,
                          const OracleOptions& options = {});

/// Population in the top ceil(N/10) levels.
double top_decile_population(const Eigen::VectorXcd& psi);

}  // namespace tdqho
