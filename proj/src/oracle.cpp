#include "tdqho/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tdqho/errors.hpp"

namespace tdqho {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

Eigen::MatrixXcd annihilation(int N) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
    for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// exp(-i G) v for Hermitian G.
Eigen::VectorXcd apply_unitary(const Eigen::MatrixXcd& G, const Eigen::VectorXcd& v) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    const Eigen::VectorXcd phases =
        eig.eigenvalues().unaryExpr([](double l) { return std::exp(-I * l); });
    return eig.eigenvectors() * (phases.asDiagonal() * (eig.eigenvectors().adjoint() * v));
}

PreparedState finish(Eigen::VectorXcd psi_big, int N) {
    PreparedState out;
    out.psi = psi_big.head(N);
    const double kept = out.psi.squaredNorm();
    out.tail_mass = std::max(0.0, psi_big.squaredNorm() - kept);
    out.truncated = out.tail_mass > 1e-12;
    out.psi /= std::sqrt(kept);
    return out;
}

}  // namespace

FockOperators build_operators(int N, double m_ref, double omega_ref, double hbar) {
    if (N < 4) throw DomainError("Fock basis needs N >= 4");
    FockOperators ops;
    ops.N = N;
    ops.m_ref = m_ref;
    ops.omega_ref = omega_ref;
    ops.hbar = hbar;
    ops.a = annihilation(N);
    const Eigen::MatrixXcd ad = ops.a.adjoint();
    ops.x = std::sqrt(hbar / (2.0 * m_ref * omega_ref)) * (ops.a + ad);
    ops.p = I * std::sqrt(hbar * m_ref * omega_ref / 2.0) * (ad - ops.a);
    ops.x2 = ops.x * ops.x;
    ops.p2 = ops.p * ops.p;
    ops.xp_anti = ops.x * ops.p + ops.p * ops.x;
    return ops;
}

Eigen::MatrixXcd hamiltonian_matrix(const QuadraticParams& params, const FockOperators& ops,
                                    double t) {
    const double m = params.m.value(t);
    const double w = params.omega.value(t);
    Eigen::MatrixXcd H = ops.p2 / (2.0 * m) + (0.5 * m * w * w) * ops.x2 +
                         params.alpha_x.value(t) * ops.x + params.alpha_p.value(t) * ops.p +
                         params.alpha_xp.value(t) * ops.xp_anti;
    H.diagonal().array() += params.alpha_0.value(t);
    return H;
}

PreparedState ground_state(const FockOperators& ops) {
    PreparedState s;
    s.psi = Eigen::VectorXcd::Zero(ops.N);
    s.psi(0) = 1.0;
    return s;
}

PreparedState coherent_state(const FockOperators& ops, cplx amplitude) {
    // c_n = e^{-|a|^2/2} a^n / sqrt(n!), by recurrence
    const int big = ops.N + 200;
    Eigen::VectorXcd c(big);
    c(0) = std::exp(-0.5 * std::norm(amplitude));
    for (int n = 1; n < big; ++n) c(n) = c(n - 1) * amplitude / std::sqrt(static_cast<double>(n));
    return finish(std::move(c), ops.N);
}

PreparedState gaussian_state(const FockOperators& ops, const MomentState& s) {
    const double mw = ops.m_ref * ops.omega_ref;
    const double hbar = ops.hbar;
    // dimensionless quadratures with vacuum variance 1/2
    const double vx = s.var_x * mw / hbar;
    const double vp = s.var_p / (mw * hbar);
    const double cxp = s.cov_xp / hbar;
    const double det = vx * vp - cxp * cxp;
    if (!(std::abs(det - 0.25) < 1e-9)) throw DomainError("Fock oracle prepares pure Gaussian states only");

    const double cosh2r = std::max(1.0, vx + vp);
    const double r = 0.5 * std::acosh(cosh2r);
    const double theta = std::atan2(-2.0 * cxp, vp - vx);
    const cplx zeta = std::polar(r, theta);
    const cplx alpha = (s.mean_x * std::sqrt(mw / hbar) + I * s.mean_p / std::sqrt(mw * hbar)) /
                       std::sqrt(2.0);

    const int big = std::max(2 * ops.N, ops.N + 64);
    const Eigen::MatrixXcd a = annihilation(big);
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd a2 = a * a;
    const Eigen::MatrixXcd ad2 = ad * ad;

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(big);
    psi(0) = 1.0;
    if (r > 0.0) {
        // S(zeta) = exp((zeta* a^2 - zeta a+^2)/2) = exp(-i G)
        const Eigen::MatrixXcd G = (I / 2.0) * (std::conj(zeta) * a2 - zeta * ad2);
        psi = apply_unitary(G, psi);
    }
    if (std::abs(alpha) > 0.0) {
        // D(alpha) = exp(alpha a+ - alpha* a) = exp(-i G)
        const Eigen::MatrixXcd G = I * (alpha * ad - std::conj(alpha) * a);
        psi = apply_unitary(G, psi);
    }
    return finish(std::move(psi), ops.N);
}

MomentState moments_from_state(const Eigen::VectorXcd& psi, const FockOperators& ops, double t) {
    const double norm = psi.squaredNorm();
    auto expect = [&](const Eigen::MatrixXcd& op) { return psi.dot(op * psi).real() / norm; };
    MomentState s;
    s.t = t;
    s.mean_x = expect(ops.x);
    s.mean_p = expect(ops.p);
    s.var_x = expect(ops.x2) - s.mean_x * s.mean_x;
    s.var_p = expect(ops.p2) - s.mean_p * s.mean_p;
    s.cov_xp = 0.5 * expect(ops.xp_anti) - s.mean_x * s.mean_p;
    return s;
}

double top_decile_population(const Eigen::VectorXcd& psi) {
    const auto n = psi.size();
    const auto k = std::max<Eigen::Index>(1, (n + 9) / 10);
    return psi.tail(k).squaredNorm();
}

OracleRun propagate_state(const Eigen::VectorXcd& psi0, const QuadraticParams& params,
                          const std::vector<double>& grid, const FockOperators& ops,
                          const OracleOptions& options) {
    if (!(options.dt > 0.0)) throw DomainError("oracle: dt must be positive");
    if (psi0.size() != ops.N) throw DomainError("oracle: state dimension does not match basis");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw DomainError("oracle: initial state not normalised");
    if (grid.empty() || grid.front() < 0.0) throw DomainError("oracle: bad sample grid");

    OracleRun run;
    run.times = grid;
    Eigen::VectorXcd psi = psi0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(ops.N);
    Eigen::MatrixXcd H(ops.N, ops.N);
    Eigen::VectorXcd work(ops.N);

    double t = 0.0;
    auto record = [&](double at) {
        const double norm = psi.norm();
        if (std::abs(norm - 1.0) > options.norm_abort)
            throw IntegrationError("oracle: norm drift " + std::to_string(norm - 1.0), at);
        const double top = top_decile_population(psi);
        run.moments.push_back(moments_from_state(psi, ops, at));
        run.norm.push_back(norm);
        run.top_population.push_back(top);
        run.max_top_population = std::max(run.max_top_population, top);
        if (options.keep_states) run.states.push_back(psi);
    };

    for (double target : grid) {
        if (target < t) throw DomainError("oracle: sample times must be increasing");
        while (t < target) {
            double h = std::min(options.dt, target - t);
            if (target - (t + h) < 1e-12 * options.dt) h = target - t;
            H = hamiltonian_matrix(params, ops, t + 0.5 * h);
            eig.compute(H);
            const double scale = h / params.hbar;
            work.noalias() = eig.eigenvectors().adjoint() * psi;
            for (int k = 0; k < ops.N; ++k) work(k) *= std::exp(-I * (eig.eigenvalues()(k) * scale));
            psi.noalias() = eig.eigenvectors() * work;
            t = (h == target - t) ? target : t + h;
            ++run.steps;
        }
        record(target);
    }
    run.reliable = run.max_top_population <= options.truncation_threshold;
    return run;
}

}  // namespace tdqho
