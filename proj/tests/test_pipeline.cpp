#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tdqho/errors.hpp"
#include "tdqho/pipeline.hpp"
#include "tdqho/scenarios.hpp"
#include "tdqho/static_diag.hpp"

using namespace tdqho;

TEST_SUITE_BEGIN("dynamic-pipeline");
using tdqho::testing::classical_flow;
using tdqho::testing::random_params;

namespace {

constexpr double pi = std::numbers::pi;

QuadraticParams driven(double m, double w, double drive, double wd, double T) {
    auto p = QuadraticParams::oscillator(m, w, T);
    p.alpha_x = TimeFunction::cosine(drive, wd);
    return p;
}

}  // namespace

TEST_CASE("beta: zero drives stay at the origin") {
    auto p = QuadraticParams::oscillator(1.2, 0.9, 10.0);
    p.m = TimeFunction::cosine(0.1, 0.5, 0.0, 1.2);
    p.alpha_xp = TimeFunction::constant(0.1);
    const auto b = solve_beta(p, uniform_grid(10.0, 101));
    CHECK(b.beta_x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.beta_p.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("beta: driven oscillator matches the closed forms") {
    const double m = 1.3, w = 1.1, drive = 0.2, wd = 0.55, T = 30.0;
    const auto p = driven(m, w, drive, wd, T);
    const auto grid = uniform_grid(T, 600);
    const auto b = solve_beta(p, grid);
    double err_x = 0.0, err_p = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double bx = (drive * wd * wd * std::cos(w * t) - w * w * drive * std::cos(wd * t)) /
                          (m * std::pow(w, 4) - m * w * w * wd * wd);
        const double bp = drive * wd * (wd * std::sin(w * t) - w * std::sin(wd * t)) / (w * w * w - w * wd * wd);
        err_x = std::max(err_x, std::abs(b.beta_x(static_cast<Eigen::Index>(i)) - bx));
        err_p = std::max(err_p, std::abs(b.beta_p(static_cast<Eigen::Index>(i)) - bp));
    }
    CHECK(err_x < 1e-8 * drive / (m * w * w));
    CHECK(err_p < 1e-8 * drive / w);
}

TEST_CASE("beta: constant alpha_p is a fixed point") {
    auto p = QuadraticParams::oscillator(1.4, 0.8, 10.0);
    const double c = 0.35;
    p.alpha_p = TimeFunction::constant(c);
    const auto ic = beta_initial_conditions(p);
    CHECK(ic(0) == 0.0);
    CHECK(ic(2) == doctest::Approx(1.4 * c));
    const auto b = solve_beta(p, uniform_grid(10.0, 50));
    CHECK(b.beta_x.cwiseAbs().maxCoeff() < 1e-14);
    CHECK((b.beta_p.array() - 1.4 * c).abs().maxCoeff() < 1e-14);
}

TEST_CASE("beta: singular initial translation is an error") {
    auto p = QuadraticParams::oscillator(1.0, 1.0, 5.0);
    p.alpha_xp = TimeFunction::cosine(0.5, 1.0);
    p.alpha_x = TimeFunction::constant(0.1);
    CHECK_THROWS_AS(solve_beta(p, uniform_grid(5.0, 10)), SingularityError);
}

TEST_CASE("ell examples") {
    auto p = QuadraticParams::oscillator(1.0, 1.0, 5.0);
    p.alpha_xp = TimeFunction::constant(0.2);
    auto b = solve_beta(p, uniform_grid(5.0, 20));
    CHECK(ell(p, b, 7) == 0.0);

    StaticParams s{1.2, 1.5, 0.3, -0.2, 0.15, 0.0};
    auto q = QuadraticParams::oscillator(s.m, s.omega, 5.0);
    q.alpha_x = TimeFunction::constant(s.alpha_x);
    q.alpha_p = TimeFunction::constant(s.alpha_p);
    q.alpha_xp = TimeFunction::constant(s.alpha_xp);
    const auto tr = static_translation(s);
    const double l0 = accumulation_constant(s, tr.beta_x, tr.beta_p);
    b = solve_beta(q, uniform_grid(5.0, 20));
    for (Eigen::Index i = 0; i < 20; ++i) CHECK(ell(q, b, i) == doctest::Approx(l0).epsilon(1e-12));

    const double drive = 0.2;
    const auto d = driven(1.0, 1.0, drive, 1.0, 5.0);
    b = solve_beta(d, uniform_grid(5.0, 20));
    CHECK(ell(d, b, 0) == doctest::Approx(-drive * drive / 2.0));
}

TEST_CASE("ermakov: time-independent parameters give constant rho") {
    auto p = QuadraticParams::oscillator(1.3, 1.7, 8.0);
    p.alpha_xp = TimeFunction::constant(0.3);
    const auto grid = uniform_grid(8.0, 401);
    const auto e = solve_ermakov(p, grid);
    const auto eff = effective_m5_omega5(p, 0.0);
    const double rho0 = 1.0 / std::sqrt(eff.m5 * std::sqrt(eff.omega5_sq));
    CHECK((e.rho.array() - rho0).abs().maxCoeff() < 1e-12);
    CHECK(e.rho_dot.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ermakov_residual(p, e) < 1e-10);
    const double big = (1.7 + 0.6) / (1.3 * 1.7 * rho0 * rho0);
    CHECK(big_omega(p, e, 200) == doctest::Approx(big));
    CHECK(big == doctest::Approx(std::sqrt(1.7 * 1.7 - 0.36)));
}

TEST_CASE("ermakov: standard oscillator and Caldirola-Kanai") {
    const double w = 1.4;
    const auto p = QuadraticParams::oscillator(0.7, w, 6.0);
    const auto grid = uniform_grid(6.0, 61);
    const auto e = solve_ermakov(p, grid);
    for (Eigen::Index i = 0; i < 61; ++i) {
        CHECK(e.Phi(i) == doctest::Approx(w * grid[static_cast<std::size_t>(i)]).epsilon(1e-12));
        CHECK(e.X(i) == 0.0);
        CHECK(e.Lambda(i) == 0.0);
        CHECK(big_omega(p, e, i) == doctest::Approx(w));
    }

    CKSpec spec;
    spec.gamma = -0.25;
    spec.horizon = 20.0;
    const auto ck = ck_params(spec);
    const auto ce = solve_ermakov(ck, uniform_grid(20.0, 201));
    const double w5 = ck_aux(spec).omega5;
    CHECK(w5 == doctest::Approx(std::sqrt(1.0 - 1.0 / 64.0)));
    for (Eigen::Index i = 0; i < 201; ++i) {
        CHECK(std::abs(ce.Phi(i) - w5 * ce.times[static_cast<std::size_t>(i)]) < 1e-8);
        CHECK(big_omega(ck, ce, i) == doctest::Approx(w5).epsilon(1e-9));
    }
}

TEST_CASE("ermakov: Omega(0) equals omega5(0)") {
    std::mt19937_64 rng(5);
    for (int draw = 0; draw < 10; ++draw) {
        const auto p = random_params(rng, 5.0);
        const auto e = solve_ermakov(p, uniform_grid(5.0, 11));
        CHECK(big_omega(p, e, 0) == doctest::Approx(std::sqrt(effective_m5_omega5(p, 0.0).omega5_sq)));
    }
}

TEST_CASE("ermakov: inadmissible parameters are rejected") {
    auto p = QuadraticParams::oscillator(1.0, 1.0, 10.0);
    p.alpha_xp = TimeFunction::polynomial({0.0, 0.08});
    CHECK_THROWS_AS(solve_ermakov(p, uniform_grid(10.0, 20)), ValidityError);
    CHECK_THROWS_AS(solve_pipeline(p, uniform_grid(10.0, 20)), ValidityError);
}

TEST_CASE("coefficients: identity at t = 0 and standard oscillator map") {
    std::mt19937_64 rng(9);
    const auto r = random_params(rng, 4.0);
    const auto sol = solve_pipeline(r, uniform_grid(4.0, 5));
    const auto c0 = coefficients(sol, 0);
    CHECK(c0.A == doctest::Approx(1.0));
    CHECK(std::abs(c0.B) < 1e-15);
    CHECK(std::abs(c0.D) < 1e-15);
    CHECK(c0.E == doctest::Approx(1.0));

    const double m = 1.6, w = 0.7;
    const auto p = QuadraticParams::oscillator(m, w, 20.0);
    const auto s = solve_pipeline(p, uniform_grid(20.0, 201));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double t = s.time(i);
        const auto c = coefficients(s, i);
        CHECK(std::abs(c.A - std::cos(w * t)) < 1e-9);
        CHECK(std::abs(c.B - std::sin(w * t) / (m * w)) < 1e-9);
        CHECK(std::abs(c.D + m * w * std::sin(w * t)) < 1e-9);
        CHECK(std::abs(c.E - std::cos(w * t)) < 1e-9);
        CHECK(std::abs(c.S * c.S + c.C * c.C - 1.0) < 1e-12);
    }
}

TEST_CASE("coefficients match an independent fundamental-matrix integration") {
    std::mt19937_64 rng(31);
    for (int draw = 0; draw < 8; ++draw) {
        const double T = 12.0;
        const auto p = random_params(rng, T);
        const auto grid = uniform_grid(T, 241);
        const auto sol = solve_pipeline(p, grid);
        const double x0 = 0.3, p0 = -0.2;
        const auto flow = classical_flow(p, x0, p0, grid, 40);
        MomentState s0 = MomentState::ground(p.m.value(0.0), p.omega.value(0.0));
        s0.mean_x = x0;
        s0.mean_p = p0;
        const auto moments = propagate_series(sol, s0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto c = coefficients(sol, static_cast<Eigen::Index>(i));
            CHECK((c.map() - flow.fundamental[i]).cwiseAbs().maxCoeff() < 1e-8);
            CHECK(std::abs(moments[i].mean_x - flow.means[i](0)) < 1e-8);
            CHECK(std::abs(moments[i].mean_p - flow.means[i](1)) < 1e-8);
        }
    }
}

TEST_CASE("symplectic map, pure-state bound and residuals on random draws") {
    std::mt19937_64 rng(77);
    for (int draw = 0; draw < 10; ++draw) {
        const double T = 15.0;
        const auto p = random_params(rng, T);
        const auto sol = solve_pipeline(p, uniform_grid(T, 500));
        const auto s0 = MomentState::ground(p.m.value(0.0), p.omega.value(0.0), p.hbar);
        const auto ms = propagate_series(sol, s0);
        for (Eigen::Index i = 0; i < sol.size(); ++i) {
            CHECK(std::abs(coefficients(sol, i).determinant() - 1.0) < 1e-9);
            CHECK(std::abs(ms[static_cast<std::size_t>(i)].robertson_schrodinger() - 0.25) < 1e-9);
        }
        CHECK(beta_constraint_residual(p, sol.beta) < 1e-9);
        // the finite-difference residual needs a fine grid to resolve rho''
        const auto fine = solve_pipeline(p, uniform_grid(T, 2000));
        CHECK(ermakov_residual(p, fine.ermakov) < 1e-8);
    }
}

TEST_CASE("propagate_moments with identity coefficients is a no-op") {
    PropagatorCoefficients id;
    MomentState s{0.0, 0.3, -0.4, 0.7, 0.5, 0.1};
    const auto out = propagate_moments(s, id);
    CHECK(out.mean_x == s.mean_x);
    CHECK(out.mean_p == s.mean_p);
    CHECK(out.var_x == s.var_x);
    CHECK(out.var_p == s.var_p);
    CHECK(out.cov_xp == s.cov_xp);
}

TEST_CASE("driven ground state: constant variances and resonant means") {
    const double m = 1.0, w = 1.0, drive = 0.2;
    const double T = 6.0 * 2.0 * pi;
    const auto p = driven(m, w, drive, w, T);
    const auto sol = solve_pipeline(p, uniform_grid(T, 400));
    const auto ms = propagate_series(sol, MomentState::ground(m, w));
    for (const auto& s : ms) {
        CHECK(std::abs(s.var_x - 0.5) < 1e-12);
        CHECK(std::abs(s.var_p - 0.5) < 1e-12);
        const double x = -drive * s.t * std::sin(w * s.t) / (2.0 * m * w);
        const double px = -(drive / (2.0 * w)) * (w * s.t * std::cos(w * s.t) + std::sin(w * s.t));
        CHECK(std::abs(s.mean_x - x) < 1e-9);
        CHECK(std::abs(s.mean_p - px) < 1e-9);
    }
}

TEST_CASE("ermakov invariant is conserved along classical columns") {
    const double m = 0.8, w = 1.9;
    const auto p = QuadraticParams::oscillator(m, w, 10.0 * 2.0 * pi / w);
    const auto sol = solve_pipeline(p, uniform_grid(p.horizon, 300));
    const double rho = sol.ermakov.rho(0);
    auto invariant = [&](double x, double mom) { return 0.5 * (rho * rho * mom * mom + x * x / (rho * rho)); };
    const double I0 = invariant(1.0, 0.0);
    for (Eigen::Index i = 0; i < sol.size(); ++i) {
        const auto c = coefficients(sol, i);
        CHECK(std::abs(invariant(c.A, c.D) - I0) < 1e-8);
        CHECK(std::abs(invariant(c.B, c.E) - invariant(0.0, 1.0)) < 1e-8);
    }
}

TEST_CASE("global phase") {
    auto p = QuadraticParams::oscillator(1.0, 1.0, 5.0);
    auto sol = solve_pipeline(p, uniform_grid(5.0, 11));
    for (Eigen::Index i = 0; i < 11; ++i) CHECK(global_phase(sol.ermakov, i, 1.0) == 0.0);

    const double E0 = 0.8, hbar = 0.5;
    p.alpha_0 = TimeFunction::constant(E0);
    p.hbar = hbar;
    sol = solve_pipeline(p, uniform_grid(5.0, 11));
    for (Eigen::Index i = 0; i < 11; ++i)
        CHECK(global_phase(sol.ermakov, i, hbar) == doctest::Approx(-E0 * sol.time(i) / hbar));

    // driven: -int ell, ell from the closed-form beta; composite Simpson reference
    const double m = 1.0, w = 1.0, drive = 0.3, wd = 0.5, T = 10.0;
    const auto d = driven(m, w, drive, wd, T);
    sol = solve_pipeline(d, uniform_grid(T, 3));
    auto ell_closed = [&](double t) {
        const double bx = (drive * wd * wd * std::cos(w * t) - w * w * drive * std::cos(wd * t)) /
                          (m * std::pow(w, 4) - m * w * w * wd * wd);
        const double bp = drive * wd * (wd * std::sin(w * t) - w * std::sin(wd * t)) / (w * w * w - w * wd * wd);
        return ell(d, t, bx, bp);
    };
    const int n = 20000;
    double acc = ell_closed(0.0) + ell_closed(T);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * ell_closed(T * k / n);
    const double integral = acc * T / (3.0 * n);
    CHECK(global_phase(sol.ermakov, 2, 1.0) == doctest::Approx(-integral).epsilon(1e-9));
}

TEST_CASE("gaussian density") {
    MomentState s = MomentState::ground(1.0, 1.0);
    std::vector<double> xs;
    for (int k = -400; k <= 400; ++k) xs.push_back(0.02 * k);
    auto rho = gaussian_density(s, xs);
    double mass = 0.0;
    for (std::size_t k = 1; k < xs.size(); ++k) mass += 0.5 * (rho[k] + rho[k - 1]) * 0.02;
    CHECK(std::abs(mass - 1.0) < 1e-6);
    CHECK(rho[400] == doctest::Approx(1.0 / std::sqrt(2.0 * pi * 0.5)));
    CHECK(rho[300] == rho[500]);

    s.mean_x = 1.234;
    rho = gaussian_density(s, xs);
    const auto peak = std::max_element(rho.begin(), rho.end()) - rho.begin();
    CHECK(xs[static_cast<std::size_t>(peak)] == doctest::Approx(1.24));

    s.var_x = 0.0;
    CHECK_THROWS_AS(gaussian_density(s, xs), DomainError);
}

TEST_CASE("residual checks need a usable grid") {
    const auto p = QuadraticParams::oscillator(1.0, 1.0, 5.0);
    const auto e = solve_ermakov(p, uniform_grid(5.0, 5));
    CHECK_THROWS_AS(ermakov_residual(p, e), DomainError);
    const auto f = solve_ermakov(p, {0.0, 1.0, 1.5, 2.0, 3.0, 4.0, 4.5, 5.0});
    CHECK_THROWS_AS(ermakov_residual(p, f), DomainError);
}

TEST_CASE("pipeline runs are bit-for-bit deterministic") {
    std::mt19937_64 rng(3);
    const auto p = random_params(rng, 8.0);
    const auto a = solve_pipeline(p, uniform_grid(8.0, 100));
    const auto b = solve_pipeline(p, uniform_grid(8.0, 100));
    CHECK(a.ermakov.rho == b.ermakov.rho);
    CHECK(a.ermakov.Lambda == b.ermakov.Lambda);
    CHECK(a.beta.beta_x == b.beta.beta_x);
}

TEST_SUITE_END();
