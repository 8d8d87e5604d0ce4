#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdqho/errors.hpp"
#include "tdqho/integrators.hpp"

using namespace tdqho;

TEST_SUITE_BEGIN("integrators");
using Vec = Eigen::VectorXd;

namespace {

OdeSystem<double> constant_system(double T) {
    return {1, [](double, const Vec&, Vec& dy) { dy(0) = 0.0; }, T};
}

OdeSystem<double> decay_system(double T) {
    return {1, [](double, const Vec& y, Vec& dy) { dy(0) = -y(0); }, T};
}

OdeSystem<double> harmonic_system(double T) {
    return {2,
            [](double, const Vec& y, Vec& dy) {
                dy(0) = y(1);
                dy(1) = -y(0);
            },
            T};
}

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("fixed RK4 examples") {
    const auto c = integrate_fixed_rk4(constant_system(2.0), vec({3.5}), 1e-2, uniform_grid(2.0, 11));
    for (Eigen::Index i = 0; i < c.samples(); ++i) CHECK(c.states(0, i) == 3.5);

    const auto e = integrate_fixed_rk4(decay_system(1.0), vec({1.0}), 1e-3, {0.0, 0.5, 1.0});
    CHECK(std::abs(e.states(0, 2) - std::exp(-1.0)) < 1e-10);
    CHECK(e.times == std::vector<double>{0.0, 0.5, 1.0});

    const double T = 2.0 * std::numbers::pi;
    const auto h = integrate_fixed_rk4(harmonic_system(T), vec({1.0, 0.0}), 1e-3, {0.0, T});
    CHECK(std::abs(h.states(0, 1) - 1.0) < 1e-8);
    CHECK(std::abs(h.states(1, 1)) < 1e-8);
}

TEST_CASE("fixed RK4 lands exactly on off-step sample times") {
    const auto e = integrate_fixed_rk4(decay_system(1.0), vec({1.0}), 0.1, {0.0, 0.123, 0.777});
    CHECK(std::abs(e.states(0, 1) - std::exp(-0.123)) < 1e-7);
    CHECK(std::abs(e.states(0, 2) - std::exp(-0.777)) < 1e-6);
}

TEST_CASE("RK4 converges at fourth order") {
    auto err = [](double dt) {
        const auto s = integrate_fixed_rk4(decay_system(1.0), vec({1.0}), dt, {0.0, 1.0});
        return std::abs(s.states(0, 1) - std::exp(-1.0));
    };
    const double ratio = err(0.02) / err(0.01);
    CHECK(ratio >= 14.0);
    CHECK(ratio <= 18.0);
}

TEST_CASE("adaptive DOPRI5 examples") {
    const auto c = integrate_adaptive(constant_system(2.0), vec({3.5}), 1e-10, 1e-12, uniform_grid(2.0, 11));
    for (Eigen::Index i = 0; i < c.samples(); ++i) CHECK(c.states(0, i) == 3.5);

    const auto e = integrate_adaptive(decay_system(1.0), vec({1.0}), 1e-10, 1e-12, {0.0, 1.0});
    CHECK(std::abs(e.states(0, 1) - std::exp(-1.0)) < 1e-10);

    const double T = 2.0 * std::numbers::pi;
    const auto grid = uniform_grid(T, 50);
    const auto h = integrate_adaptive(harmonic_system(T), vec({1.0, 0.0}), 1e-10, 1e-12, grid);
    CHECK(std::abs(h.states(0, 49) - 1.0) < 1e-8);
    CHECK(std::abs(h.states(1, 49)) < 1e-8);
    CHECK(h.stats.steps > 0);

    const auto f = integrate_fixed_rk4(harmonic_system(T), vec({1.0, 0.0}), 1e-4, grid);
    CHECK((h.states - f.states).cwiseAbs().maxCoeff() < 10.0 * 1e-10);
}

TEST_CASE("adaptive integrator failure modes") {
    OdeSystem<double> blowup{1, [](double, const Vec& y, Vec& dy) { dy(0) = y(0) * y(0); }, 2.0};
    CHECK_THROWS_AS(integrate_adaptive(blowup, vec({1.0}), 1e-10, 1e-12, {0.0, 2.0}), IntegrationError);
    CHECK_THROWS_AS(integrate_adaptive(decay_system(1.0), vec({1.0}), 0.0, 1e-12, {0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(integrate_adaptive(decay_system(1.0), vec({1.0}), 1e-8, 1e-12, {0.0, 2.0}), DomainError);
    CHECK_THROWS_AS(integrate_fixed_rk4(decay_system(1.0), vec({1.0}), -1.0, {0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(integrate_fixed_rk4(decay_system(1.0), vec({1.0}), 0.1, {0.5, 0.5}), DomainError);
}

TEST_CASE("quadrature channels") {
    OdeSystem<double> empty{0, {}, 3.0};
    using G = std::function<double(double, const Vec&)>;
    const auto sys = with_quadrature(empty, std::vector<G>{[](double, const Vec&) { return 1.0; },
                                                           [](double t, const Vec&) { return std::cos(t); }});
    const auto grid = uniform_grid(3.0, 31);
    const auto s = integrate_adaptive(sys, Vec::Zero(2), 1e-10, 1e-12, grid);
    for (Eigen::Index i = 0; i < s.samples(); ++i) {
        CHECK(std::abs(s.states(0, i) - grid[static_cast<std::size_t>(i)]) <
              1e-15 * static_cast<double>(s.stats.steps + 1) * 3.0);
        CHECK(std::abs(s.states(1, i) - std::sin(grid[static_cast<std::size_t>(i)])) < 1e-10);
    }

    // phase of a standard oscillator advances linearly
    const double w = 1.3;
    OdeSystem<double> osc{2,
                          [w](double, const Vec& y, Vec& dy) {
                              dy(0) = y(1);
                              dy(1) = -w * w * y(0);
                          },
                          5.0};
    const auto phased = with_quadrature(osc, std::vector<G>{[w](double, const Vec&) { return w; }});
    const auto r = integrate_adaptive(phased, vec({1.0, 0.0, 0.0}), 1e-10, 1e-12, {0.0, 5.0});
    CHECK(r.states(2, 1) == doctest::Approx(w * 5.0).epsilon(1e-12));
}

TEST_SUITE_END();
