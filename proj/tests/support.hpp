#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "tdqho/model.hpp"

namespace tdqho::testing {

/// Random admissible parameter set mixing constant, cosine and exponential
/// coefficients, with alpha_xp never identically zero.
inline QuadraticParams random_params(std::mt19937_64& rng, double horizon) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    auto pick = [&]() { return static_cast<int>(u(rng) * 3.0); };

    auto positive = [&](double lo, double hi) {
        const double base = between(lo, hi);
        switch (pick()) {
            case 0:
                return TimeFunction::constant(base);
            case 1:
                return TimeFunction::cosine(between(0.05, 0.2) * base, between(0.2, 1.5),
                                            between(0.0, 6.28), base);
            default:
                return TimeFunction::exponential(base, between(-0.4, 0.4) / horizon);
        }
    };
    auto drive = [&](double scale) {
        switch (pick()) {
            case 0:
                return TimeFunction::constant(between(-scale, scale));
            case 1:
                return TimeFunction::cosine(between(-scale, scale), between(0.2, 2.0), between(0.0, 6.28));
            default:
                return TimeFunction::exponential(between(-scale, scale), between(-0.3, 0.3) / horizon);
        }
    };

    for (;;) {
        QuadraticParams p;
        p.horizon = horizon;
        p.m = positive(0.6, 1.6);
        p.omega = positive(0.8, 1.6);
        p.alpha_x = drive(0.3);
        p.alpha_p = drive(0.3);
        p.alpha_0 = drive(0.5);
        const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
        switch (pick()) {
            case 0:
                p.alpha_xp = TimeFunction::constant(sign * between(0.02, 0.12));
                break;
            case 1:
                p.alpha_xp = TimeFunction::cosine(sign * between(0.03, 0.12), between(0.2, 1.5),
                                                  between(0.0, 6.28), between(-0.05, 0.05));
                break;
            default:
                p.alpha_xp = TimeFunction::exponential(sign * between(0.02, 0.1), between(-0.2, 0.2) / horizon);
        }
        if (validate(p, 1024).valid) return p;
    }
}

/// Classical Hamilton flow of the quadratic Hamiltonian, integrated with a
/// plain RK4 loop: means (x, p) and the 2x2 fundamental matrix of the
/// homogeneous part. Shares no code with the library solvers.
struct ClassicalFlow {
    std::vector<double> times;
    std::vector<Eigen::Vector2d> means;
    std::vector<Eigen::Matrix2d> fundamental;
};

inline ClassicalFlow classical_flow(const QuadraticParams& p, double x0, double p0,
                                    const std::vector<double>& grid, int substeps) {
    using Vec = Eigen::Matrix<double, 6, 1>;
    auto rhs = [&p](double t, const Vec& y) {
        const double m = p.m.value(t), w = p.omega.value(t);
        const double axp = p.alpha_xp.value(t);
        const double a11 = 2.0 * axp, a12 = 1.0 / m, a21 = -m * w * w, a22 = -2.0 * axp;
        Vec d;
        d(0) = a11 * y(0) + a12 * y(1) + p.alpha_p.value(t);
        d(1) = a21 * y(0) + a22 * y(1) - p.alpha_x.value(t);
        // columns of the fundamental matrix: (y2, y4) and (y3, y5)
        d(2) = a11 * y(2) + a12 * y(4);
        d(3) = a11 * y(3) + a12 * y(5);
        d(4) = a21 * y(2) + a22 * y(4);
        d(5) = a21 * y(3) + a22 * y(5);
        return d;
    };
    Vec y;
    y << x0, p0, 1.0, 0.0, 0.0, 1.0;
    ClassicalFlow out;
    double t = 0.0;
    for (double target : grid) {
        const double span = target - t;
        if (span > 0.0) {
            const double h = span / substeps;
            for (int k = 0; k < substeps; ++k) {
                const Vec k1 = rhs(t, y);
                const Vec k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
                const Vec k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
                const Vec k4 = rhs(t + h, y + h * k3);
                y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
            t = target;
        }
        out.times.push_back(target);
        out.means.emplace_back(y(0), y(1));
        Eigen::Matrix2d F;
        F << y(2), y(3), y(4), y(5);
        out.fundamental.push_back(F);
    }
    return out;
}

inline bool close_rel(double a, double r, double rel, double abs) {
    return std::abs(a - r) <= std::max(rel * std::abs(r), abs);
}

}  // namespace tdqho::testing
