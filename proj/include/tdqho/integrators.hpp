#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "tdqho/errors.hpp"

namespace tdqho {

/// First-order system y' = f(t, y) on [0, horizon].
template <typename Scalar = double>
struct OdeSystem {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Rhs = std::function<void(Scalar, const Vector&, Vector&)>;

    Eigen::Index dimension = 0;
    Rhs rhs;
    Scalar horizon = Scalar(1);
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    double max_error_estimate = 0.0;
};

template <typename Scalar = double>
struct SampledSolution {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    std::vector<Scalar> times;
    Matrix states;  // dimension x samples
    IntegratorStats stats;

    Eigen::Index samples() const { return states.cols(); }
    auto state(Eigen::Index i) const { return states.col(i); }
    auto component(Eigen::Index k) const { return states.row(k); }
};

/// n points uniformly spaced on [0, horizon], both ends included.
template <typename Scalar = double>
std::vector<Scalar> uniform_grid(Scalar horizon, int n) {
    if (n < 2) throw DomainError("uniform grid needs at least two points");
    std::vector<Scalar> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = horizon * Scalar(i) / Scalar(n - 1);
    g.back() = horizon;
    return g;
}

namespace detail {

template <typename Scalar>
void check_samples(const OdeSystem<Scalar>& sys, const std::vector<Scalar>& samples) {
    if (samples.empty()) throw DomainError("no sample times requested");
    const Scalar slack = Scalar(1e-12) * sys.horizon;
    if (samples.front() < -slack || samples.back() > sys.horizon + slack)
        throw DomainError("sample times outside the system domain");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i] > samples[i - 1]))
            throw DomainError("sample times must be strictly increasing");
}

template <typename Vector>
bool all_finite(const Vector& v) {
    return v.allFinite();
}

}  // namespace detail

/// Classic fourth-order Runge-Kutta with fixed step dt; the last substep before
/// each sample time is shortened so the sample is hit exactly.
template <typename Scalar>
SampledSolution<Scalar> integrate_fixed_rk4(const OdeSystem<Scalar>& sys,
                                            const typename OdeSystem<Scalar>::Vector& y0,
                                            Scalar dt, const std::vector<Scalar>& samples) {
    using Vector = typename OdeSystem<Scalar>::Vector;
    if (!(dt > Scalar(0))) throw DomainError("rk4: dt must be positive");
    if (y0.size() != sys.dimension) throw DomainError("rk4: initial state has wrong dimension");
    detail::check_samples(sys, samples);

    SampledSolution<Scalar> out;
    out.times = samples;
    out.states.resize(sys.dimension, static_cast<Eigen::Index>(samples.size()));

    const Eigen::Index n = sys.dimension;
    Vector y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    Scalar t = Scalar(0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Scalar target = samples[s];
        while (t < target) {
            Scalar h = std::min(dt, target - t);
            // avoid a sliver step right before the sample
            if (target - (t + h) < Scalar(1e-12) * dt) h = target - t;
            sys.rhs(t, y, k1);
            tmp = y + (h / 2) * k1;
            sys.rhs(t + h / 2, tmp, k2);
            tmp = y + (h / 2) * k2;
            sys.rhs(t + h / 2, tmp, k3);
            tmp = y + h * k3;
            sys.rhs(t + h, tmp, k4);
            y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
            t = (h == target - t) ? target : t + h;
            ++out.stats.steps;
            if (!detail::all_finite(y)) throw IntegrationError("rk4: non-finite state", double(t));
        }
        out.states.col(static_cast<Eigen::Index>(s)) = y;
    }
    return out;
}

/// Dormand-Prince 5(4) with PI step-size control. Steps are clipped to land on
/// every sample time, so samples carry full fifth-order accuracy.
template <typename Scalar>
SampledSolution<Scalar> integrate_adaptive(const OdeSystem<Scalar>& sys,
                                           const typename OdeSystem<Scalar>::Vector& y0,
                                           Scalar rel_tol, Scalar abs_tol,
                                           const std::vector<Scalar>& samples) {
    using Vector = typename OdeSystem<Scalar>::Vector;
    if (!(rel_tol > Scalar(0)) || !(abs_tol > Scalar(0)))
        throw DomainError("adaptive: tolerances must be positive");
    if (y0.size() != sys.dimension) throw DomainError("adaptive: initial state has wrong dimension");
    detail::check_samples(sys, samples);

    // Dormand-Prince tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index n = sys.dimension;
    SampledSolution<Scalar> out;
    out.times = samples;
    out.states.resize(n, static_cast<Eigen::Index>(samples.size()));

    Vector y = y0, ynew(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), err(n);
    Scalar t = Scalar(0);
    const Scalar T = sys.horizon;
    const Scalar h_min = Scalar(1e-14) * T;

    sys.rhs(t, y, k1);
    // initial step guess from the size of y and y'
    Scalar h;
    {
        const Vector sc = (abs_tol + rel_tol * y.array().abs()).matrix();
        const Scalar d0 = std::sqrt((y.array() / sc.array()).square().mean());
        const Scalar d1 = std::sqrt((k1.array() / sc.array()).square().mean());
        h = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) * T : Scalar(0.01) * d0 / d1;
        h = std::min(h, Scalar(0.01) * T);
    }

    constexpr double beta = 0.04, alpha = 0.2 - 0.75 * beta, safety = 0.9;
    Scalar err_prev = Scalar(1e-4);

    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Scalar target = samples[s];
        while (t < target) {
            bool clipped = false;
            Scalar step = h;
            if (t + step >= target || target - (t + step) < Scalar(1e-10) * step) {
                step = target - t;
                clipped = true;
            }
            if (step < h_min && !clipped)
                throw IntegrationError("adaptive: step size underflow", double(t));

            tmp = y + step * (a21 * k1);
            sys.rhs(t + c2 * step, tmp, k2);
            tmp = y + step * (a31 * k1 + a32 * k2);
            sys.rhs(t + c3 * step, tmp, k3);
            tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            sys.rhs(t + c4 * step, tmp, k4);
            tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            sys.rhs(t + c5 * step, tmp, k5);
            tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            sys.rhs(t + step, tmp, k6);
            ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            sys.rhs(t + step, ynew, k7);
            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const auto sc = abs_tol + rel_tol * y.array().abs().max(ynew.array().abs());
            Scalar en = std::sqrt((err.array() / sc).square().mean());
            if (!std::isfinite(double(en))) en = Scalar(1e10);

            if (en <= Scalar(1)) {
                const Scalar fac = (en == Scalar(0))
                                       ? Scalar(5)
                                       : std::clamp(Scalar(safety) * std::pow(en, -Scalar(alpha)) *
                                                        std::pow(err_prev, Scalar(beta)),
                                                    Scalar(0.2), Scalar(5));
                err_prev = std::max(en, Scalar(1e-4));
                t = clipped ? target : t + step;
                y = ynew;
                k1 = k7;
                ++out.stats.steps;
                out.stats.max_error_estimate = std::max(out.stats.max_error_estimate, double(en));
                if (!detail::all_finite(y))
                    throw IntegrationError("adaptive: non-finite state", double(t));
                // a clipped step says nothing about the natural step size
                if (!clipped) h = step * fac;
                else h = std::max(h, step * fac);
            } else {
                ++out.stats.rejected;
                h = step * std::max(Scalar(safety) * std::pow(en, -Scalar(0.2)), Scalar(0.2));
                if (h < h_min) throw IntegrationError("adaptive: step size underflow", double(t));
            }
        }
        out.states.col(static_cast<Eigen::Index>(s)) = y;
    }
    return out;
}

/// Appends quadrature channels z_i' = g_i(t, y), z_i(0) = 0 to a system, so
/// the integrals share the solver's error control.
template <typename Scalar>
OdeSystem<Scalar> with_quadrature(
    OdeSystem<Scalar> base,
    std::vector<std::function<Scalar(Scalar, const typename OdeSystem<Scalar>::Vector&)>>
        integrands) {
    using Vector = typename OdeSystem<Scalar>::Vector;
    const Eigen::Index nb = base.dimension;
    const auto nq = static_cast<Eigen::Index>(integrands.size());
    OdeSystem<Scalar> out;
    out.dimension = nb + nq;
    out.horizon = base.horizon;
    out.rhs = [rhs = std::move(base.rhs), g = std::move(integrands), nb,
               nq](Scalar t, const Vector& y, Vector& dy) {
        const Vector yb = y.head(nb);
        Vector db(nb);
        if (nb > 0) rhs(t, yb, db);
        dy.head(nb) = db;
        for (Eigen::Index i = 0; i < nq; ++i) dy(nb + i) = g[static_cast<std::size_t>(i)](t, yb);
    };
    return out;
}

}  // namespace tdqho
