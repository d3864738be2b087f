#include "mgt/mode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "mgt/error.hpp"

namespace mgt {
namespace {

void check_state(const ModeState& s) {
    for (cplx z : {s.u_hat, s.v_hat, s.w_hat}) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(ErrorCode::NonFinite, "mode state must be finite");
        }
    }
}

void check_time(double t) {
    if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "time must be finite");
    if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "only forward evolution t >= 0 is supported");
}

bool confluent(cplx a, cplx b) {
    return std::abs(a - b) < kConfluenceTol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Real 3x3 system with complex right-hand side, solved column by column.
std::array<cplx, 3> solve3(const Eigen::Matrix3d& m, const ModeState& init) {
    Eigen::Matrix<double, 3, 2> rhs;
    rhs << init.u_hat.real(), init.u_hat.imag(), init.v_hat.real(), init.v_hat.imag(), init.w_hat.real(),
        init.w_hat.imag();
    const Eigen::Matrix<double, 3, 2> x = m.fullPivLu().solve(rhs);
    return {cplx(x(0, 0), x(0, 1)), cplx(x(1, 0), x(1, 1)), cplx(x(2, 0), x(2, 1))};
}

ModeCoefficients trig_basis(double k, double l1, cplx l2, const ModeState& init) {
    const double a = l2.real();
    const double b = std::abs(l2.imag());
    Eigen::Matrix3d m;
    m << 1.0, 1.0, 0.0,
         l1, a, b,
         l1 * l1, a * a - b * b, 2.0 * a * b;
    const cplx top(a, b);
    return {RootPattern::RealPlusPair, solve3(m, init), {cplx(l1), top, std::conj(top)}, k};
}

ModeCoefficients distinct_basis(double k, double l1, double l2, double l3, const ModeState& init) {
    Eigen::Matrix3d m;
    m << 1.0, 1.0, 1.0,
         l1, l2, l3,
         l1 * l1, l2 * l2, l3 * l3;
    return {RootPattern::ThreeDistinctReal, solve3(m, init), {cplx(l1), cplx(l2), cplx(l3)}, k};
}

ModeCoefficients double_basis(double k, double simple, double dbl, const ModeState& init) {
    Eigen::Matrix3d m;
    m << 1.0, 1.0, 0.0,
         simple, dbl, 1.0,
         simple * simple, dbl * dbl, 2.0 * dbl;
    return {RootPattern::RealWithDouble, solve3(m, init), {cplx(simple), cplx(dbl), cplx(dbl)}, k};
}

ModeCoefficients triple_basis(double k, double l, const ModeState& init) {
    const cplx c1 = init.u_hat;
    const cplx c2 = init.v_hat - l * c1;
    const cplx c3 = 0.5 * (init.w_hat - l * l * c1 - 2.0 * l * c2);
    return {RootPattern::TripleReal, {c1, c2, c3}, {cplx(l), cplx(l), cplx(l)}, k};
}

// Index of the root with the smallest |Im|, i.e. the real one.
int real_index(const std::array<cplx, 3>& l) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(l[i].imag()) < std::abs(l[best].imag())) best = i;
    }
    return best;
}

// Pair (i, j) of closest roots; the remaining index is 3 - i - j.
std::pair<int, int> closest_pair(const std::array<cplx, 3>& l) {
    std::pair<int, int> best{0, 1};
    double d = std::abs(l[0] - l[1]);
    if (std::abs(l[0] - l[2]) < d) {
        d = std::abs(l[0] - l[2]);
        best = {0, 2};
    }
    if (std::abs(l[1] - l[2]) < d) best = {1, 2};
    return best;
}

ModeCoefficients distinct_from(double k, const std::array<cplx, 3>& l, const ModeState& init) {
    const bool any_complex = std::any_of(l.begin(), l.end(), [](cplx z) { return z.imag() != 0.0; });
    if (any_complex) {
        const int r = real_index(l);
        const cplx pair = l[(r + 1) % 3];
        return trig_basis(k, l[r].real(), pair, init);
    }
    return distinct_basis(k, l[0].real(), l[1].real(), l[2].real(), init);
}

ModeCoefficients double_from(double k, const std::array<cplx, 3>& l, const ModeState& init) {
    const auto [i, j] = closest_pair(l);
    const double dbl = 0.5 * (l[i].real() + l[j].real());
    return double_basis(k, l[3 - i - j].real(), dbl, init);
}

double mean_real(const std::array<cplx, 3>& l) { return (l[0].real() + l[1].real() + l[2].real()) / 3.0; }

cplx pw(cplx z, int n) {
    if (n < 0) return 0.0;
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

}  // namespace

ModeState make_state(double k, cplx u0, cplx u1, cplx u2) { return {u0, u1, u2, k}; }

ModeCoefficients mode_coefficients(const ModelParams& p, double k, const ModeState& init) {
    check_state(init);
    if (init.k != k) throw Error(ErrorCode::InvalidArgument, "initial state frequency does not match k");
    const SpectrumPoint sp = eigenvalues(p, k);
    const auto& l = sp.lambdas;
    const int close = int(confluent(l[0], l[1])) + int(confluent(l[0], l[2])) + int(confluent(l[1], l[2]));
    if (close >= 2) return triple_basis(k, mean_real(l), init);
    if (close == 1) return double_from(k, l, init);
    return distinct_from(k, l, init);
}

ModeCoefficients mode_coefficients(const ModelParams& p, const SpectrumPoint& sp, const ModeState& init) {
    (void)p;
    check_state(init);
    if (init.k != sp.k) throw Error(ErrorCode::InvalidArgument, "initial state frequency does not match k");
    const auto& l = sp.lambdas;
    switch (sp.pattern) {
        case RootPattern::RealPlusPair:
        case RootPattern::ThreeDistinctReal:
            if (confluent(l[0], l[1]) || confluent(l[0], l[2]) || confluent(l[1], l[2])) {
                throw Error(ErrorCode::IllConditioned,
                            "distinct-root basis requested for confluent roots at k=" + std::to_string(sp.k));
            }
            return distinct_from(sp.k, l, init);
        case RootPattern::RealWithDouble:
            return double_from(sp.k, l, init);
        case RootPattern::TripleReal:
            return triple_basis(sp.k, mean_real(l), init);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown root pattern");
}

ModeJet evaluate_jet(const ModeCoefficients& c, double t) {
    check_time(t);
    ModeJet out{};
    const auto& l = c.lambdas;
    const auto& C = c.coeffs;
    switch (c.pattern) {
        case RootPattern::RealPlusPair: {
            const cplx e1 = std::exp(l[0] * t);
            const cplx e2 = std::exp(l[1] * t);
            for (int n = 0; n < 4; ++n) {
                const cplx osc = pw(l[1], n) * e2;
                out[n] = C[0] * pw(l[0], n) * e1 + C[1] * osc.real() + C[2] * osc.imag();
            }
            break;
        }
        case RootPattern::ThreeDistinctReal: {
            for (int i = 0; i < 3; ++i) {
                const cplx e = std::exp(l[i] * t);
                for (int n = 0; n < 4; ++n) out[n] += C[i] * pw(l[i], n) * e;
            }
            break;
        }
        case RootPattern::RealWithDouble: {
            const cplx e1 = std::exp(l[0] * t);
            const cplx z = l[1];
            const cplx e = std::exp(z * t);
            for (int n = 0; n < 4; ++n) {
                const cplx lin = pw(z, n) * t + double(n) * pw(z, n - 1);
                out[n] = C[0] * pw(l[0], n) * e1 + (C[1] * pw(z, n) + C[2] * lin) * e;
            }
            break;
        }
        case RootPattern::TripleReal: {
            const cplx z = l[0];
            const cplx e = std::exp(z * t);
            for (int n = 0; n < 4; ++n) {
                const cplx lin = pw(z, n) * t + double(n) * pw(z, n - 1);
                const cplx quad = pw(z, n) * t * t + 2.0 * n * pw(z, n - 1) * t + double(n * (n - 1)) * pw(z, n - 2);
                out[n] = (C[0] * pw(z, n) + C[1] * lin + C[2] * quad) * e;
            }
            break;
        }
    }
    return out;
}

ModeJet solve_mode_jet(const ModelParams& p, double k, const ModeState& init, double t) {
    check_time(t);
    return evaluate_jet(mode_coefficients(p, k, init), t);
}

ModeState solve_mode(const ModelParams& p, double k, const ModeState& init, double t) {
    if (t == 0.0) {
        check_state(init);
        return init;
    }
    const ModeJet j = solve_mode_jet(p, k, init, t);
    return {j[0], j[1], j[2], k};
}

ModeState propagate_numeric(const ModelParams& p, double k, const ModeState& init, double t, double tol) {
    namespace odeint = boost::numeric::odeint;
    check_state(init);
    check_time(t);
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    using State = std::array<double, 6>;
    const double tau = p.tau();
    const double k2 = k * k;
    const double bk2 = p.beta() * k2;
    auto rhs = [tau, k2, bk2](const State& x, State& dx, double) {
        for (int c = 0; c < 2; ++c) {
            dx[c] = x[2 + c];
            dx[2 + c] = x[4 + c];
            dx[4 + c] = -(k2 * x[c] + bk2 * x[2 + c] + x[4 + c]) / tau;
        }
    };
    State x{init.u_hat.real(), init.u_hat.imag(), init.v_hat.real(),
            init.v_hat.imag(), init.w_hat.real(), init.w_hat.imag()};
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
    double now = 0.0;
    double dt = std::min(t, 0.01 * tau);
    const double dt_min = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t);
    for (long attempts = 0; t - now > dt_min; ++attempts) {
        if (attempts > 100'000'000) throw Error(ErrorCode::StepFailure, "step budget exhausted");
        if (now + dt > t) dt = t - now;
        if (stepper.try_step(rhs, x, now, dt) == odeint::success) continue;
        if (dt < dt_min) throw Error(ErrorCode::StepFailure, "step size underflow in numeric propagator");
    }
    return {cplx(x[0], x[1]), cplx(x[2], x[3]), cplx(x[4], x[5]), k};
}

VVector v_vector(const ModelParams& p, const ModeState& state) {
    check_state(state);
    const double tau = p.tau();
    return {state.v_hat + tau * state.w_hat, state.k * std::abs(state.u_hat + tau * state.v_hat),
            state.k * std::abs(state.v_hat)};
}

}  // namespace mgt
