#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "mgt/error.hpp"
#include "mgt/lyapunov.hpp"
#include "mgt/mode_solver.hpp"
#include "oracles.hpp"

using namespace mgt;

namespace {

std::mt19937_64 gen(5);

cplx rnd() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(gen), u(gen)};
}

ModeState state_at(double tau, double beta, double k, const ModeState& init, double t) {
    const auto s = oracle::propagate(tau, beta, k, {init.u_hat, init.v_hat, init.w_hat}, t);
    return make_state(k, s[0], s[1], s[2]);
}

}  // namespace

TEST_CASE("weight recipe by hand") {
    const LyapunovWeights w = recipe_weights(ModelParams::validate(0.1, 1.0));
    CHECK(w.eps0 == 0.5);
    CHECK(w.eps1 == 0.5);
    CHECK(w.gamma1 == 4.0);
    CHECK(w.eps2 == 0.0625);
    CHECK(w.young0 == doctest::Approx(0.405));
    CHECK(w.young12 == doctest::Approx(0.54));
    CHECK(w.gamma0 == doctest::Approx(2.0 * (0.405 + 4.0 * 0.54) / 0.9));
    CHECK(w.gamma0 == doctest::Approx(5.7));
}

TEST_CASE("default weights are finite and positive") {
    for (auto [tau, beta] : {std::pair{0.1, 1.0}, std::pair{0.5, 1.0}, std::pair{1.0 / 9.0, 1.0}, std::pair{0.01, 2.0}}) {
        const LyapunovWeights w = default_weights(ModelParams::validate(tau, beta));
        for (double x : {w.gamma0, w.gamma1, w.eps0, w.eps1, w.eps2, w.gamma5, w.equiv_lo, w.equiv_hi}) {
            CHECK(std::isfinite(x));
            CHECK(x > 0.0);
        }
        CHECK(w.equiv_lo < w.equiv_hi);
    }
}

TEST_CASE("functionals by hand") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const LyapunovWeights w = default_weights(p);
    const FunctionalValues z = functionals(p, make_state(1.0, 0.0, 0.0, 0.0), w);
    CHECK(z.energy == 0.0);
    CHECK(z.lyap == 0.0);
    // a = v + tau w = 1, b = u + tau v = 0.1:
    // E = (|a|^2 + tau (beta - tau) k^2 |v|^2 + k^2 |b|^2) / 2 = (1 + 0.09 + 0.01) / 2.
    const FunctionalValues f = functionals(p, make_state(1.0, 0.0, 1.0, 0.0), w);
    CHECK(f.energy == doctest::Approx(0.55));
    CHECK(f.f1 == doctest::Approx(0.1));
    CHECK(f.f2 == doctest::Approx(-0.1));
    CHECK(f.rho == doctest::Approx(0.5));
    CHECK(f.lyap == doctest::Approx(w.gamma0 * 0.55 + 0.5 * 0.1 - 4.0 * 0.5 * 0.1));
}

TEST_CASE("L is equivalent to E") {
    for (auto [tau, beta] : {std::pair{0.1, 1.0}, std::pair{0.5, 1.0}, std::pair{0.9, 1.0}}) {
        const ModelParams p = ModelParams::validate(tau, beta);
        const LyapunovWeights w = default_weights(p);
        std::uniform_real_distribution<double> lk(-4.0, 4.0);
        for (int i = 0; i < 2000; ++i) {
            const double k = std::pow(10.0, lk(gen));
            const FunctionalValues f = functionals(p, make_state(k, rnd(), rnd(), rnd()), w);
            CHECK(w.equiv_lo * f.energy <= f.lyap);
            CHECK(f.lyap <= w.equiv_hi * f.energy);
        }
    }
}

TEST_CASE("energy identity") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    CHECK(energy_dissipation_residual(p, 1.0, make_state(1.0, 0.0, 0.0, 0.0), 2.0) == 0.0);
    for (double t : {0.0, 1.0, 5.0}) {
        const DissipationCheck c = energy_dissipation_check(p, 1.0, make_state(1.0, 1.0, 1.0, 1.0), t);
        CHECK(c.residual <= 1e-9 * c.scale);
    }
    // At k = 0 the identity reads dE/dt = 0.
    for (double t : {0.0, 0.3, 4.0}) {
        const DissipationCheck c = energy_dissipation_check(p, 0.0, make_state(0.0, rnd(), rnd(), rnd()), t);
        CHECK(c.residual <= 1e-9 * c.scale);
    }
    // Cross-check against a finite difference of E along the matrix-exponential trajectory.
    const ModeState init = make_state(0.8, rnd(), rnd(), rnd());
    const LyapunovWeights w = default_weights(p);
    const double h = 1e-5, t = 1.7;
    const double ep = functionals(p, state_at(0.1, 1.0, 0.8, init, t + h), w).energy;
    const double em = functionals(p, state_at(0.1, 1.0, 0.8, init, t - h), w).energy;
    const ModeState s = state_at(0.1, 1.0, 0.8, init, t);
    CHECK((ep - em) / (2 * h) == doctest::Approx(-0.9 * 0.64 * std::norm(s.v_hat)).epsilon(1e-6));
}

TEST_CASE("Lyapunov rate matches a finite difference") {
    const ModelParams p = ModelParams::validate(0.3, 0.7);
    const LyapunovWeights w = default_weights(p);
    for (double k : {0.1, 1.0, 6.0}) {
        const ModeState init = make_state(k, rnd(), rnd(), rnd());
        const double t = 0.9, h = 1e-5;
        const double lp = functionals(p, state_at(0.3, 0.7, k, init, t + h), w).lyap;
        const double lm = functionals(p, state_at(0.3, 0.7, k, init, t - h), w).lyap;
        const double rate = lyapunov_rate(p, k, solve_mode_jet(p, k, init, t), w);
        CHECK((lp - lm) / (2 * h) == doctest::Approx(rate).epsilon(1e-6));
    }
}

TEST_CASE("Gronwall margin") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const LyapunovWeights w = default_weights(p);
    std::vector<double> ks;
    for (int i = 0; i <= 40; ++i) ks.push_back(std::pow(10.0, -2.0 + 0.1 * i));
    std::vector<ModeState> samples;
    for (int i = 0; i < 6; ++i) samples.push_back(make_state(0.0, rnd(), rnd(), rnd()));
    const double g5 = gronwall_margin(p, w, ks, samples);
    CHECK(g5 > 0.0);
    CHECK(g5 <= 1.0 / p.tau());
    const std::vector<double> none;
    const std::vector<ModeState> no_samples;
    try {
        (void)gronwall_margin(p, w, ks, no_samples);
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
    CHECK_THROWS_AS((void)gronwall_margin(p, w, none, samples), Error);
}

TEST_CASE("L exp(gamma5 rho t) is nonincreasing") {
    for (auto [tau, beta] : {std::pair{0.1, 1.0}, std::pair{0.5, 1.0}, std::pair{1.0 / 9.0, 1.0}}) {
        const ModelParams p = ModelParams::validate(tau, beta);
        const LyapunovWeights w = default_weights(p);
        for (double k : {0.05, 0.5, std::sqrt(3.0), 3.0, 30.0}) {
            const ModeState init = make_state(k, rnd(), rnd(), rnd());
            double prev = functionals(p, init, w).lyap;
            for (int i = 1; i <= 200; ++i) {
                const double t = 0.05 * i;
                const ModeState s = solve_mode(p, k, init, t);
                const double cur = functionals(p, s, w).lyap * std::exp(w.gamma5 * rho_of(k) * t);
                CHECK(cur <= prev * (1.0 + 1e-10));
                prev = cur;
            }
        }
    }
}

TEST_CASE("pointwise V bound") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const LyapunovWeights w = default_weights(p);
    const double c = pointwise_v_constant(p, w);
    CHECK(c >= 1.0);
    for (double k : {0.01, 0.3, 1.0, 1.77, 4.0, 40.0}) {
        const ModeState init = make_state(k, rnd(), rnd(), rnd());
        const double v0 = v_vector(p, init).norm_sq();
        for (double t : {0.0, 0.5, 2.0, 10.0, 40.0}) {
            const double vt = v_vector(p, solve_mode(p, k, init, t)).norm_sq();
            CHECK(vt <= c * std::exp(-w.gamma5 * rho_of(k) * t) * v0 * (1.0 + 1e-12));
        }
    }
}
