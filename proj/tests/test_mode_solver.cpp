#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mgt/error.hpp"
#include "mgt/mode_solver.hpp"
#include "oracles.hpp"

using namespace mgt;

namespace {

double distance(const ModeState& s, const std::array<cplx, 3>& ref) {
    return std::max({std::abs(s.u_hat - ref[0]), std::abs(s.v_hat - ref[1]), std::abs(s.w_hat - ref[2])});
}

double size(const std::array<cplx, 3>& v) { return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])}); }

std::array<cplx, 3> as_array(const ModeState& s) { return {s.u_hat, s.v_hat, s.w_hat}; }

}  // namespace

TEST_CASE("zero data gives zero coefficients") {
    const ModelParams p = ModelParams::validate(0.3, 0.8);
    for (double k : {0.0, 0.7, 5.0}) {
        const ModeCoefficients c = mode_coefficients(p, k, make_state(k, 0.0, 0.0, 0.0));
        for (cplx x : c.coeffs) CHECK(x == cplx(0.0));
    }
}

TEST_CASE("triple-root coefficients by hand") {
    const ModelParams p = ModelParams::validate(1.0 / 9.0, 1.0);
    const double k = std::sqrt(3.0);
    const ModeCoefficients c = mode_coefficients(p, k, make_state(k, 1.0, 0.0, 0.0));
    CHECK(c.pattern == RootPattern::TripleReal);
    CHECK(std::abs(c.coeffs[0] - 1.0) < 1e-9);
    CHECK(std::abs(c.coeffs[1] - 3.0) < 1e-8);
    CHECK(std::abs(c.coeffs[2] - 4.5) < 1e-7);
    const ModeJet j0 = evaluate_jet(c, 0.0);
    CHECK(std::abs(j0[0] - 1.0) < 1e-9);
    CHECK(std::abs(j0[1]) < 1e-9);
    CHECK(std::abs(j0[2]) < 1e-9);
}

TEST_CASE("low-frequency limit of the coefficients") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    // u = C1 e^{l1 t} + e^{a t}(C2 cos bt + C3 sin bt); for data (1, 0, 0) the
    // relaxation coefficient is tau^2 k^2 to leading order and C2 tends to 1.
    for (double k : {1e-2, 1e-3}) {
        const ModeCoefficients c = mode_coefficients(p, k, make_state(k, 1.0, 0.0, 0.0));
        CHECK(c.pattern == RootPattern::RealPlusPair);
        CHECK(c.coeffs[0].real() / (0.01 * k * k) == doctest::Approx(1.0).epsilon(10 * k));
        CHECK(std::abs(c.coeffs[1] - 1.0) < 10 * k * k);
    }
}

TEST_CASE("t = 0 returns the data") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const ModeState init = make_state(1.3, cplx(0.2, -1.0), cplx(0.5, 0.1), cplx(-2.0, 0.3));
    const ModeState s = solve_mode(p, 1.3, init, 0.0);
    CHECK(s.u_hat == init.u_hat);
    CHECK(s.v_hat == init.v_hat);
    CHECK(s.w_hat == init.w_hat);
    const ModeJet j = evaluate_jet(mode_coefficients(p, 1.3, init), 0.0);
    CHECK(std::abs(j[0] - init.u_hat) <= 1e-9 * 2.0);
    CHECK(std::abs(j[2] - init.w_hat) <= 1e-9 * 2.0);
}

TEST_CASE("k = 0 with unit velocity is linear in time") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    for (double t : {0.5, 3.0, 17.0}) {
        const ModeState s = solve_mode(p, 0.0, make_state(0.0, 0.0, 1.0, 0.0), t);
        CHECK(std::abs(s.u_hat - t) < 1e-12 * t);
        CHECK(std::abs(s.v_hat - 1.0) < 1e-12);
        CHECK(std::abs(s.w_hat) < 1e-12);
    }
}

TEST_CASE("closed form against the matrix exponential") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto c = [&] { return cplx(2.0 * u(gen) - 1.0, 2.0 * u(gen) - 1.0); };
    SUBCASE("tau=0.1 beta=1 k=1 t=5") {
        const ModeState init = make_state(1.0, c(), c(), c());
        const auto ref = oracle::propagate(0.1, 1.0, 1.0, as_array(init), 5.0);
        CHECK(distance(solve_mode(ModelParams::validate(0.1, 1.0), 1.0, init, 5.0), ref) <= 1e-8 * size(ref));
    }
    SUBCASE("random params and frequencies") {
        for (int i = 0; i < 300; ++i) {
            const double beta = 0.05 + 1.95 * u(gen);
            const double tau = beta * (0.01 + 0.98 * u(gen));
            const double k = 20.0 * u(gen);
            const double t = 10.0 * u(gen);
            const ModeState init = make_state(k, c(), c(), c());
            const auto ref = oracle::propagate(tau, beta, k, as_array(init), t);
            const double scale = std::max(size(as_array(init)), size(ref));
            CHECK(distance(solve_mode(ModelParams::validate(tau, beta), k, init, t), ref) <= 1e-8 * scale);
        }
    }
    SUBCASE("frequencies at and around the thresholds") {
        const ModelParams p = ModelParams::validate(0.1, 1.0);
        const ModeState base = make_state(0.0, c(), c(), c());
        for (double m : {3.125, 3.2}) {
            for (double d : {0.0, 1e-15, 1e-12, 1e-9, 1e-6, -1e-9, -1e-6}) {
                const double k = std::sqrt(m) + d;
                ModeState init = base;
                init.k = k;
                const auto ref = oracle::propagate(0.1, 1.0, k, as_array(init), 2.0);
                CHECK(distance(solve_mode(p, k, init, 2.0), ref) <= 1e-8 * size(as_array(init)));
            }
        }
        const ModelParams q = ModelParams::validate(1.0 / 9.0, 1.0);
        for (double d : {0.0, 1e-12, 1e-8, -1e-8, 1e-4}) {
            const double k = std::sqrt(3.0) + d;
            ModeState init = base;
            init.k = k;
            const auto ref = oracle::propagate(1.0 / 9.0, 1.0, k, as_array(init), 2.0);
            CHECK(distance(solve_mode(q, k, init, 2.0), ref) <= 1e-8 * size(as_array(init)));
        }
    }
}

TEST_CASE("jet satisfies the ODE") {
    const ModelParams p = ModelParams::validate(0.2, 0.9);
    for (double k : {0.0, 0.4, 2.0, 9.0}) {
        const ModeState init = make_state(k, cplx(1.0, 0.5), cplx(-0.3, 0.0), cplx(0.7, -0.2));
        for (double t : {0.1, 1.0, 4.0}) {
            const ModeJet j = solve_mode_jet(p, k, init, t);
            const cplx r = 0.2 * j[3] + j[2] + k * k * j[0] + 0.9 * k * k * j[1];
            const double scale = 0.2 * std::abs(j[3]) + std::abs(j[2]) + k * k * (std::abs(j[0]) + 0.9 * std::abs(j[1]));
            CHECK(std::abs(r) <= 1e-10 * std::max(scale, 1e-300));
        }
    }
}

TEST_CASE("semigroup property") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const ModeState init = make_state(1.5, cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.0));
    const ModeState direct = solve_mode(p, 1.5, init, 3.0);
    const ModeState split = solve_mode(p, 1.5, solve_mode(p, 1.5, init, 1.2), 1.8);
    CHECK(distance(direct, as_array(split)) <= 1e-12);
}

TEST_CASE("numeric propagator") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const ModeState z = propagate_numeric(p, 2.0, make_state(2.0, 0.0, 0.0, 0.0), 4.0, 1e-10);
    CHECK(z.u_hat == cplx(0.0));
    CHECK(z.w_hat == cplx(0.0));
    const ModeState eq = propagate_numeric(p, 0.0, make_state(0.0, 1.0, 0.0, 0.0), 10.0, 1e-10);
    CHECK(std::abs(eq.u_hat - 1.0) < 1e-12);
    CHECK(std::abs(eq.v_hat) < 1e-12);
    const ModelParams q = ModelParams::validate(0.5, 1.0);
    const ModeState init = make_state(2.0, 1.0, 1.0, 1.0);
    const ModeState a = propagate_numeric(q, 2.0, init, 3.0, 1e-11);
    const ModeState b = solve_mode(q, 2.0, init, 3.0);
    CHECK(distance(a, as_array(b)) <= 1e-9);
    CHECK_THROWS_AS((void)propagate_numeric(q, 2.0, init, 3.0, 0.0), Error);
}

TEST_CASE("V vector") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const VVector z = v_vector(p, make_state(2.0, 0.0, 0.0, 0.0));
    CHECK(z.norm_sq() == 0.0);
    const VVector v = v_vector(p, make_state(2.0, 1.0, 1.0, 1.0));
    CHECK(std::abs(v.a - 1.1) < 1e-15);
    CHECK(v.b_mag == doctest::Approx(2.2));
    CHECK(v.c_mag == doctest::Approx(2.0));
    const ModeState s = make_state(0.7, cplx(0.3, -0.4), cplx(1.2, 0.1), cplx(-0.5, 0.9));
    const double direct = std::norm(s.v_hat + 0.1 * s.w_hat) + 0.49 * std::norm(s.u_hat + 0.1 * s.v_hat) +
                          0.49 * std::norm(s.v_hat);
    CHECK(v_vector(p, s).norm_sq() == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("argument errors") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const ModeState init = make_state(1.0, 1.0, 0.0, 0.0);
    CHECK_THROWS_AS((void)solve_mode(p, 1.0, init, -1.0), Error);
    CHECK_THROWS_AS((void)mode_coefficients(p, 2.0, init), Error);
    try {
        (void)solve_mode(p, 1.0, make_state(1.0, std::nan(""), 0.0, 0.0), 1.0);
        FAIL("expected NonFinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFinite);
    }
}
