#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mgt/error.hpp"
#include "mgt/spectrum.hpp"
#include "oracles.hpp"

using namespace mgt;

namespace {

std::array<cplx, 3> sorted(std::array<cplx, 3> l) {
    std::sort(l.begin(), l.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return l;
}

// Max distance between two root sets after sorting, relative to the root size.
double root_distance(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) {
    const auto x = sorted(a), y = sorted(b);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(x[i] - y[i]) / std::max(1.0, std::abs(y[i])));
    return d;
}

}  // namespace

TEST_CASE("k = 0 gives the relaxation root and a double zero") {
    const SpectrumPoint sp = eigenvalues(ModelParams::validate(0.1, 1.0), 0.0);
    CHECK(sp.lambdas[0] == cplx(-10.0, 0.0));
    CHECK(sp.lambdas[1] == cplx(0.0, 0.0));
    CHECK(sp.lambdas[2] == cplx(0.0, 0.0));
    CHECK(sp.pattern == RootPattern::RealWithDouble);
}

TEST_CASE("critical ratio has the triple root -3/beta") {
    const ModelParams p = ModelParams::validate(1.0 / 9.0, 1.0);
    const SpectrumPoint sp = eigenvalues(p, std::sqrt(3.0));
    CHECK(sp.pattern == RootPattern::TripleReal);
    for (cplx l : sp.lambdas) CHECK(std::abs(l - cplx(-3.0)) <= 1e-10);
    const SpectrumPoint sp2 = eigenvalues(ModelParams::validate(0.5 / 9.0, 0.5), std::sqrt(12.0));
    CHECK(sp2.pattern == RootPattern::TripleReal);
    for (cplx l : sp2.lambdas) CHECK(std::abs(l - cplx(-6.0)) <= 1e-9);
}

TEST_CASE("k = 1 roots agree with the companion-matrix oracle") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const SpectrumPoint sp = eigenvalues(p, 1.0);
    CHECK(sp.pattern == RootPattern::RealPlusPair);
    CHECK(root_distance(sp.lambdas, oracle::roots(0.1, 1.0, 1.0)) <= 1e-12);
    CHECK(sp.lambdas[0].imag() == 0.0);
    CHECK(sp.lambdas[0].real() > -10.0);
    CHECK(sp.lambdas[0].real() < -1.0);
    CHECK(sp.lambdas[1].imag() > 0.0);
    CHECK(sp.lambdas[2] == std::conj(sp.lambdas[1]));
    CHECK(sp.lambdas[1].real() > -4.5);
    CHECK(sp.lambdas[1].real() < 0.0);
}

TEST_CASE("classification against the thresholds") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    // 1.8^2 = 3.24 lies above m2 = 3.2.
    CHECK(classify(p, 1.8) == RootPattern::RealPlusPair);
    CHECK(classify(p, 1.78) == RootPattern::ThreeDistinctReal);
    const auto r = oracle::roots(0.1, 1.0, 1.78);
    for (cplx l : r) CHECK(std::abs(l.imag()) < 1e-12);
    const auto q = oracle::roots(0.1, 1.0, 1.8);
    CHECK(std::abs(q[0].imag()) + std::abs(q[1].imag()) + std::abs(q[2].imag()) > 1e-3);
    CHECK(classify(ModelParams::validate(0.5, 1.0), 5.0) == RootPattern::RealPlusPair);
    CHECK(classify(p, std::sqrt(3.125)) == RootPattern::RealWithDouble);
    CHECK(classify(p, std::sqrt(3.2)) == RootPattern::RealWithDouble);
    CHECK(classify(p, 0.0) == RootPattern::RealWithDouble);
}

TEST_CASE("double roots at the thresholds") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const SpectrumPoint a = eigenvalues(p, std::sqrt(3.125));
    const SpectrumPoint b = eigenvalues(p, std::sqrt(3.2));
    // tau l^3 + l^2 + 3.125 l + 3.125 = 0.1 (l + 2.5)^2 (l + 5).
    CHECK(std::abs(sorted(a.lambdas)[0] - cplx(-5.0)) <= 1e-9);
    CHECK(std::abs(sorted(a.lambdas)[1] - cplx(-2.5)) <= 1e-7);
    CHECK(std::abs(sorted(a.lambdas)[2] - cplx(-2.5)) <= 1e-7);
    CHECK(std::abs(sorted(b.lambdas)[0] - cplx(-4.0)) <= 1e-7);
    CHECK(std::abs(sorted(b.lambdas)[2] - cplx(-2.0)) <= 1e-9);
}

TEST_CASE("random sweep: residuals, Vieta and oracle agreement") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double beta = 0.05 + 1.95 * u(gen);
        const double tau = beta * (0.01 + 0.98 * u(gen));
        const double k = 100.0 * u(gen);
        const ModelParams p = ModelParams::validate(tau, beta);
        const SpectrumPoint sp = eigenvalues(p, k);
        for (cplx l : sp.lambdas) CHECK(relative_residual(p, k, l) <= 1e-9);
        const cplx s1 = sp.lambdas[0] + sp.lambdas[1] + sp.lambdas[2];
        CHECK(std::abs(s1 + 1.0 / tau) <= 1e-9 * (3.0 / tau));
        // The oracle is only accurate away from confluence.
        if (classify(p, k) == RootPattern::RealPlusPair) {
            CHECK(root_distance(sp.lambdas, oracle::roots(tau, beta, k)) <= 1e-8);
        }
    }
}

TEST_CASE("small-frequency expansion is third order on the pair") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const AsymptoticTriple a0 = asymptotic_small_k(p, 0.0);
    CHECK(a0.lambdas_approx[0] == cplx(-10.0));
    CHECK(a0.lambdas_approx[1] == cplx(0.0));
    const auto err = [&](double k) {
        return std::abs(eigenvalues(p, k).lambdas[1] - asymptotic_small_k(p, k).lambdas_approx[1]);
    };
    const AsymptoticTriple a = asymptotic_small_k(p, 0.01);
    CHECK(a.lambdas_approx[1].real() == doctest::Approx(-0.45e-4));
    CHECK(a.lambdas_approx[1].imag() == doctest::Approx(0.01));
    CHECK(err(0.01) < 1e-5);
    CHECK(err(0.02) / err(0.01) == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("large-frequency expansion") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    const SpectrumPoint sp = eigenvalues(p, 1e3);
    CHECK(std::abs(sp.lambdas[0].real() + 1.0) < 1e-3);
    CHECK(std::abs(sp.lambdas[1].real() + 4.5) < 1e-3);
    const SpectrumPoint q = eigenvalues(ModelParams::validate(0.5, 1.0), 1e3);
    CHECK(q.lambdas[1].imag() == doctest::Approx(1e3 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK(q.lambdas[2].imag() == doctest::Approx(-1e3 * std::sqrt(2.0)).epsilon(1e-6));
    const auto err = [&](double k) {
        const SpectrumPoint s = eigenvalues(p, k);
        const AsymptoticTriple a = asymptotic_large_k(p, k);
        return std::max(std::abs(s.lambdas[0].real() - a.lambdas_approx[0].real()),
                        std::abs(s.lambdas[1].real() - a.lambdas_approx[1].real()));
    };
    const double ratio = err(1e3) / err(2e3);
    CHECK(ratio >= 2.0);
    // The real parts actually converge at second order.
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.01));
    CHECK_THROWS_AS((void)asymptotic_large_k(p, 0.0), Error);
}

TEST_CASE("atlas keeps branches continuous") {
    SUBCASE("super-critical start") {
        const std::vector<double> grid{0.0, 0.5, 1.0};
        const auto rows = atlas(ModelParams::validate(0.5, 1.0), grid);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].lambdas[0] == cplx(-2.0));
        for (const SpectrumPoint& r : rows) {
            CHECK(r.labeling == Labeling::BranchContinuous);
            CHECK(r.lambdas[0].imag() == 0.0);
            CHECK(r.lambdas[1].imag() >= 0.0);
        }
        CHECK(rows[0].lambdas[1] == cplx(0.0));
    }
    SUBCASE("pair collides at sqrt(m1)") {
        const ModelParams p = ModelParams::validate(0.1, 1.0);
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) grid.push_back(1.70 + 0.002 * i);
        const auto rows = atlas(p, grid);
        for (const SpectrumPoint& r : rows) {
            const auto ev = eigenvalues(p, r.k);
            CHECK(root_distance(r.lambdas, ev.lambdas) <= 1e-12);
            if (r.k < std::sqrt(3.125) - 1e-6) CHECK(r.lambdas[1].imag() > 0.0);
            if (r.k > std::sqrt(3.125) + 1e-6 && r.k < std::sqrt(3.2) - 1e-6) {
                CHECK(r.lambdas[1].imag() == 0.0);
                CHECK(r.lambdas[2].imag() == 0.0);
                CHECK(r.lambdas[1] != r.lambdas[2]);
            }
        }
        // Tracks move by small steps only.
        for (std::size_t i = 1; i < rows.size(); ++i) {
            for (int b = 0; b < 3; ++b) CHECK(std::abs(rows[i].lambdas[b] - rows[i - 1].lambdas[b]) < 0.5);
        }
    }
    SUBCASE("Re(lambda2) decreases on the nonreal window") {
        std::vector<double> grid;
        for (int i = 0; i <= 140; ++i) grid.push_back(0.1 + 0.01 * i);
        const auto rows = atlas(ModelParams::validate(0.1, 1.0), grid);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].lambdas[1].real() < rows[i - 1].lambdas[1].real());
    }
    SUBCASE("bad grids") {
        const ModelParams p = ModelParams::validate(0.1, 1.0);
        const std::vector<double> unsorted{0.0, 2.0, 1.0};
        const std::vector<double> negative{-1.0, 0.0};
        CHECK_THROWS_AS((void)atlas(p, unsorted), Error);
        CHECK_THROWS_AS((void)atlas(p, negative), Error);
    }
}

TEST_CASE("invalid frequency") {
    const ModelParams p = ModelParams::validate(0.1, 1.0);
    CHECK_THROWS_AS((void)eigenvalues(p, -1.0), Error);
    CHECK_THROWS_AS((void)eigenvalues(p, std::nan("")), Error);
}
