#include "mgt/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mgt/error.hpp"

namespace mgt {
namespace {

void check_frequency(double k) {
    if (!std::isfinite(k) || k < 0.0) {
        throw Error(ErrorCode::InvalidFrequency, "frequency must be finite and nonnegative");
    }
}

double poly_real(double tau, double beta, double k2, double x) {
    return ((tau * x + 1.0) * x + beta * k2) * x + k2;
}

double dpoly_real(double tau, double beta, double k2, double x) {
    return (3.0 * tau * x + 2.0) * x + beta * k2;
}

// One real root of the monic cubic from the closed-form solution of its
// depressed form. Only used as a starting point for the bracketed refinement.
double closed_form_real_root(double tau, double beta, double k2) {
    const double a = 1.0 / tau;
    const double b = beta * k2 / tau;
    const double c = k2 / tau;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    double x = 0.0;
    if (disc > 0.0) {
        const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
        x = (u != 0.0) ? u - p / (3.0 * u) : 0.0;
    } else if (p < 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        x = m * std::cos(std::acos(arg) / 3.0);
    }
    return x - a / 3.0;
}

// Safeguarded Newton on [-1/tau, -1/beta], where the cubic changes sign for k > 0.
double bracketed_real_root(double tau, double beta, double k2) {
    double lo = -1.0 / tau;
    double hi = -1.0 / beta;
    double x = closed_form_real_root(tau, beta, k2);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = poly_real(tau, beta, k2, x);
        if (fx == 0.0) return x;
        if (fx < 0.0) lo = x; else hi = x;
        const double dfx = dpoly_real(tau, beta, k2, x);
        double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            return next;
        }
        x = next;
    }
    return x;
}

cplx polish(const ModelParams& p, double k, cplx z) {
    const double tau = p.tau();
    const double beta = p.beta();
    const double k2 = k * k;
    cplx best = z;
    double best_res = std::abs(characteristic(p, k, z));
    for (int step = 0; step < 2; ++step) {
        const cplx df = (3.0 * tau * z + 2.0) * z + beta * k2;
        if (df == cplx(0.0)) break;
        z -= characteristic(p, k, z) / df;
        const double res = std::abs(characteristic(p, k, z));
        if (res < best_res) {
            best_res = res;
            best = z;
        }
    }
    return best;
}

double cancellation(double x) { return std::abs(1.0 + x) / (1.0 + std::abs(x)); }

struct RawRoots {
    double real_root;
    cplx second;
    cplx third;
    bool pair;
};

RawRoots raw_roots(const ModelParams& p, double k) {
    const double tau = p.tau();
    const double beta = p.beta();
    const double k2 = k * k;
    const double r1 = bracketed_real_root(tau, beta, k2);
    // Deflate: tau*l^3 + l^2 + beta*k2*l + k2 = (l - r1)(tau*l^2 + B*l + C).
    const double c0 = -k2 / r1;
    const double b_direct = 1.0 + tau * r1;
    const double b_alt = -k2 * (1.0 + beta * r1) / (r1 * r1);
    const double b0 = cancellation(tau * r1) >= cancellation(beta * r1) ? b_direct : b_alt;
    const double disc = b0 * b0 - 4.0 * tau * c0;
    RawRoots out{r1, {}, {}, false};
    if (disc < 0.0) {
        out.pair = true;
        out.second = cplx(-b0, std::sqrt(-disc)) / (2.0 * tau);
        out.second = polish(p, k, out.second);
        if (out.second.imag() < 0.0) out.second = std::conj(out.second);
        out.third = std::conj(out.second);
    } else {
        const double s = -0.5 * (b0 + std::copysign(std::sqrt(disc), b0));
        out.second = polish(p, k, cplx(s / tau, 0.0));
        out.third = polish(p, k, cplx(s != 0.0 ? c0 / s : 0.0, 0.0));
        out.second = cplx(out.second.real(), 0.0);
        out.third = cplx(out.third.real(), 0.0);
    }
    out.real_root = polish(p, k, cplx(r1, 0.0)).real();
    return out;
}

// Double root of the cubic as the matching root of its derivative.
double double_root(const ModelParams& p, double k) {
    const double tau = p.tau();
    const double beta = p.beta();
    const double k2 = k * k;
    const double d = std::sqrt(std::max(0.0, 1.0 - 3.0 * tau * beta * k2));
    const double minus = (-1.0 - d) / (3.0 * tau);
    const double plus = -beta * k2 / (1.0 + d);
    return std::abs(poly_real(tau, beta, k2, minus)) / residual_scale(p, k, minus) <
                   std::abs(poly_real(tau, beta, k2, plus)) / residual_scale(p, k, plus)
               ? minus
               : plus;
}

SpectrumPoint from_raw(double k, const RawRoots& raw) {
    SpectrumPoint out;
    out.k = k;
    out.labeling = Labeling::Canonical;
    if (raw.pair) {
        out.pattern = RootPattern::RealPlusPair;
        out.lambdas = {cplx(raw.real_root, 0.0), raw.second, std::conj(raw.second)};
        return out;
    }
    std::array<double, 3> r{raw.real_root, raw.second.real(), raw.third.real()};
    std::sort(r.begin(), r.end());
    out.pattern = RootPattern::ThreeDistinctReal;
    out.lambdas = {cplx(r[0]), cplx(r[1]), cplx(r[2])};
    return out;
}

}  // namespace

cplx characteristic(const ModelParams& p, double k, cplx lambda) {
    const double k2 = k * k;
    return ((p.tau() * lambda + 1.0) * lambda + p.beta() * k2) * lambda + k2;
}

double residual_scale(const ModelParams& p, double k, cplx lambda) {
    const double m = std::abs(lambda);
    const double k2 = k * k;
    return p.tau() * m * m * m + m * m + p.beta() * k2 * m + k2;
}

double relative_residual(const ModelParams& p, double k, cplx lambda) {
    const double scale = residual_scale(p, k, lambda);
    const double res = std::abs(characteristic(p, k, lambda));
    return scale > 0.0 ? res / scale : res;
}

RootPattern classify(const ModelParams& p, double k) {
    check_frequency(k);
    if (k == 0.0) return RootPattern::RealWithDouble;
    const Regime reg = regime(p);
    if (reg == Regime::SuperCritical) return RootPattern::RealPlusPair;
    const CardanoThresholds th = cardano_thresholds(p);
    const double k2 = k * k;
    const auto near = [k2](double m) {
        return std::abs(k2 - m) <= kBoundaryK2Tol * std::max(1.0, m);
    };
    const double m1 = *th.m1;
    const double m2 = *th.m2;
    if (reg == Regime::Critical) {
        return near(m1) ? RootPattern::TripleReal : RootPattern::RealPlusPair;
    }
    if (near(m1) || near(m2)) return RootPattern::RealWithDouble;
    if (k2 < m1 || k2 > m2) return RootPattern::RealPlusPair;
    return RootPattern::ThreeDistinctReal;
}

SpectrumPoint eigenvalues(const ModelParams& p, double k) {
    check_frequency(k);
    SpectrumPoint out;
    out.k = k;
    out.labeling = Labeling::Canonical;
    if (k == 0.0) {
        out.pattern = RootPattern::RealWithDouble;
        out.lambdas = {cplx(-1.0 / p.tau()), cplx(0.0), cplx(0.0)};
        return out;
    }
    const RootPattern expected = classify(p, k);
    if (expected == RootPattern::TripleReal) {
        const double lambda = -1.0 / (3.0 * p.tau());
        out.pattern = expected;
        out.lambdas = {cplx(lambda), cplx(lambda), cplx(lambda)};
        return out;
    }
    if (expected == RootPattern::RealWithDouble) {
        const double dbl = double_root(p, k);
        const double simple = -1.0 / p.tau() - 2.0 * dbl;
        out.pattern = expected;
        out.lambdas = {cplx(simple), cplx(dbl), cplx(dbl)};
        return out;
    }
    // Within rounding of a threshold the computed root structure can disagree
    // with the threshold test; the computed structure wins there.
    return from_raw(k, raw_roots(p, k));
}

AsymptoticTriple asymptotic_small_k(const ModelParams& p, double k) {
    check_frequency(k);
    const double re = -0.5 * (p.beta() - p.tau()) * k * k;
    return {k, {cplx(-1.0 / p.tau()), cplx(re, k), cplx(re, -k)}, 2};
}

AsymptoticTriple asymptotic_large_k(const ModelParams& p, double k) {
    check_frequency(k);
    if (k == 0.0) throw Error(ErrorCode::InvalidFrequency, "large-frequency expansion needs k > 0");
    const double tau = p.tau();
    const double beta = p.beta();
    const double re = -(beta - tau) / (2.0 * beta * tau);
    const double im = k * std::sqrt(beta / tau);
    return {k, {cplx(-1.0 / beta), cplx(re, im), cplx(re, -im)}, 2};
}

std::vector<SpectrumPoint> atlas(const ModelParams& p, std::span<const double> k_grid) {
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!std::isfinite(k_grid[i]) || k_grid[i] < 0.0) {
            throw Error(ErrorCode::GridError, "frequency grid must be finite and nonnegative");
        }
        if (i > 0 && !(k_grid[i] > k_grid[i - 1])) {
            throw Error(ErrorCode::GridError, "frequency grid must be strictly ascending");
        }
    }
    static constexpr std::array<std::array<int, 3>, 6> perms{{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
    }};
    std::vector<SpectrumPoint> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) {
        SpectrumPoint sp = eigenvalues(p, k);
        if (!out.empty()) {
            const auto& prev = out.back().lambdas;
            std::size_t best = 0;
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < perms.size(); ++i) {
                double cost = 0.0;
                for (int b = 0; b < 3; ++b) cost += std::norm(sp.lambdas[perms[i][b]] - prev[b]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = i;
                }
            }
            const auto orig = sp.lambdas;
            for (int b = 0; b < 3; ++b) sp.lambdas[b] = orig[perms[best][b]];
        }
        sp.labeling = Labeling::BranchContinuous;
        out.push_back(sp);
    }
    return out;
}

std::string_view to_string(RootPattern pattern) noexcept {
    switch (pattern) {
        case RootPattern::RealPlusPair: return "RealPlusPair";
        case RootPattern::ThreeDistinctReal: return "ThreeDistinctReal";
        case RootPattern::RealWithDouble: return "RealWithDouble";
        case RootPattern::TripleReal: return "TripleReal";
    }
    return "Unknown";
}

}  // namespace mgt
