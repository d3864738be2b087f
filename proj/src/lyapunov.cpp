#include "mgt/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mgt/error.hpp"

namespace mgt {
namespace {

Eigen::Matrix3d sym(const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    return 0.5 * (x * y.transpose() + y * x.transpose());
}

struct Directions {
    Eigen::Vector3d a, b, v;
};

// a = v + tau w, b = u + tau v, and v itself, as linear forms on (u, v, w).
Directions directions(double tau) {
    return {Eigen::Vector3d(0.0, 1.0, tau), Eigen::Vector3d(1.0, tau, 0.0), Eigen::Vector3d(0.0, 1.0, 0.0)};
}

Eigen::Matrix3d phi(const ModelParams& p, double k) {
    const double tau = p.tau();
    const double k2 = k * k;
    Eigen::Matrix3d m;
    m << 0.0, 1.0, 0.0,
         0.0, 0.0, 1.0,
         -k2 / tau, -p.beta() * k2 / tau, -1.0 / tau;
    return m;
}

std::vector<double> sweep_grid(const ModelParams& p) {
    std::vector<double> ks;
    constexpr int n = 2001;
    for (int i = 0; i < n; ++i) ks.push_back(std::pow(10.0, -4.0 + 8.0 * i / (n - 1)));
    const CardanoThresholds th = cardano_thresholds(p);
    if (th.m1) ks.push_back(std::sqrt(*th.m1));
    if (th.m2) ks.push_back(std::sqrt(*th.m2));
    return ks;
}

double min_generalized(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(a, b, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_generalized(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(a, b, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

struct Parts {
    double e, f1, f2;
};

Parts rates(const ModelParams& p, double k, const ModeJet& j) {
    const double tau = p.tau();
    const double beta = p.beta();
    const double k2 = k * k;
    const cplx a = j[1] + tau * j[2];
    const cplx da = j[2] + tau * j[3];
    const cplx b = j[0] + tau * j[1];
    const cplx db = j[1] + tau * j[2];
    const double de = std::real(std::conj(a) * da) + tau * (beta - tau) * k2 * std::real(std::conj(j[1]) * j[2]) +
                      k2 * std::real(std::conj(b) * db);
    const double df1 = std::real(std::conj(db) * a + std::conj(b) * da);
    const double df2 = -tau * std::real(std::conj(j[2]) * a + std::conj(j[1]) * da);
    return {de, df1, df2};
}

}  // namespace

LyapunovWeights recipe_weights(const ModelParams& p) {
    const double tau = p.tau();
    const double gap = p.beta() - tau;
    LyapunovWeights w;
    w.eps0 = 0.5;
    w.eps1 = 0.5;
    w.gamma1 = 4.0;
    w.eps2 = 1.0 / 16.0;
    w.young0 = gap * gap / (4.0 * w.eps0);
    w.young12 = tau * tau / (4.0 * w.eps2) + 1.0 / (4.0 * w.eps1);
    w.gamma0 = 2.0 * (w.young0 + w.gamma1 * w.young12) / gap;
    return w;
}

LyapunovWeights default_weights(const ModelParams& p) {
    LyapunovWeights w = recipe_weights(p);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double g5 = std::numeric_limits<double>::infinity();
    for (double k : sweep_grid(p)) {
        const Eigen::Matrix3d e = energy_matrix(p, k);
        const Eigen::Matrix3d l = lyapunov_matrix(p, k, w);
        lo = std::min(lo, min_generalized(l, e));
        hi = std::max(hi, max_generalized(l, e));
        if (lo <= 0.0) throw Error(ErrorCode::NonPositiveMargin, "Lyapunov functional is not positive definite");
        g5 = std::min(g5, min_generalized(-lyapunov_rate_matrix(p, k, w), rho_of(k) * l));
    }
    if (!(g5 > 0.0)) throw Error(ErrorCode::NonPositiveMargin, "no positive decay coefficient for the default weights");
    w.equiv_lo = 0.99 * lo;
    w.equiv_hi = 1.01 * hi;
    w.gamma5 = std::min(0.99 * g5, 1.0 / p.tau());
    return w;
}

Eigen::Matrix3d energy_matrix(const ModelParams& p, double k) {
    const double tau = p.tau();
    const double k2 = k * k;
    const Directions d = directions(tau);
    return 0.5 * (d.a * d.a.transpose() + tau * (p.beta() - tau) * k2 * d.v * d.v.transpose() +
                  k2 * d.b * d.b.transpose());
}

Eigen::Matrix3d lyapunov_matrix(const ModelParams& p, double k, const LyapunovWeights& w) {
    const Directions d = directions(p.tau());
    const double rho = rho_of(k);
    return w.gamma0 * energy_matrix(p, k) + rho * sym(d.b, d.a) - w.gamma1 * rho * p.tau() * sym(d.v, d.a);
}

Eigen::Matrix3d lyapunov_rate_matrix(const ModelParams& p, double k, const LyapunovWeights& w) {
    const Eigen::Matrix3d l = lyapunov_matrix(p, k, w);
    const Eigen::Matrix3d f = phi(p, k);
    return f.transpose() * l + l * f;
}

FunctionalValues functionals(const ModelParams& p, const ModeState& s, const LyapunovWeights& w) {
    const double tau = p.tau();
    const double k2 = s.k * s.k;
    const cplx a = s.v_hat + tau * s.w_hat;
    const cplx b = s.u_hat + tau * s.v_hat;
    FunctionalValues out;
    out.energy = 0.5 * (std::norm(a) + tau * (p.beta() - tau) * k2 * std::norm(s.v_hat) + k2 * std::norm(b));
    out.f1 = std::real(std::conj(b) * a);
    out.f2 = -tau * std::real(std::conj(s.v_hat) * a);
    out.rho = rho_of(s.k);
    out.lyap = w.gamma0 * out.energy + out.rho * out.f1 + w.gamma1 * out.rho * out.f2;
    return out;
}

double lyapunov_rate(const ModelParams& p, double k, const ModeJet& jet, const LyapunovWeights& w) {
    const Parts r = rates(p, k, jet);
    const double rho = rho_of(k);
    return w.gamma0 * r.e + rho * r.f1 + w.gamma1 * rho * r.f2;
}

DissipationCheck energy_dissipation_check(const ModelParams& p, double k, const ModeState& init, double t) {
    const ModeJet j = solve_mode_jet(p, k, init, t);
    const double tau = p.tau();
    const double k2 = k * k;
    const double damp = (p.beta() - tau) * k2 * std::norm(j[1]);
    const Parts r = rates(p, k, j);
    const cplx a = j[1] + tau * j[2];
    const cplx b = j[0] + tau * j[1];
    // Sum of term magnitudes before cancellation; at k = 0 the rate is 0 - 0.
    const double scale = std::abs(a) * (std::abs(j[2]) + tau * std::abs(j[3])) +
                         tau * (p.beta() - tau) * k2 * std::abs(j[1]) * std::abs(j[2]) +
                         k2 * std::abs(b) * (std::abs(j[1]) + tau * std::abs(j[2])) + damp;
    return {std::abs(r.e + damp), scale};
}

double energy_dissipation_residual(const ModelParams& p, double k, const ModeState& init, double t) {
    return energy_dissipation_check(p, k, init, t).residual;
}

std::vector<double> gronwall_time_grid(const ModelParams& p, double k) {
    (void)k;
    std::vector<double> ts{0.0};
    constexpr int n = 60;
    const double lo = 1e-3 * p.tau();
    const double hi = 50.0;
    for (int i = 0; i < n; ++i) ts.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return ts;
}

double gronwall_margin(const ModelParams& p, const LyapunovWeights& w, std::span<const double> k_grid,
                       std::span<const ModeState> init_samples) {
    if (k_grid.empty() || init_samples.empty()) {
        throw Error(ErrorCode::EmptyInput, "gronwall_margin needs frequencies and initial states");
    }
    constexpr double margin_tol = 1e-10;
    // The test dL/dt + g rho L <= tol * scale is affine in g, so the largest
    // admissible g is a minimum of ratios and needs no bisection.
    double best = 1.0 / p.tau();
    for (double k : k_grid) {
        const double rho = rho_of(k);
        for (const ModeState& s0 : init_samples) {
            const ModeState init{s0.u_hat, s0.v_hat, s0.w_hat, k};
            const ModeCoefficients c = mode_coefficients(p, k, init);
            for (double t : gronwall_time_grid(p, k)) {
                const ModeJet j = evaluate_jet(c, t);
                const double l = functionals(p, {j[0], j[1], j[2], k}, w).lyap;
                const double dl = lyapunov_rate(p, k, j, w);
                const double slack = margin_tol * (std::abs(dl) + rho * std::abs(l)) - dl;
                if (rho * l > 0.0) {
                    best = std::min(best, slack / (rho * l));
                } else if (slack < 0.0) {
                    best = 0.0;
                }
            }
        }
    }
    if (!(best > 0.0)) throw Error(ErrorCode::NonPositiveMargin, "no positive gamma5 passes the sweep");
    return best;
}

double pointwise_v_constant(const ModelParams& p, const LyapunovWeights& w) {
    const double s = p.tau() * (p.beta() - p.tau());
    return (w.equiv_hi / w.equiv_lo) * std::max(1.0, s) / std::min(1.0, s);
}

}  // namespace mgt
