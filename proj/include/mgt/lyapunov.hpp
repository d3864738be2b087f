#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mgt/mode_solver.hpp"
#include "mgt/params.hpp"

namespace mgt {

/// Weights of L = gamma0 * E + rho * F1 + gamma1 * rho * F2, the Young
/// parameters they were chosen from, the decay coefficient gamma5 and the
/// equivalence constants equiv_lo * E <= L <= equiv_hi * E.
struct LyapunovWeights {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double eps0 = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double young0 = 0.0;   // C(eps0)
    double young12 = 0.0;  // C(eps1, eps2)
    double gamma5 = 0.0;
    double equiv_lo = 0.0;
    double equiv_hi = 0.0;
};

struct FunctionalValues {
    double energy = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double lyap = 0.0;
    double rho = 0.0;
};

/// Energy rate and the sum of magnitudes of the terms that make it up.
struct DissipationCheck {
    double residual = 0.0;
    double scale = 0.0;
};

[[nodiscard]] inline double rho_of(double k) { return k * k / (1.0 + k * k); }

/// Closed-form weight recipe. gamma5 is the largest rate for which
/// dL/dt + gamma5 rho L <= 0 holds for every state on a dense frequency grid,
/// and equiv_lo/equiv_hi bracket L/E there; both come from exact per-frequency
/// generalized eigenvalues, shrunk by 1% toward safety.
[[nodiscard]] LyapunovWeights default_weights(const ModelParams& p);

/// The Young-parameter part of the recipe only (gamma5 and equivalence left at zero).
[[nodiscard]] LyapunovWeights recipe_weights(const ModelParams& p);

[[nodiscard]] FunctionalValues functionals(const ModelParams& p, const ModeState& state, const LyapunovWeights& w);

/// Time derivative of L along the exact trajectory through `jet` (u and its
/// first three time derivatives at frequency k).
[[nodiscard]] double lyapunov_rate(const ModelParams& p, double k, const ModeJet& jet, const LyapunovWeights& w);

/// |dE/dt + (beta - tau) k^2 |v|^2| with dE/dt taken from the analytic
/// derivatives of the closed-form solution.
[[nodiscard]] DissipationCheck energy_dissipation_check(const ModelParams& p, double k, const ModeState& init,
                                                        double t);
[[nodiscard]] double energy_dissipation_residual(const ModelParams& p, double k, const ModeState& init, double t);

/// Largest gamma5 in [0, 1/tau] with dL/dt + gamma5 rho L <= 1e-10 * scale on
/// every state visited by the sample trajectories at the given frequencies.
[[nodiscard]] double gronwall_margin(const ModelParams& p, const LyapunovWeights& w, std::span<const double> k_grid,
                                     std::span<const ModeState> init_samples);

/// Times of the dense grid gronwall_margin samples each trajectory on.
[[nodiscard]] std::vector<double> gronwall_time_grid(const ModelParams& p, double k);

/// Matrices Q with E = x^H Q x (x = (u, v, w)) at frequency k.
[[nodiscard]] Eigen::Matrix3d energy_matrix(const ModelParams& p, double k);
[[nodiscard]] Eigen::Matrix3d lyapunov_matrix(const ModelParams& p, double k, const LyapunovWeights& w);
[[nodiscard]] Eigen::Matrix3d lyapunov_rate_matrix(const ModelParams& p, double k, const LyapunovWeights& w);

/// Constant C with |V(t)|^2 <= C exp(-gamma5 rho t) |V(0)|^2.
[[nodiscard]] double pointwise_v_constant(const ModelParams& p, const LyapunovWeights& w);

}  // namespace mgt
