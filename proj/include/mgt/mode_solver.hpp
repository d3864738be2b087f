#pragma once

#include <array>

#include "mgt/params.hpp"
#include "mgt/spectrum.hpp"

namespace mgt {

/// (u_hat, u_hat_t, u_hat_tt) of one Fourier mode at frequency magnitude k.
struct ModeState {
    cplx u_hat{};
    cplx v_hat{};
    cplx w_hat{};
    double k = 0.0;
};

/// Coefficients of the closed-form mode solution together with the roots they
/// were solved against. The basis depends on the pattern:
///   RealPlusPair       C1 e^{l1 t} + e^{Re l2 t} (C2 cos(Im l2 t) + C3 sin(Im l2 t))
///   ThreeDistinctReal  C1 e^{l1 t} + C2 e^{l2 t} + C3 e^{l3 t}
///   RealWithDouble     C1 e^{l1 t} + (C2 + C3 t) e^{l2 t}
///   TripleReal         (C1 + C2 t + C3 t^2) e^{l t}
struct ModeCoefficients {
    RootPattern pattern = RootPattern::RealWithDouble;
    std::array<cplx, 3> coeffs{};
    std::array<cplx, 3> lambdas{};
    double k = 0.0;
};

struct VVector {
    cplx a{};
    double b_mag = 0.0;
    double c_mag = 0.0;

    [[nodiscard]] double norm_sq() const { return std::norm(a) + b_mag * b_mag + c_mag * c_mag; }
};

/// u and its first three time derivatives at one time.
using ModeJet = std::array<cplx, 4>;

[[nodiscard]] ModeState make_state(double k, cplx u0, cplx u1, cplx u2);

/// Picks the solution basis from the root spacing, so it never reports
/// IllConditioned: near-confluent roots use the confluent basis at their mean.
[[nodiscard]] ModeCoefficients mode_coefficients(const ModelParams& p, double k, const ModeState& init);

/// Uses the pattern recorded in sp. Throws IllConditioned when sp claims
/// distinct roots whose spacing is below kConfluenceTol * max(1, |lambda|).
[[nodiscard]] ModeCoefficients mode_coefficients(const ModelParams& p, const SpectrumPoint& sp, const ModeState& init);

[[nodiscard]] ModeJet evaluate_jet(const ModeCoefficients& c, double t);

[[nodiscard]] ModeState solve_mode(const ModelParams& p, double k, const ModeState& init, double t);
[[nodiscard]] ModeJet solve_mode_jet(const ModelParams& p, double k, const ModeState& init, double t);

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of the first-order system.
[[nodiscard]] ModeState propagate_numeric(const ModelParams& p, double k, const ModeState& init, double t,
                                          double tol);

[[nodiscard]] VVector v_vector(const ModelParams& p, const ModeState& state);

}  // namespace mgt
