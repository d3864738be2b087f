#include "mgt/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mgt/error.hpp"

namespace mgt {

ModelParams ModelParams::validate(double tau, double beta) {
    if (!std::isfinite(tau) || !std::isfinite(beta)) {
        throw Error(ErrorCode::NonFinite, "tau and beta must be finite");
    }
    if (tau <= 0.0 || tau >= beta) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "require 0 < tau < beta (got tau=%.17g, beta=%.17g)", tau, beta);
        throw Error(ErrorCode::NonDissipative, buf);
    }
    return ModelParams(tau, beta);
}

ModelParams ModelParams::from_physical(double tau, double beta, double c) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFinite, "sound speed must be finite");
    if (c <= 0.0) throw Error(ErrorCode::InvalidArgument, "sound speed must be positive");
    // Both Laplacian terms carry c^2, so x -> x/c removes c; only frequencies rescale.
    return validate(tau, beta);
}

CardanoThresholds cardano_thresholds(const ModelParams& p) {
    const double tau = p.tau();
    const double beta = p.beta();
    const double r = beta / tau;
    CardanoThresholds out{};
    out.c1 = 27.0 - 18.0 * r - r * r;
    // c1^2 - 64 r^3 factors as (r - 1)(r - 9)^3; the factored form keeps the
    // sign exact near the critical ratio where the expanded form cancels.
    const double d9 = r - 9.0;
    out.c2 = (r - 1.0) * d9 * d9 * d9;
    if (regime(p) == Regime::Critical) {
        out.c2 = 0.0;
        const double m = tau * (-out.c1) / (8.0 * beta * beta * beta);
        out.m1 = m;
        out.m2 = m;
        return out;
    }
    if (out.c2 < 0.0) return out;
    const double m2 = tau * (-out.c1 + std::sqrt(out.c2)) / (8.0 * beta * beta * beta);
    // m1 * m2 = 1 / (tau beta^3); avoids the cancellation in -c1 - sqrt(c2).
    const double m1 = 1.0 / (tau * beta * beta * beta * m2);
    out.m1 = m1;
    out.m2 = m2;
    return out;
}

Regime regime(const ModelParams& p) {
    constexpr double critical = 1.0 / 9.0;
    const double ratio = p.ratio();
    if (std::abs(ratio - critical) <= kCriticalRatioTol * critical) return Regime::Critical;
    return ratio < critical ? Regime::SubCritical : Regime::SuperCritical;
}

ApplicableBound generic_bound(int dim, int j) {
    return {"L1", 1.0 - dim / 4.0 - j / 2.0};
}

std::optional<ApplicableBound> improved_bound(int dim, int j) {
    if (dim + j < 3) return std::nullopt;
    return ApplicableBound{"L1, N+j>=3", -(dim - 2) / 4.0 - j / 2.0};
}

ApplicableBound weighted_bound(int dim, int j) {
    return {"L1,1 weighted", -dim / 4.0 - j / 2.0};
}

TheoremRates theorem_rates(const ModelParams& p, int dim, int j, DataClass data_class) {
    if (dim < 1 || j < 0) {
        throw Error(ErrorCode::InvalidArgument, "theorem_rates needs dim >= 1 and j >= 0");
    }
    const double tau = p.tau();
    const double beta = p.beta();
    TheoremRates rates{};
    rates.exp_rate = std::min(1.0 / beta, (beta - tau) / (2.0 * beta * tau));
    if (data_class == DataClass::L1Weighted) {
        rates.poly_exponent = weighted_bound(dim, j).poly_exponent;
        return rates;
    }
    rates.poly_exponent = generic_bound(dim, j).poly_exponent;
    if (auto better = improved_bound(dim, j)) {
        rates.poly_exponent = std::min(rates.poly_exponent, better->poly_exponent);
    }
    return rates;
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::SubCritical: return "SubCritical";
        case Regime::Critical: return "Critical";
        case Regime::SuperCritical: return "SuperCritical";
    }
    return "Unknown";
}

std::string_view to_string(DataClass c) noexcept {
    return c == DataClass::L1 ? "L1" : "L1Weighted";
}

}  // namespace mgt
