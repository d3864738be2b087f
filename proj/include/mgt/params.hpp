#pragma once

#include <optional>
#include <string_view>

namespace mgt {

/// Physical parameters of tau*u_ttt + u_tt - Lap(u) - beta*Lap(u_t) = 0 with the
/// sound speed normalized to one. Construct through ModelParams::validate.
class ModelParams {
public:
    /// Throws NonFinite for NaN/inf input and NonDissipative unless 0 < tau < beta.
    static ModelParams validate(double tau, double beta);

    /// Folds a sound speed c into the normalized form. Rescaling x -> x/c leaves
    /// tau and beta unchanged; physical frequencies map to k_norm = c * k.
    static ModelParams from_physical(double tau, double beta, double c);

    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double ratio() const noexcept { return tau_ / beta_; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    ModelParams(double tau, double beta) : tau_(tau), beta_(beta) {}
    double tau_;
    double beta_;
};

/// Coefficients of the discriminant of the characteristic cubic and its zeros
/// in the squared frequency. m1/m2 are absent when the zeros are nonreal.
struct CardanoThresholds {
    double c1;
    double c2;
    std::optional<double> m1;
    std::optional<double> m2;
};

enum class Regime { SubCritical, Critical, SuperCritical };

enum class DataClass { L1, L1Weighted };

struct TheoremRates {
    double poly_exponent;
    double exp_rate;
};

/// Relative band around tau/beta = 1/9 classified as Critical.
inline constexpr double kCriticalRatioTol = 1e-12;

[[nodiscard]] CardanoThresholds cardano_thresholds(const ModelParams& p);
[[nodiscard]] Regime regime(const ModelParams& p);

/// Best (smallest) polynomial exponent the decay theorems give for
/// ||d^j u(t)|| in dimension dim, plus the high-frequency exponential rate.
[[nodiscard]] TheoremRates theorem_rates(const ModelParams& p, int dim, int j, DataClass data_class);

/// All polynomial exponents that apply, labelled, for reporting.
struct ApplicableBound {
    std::string_view name;
    double poly_exponent;
};
[[nodiscard]] std::optional<ApplicableBound> improved_bound(int dim, int j);
[[nodiscard]] ApplicableBound generic_bound(int dim, int j);
[[nodiscard]] ApplicableBound weighted_bound(int dim, int j);

[[nodiscard]] std::string_view to_string(Regime r) noexcept;
[[nodiscard]] std::string_view to_string(DataClass c) noexcept;

}  // namespace mgt
