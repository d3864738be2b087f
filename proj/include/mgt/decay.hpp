#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgt/lyapunov.hpp"
#include "mgt/params.hpp"

namespace mgt {

enum class ProfileKind { Gaussian, MomentFreeGaussian, Custom };

/// Radial initial datum in frequency space, k = |xi| >= 0.
struct FrequencyProfile {
    ProfileKind kind = ProfileKind::Gaussian;
    double scale = 1.0;
    double amplitude = 0.0;
    std::function<double(double)> evaluator;  // used only for Custom

    [[nodiscard]] double operator()(double k) const;
    [[nodiscard]] bool is_zero() const { return kind != ProfileKind::Custom && amplitude == 0.0; }

    static FrequencyProfile gaussian(double scale, double amplitude);
    static FrequencyProfile moment_free(double scale, double amplitude);
    static FrequencyProfile custom(std::function<double(double)> f);
    static FrequencyProfile zero();
};

/// Profiles of (u0, u1, u2).
using DataTriple = std::array<FrequencyProfile, 3>;

/// L1Weighted when the u1 and u2 profiles vanish at k = 0.
[[nodiscard]] DataClass data_class(const DataTriple& data);

/// Solution: J_j(t) = int_0^inf k^{2j+dim-1} |u(k,t)|^2 dk.
/// VVector:  the same weight against |V(k,t)|^2.
/// Both equal the squared L2 norm of the j-th spatial derivative up to the
/// surface area of the unit sphere and the (2 pi)^dim Plancherel factor.
enum class NormKind { Solution, VVector };

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> values;
    int dim = 1;
    int j = 0;
    NormKind kind = NormKind::Solution;
    DataClass data_class = DataClass::L1;
    double quad_tol = 0.0;
    std::size_t fit_begin = 0;
    std::size_t fit_end = 0;
    double fitted_slope = 0.0;
    double bound_exponent = 0.0;
    double bound_constant_measured = 0.0;
};

struct RegionSplit {
    double nu1 = 0.5;
    double nu2 = 2.0;
};

struct RegionContributions {
    double low = 0.0;
    double mid = 0.0;
    double high = 0.0;
    [[nodiscard]] double total() const { return low + mid + high; }
};

[[nodiscard]] double sobolev_norm_sq(const ModelParams& p, const DataTriple& data, int dim, int j, double t,
                                     double quad_tol);
[[nodiscard]] double v_norm_sq(const ModelParams& p, const DataTriple& data, int dim, int j, double t,
                               double quad_tol);
[[nodiscard]] double norm_sq(const ModelParams& p, const DataTriple& data, int dim, int j, double t, double quad_tol,
                             NormKind kind);

/// Integral of the weighted spectral density over [a, b], b may be +inf (the
/// tail beyond the certified truncation radius is then dropped).
[[nodiscard]] double region_integral(const ModelParams& p, const DataTriple& data, int dim, int j, double t,
                                     double a, double b, double quad_tol, NormKind kind = NormKind::Solution);

/// Radius beyond which the integrand is bounded by an explicit energy
/// envelope whose integral stays below a tenth of quad_tol.
[[nodiscard]] double truncation_radius(const ModelParams& p, const DataTriple& data, int dim, int j, double t,
                                       double quad_tol, NormKind kind = NormKind::Solution);

/// Square roots of norm_sq on the time grid, OLS slope of the trailing half
/// against log(1+t), and the best theorem exponent for the data class.
[[nodiscard]] DecayCurve decay_curve(const ModelParams& p, const DataTriple& data, int dim, int j,
                                     std::span<const double> times, double quad_tol,
                                     NormKind kind = NormKind::Solution);

/// Least-squares slope of log(value) against log(1 + t) over [begin, end).
[[nodiscard]] double fit_decay_slope(std::span<const double> times, std::span<const double> values,
                                     std::size_t begin, std::size_t end);

[[nodiscard]] RegionSplit region_split(const ModelParams& p);

/// min(c3, c4) with c3 = min(1/beta, (beta - tau)/(2 beta tau)) and
/// c4 = min(1/beta, |Re lambda2(nu1)|).
[[nodiscard]] double mid_high_rate(const ModelParams& p, const RegionSplit& split);

[[nodiscard]] RegionContributions region_contributions(const ModelParams& p, const DataTriple& data, int dim, int j,
                                                       double t, const RegionSplit& split, double quad_tol,
                                                       NormKind kind = NormKind::Solution);

enum class LemmaKind { Gaussian, Cosine, SineLocal, SineGlobal };

struct LemmaRatios {
    LemmaKind kind = LemmaKind::Gaussian;
    bool applicable = true;
    std::vector<double> integrals;
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double last_ratio = 0.0;
    /// d log(ratio) / d log(t) over the last decade of the grid.
    double tail_slope = 0.0;
};

struct LemmaReport {
    int dim = 1;
    int j = 0;
    double c = 1.0;
    std::vector<double> times;
    std::vector<LemmaRatios> lemmas;
};

/// Evaluates, for each time, the four radial integrals
///   Gaussian    int_0^1 r^{j+dim-1} e^{-c r^2 t} dr                   vs (1+t)^{-(dim+j)/2}
///   Cosine      ... times cos^2(t r)                                   vs (1+t)^{-(dim+j)/2}
///   SineLocal   ... times (sin(t r)/r)^2                               vs (1+t)^{2-(dim+j)/2}
///   SineGlobal  int_0^inf r^{j+dim-1} e^{-c r^2 t} (sin(t r)/r)^2 dr   vs t^{-(dim+j-2)/2}, dim+j >= 3
/// and the ratio integral / bound shape. Throws ToleranceFailure when a ratio
/// still grows over the last decade of the grid.
[[nodiscard]] LemmaReport integral_lemma_check(int dim, int j, double c, std::span<const double> times);

/// Constant of the SineGlobal bound from the Gamma-function estimate.
[[nodiscard]] double sine_global_constant(int dim, int j, double c);

[[nodiscard]] std::string to_string(LemmaKind kind);
[[nodiscard]] std::string to_string(NormKind kind);

}  // namespace mgt
