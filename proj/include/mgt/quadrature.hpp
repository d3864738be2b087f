#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

namespace mgt {

struct QuadOptions {
    double abs_tol = 1e-10;
    /// Subintervals wider than this are split while they still carry a
    /// non-negligible share of the integral (guards against aliasing of
    /// oscillatory integrands).
    double max_width = std::numeric_limits<double>::infinity();
    /// Same role as max_width for a caller-defined resolution test on [a, b].
    std::function<bool(double, double)> too_coarse;
    std::size_t max_evals = 1'000'000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
    /// True when abs_error is dominated by the floating-point floor
    /// 50 eps |f| rather than by the Gauss-Kronrod discrepancy.
    bool roundoff_limited = false;
};

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature on [breaks.front(), breaks.back()].
/// The breakpoints seed the initial partition. Refinement stops once the part
/// of the error estimate above the roundoff floor is within abs_tol; throws
/// QuadratureFailure when that cannot be reached within max_evals evaluations.
[[nodiscard]] QuadResult integrate(const std::function<double(double)>& f, std::span<const double> breaks,
                                   const QuadOptions& opt);

[[nodiscard]] QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                                   const QuadOptions& opt);

/// One 15-point Kronrod rule and its embedded 7-point Gauss rule on [a, b].
struct GkRule {
    double kronrod;
    double gauss;
    double abs_integral;
    double error;
    double floor;  // roundoff part of error, 50 eps * abs_integral
};
[[nodiscard]] GkRule gk15(const std::function<double(double)>& f, double a, double b);

}  // namespace mgt
