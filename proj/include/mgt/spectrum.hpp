#pragma once

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "mgt/params.hpp"

namespace mgt {

using cplx = std::complex<double>;

enum class RootPattern { RealPlusPair, ThreeDistinctReal, RealWithDouble, TripleReal };

enum class Labeling { BranchContinuous, Canonical };

/// The three roots of tau*l^3 + l^2 + beta*k^2*l + k^2 at one frequency |xi| = k.
///
/// Canonical labeling: for RealPlusPair, lambdas[0] is the real root, lambdas[1]
/// the pair member with Im >= 0 and lambdas[2] its exact conjugate. Three real
/// roots are sorted ascending; for RealWithDouble the simple root comes first.
struct SpectrumPoint {
    double k = 0.0;
    std::array<cplx, 3> lambdas{};
    RootPattern pattern = RootPattern::RealWithDouble;
    Labeling labeling = Labeling::Canonical;
};

struct AsymptoticTriple {
    double k = 0.0;
    std::array<cplx, 3> lambdas_approx{};
    int order = 2;
};

/// Two roots closer than kConfluenceTol * max(1, |lambda|) count as one double root.
inline constexpr double kConfluenceTol = 1e-7;
/// Relative band on |k^2 - m| used to classify a frequency as a confluence point.
/// Root spacing grows like sqrt(|k^2 - m|), hence the square of kConfluenceTol.
inline constexpr double kBoundaryK2Tol = kConfluenceTol * kConfluenceTol;

[[nodiscard]] SpectrumPoint eigenvalues(const ModelParams& p, double k);
[[nodiscard]] RootPattern classify(const ModelParams& p, double k);
[[nodiscard]] AsymptoticTriple asymptotic_small_k(const ModelParams& p, double k);
[[nodiscard]] AsymptoticTriple asymptotic_large_k(const ModelParams& p, double k);

/// Branch-continuous eigenvalue tracks over an ascending grid of frequencies.
[[nodiscard]] std::vector<SpectrumPoint> atlas(const ModelParams& p, std::span<const double> k_grid);

/// Characteristic polynomial and the sum of its term magnitudes at (lambda, k).
[[nodiscard]] cplx characteristic(const ModelParams& p, double k, cplx lambda);
[[nodiscard]] double residual_scale(const ModelParams& p, double k, cplx lambda);
[[nodiscard]] double relative_residual(const ModelParams& p, double k, cplx lambda);

[[nodiscard]] std::string_view to_string(RootPattern pattern) noexcept;

}  // namespace mgt
