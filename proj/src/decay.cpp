#include "mgt/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "mgt/error.hpp"
#include "mgt/mode_solver.hpp"
#include "mgt/quadrature.hpp"
#include "mgt/spectrum.hpp"

namespace mgt {
namespace {

void check_norm_args(int dim, int j, double t, double quad_tol) {
    if (dim < 1 || j < 0) throw Error(ErrorCode::InvalidArgument, "need dim >= 1 and j >= 0");
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::InvalidArgument, "time must be finite and >= 0");
    if (!(quad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
}

// The envelope needs gamma3, gamma4, gamma5; recomputing them per integral
// would dominate short runs, so the last parameter pair is cached.
LyapunovWeights cached_weights(const ModelParams& p) {
    static std::mutex mu;
    static std::optional<std::pair<ModelParams, LyapunovWeights>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (!cache || !(cache->first == p)) cache.emplace(p, default_weights(p));
    return cache->second;
}

struct Envelope {
    const ModelParams& p;
    const DataTriple& data;
    int power;
    double t;
    double state_factor;
    LyapunovWeights w;

    Envelope(const ModelParams& params, const DataTriple& d, int dim, int j, double time, NormKind kind)
        : p(params), data(d), power(2 * j + dim - 1), t(time), w(cached_weights(params)) {
        const double s = p.tau() * (p.beta() - p.tau());
        if (kind == NormKind::Solution) {
            const double f = 1.0 + std::sqrt(p.tau() / (p.beta() - p.tau()));
            state_factor = f * f;
        } else {
            state_factor = 1.0 / std::min(1.0, s);
        }
        kind_ = kind;
    }

    // Upper bound on the integrand at k > 0.
    [[nodiscard]] double operator()(double k) const {
        const double tau = p.tau();
        const double k2 = k * k;
        const double u0 = data[0](k), u1 = data[1](k), u2 = data[2](k);
        const double a = u1 + tau * u2;
        const double b = u0 + tau * u1;
        const double e0 = 0.5 * (a * a + tau * (p.beta() - tau) * k2 * u1 * u1 + k2 * b * b);
        const double decay = std::min(1.0, (w.equiv_hi / w.equiv_lo) * std::exp(-w.gamma5 * rho_of(k) * t));
        const double per_state = kind_ == NormKind::Solution ? 2.0 * e0 * decay / k2 : 2.0 * e0 * decay;
        return std::pow(k, power) * state_factor * per_state;
    }

private:
    NormKind kind_ = NormKind::Solution;
};

double density(const ModelParams& p, const DataTriple& data, int power, double t, double k, NormKind kind) {
    const double u0 = data[0](k), u1 = data[1](k), u2 = data[2](k);
    if (u0 == 0.0 && u1 == 0.0 && u2 == 0.0) return 0.0;
    const ModeState init = make_state(k, u0, u1, u2);
    const ModeJet jet = evaluate_jet(mode_coefficients(p, k, init), t);
    const double weight = std::pow(k, power);
    if (kind == NormKind::Solution) return weight * std::norm(jet[0]);
    return weight * v_vector(p, {jet[0], jet[1], jet[2], k}).norm_sq();
}

std::vector<double> breakpoints(const ModelParams& p, double a, double b, double t) {
    std::vector<double> pts{a, b};
    const RegionSplit split = region_split(p);
    pts.push_back(split.nu1);
    pts.push_back(split.nu2);
    const CardanoThresholds th = cardano_thresholds(p);
    if (th.m1) pts.push_back(std::sqrt(*th.m1));
    if (th.m2) pts.push_back(std::sqrt(*th.m2));
    // Geometric refinement toward the origin resolves the 1/sqrt(t) scale of
    // the heat-like low-frequency part without knowing it in advance.
    for (double x = b; x > std::max(a, 1e-9 * b); x *= 0.5) pts.push_back(x);
    if (t > 0.0) pts.push_back(1.0 / std::sqrt(t));
    std::vector<double> out;
    for (double x : pts) {
        if (x >= a && x <= b) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double oscillation_frequency(const ModelParams& p, double k) {
    double w = 0.0;
    for (cplx l : eigenvalues(p, k).lambdas) w = std::max(w, std::abs(l.imag()));
    return w;
}

// Phase of e^{lambda t} accumulated across [a, b]. Its slope in k tops out at
// sqrt(beta/tau), so a pi/4 limit here is never coarser than the width
// pi / (4 t sqrt(beta/tau)) where that slope is attained.
bool phase_too_coarse(const ModelParams& p, double t, double a, double b) {
    if (t <= 0.0) return false;
    const double wa = oscillation_frequency(p, a);
    const double wm = oscillation_frequency(p, 0.5 * (a + b));
    const double wb = oscillation_frequency(p, b);
    return t * (std::abs(wm - wa) + std::abs(wb - wm)) > 0.25 * std::numbers::pi;
}

}  // namespace

double FrequencyProfile::operator()(double k) const {
    switch (kind) {
        case ProfileKind::Gaussian: {
            const double x = scale * k;
            return amplitude * std::exp(-0.5 * x * x);
        }
        case ProfileKind::MomentFreeGaussian: {
            const double x = scale * k;
            return amplitude * x * std::exp(-0.5 * x * x);
        }
        case ProfileKind::Custom:
            return evaluator ? evaluator(k) : 0.0;
    }
    return 0.0;
}

FrequencyProfile FrequencyProfile::gaussian(double scale, double amplitude) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "profile scale must be positive");
    return {ProfileKind::Gaussian, scale, amplitude, {}};
}

FrequencyProfile FrequencyProfile::moment_free(double scale, double amplitude) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "profile scale must be positive");
    return {ProfileKind::MomentFreeGaussian, scale, amplitude, {}};
}

FrequencyProfile FrequencyProfile::custom(std::function<double(double)> f) {
    return {ProfileKind::Custom, 1.0, 1.0, std::move(f)};
}

FrequencyProfile FrequencyProfile::zero() { return {ProfileKind::Gaussian, 1.0, 0.0, {}}; }

DataClass data_class(const DataTriple& data) {
    return data[1](0.0) == 0.0 && data[2](0.0) == 0.0 ? DataClass::L1Weighted : DataClass::L1;
}

double truncation_radius(const ModelParams& p, const DataTriple& data, int dim, int j, double t, double quad_tol,
                         NormKind kind) {
    check_norm_args(dim, j, t, quad_tol);
    const Envelope env(p, data, dim, j, t, kind);
    const auto h = [&env](double k) { return env(k) * k; };
    double k = std::max(1.0, region_split(p).nu2);
    for (int i = 0; i < 60; ++i, k *= 2.0) {
        const double h0 = h(k), h1 = h(2.0 * k), h2 = h(4.0 * k);
        if (h0 == 0.0 && h1 == 0.0 && h2 == 0.0) return k;
        // Dyadic blocks beyond k then contribute a geometric series bounded by 2 h(2k).
        if (h0 <= 0.05 * quad_tol && h1 <= 0.5 * h0 && h2 <= 0.5 * h1) return k;
    }
    throw Error(ErrorCode::QuadratureFailure, "data tail does not decay; cannot certify truncation");
}

double region_integral(const ModelParams& p, const DataTriple& data, int dim, int j, double t, double a, double b,
                       double quad_tol, NormKind kind) {
    check_norm_args(dim, j, t, quad_tol);
    if (std::all_of(data.begin(), data.end(), [](const FrequencyProfile& f) { return f.is_zero(); })) return 0.0;
    if (std::isinf(b)) b = std::max(a, truncation_radius(p, data, dim, j, t, quad_tol, kind));
    if (!(b > a)) return 0.0;
    const int power = 2 * j + dim - 1;
    const auto f = [&](double k) { return density(p, data, power, t, k, kind); };
    const std::vector<double> br = breakpoints(p, a, b, t);
    QuadOptions opt;
    opt.abs_tol = quad_tol;
    opt.too_coarse = [&p, t](double lo, double hi) { return phase_too_coarse(p, t, lo, hi); };
    return integrate(f, br, opt).value;
}

double norm_sq(const ModelParams& p, const DataTriple& data, int dim, int j, double t, double quad_tol,
               NormKind kind) {
    return region_integral(p, data, dim, j, t, 0.0, std::numeric_limits<double>::infinity(), quad_tol, kind);
}

double sobolev_norm_sq(const ModelParams& p, const DataTriple& data, int dim, int j, double t, double quad_tol) {
    return norm_sq(p, data, dim, j, t, quad_tol, NormKind::Solution);
}

double v_norm_sq(const ModelParams& p, const DataTriple& data, int dim, int j, double t, double quad_tol) {
    return norm_sq(p, data, dim, j, t, quad_tol, NormKind::VVector);
}

double fit_decay_slope(std::span<const double> times, std::span<const double> values, std::size_t begin,
                       std::size_t end) {
    if (times.size() != values.size()) throw Error(ErrorCode::InvalidArgument, "times and values differ in length");
    if (end > times.size() || begin >= end || end - begin < 3) {
        throw Error(ErrorCode::DegenerateFit, "fit window needs at least three points");
    }
    const std::size_t n = end - begin;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw Error(ErrorCode::DegenerateFit, "fit window contains a nonpositive value");
        }
        mx += std::log1p(times[i]);
        my += std::log(values[i]);
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double dx = std::log1p(times[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(values[i]) - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateFit, "fit window has no spread in time");
    return sxy / sxx;
}

DecayCurve decay_curve(const ModelParams& p, const DataTriple& data, int dim, int j, std::span<const double> times,
                       double quad_tol, NormKind kind) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1]))) {
            throw Error(ErrorCode::GridError, "time grid must be finite, nonnegative and strictly ascending");
        }
    }
    DecayCurve c;
    c.times.assign(times.begin(), times.end());
    c.dim = dim;
    c.j = j;
    c.kind = kind;
    c.data_class = data_class(data);
    c.quad_tol = quad_tol;
    for (double t : times) c.values.push_back(std::sqrt(std::max(0.0, norm_sq(p, data, dim, j, t, quad_tol, kind))));
    c.bound_exponent = kind == NormKind::Solution ? theorem_rates(p, dim, j, c.data_class).poly_exponent
                                                  : weighted_bound(dim, j).poly_exponent;
    c.fit_end = c.times.size();
    c.fit_begin = c.times.size() / 2;
    try {
        c.fitted_slope = fit_decay_slope(c.times, c.values, c.fit_begin, c.fit_end);
    } catch (const Error&) {
        c.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    }
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        c.bound_constant_measured =
            std::max(c.bound_constant_measured, c.values[i] / std::pow(1.0 + c.times[i], c.bound_exponent));
    }
    return c;
}

RegionSplit region_split(const ModelParams& p) {
    const CardanoThresholds th = cardano_thresholds(p);
    if (!th.m1 || !th.m2) return {0.5, 2.0};
    return {std::min(0.5, 0.9 * std::sqrt(*th.m1)), std::max(2.0, 1.1 * std::sqrt(*th.m2))};
}

double mid_high_rate(const ModelParams& p, const RegionSplit& split) {
    const double tau = p.tau();
    const double beta = p.beta();
    const double c3 = std::min(1.0 / beta, (beta - tau) / (2.0 * beta * tau));
    const SpectrumPoint sp = eigenvalues(p, split.nu1);
    double slowest = std::numeric_limits<double>::infinity();
    for (cplx l : sp.lambdas) slowest = std::min(slowest, std::abs(l.real()));
    const double c4 = std::min(1.0 / beta, slowest);
    return std::min(c3, c4);
}

RegionContributions region_contributions(const ModelParams& p, const DataTriple& data, int dim, int j, double t,
                                         const RegionSplit& split, double quad_tol, NormKind kind) {
    if (!(split.nu1 > 0.0 && split.nu2 > split.nu1)) {
        throw Error(ErrorCode::InvalidArgument, "region split needs 0 < nu1 < nu2");
    }
    const double tol = quad_tol / 3.0;
    RegionContributions r;
    r.low = region_integral(p, data, dim, j, t, 0.0, split.nu1, tol, kind);
    r.mid = region_integral(p, data, dim, j, t, split.nu1, split.nu2, tol, kind);
    r.high = region_integral(p, data, dim, j, t, split.nu2, std::numeric_limits<double>::infinity(), tol, kind);
    return r;
}

double sine_global_constant(int dim, int j, double c) {
    const double s = 0.5 * (j + dim - 2);
    return 0.5 * std::pow(c, -s) * std::tgamma(s);
}

LemmaReport integral_lemma_check(int dim, int j, double c, std::span<const double> times) {
    if (dim < 1 || j < 0 || !(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "need dim >= 1, j >= 0, c > 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1]))) {
            throw Error(ErrorCode::GridError, "time grid must be finite, nonnegative and strictly ascending");
        }
    }
    LemmaReport rep;
    rep.dim = dim;
    rep.j = j;
    rep.c = c;
    rep.times.assign(times.begin(), times.end());
    const int power = j + dim - 1;
    const double nj = 0.5 * (dim + j);

    for (LemmaKind kind : {LemmaKind::Gaussian, LemmaKind::Cosine, LemmaKind::SineLocal, LemmaKind::SineGlobal}) {
        LemmaRatios lr;
        lr.kind = kind;
        lr.applicable = kind != LemmaKind::SineGlobal || dim + j >= 3;
        if (!lr.applicable) {
            rep.lemmas.push_back(lr);
            continue;
        }
        for (double t : times) {
            const auto kernel = [&](double r) {
                const double base = std::pow(r, power) * std::exp(-c * r * r * t);
                switch (kind) {
                    case LemmaKind::Gaussian: return base;
                    case LemmaKind::Cosine: {
                        const double cs = std::cos(t * r);
                        return base * cs * cs;
                    }
                    case LemmaKind::SineLocal:
                    case LemmaKind::SineGlobal: {
                        const double sinc = r == 0.0 ? t : std::sin(t * r) / r;
                        return base * sinc * sinc;
                    }
                }
                return 0.0;
            };
            double shape = 0.0;
            switch (kind) {
                case LemmaKind::Gaussian:
                case LemmaKind::Cosine: shape = std::pow(1.0 + t, -nj); break;
                case LemmaKind::SineLocal: shape = std::pow(1.0 + t, 2.0 - nj); break;
                case LemmaKind::SineGlobal: shape = t > 0.0 ? std::pow(t, -(nj - 1.0)) : 0.0; break;
            }
            double value = 0.0;
            if (kind == LemmaKind::SineGlobal && t == 0.0) {
                value = 0.0;  // sin(0) vanishes identically
            } else {
                double upper = 1.0;
                if (kind == LemmaKind::SineGlobal) upper = std::sqrt((80.0 + 2.0 * power) / (c * t));
                std::vector<double> br{0.0};
                for (double x = upper / 1024.0; x < upper; x *= 2.0) br.push_back(x);
                br.push_back(upper);
                QuadOptions opt;
                opt.abs_tol = 1e-11 * shape;
                opt.max_width = t > 0.0 ? std::numbers::pi / (4.0 * t) : opt.max_width;
                opt.max_evals = 4'000'000;
                value = integrate(kernel, br, opt).value;
            }
            lr.integrals.push_back(value);
            lr.ratios.push_back(shape > 0.0 ? value / shape : 0.0);
        }
        lr.max_ratio = lr.ratios.empty() ? 0.0 : *std::max_element(lr.ratios.begin(), lr.ratios.end());
        lr.last_ratio = lr.ratios.empty() ? 0.0 : lr.ratios.back();
        if (times.size() >= 2 && times.back() > 0.0) {
            std::vector<double> ts, rs;
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (times[i] >= 0.1 * times.back() && lr.ratios[i] > 0.0) {
                    ts.push_back(times[i]);
                    rs.push_back(lr.ratios[i]);
                }
            }
            if (ts.size() >= 2) {
                double mx = 0.0, my = 0.0;
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    mx += std::log(ts[i]);
                    my += std::log(rs[i]);
                }
                mx /= double(ts.size());
                my /= double(ts.size());
                double sxx = 0.0, sxy = 0.0;
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    sxx += (std::log(ts[i]) - mx) * (std::log(ts[i]) - mx);
                    sxy += (std::log(ts[i]) - mx) * (std::log(rs[i]) - my);
                }
                lr.tail_slope = sxx > 0.0 ? sxy / sxx : 0.0;
            }
        }
        if (!std::isfinite(lr.max_ratio) || lr.tail_slope > 0.05) {
            throw Error(ErrorCode::ToleranceFailure,
                        to_string(kind) + " ratio keeps growing (tail slope " + std::to_string(lr.tail_slope) + ")");
        }
        rep.lemmas.push_back(lr);
    }
    return rep;
}

std::string to_string(LemmaKind kind) {
    switch (kind) {
        case LemmaKind::Gaussian: return "gaussian";
        case LemmaKind::Cosine: return "cosine";
        case LemmaKind::SineLocal: return "sine_local";
        case LemmaKind::SineGlobal: return "sine_global";
    }
    return "unknown";
}

std::string to_string(NormKind kind) { return kind == NormKind::Solution ? "solution" : "v_vector"; }

}  // namespace mgt
