#include "mgt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <vector>

#include "mgt/error.hpp"

namespace mgt {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Piece {
    double a, b;
    GkRule rule;
    bool capped;
};

// Neumaier summation so the final reduction does not depend on heap order.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + comp; }
};

}  // namespace

GkRule gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        resk += wgk[j] * (fv1[j] + fv2[j]);
        resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * (fv1[j] + fv2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    const double ah = std::abs(half);
    resk *= half;
    resg *= half;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs(resk - resg);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double floor = 0.0;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        floor = 50.0 * eps * resabs;
        err = std::max(err, floor);
    }
    if (!std::isfinite(resk)) throw Error(ErrorCode::QuadratureFailure, "integrand returned a non-finite value");
    return {resk, resg, resabs, err, floor};
}

QuadResult integrate(const std::function<double(double)>& f, std::span<const double> breaks,
                     const QuadOptions& opt) {
    if (breaks.size() < 2) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least two breakpoints");
    if (!(opt.abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
    const double total_width = breaks.back() - breaks.front();
    QuadResult out;
    if (total_width == 0.0) return out;

    // A piece only needs the width cap while it could still matter at the
    // requested tolerance.
    const auto make_piece = [&](double a, double b) {
        Piece s{a, b, gk15(f, a, b), false};
        if (s.rule.abs_integral > 1e-3 * opt.abs_tol * (b - a) / total_width) {
            s.capped = (b - a) > opt.max_width || (opt.too_coarse && opt.too_coarse(a, b));
        }
        return s;
    };
    const auto priority_less = [](const Piece& x, const Piece& y) {
        if (x.capped != y.capped) return y.capped;
        if (x.capped) return (x.b - x.a) < (y.b - y.a);
        return x.rule.error - x.rule.floor < y.rule.error - y.rule.floor;
    };
    std::priority_queue<Piece, std::vector<Piece>, decltype(priority_less)> heap(priority_less);

    // Only the reducible part of each error estimate is driven below abs_tol;
    // bisecting cannot push a piece under its roundoff floor.
    double err_sum = 0.0;
    std::size_t n_capped = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) throw Error(ErrorCode::InvalidArgument, "breakpoints must ascend");
        Piece s = make_piece(breaks[i], breaks[i + 1]);
        out.evaluations += 15;
        err_sum += s.rule.error - s.rule.floor;
        n_capped += s.capped ? 1 : 0;
        heap.push(s);
    }

    while (err_sum > opt.abs_tol || n_capped > 0) {
        if (out.evaluations + 30 > opt.max_evals) {
            char msg[96];
            std::snprintf(msg, sizeof msg, "node budget exhausted (reducible error %.3g, tolerance %.3g)", err_sum,
                          opt.abs_tol);
            throw Error(ErrorCode::QuadratureFailure, msg);
        }
        Piece s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            throw Error(ErrorCode::QuadratureFailure, "subinterval below floating-point resolution");
        }
        err_sum -= s.rule.error - s.rule.floor;
        n_capped -= s.capped ? 1 : 0;
        for (const auto& [lo, hi] : {std::pair{s.a, mid}, std::pair{mid, s.b}}) {
            Piece child = make_piece(lo, hi);
            out.evaluations += 15;
            err_sum += child.rule.error - child.rule.floor;
            n_capped += child.capped ? 1 : 0;
            heap.push(child);
        }
        // Recompute the running error sum now and then so cancellation in the
        // incremental updates cannot stall termination.
        if (heap.size() % 4096 == 0) {
            auto copy = heap;
            err_sum = 0.0;
            while (!copy.empty()) {
                err_sum += copy.top().rule.error - copy.top().rule.floor;
                copy.pop();
            }
        }
    }

    std::vector<Piece> pieces;
    pieces.reserve(heap.size());
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    Accumulator val;
    Accumulator err;
    Accumulator floor;
    for (const Piece& s : pieces) {
        val.add(s.rule.kronrod);
        err.add(s.rule.error);
        floor.add(s.rule.floor);
    }
    out.value = val.value();
    out.abs_error = err.value();
    out.roundoff_limited = out.abs_error > opt.abs_tol && floor.value() > 0.5 * out.abs_error;
    out.intervals = pieces.size();
    return out;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
    const double breaks[2] = {a, b};
    return integrate(f, breaks, opt);
}

}  // namespace mgt
