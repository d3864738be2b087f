#include "mgt/io.hpp"

#include <cmath>
#include <cstdio>

namespace mgt {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string header_line(std::string_view record) {
    return "# mgt " + std::string(kVersion) + " " + std::string(record);
}

std::string param_record(const ModelParams& p, double c) {
    return "tau=" + num(p.tau()) + " beta=" + num(p.beta()) + " c=" + num(c);
}

void write_atlas_csv(std::ostream& os, std::string_view record, std::span<const SpectrumPoint> rows) {
    os << header_line(record) << '\n';
    os << "k,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,pattern\n";
    for (const SpectrumPoint& sp : rows) {
        os << num(sp.k);
        for (cplx l : sp.lambdas) os << ',' << num(l.real()) << ',' << num(l.imag());
        os << ',' << to_string(sp.pattern) << '\n';
    }
}

void write_mode_csv(std::ostream& os, std::string_view record, std::span<const ModeRow> rows) {
    os << header_line(record) << '\n';
    os << "t,re_u,im_u,v_norm_sq,energy,lyapunov\n";
    for (const ModeRow& r : rows) {
        os << num(r.t) << ',' << num(r.u.real()) << ',' << num(r.u.imag()) << ',' << num(r.v_norm_sq) << ','
           << num(r.energy) << ',' << num(r.lyap) << '\n';
    }
}

void write_decay_csv(std::ostream& os, std::string_view record, const DecayCurve& curve) {
    os << header_line(record) << '\n';
    os << "t,norm,bound_value\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const double t = curve.times[i];
        os << num(t) << ',' << num(curve.values[i]) << ','
           << num(curve.bound_constant_measured * std::pow(1.0 + t, curve.bound_exponent)) << '\n';
    }
}

nlohmann::ordered_json decay_json(const ModelParams& p, double c, const DecayCurve& curve, std::string_view data_desc,
                                  std::string_view verdict) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["params"] = {{"tau", p.tau()}, {"beta", p.beta()}, {"c", c}};
    j["dim"] = curve.dim;
    j["j"] = curve.j;
    j["norm"] = to_string(curve.kind);
    j["data"] = data_desc;
    j["data_class"] = to_string(curve.data_class);
    j["quad_tol"] = curve.quad_tol;
    j["fit_window"] = {curve.times.empty() ? 0.0 : curve.times[curve.fit_begin],
                       curve.times.empty() ? 0.0 : curve.times[curve.fit_end - 1]};
    if (std::isfinite(curve.fitted_slope)) {
        j["fitted_slope"] = curve.fitted_slope;
    } else {
        j["fitted_slope"] = nullptr;
    }
    j["bound_exponent"] = curve.bound_exponent;
    j["bound_constant_measured"] = curve.bound_constant_measured;
    j["verdict"] = verdict;
    return j;
}

}  // namespace mgt
