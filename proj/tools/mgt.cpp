#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mgt/decay.hpp"
#include "mgt/error.hpp"
#include "mgt/io.hpp"
#include "mgt/lyapunov.hpp"
#include "mgt/mode_solver.hpp"
#include "mgt/params.hpp"
#include "mgt/spectrum.hpp"
#include "mgt/verify.hpp"

namespace {

using namespace mgt;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridOpts {
    std::optional<double> lo, hi;
    std::optional<int> count;
    std::optional<bool> log;

    std::vector<double> build(double def_lo, double def_hi, int def_count, bool def_log) const {
        const double a = lo.value_or(def_lo);
        const double b = hi.value_or(def_hi);
        const int n = count.value_or(def_count);
        const bool lg = log.value_or(def_log);
        if (n < 1) throw Error(ErrorCode::GridError, "grid needs at least one point");
        if (!(b >= a) || (n > 1 && !(b > a))) throw Error(ErrorCode::GridError, "grid needs min < max");
        if (lg && !(a > 0.0)) throw Error(ErrorCode::GridError, "logarithmic grid needs min > 0");
        std::vector<double> g;
        for (int i = 0; i < n; ++i) {
            const double s = n == 1 ? 0.0 : double(i) / (n - 1);
            g.push_back(lg ? a * std::pow(b / a, s) : a + (b - a) * s);
        }
        g.back() = n == 1 ? a : b;
        return g;
    }
};

struct Config {
    double tau = 0.1;
    double beta = 1.0;
    double c = 1.0;
    int dim = 3;
    int j = 0;
    double k = 1.0;
    GridOpts kgrid, tgrid;
    std::string data;
    std::string init;
    double quad_tol = 1e-10;
    std::string out;
    std::string format = "csv";
    bool quick = false;
    bool all_bounds = false;
    std::uint64_t seed = 20240611;
};

// "u0:gaussian:1:1,u2:momentfree:0.5:2"; components not mentioned are zero.
DataTriple parse_data(const std::string& text, double c) {
    DataTriple d{FrequencyProfile::zero(), FrequencyProfile::zero(), FrequencyProfile::zero()};
    if (text.empty()) return d;
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        std::vector<std::string> f;
        std::stringstream parts(item);
        std::string part;
        while (std::getline(parts, part, ':')) f.push_back(part);
        if (f.size() < 2 || f[0].size() != 2 || f[0][0] != 'u' || f[0][1] < '0' || f[0][1] > '2') {
            throw Error(ErrorCode::InvalidArgument, "bad data item '" + item + "'");
        }
        const int slot = f[0][1] - '0';
        if (f[1] == "zero") {
            if (f.size() != 2) throw Error(ErrorCode::InvalidArgument, "zero profile takes no arguments");
            d[slot] = FrequencyProfile::zero();
            continue;
        }
        if (f.size() != 4) throw Error(ErrorCode::InvalidArgument, "expected uN:TYPE:SCALE:AMP in '" + item + "'");
        double scale = 0.0, amp = 0.0;
        try {
            scale = std::stod(f[2]);
            amp = std::stod(f[3]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "non-numeric scale or amplitude in '" + item + "'");
        }
        // Profiles are given in physical frequency; the solver works in c * k.
        if (f[1] == "gaussian") {
            d[slot] = FrequencyProfile::gaussian(scale / c, amp);
        } else if (f[1] == "momentfree") {
            d[slot] = FrequencyProfile::moment_free(scale / c, amp);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown profile type '" + f[1] + "'");
        }
    }
    return d;
}

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    void close() {
        if (path_.empty()) {
            std::cout.flush();
            return;
        }
        file_.close();
        if (!file_) throw IoError("failed writing '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream file_;
};

void write_text_file(const std::string& path, const std::string& text) {
    Output o(path);
    o.stream() << text;
    o.close();
}

std::string record(const Config& cfg, const ModelParams& p, const std::string& cmd) {
    std::string r = param_record(p, cfg.c) + " command=" + cmd;
    if (cmd == "decay") {
        r += " dim=" + std::to_string(cfg.dim) + " j=" + std::to_string(cfg.j) + " data=" +
             (cfg.data.empty() ? std::string("u2:gaussian:1:1") : cfg.data) + " quad_tol=" + num(cfg.quad_tol);
    }
    if (cmd == "mode") {
        r += " k=" + num(cfg.k);
        r += cfg.init.empty() ? " data=" + (cfg.data.empty() ? std::string("zero") : cfg.data) : " init=" + cfg.init;
    }
    return r;
}

int cmd_classify(const Config& cfg) {
    const ModelParams p = ModelParams::from_physical(cfg.tau, cfg.beta, cfg.c);
    const CardanoThresholds th = cardano_thresholds(p);
    const Regime reg = regime(p);
    nlohmann::ordered_json j;
    std::ostringstream os;
    // Human-readable report: 15 digits, so 3.125 prints as 3.125.
    const auto g = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.15g", x);
        return std::string(buf);
    };
    os << "tau=" << g(p.tau()) << "\nbeta=" << g(p.beta()) << "\ntau/beta=" << g(p.ratio()) << '\n';
    os << "regime=" << to_string(reg) << '\n';
    if (reg == Regime::SuperCritical) os << "pattern: SuperCritical; conjugate pair for all |ξ|>0\n";
    if (reg == Regime::Critical) os << "pattern: Critical; triple root -3/beta at |ξ|^2 = m1 = m2\n";
    if (reg == Regime::SubCritical) os << "pattern: SubCritical; three real roots for m1 < |ξ|^2 < m2\n";
    os << "C1=" << g(th.c1) << "\nC2=" << g(th.c2) << '\n';
    const auto opt = [&](const char* name, const std::optional<double>& m) {
        if (m) {
            os << name << '=' << g(*m) << "\nsqrt_" << name << '=' << g(std::sqrt(*m)) << '\n';
        } else {
            os << name << "=absent\n";
        }
    };
    opt("m1", th.m1);
    opt("m2", th.m2);
    const TheoremRates l1 = theorem_rates(p, cfg.dim, cfg.j, DataClass::L1);
    const TheoremRates l11 = theorem_rates(p, cfg.dim, cfg.j, DataClass::L1Weighted);
    os << "dim=" << cfg.dim << "\nj=" << cfg.j << '\n';
    os << "poly_exponent_L1=" << g(l1.poly_exponent) << "\npoly_exponent_L1Weighted=" << g(l11.poly_exponent)
       << "\nexp_rate=" << g(l1.exp_rate) << '\n';
    if (cfg.all_bounds) {
        const auto line = [&](const ApplicableBound& b) { os << "bound[" << b.name << "]=" << g(b.poly_exponent) << '\n'; };
        line(generic_bound(cfg.dim, cfg.j));
        if (auto b = improved_bound(cfg.dim, cfg.j)) line(*b);
        line(weighted_bound(cfg.dim, cfg.j));
    }
    Output out(cfg.out);
    if (cfg.format == "json") {
        j["version"] = kVersion;
        j["params"] = {{"tau", p.tau()}, {"beta", p.beta()}, {"c", cfg.c}};
        j["regime"] = to_string(reg);
        j["c1"] = th.c1;
        j["c2"] = th.c2;
        j["m1"] = th.m1 ? nlohmann::ordered_json(*th.m1) : nlohmann::ordered_json(nullptr);
        j["m2"] = th.m2 ? nlohmann::ordered_json(*th.m2) : nlohmann::ordered_json(nullptr);
        j["dim"] = cfg.dim;
        j["j"] = cfg.j;
        j["poly_exponent_L1"] = l1.poly_exponent;
        j["poly_exponent_L1Weighted"] = l11.poly_exponent;
        j["exp_rate"] = l1.exp_rate;
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << os.str();
    }
    out.close();
    return kExitOk;
}

int cmd_atlas(const Config& cfg) {
    const ModelParams p = ModelParams::from_physical(cfg.tau, cfg.beta, cfg.c);
    const std::vector<double> ks = cfg.kgrid.build(0.0, 5.0, 101, false);
    std::vector<double> scaled;
    for (double k : ks) scaled.push_back(cfg.c * k);
    std::vector<SpectrumPoint> rows = atlas(p, scaled);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].k = ks[i];
    Output out(cfg.out);
    write_atlas_csv(out.stream(), record(cfg, p, "atlas"), rows);
    out.close();
    return kExitOk;
}

int cmd_mode(const Config& cfg) {
    const ModelParams p = ModelParams::from_physical(cfg.tau, cfg.beta, cfg.c);
    if (!std::isfinite(cfg.k) || cfg.k < 0.0) throw Error(ErrorCode::InvalidFrequency, "--k must be >= 0");
    const double kn = cfg.c * cfg.k;
    ModeState init = make_state(kn, 0.0, 0.0, 0.0);
    if (!cfg.init.empty()) {
        std::stringstream ss(cfg.init);
        std::string item;
        std::vector<double> v;
        while (std::getline(ss, item, ',')) {
            try {
                v.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "--init expects three comma-separated numbers");
            }
        }
        if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "--init expects three comma-separated numbers");
        init = make_state(kn, v[0], v[1], v[2]);
    } else {
        const DataTriple d = parse_data(cfg.data, cfg.c);
        init = make_state(kn, d[0](kn), d[1](kn), d[2](kn));
    }
    const LyapunovWeights w = default_weights(p);
    const ModeCoefficients coeffs = mode_coefficients(p, kn, init);
    std::vector<ModeRow> rows;
    for (double t : cfg.tgrid.build(0.0, 20.0, 41, false)) {
        if (t < 0.0) throw Error(ErrorCode::GridError, "mode times must be >= 0");
        const ModeJet jet = evaluate_jet(coeffs, t);
        const ModeState s = t == 0.0 ? init : ModeState{jet[0], jet[1], jet[2], kn};
        const FunctionalValues fv = functionals(p, s, w);
        rows.push_back({t, s.u_hat, v_vector(p, s).norm_sq(), fv.energy, fv.lyap});
    }
    Output out(cfg.out);
    write_mode_csv(out.stream(), record(cfg, p, "mode") + " gamma5=" + num(w.gamma5), rows);
    out.close();
    return kExitOk;
}

int cmd_decay(const Config& cfg) {
    const ModelParams p = ModelParams::from_physical(cfg.tau, cfg.beta, cfg.c);
    if (!(cfg.quad_tol > 0.0 && cfg.quad_tol < 1.0)) throw Error(ErrorCode::InvalidArgument, "--quad-tol must be in (0,1)");
    const std::string data_desc = cfg.data.empty() ? "u2:gaussian:1:1" : cfg.data;
    const DataTriple data = parse_data(data_desc, cfg.c);
    const std::vector<double> ts = cfg.tgrid.build(1e2, 1e4, 25, true);
    // J in physical frequency equals c^{-(2j+dim)} times J in the normalized one.
    const double unit = std::pow(cfg.c, -0.5 * (2 * cfg.j + cfg.dim));
    DecayCurve curve = decay_curve(p, data, cfg.dim, cfg.j, ts, cfg.quad_tol * unit * unit);
    for (double& v : curve.values) v *= unit;
    curve.bound_constant_measured *= unit;
    const bool within = std::isfinite(curve.fitted_slope) && curve.fitted_slope <= curve.bound_exponent + 0.03;
    const char* verdict = within ? "WITHIN_BOUND" : "VIOLATION";
    const nlohmann::ordered_json summary =
        decay_json(p, cfg.c, curve, data_desc, verdict);
    if (cfg.format == "json") {
        nlohmann::ordered_json full = summary;
        full["times"] = curve.times;
        full["values"] = curve.values;
        Output out(cfg.out);
        out.stream() << full.dump(2) << '\n';
        out.close();
    } else {
        Output out(cfg.out);
        write_decay_csv(out.stream(), record(cfg, p, "decay"), curve);
        out.close();
        if (cfg.out.empty()) {
            std::cerr << summary.dump(2) << '\n';
        } else {
            write_text_file(cfg.out + ".summary.json", summary.dump(2) + "\n");
        }
    }
    return kExitOk;
}

int cmd_verify(const Config& cfg) {
    const ModelParams p = ModelParams::from_physical(cfg.tau, cfg.beta, cfg.c);
    VerifyOptions opt;
    opt.quick = cfg.quick;
    opt.seed = cfg.seed;
    const VerifyReport rep = run_verify(p, opt);
    Output out(cfg.out);
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        j["version"] = kVersion;
        j["params"] = {{"tau", p.tau()}, {"beta", p.beta()}, {"c", cfg.c}};
        j["quick"] = cfg.quick;
        for (const SuiteResult& s : rep.suites) {
            j["suites"].push_back({{"name", s.name}, {"status", to_string(s.status)}, {"samples", s.samples},
                                   {"worst", s.worst}, {"limit", s.limit}, {"note", s.note}});
        }
        j["passed"] = rep.passed();
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << header_line(record(cfg, p, "verify") + (cfg.quick ? " quick" : "")) << '\n';
        for (const SuiteResult& s : rep.suites) {
            out.stream() << to_string(s.status) << ' ' << s.name << " samples=" << s.samples << " worst=" << num(s.worst)
                         << " limit=" << num(s.limit) << " | " << s.note << '\n';
        }
        out.stream() << (rep.passed() ? "ALL SUITES PASSED" : "VERIFICATION FAILED") << '\n';
    }
    out.close();
    if (!rep.passed()) {
        for (const SuiteResult& s : rep.suites) {
            if (s.status == SuiteStatus::Fail) std::cerr << "failing suite: " << s.name << '\n';
        }
        return kExitVerify;
    }
    return kExitOk;
}

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonDissipative:
        case ErrorCode::NonFinite:
        case ErrorCode::InvalidFrequency:
        case ErrorCode::GridError:
        case ErrorCode::EmptyInput:
        case ErrorCode::InvalidArgument:
            return kExitInput;
        default:
            return kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral, Lyapunov and decay-rate tools for tau u_ttt + u_tt - Lap u - beta Lap u_t = 0"};
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "Flat key=value file (keys are long option names); command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.footer(
        "Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 I/O, 4 numerical failure.\n"
        "CSV files start with a '# mgt VERSION key=value ...' line; numbers carry 17 significant digits.\n"
        "atlas columns: k,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,pattern\n"
        "mode columns:  t,re_u,im_u,v_norm_sq,energy,lyapunov  (|V|^2, energy E, Lyapunov L at each t)\n"
        "decay columns: t,norm,bound_value with bound_value = C (1+t)^exponent\n"
        "--data syntax: u0:TYPE:SCALE:AMP,u1:...,u2:... with TYPE gaussian|momentfree|zero");

    Config cfg;
    double k_min = 0, k_max = 0, t_min = 0, t_max = 0;
    int k_count = 0, t_count = 0;
    bool k_log = false, t_log = false;
    app.add_option("--tau", cfg.tau, "Relaxation time tau")->capture_default_str();
    app.add_option("--beta", cfg.beta, "Damping coefficient beta")->capture_default_str();
    app.add_option("--c", cfg.c, "Sound speed (folded into the frequency scale)")->capture_default_str();
    app.add_option("--dim", cfg.dim, "Space dimension N")->capture_default_str();
    app.add_option("--j", cfg.j, "Derivative order j")->capture_default_str();
    app.add_option("--k", cfg.k, "Frequency |xi| for mode")->capture_default_str();
    auto* okmin = app.add_option("--k-min", k_min, "Frequency grid start");
    auto* okmax = app.add_option("--k-max", k_max, "Frequency grid end");
    auto* okcount = app.add_option("--k-count", k_count, "Frequency grid size");
    auto* oklog = app.add_flag("--k-log", k_log, "Logarithmic frequency grid (--k-log=false for linear)");
    auto* otmin = app.add_option("--t-min", t_min, "Time grid start");
    auto* otmax = app.add_option("--t-max", t_max, "Time grid end");
    auto* otcount = app.add_option("--t-count", t_count, "Time grid size");
    auto* otlog = app.add_flag("--t-log", t_log, "Logarithmic time grid (decay default; --t-log=false for linear)");
    app.add_option("--data", cfg.data, "Initial data profiles u0:TYPE:SCALE:AMP,...");
    app.add_option("--init", cfg.init, "mode only: real initial values u0,u1,u2 (overrides --data)");
    app.add_option("--quad-tol", cfg.quad_tol, "Absolute quadrature tolerance")->capture_default_str();
    app.add_option("--out", cfg.out, "Output path (default stdout)");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_flag("--quick", cfg.quick, "verify: ten times fewer samples");
    app.add_flag("--all-bounds", cfg.all_bounds, "classify: list every applicable decay exponent");
    app.add_option("--seed", cfg.seed, "verify: random seed")->capture_default_str();

    auto* sc_classify = app.add_subcommand("classify", "Regime, Cardano thresholds and theorem exponents");
    auto* sc_atlas = app.add_subcommand("atlas", "Branch-continuous eigenvalue table on a frequency grid");
    auto* sc_mode = app.add_subcommand("mode", "Single-mode trajectory with |V|^2, energy and Lyapunov functional");
    auto* sc_decay = app.add_subcommand("decay", "Sobolev-norm decay curve with fitted slope and bound verdict");
    auto* sc_verify = app.add_subcommand("verify", "Run the invariant suites");
    for (auto* sc : {sc_classify, sc_atlas, sc_mode, sc_decay, sc_verify}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }
    if (okmin->count()) cfg.kgrid.lo = k_min;
    if (okmax->count()) cfg.kgrid.hi = k_max;
    if (okcount->count()) cfg.kgrid.count = k_count;
    if (otmin->count()) cfg.tgrid.lo = t_min;
    if (otmax->count()) cfg.tgrid.hi = t_max;
    if (otcount->count()) cfg.tgrid.count = t_count;
    if (oklog->count()) cfg.kgrid.log = k_log;
    if (otlog->count()) cfg.tgrid.log = t_log;

    try {
        if (!std::isfinite(cfg.c) || !(cfg.c > 0.0)) throw Error(ErrorCode::InvalidArgument, "--c must be positive");
        if (sc_classify->parsed()) return cmd_classify(cfg);
        if (sc_atlas->parsed()) return cmd_atlas(cfg);
        if (sc_mode->parsed()) return cmd_mode(cfg);
        if (sc_decay->parsed()) return cmd_decay(cfg);
        if (sc_verify->parsed()) return cmd_verify(cfg);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    return kExitInput;
}
