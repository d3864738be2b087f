#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mgt/decay.hpp"
#include "mgt/spectrum.hpp"

namespace mgt {

inline constexpr std::string_view kVersion = "0.1.0";

/// 17 significant digits, enough to round-trip any double.
[[nodiscard]] std::string num(double x);

/// "# mgt 0.1.0 key=value ..." comment line opening every CSV.
[[nodiscard]] std::string header_line(std::string_view record);

/// "tau=... beta=... c=..." as used in headers and JSON summaries.
[[nodiscard]] std::string param_record(const ModelParams& p, double c = 1.0);

void write_atlas_csv(std::ostream& os, std::string_view record, std::span<const SpectrumPoint> rows);

struct ModeRow {
    double t = 0.0;
    cplx u{};
    double v_norm_sq = 0.0;
    double energy = 0.0;
    double lyap = 0.0;
};
void write_mode_csv(std::ostream& os, std::string_view record, std::span<const ModeRow> rows);

/// Columns t, norm, bound_value with bound_value = C (1 + t)^exponent.
void write_decay_csv(std::ostream& os, std::string_view record, const DecayCurve& curve);

[[nodiscard]] nlohmann::ordered_json decay_json(const ModelParams& p, double c, const DecayCurve& curve,
                                                std::string_view data_desc, std::string_view verdict);

}  // namespace mgt
