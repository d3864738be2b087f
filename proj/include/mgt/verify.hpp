#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgt/params.hpp"

namespace mgt {

struct VerifyOptions {
    bool quick = false;  // ten times fewer samples
    std::uint64_t seed = 20240611;
};

enum class SuiteStatus { Pass, Fail, Skipped };

struct SuiteResult {
    std::string name;
    SuiteStatus status = SuiteStatus::Pass;
    std::size_t samples = 0;
    double worst = 0.0;  // worst observed value of the suite's test statistic
    double limit = 0.0;  // the statistic must stay at or below this
    std::string note;
};

struct VerifyReport {
    std::vector<SuiteResult> suites;
    [[nodiscard]] bool passed() const;
};

/// Runs the invariant suites for one parameter pair: spectrum residual and
/// bounds sweep, closed form against the numeric propagator, energy identity,
/// Gronwall margin with the pointwise V bound, integral lemmas, theorem
/// exponents and the frequency-region diagnostics.
[[nodiscard]] VerifyReport run_verify(const ModelParams& p, const VerifyOptions& opt);

[[nodiscard]] std::string to_string(SuiteStatus s);

}  // namespace mgt
