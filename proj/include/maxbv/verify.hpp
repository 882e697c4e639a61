#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace maxbv {

struct CheckResult {
    int criterion = 0;  // 1..14 for the acceptance criteria, 0 for quick-only checks
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

enum class Preset { quick, full };
Preset parse_preset(const std::string& s);

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    unsigned workers = 1;
    bool corrupt_halfline = false;  // fault injection, see set_halfline_fault
};

inline constexpr int kCriterionCount = 14;
std::string criterion_title(int number);

/// Exact identities plus small Monte Carlo runs; well under a minute.
std::vector<CheckResult> run_quick(const VerifyOptions& opt);
/// One acceptance criterion at full size.
std::vector<CheckResult> run_criterion(int number, const VerifyOptions& opt);
std::vector<CheckResult> run_preset(Preset preset, const VerifyOptions& opt);

bool all_passed(const std::vector<CheckResult>& checks);

/// criterion,check,observed,expected,tolerance,passed,detail
void write_checks_csv(std::ostream& os, const std::vector<CheckResult>& checks);
std::string checks_csv(const std::vector<CheckResult>& checks);

}  // namespace maxbv
