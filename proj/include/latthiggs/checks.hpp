#pragma once

// The acceptance criteria as runnable checks, shared by the acceptance
// binary and `latthiggs run checks`.

#include <span>
#include <string>
#include <vector>

namespace latthiggs {

struct CheckOptions {
    double tolerance_scale = 1.0;  // multiplies the numeric tolerances, not the analytic bounds
    int jobs = 1;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    std::vector<std::string> notes;  // supplementary runs and diagnostics
    double seconds = 0.0;
};

inline constexpr int kCheckCount = 11;

CheckResult run_check(int id, const CheckOptions& opt = {});
// All checks when ids is empty.
std::vector<CheckResult> run_checks(const CheckOptions& opt = {}, std::span<const int> ids = {});

// "PASS  3  name  detail"
std::string format_check(const CheckResult& r);
// id,name,status,detail (no timings, so reruns are byte-identical)
std::string checks_csv(const std::vector<CheckResult>& rs);

// Sum over spanning connected subgraphs of the touch graph of (-1)^{#edges},
// by direct subset enumeration with union-find. Independent of the
// connected-set recursion used by ursell_from_masks.
double ursell_brute_force(std::span<const std::uint32_t> touch);

}  // namespace latthiggs
