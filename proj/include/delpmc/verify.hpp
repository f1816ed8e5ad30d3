#pragma once

#include <functional>
#include <string>
#include <vector>

namespace delpmc {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // worst observed value vs threshold
    double seconds = 0.0;
};

/// Runs the full verification suite (one entry per criterion); on_result is
/// invoked as each check finishes. All tolerances are fixed in code.
std::vector<CheckResult> run_acceptance_checks(
    const std::function<void(const CheckResult&)>& on_result = {});

} // namespace delpmc
