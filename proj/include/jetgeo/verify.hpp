#pragma once

#include <string>
#include <vector>

#include "jetgeo/specfile.hpp"

namespace jetgeo {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;  // overrides the measured/tolerance rendering
};

struct VerifyOptions {
    double tol_override = 0.0;
    bool has_override = false;
    // test hook: corrupt one closed-form entry so the comparison
    // checks must fail
    bool inject_error = false;
};

/// Run the invariant suite for the document: metric validity, structural
/// identities of the connection and electromagnetic form, Maxwell
/// residuals, closed-form-vs-pipeline comparisons for structured system
/// kinds, forcing-independence, and the variational checks.  Checks that
/// need a flat metric or a structured kind are emitted only when
/// applicable.  Requires at least one evaluation point (SpecError).
std::vector<CheckResult> run_verification(const SpecDocument& doc,
                                          const VerifyOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& checks);

/// One line per check: "<name>: PASS (<max err> <= <tol>)", plus a
/// closing tally line.
std::string render_verify_summary(const std::vector<CheckResult>& checks);

} // namespace jetgeo
