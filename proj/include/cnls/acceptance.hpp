#pragma once
#include "cnls/config.hpp"
#include "cnls/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cnls {

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<CheckReport> reports;
    std::vector<CheckReport> runtime;  // wall-clock limits; kept apart so artifacts stay deterministic
    double seconds = 0;
    bool pass() const;
};

struct AcceptanceRun {
    std::vector<CriterionResult> criteria;
    std::vector<std::string> warnings;
    bool all_pass() const;
    std::vector<CheckReport> reports() const;  // names prefixed with the criterion id
    std::vector<CheckReport> runtime_reports() const;
};

// The fifteen acceptance criteria on the configured problem (N = 2).  The
// k = 1 runs use the first configured well alone.  With a non-empty out_dir
// the sweep CSVs and per-fit plot CSVs are written there.
AcceptanceRun run_acceptance(const RunConfig& cfg, const std::string& out_dir = {}, std::ostream* progress = nullptr);

// One "criterion N: PASS|FAIL  title" line per criterion.
void write_acceptance_summary(std::ostream& os, const AcceptanceRun& run);

// ∫wz₀ (N = 2) from an independent fourth-order finite-difference radial
// solve with two Richardson levels (m, 2m, 4m cells on [0, 20]).
double dense_radial_wz0(int m = 1000);

} // namespace cnls
