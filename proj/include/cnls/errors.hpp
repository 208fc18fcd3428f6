#pragma once
#include <stdexcept>
#include <string>

namespace cnls {

// Exit-code classes used by the CLI: config problems map to 2, numerical
// failures to 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InadmissibleCoupling : ConfigError {
    using ConfigError::ConfigError;
};

// Root bracket without a sign change; carries both endpoint deviations.
struct NoSignChange : SolverError {
    double lo_value, hi_value;
    NoSignChange(const std::string& m, double lo, double hi) : SolverError(m), lo_value(lo), hi_value(hi) {}
};

// Requested mass lies on the side of ρ₀² where no solution branch exists.
struct WrongMassSide : ConfigError {
    using ConfigError::ConfigError;
};

struct NotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cnls
