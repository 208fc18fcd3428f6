#pragma once
#include "cnls/config.hpp"
#include "cnls/verify.hpp"

#include <exception>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cnls {

// fn(i) for i in [0, n) on min(jobs, n) threads.  Returns the exception (if
// any) thrown by each index; results must be written by index so the
// outcome does not depend on scheduling.
std::vector<std::exception_ptr> parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// The configured problem with corrections attached; `wells` selects a subset
// (empty = all).
Problem make_problem(const RunConfig& cfg, std::shared_ptr<const GroundState> gs, const std::vector<int>& wells = {});
PeakSet well_centres(const PotentialSpec& spec);

// Order-preserving; duplicates (to 1e-12 relative) are dropped with a warning.
std::vector<double> dedup_values(const std::vector<double>& v, std::vector<std::string>& warnings);

struct SweepSample {
    double epsilon = 0, lambda = 0;
    double rho_sq = 0;  // ρ²: the realized mass ε⁻²∫(u²+v²) for ε-sweeps, the target for ρ-sweeps
    double F = 0;       // F̄(ε) for ε-sweeps, F(ε̃) for ρ-sweeps
    double remainder_H = 0;
    std::vector<double> shifts;   // |peak_l - ξ_l|
    std::vector<double> balance;  // |(β-μ₂)∇P + (β-μ₁)∇Q| at each peak
    int iterations = 0;
    bool ok = false;
    std::string error;
    std::shared_ptr<SolvedState> state;  // kept when requested
};

struct SweepOutcome {
    std::vector<SweepSample> samples;
    std::vector<CheckReport> reports;
    std::vector<std::string> warnings;
    OrderFit remainder_fit;
    std::vector<OrderFit> shift_fits, balance_fits;
};

// One solve per ε (parallel), then order fits of the remainder (ε-slope in
// [5.5, 6.5]), each peak shift ([1.7, 2.3]) and each balance vector
// ([1.6, 2.4]).  Needs ≥ 4 distinct values; fits need ≥ 4 successes.
SweepOutcome epsilon_sweep(const Problem& pr, const std::vector<double>& eps, const RunConfig& cfg,
                           bool keep_states = false);

// Columns: epsilon, lambda, rho_sq, F, remainder_H, shift_1..k, iterations, status.
void write_sweep_csv(std::ostream& os, const SweepOutcome& s);
// Writes <dir>/<stem>_{remainder,shift_l,balance_l}.csv from a sweep.
void write_sweep_plots(const std::string& dir, const std::string& stem, const SweepOutcome& s);

} // namespace cnls
