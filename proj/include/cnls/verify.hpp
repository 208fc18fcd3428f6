#pragma once
#include "cnls/corrections.hpp"
#include "cnls/mass.hpp"
#include "cnls/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cnls {

enum class Provenance { paper, trivial, derived };
// at_most / at_least: one-sided, measured[0] ≤ target (≥ target).
enum class Tolerance { absolute, relative, at_most, at_least };

// pass ⇔ |measured[0] - target| ≤ tolerance (times |target| when relative).
// Inconclusive reports are neither passes nor failures.
struct CheckReport {
    std::string name;
    std::vector<double> measured;
    double target = 0;
    double tolerance = 0;
    Tolerance mode = Tolerance::absolute;
    bool pass = false;
    bool inconclusive = false;
    Provenance provenance = Provenance::trivial;
    std::string detail;

    double value() const { return measured.empty() ? 0.0 : measured.front(); }
    std::string to_json() const;
};

CheckReport make_check(std::string name, std::vector<double> measured, double target, double tolerance,
                       Tolerance mode, Provenance prov, std::string detail = {});
// Value inside [lo, hi]: target at the midpoint, half-width tolerance.
CheckReport make_range_check(std::string name, std::vector<double> measured, double lo, double hi, Provenance prov,
                             std::string detail = {});
// measured[0] < bound: target 0, tolerance bound (measured must be ≥ 0).
CheckReport make_bound_check(std::string name, std::vector<double> measured, double bound, Provenance prov,
                             std::string detail = {});
CheckReport make_at_most_check(std::string name, std::vector<double> measured, double limit, Provenance prov,
                               std::string detail = {});
CheckReport make_at_least_check(std::string name, std::vector<double> measured, double limit, Provenance prov,
                                std::string detail = {});

std::string provenance_name(Provenance p);
std::string reports_json(const std::vector<CheckReport>& reports);
void write_reports_table(std::ostream& os, const std::vector<CheckReport>& reports);

struct OrderFit {
    double slope = 0, intercept = 0, residual = 0;  // residual: RMS in log space
};
// Least squares on (log ε, log value); ≥ 4 samples, positive values.
OrderFit order_fit(const std::vector<std::pair<double, double>>& samples);
// Columns: epsilon, value, fit.
void write_order_fit_csv(std::ostream& os, const std::vector<std::pair<double, double>>& samples, const OrderFit& f);

// ---- local Pohozaev identity on B_δ(ξ_ε,l), N = 2 ----
struct PohozaevResult {
    double volume = 0;    // ε²∫_B (∂_jP u² + ∂_jQ v²)
    double boundary = 0;  // the surface side
    double gap = 0;       // volume - boundary
    double boundary_magnitude = 0;  // Σ |individual surface terms|
    double error_estimate = 0;
    std::vector<double> terms;  // the five surface integrals
};

// `residual` is the solver's sup residual; it enters the error estimate as
// 2·residual·∫_B(|∂_j u| + |∂_j v|).
PohozaevResult local_pohozaev(const Field2& f, double eps, const PotentialSpec& spec, const CouplingParams& cp,
                              const Eigen::VectorXd& center, double delta, int j, double residual);
CheckReport local_pohozaev_check(const SolvedState& st, const PotentialSpec& spec, const CouplingParams& cp, int well,
                                 double delta, int j);

// ---- gradient balance (β-μ₂)∇P(ξ_ε) + (β-μ₁)∇Q(ξ_ε) ----
std::vector<double> balance_vector_norms(const SolvedState& st, const PotentialSpec& spec, const CouplingParams& cp);
// One report per well; a single state only bounds |b| by ε (the order is the
// sweep fit's job).
std::vector<CheckReport> balance_check(const SolvedState& st, const PotentialSpec& spec, const CouplingParams& cp);
// Ratio of balance magnitudes with the whole potential doubled vs not, at fixed ε.
CheckReport balance_doubling_check(double eps, const Problem& pr, const SolveOptions& opt = {}, double margin_y = 20,
                                   double h_y = 0.2);

// ---- radial identities ----
// w → a·w(c·r), rebuilt from the collocation values (planted faults).
GroundState perturbed_ground_state(const GroundState& gs, double amplitude, double dilation);

CheckReport scalar_virial_check(const GroundState& gs);  // |∫w⁴ - 2∫w²|/∫w⁴, N = 2
// Both virial-type identities for (σ₁w, σ₂w); dim = 2.
std::vector<CheckReport> mass_identity_suite(const ProfilePair& pp);
CheckReport sigma_identity_check(const CouplingParams& cp);
// ∫wz₀ = -½∫|x|²w² (N = 2) and the sign.
CheckReport z0_identity_check(const GroundState& gs, double wz0);
std::vector<CheckReport> correction_identity_checks(const ProfilePair& pp, const CorrectionPair& c,
                                                    const PotentialSpec& spec, int l, double wz0);

// ---- λ–ρ relations ----
struct RelationSample {
    double rho_sq = 0;  // ρ² (N = 2: F̄(ε)), or ρ² for the N = 3 path
    double lambda = 0;
};
struct RelationFit {
    double A = 0, C = 0;  // (ρ²-ρ₀²)λ² = A + C λ⁻¹ (N = 2)
    std::vector<double> scaled;  // N = 2: (ρ²-ρ₀²)λ²; N = 3: λρ⁴/ρ₀⁴
};
RelationFit lambda_mass_fit(const std::vector<RelationSample>& samples, const MassParams& mp);
// N = 2 (≥ 4 samples): fitted limit vs mp.A within 5 %; N = 3 (≥ 3 samples): |λρ⁴/ρ₀⁴ - 1| decreasing
// over the last three samples.
CheckReport lambda_mass_relation_check(const std::vector<RelationSample>& samples, const MassParams& mp);
// F̄(ε) - ρ₀² against ε⁴ S ∫wz₀ (10 %).
CheckReport mass_shift_check(const SolvedState& st, const PotentialSpec& spec, const CouplingParams& cp, double rho0_sq,
                             double wz0);

// ---- local uniqueness by restarts ----
struct UniquenessResult {
    double max_distance = 0;
    int converged = 0, diverged = 0;
    std::vector<double> distances;  // sup distance of each restart to the baseline
};
UniquenessResult uniqueness_probe(double eps, const Problem& pr, const PeakSet& peaks0, int n_restarts,
                                  double perturbation_scale, std::uint64_t seed, const SolveOptions& opt = {},
                                  double margin_y = 20, double h_y = 0.2);
CheckReport uniqueness_check(const UniquenessResult& r, double bound = 1e-8);

} // namespace cnls
