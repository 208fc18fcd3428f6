#pragma once
#include "cnls/corrections.hpp"
#include "cnls/grid.hpp"
#include "cnls/potentials.hpp"
#include "cnls/profiles.hpp"

#include <vector>

namespace cnls {

struct ScaleParams {
    double epsilon = 1, lambda = 1;
    static ScaleParams from_epsilon(double eps);
    static ScaleParams from_lambda(double lambda);
};

// "original" are the singularly perturbed variables u; "normalized" the
// mass-constrained ū = u/ε.  Coordinates are the same in both.
enum class ScaleDirection { to_original, to_normalized };

Field2 scale_transform(const Field2& f, const ScaleParams& sp, ScaleDirection dir);

struct PeakSet {
    std::vector<Eigen::VectorXd> centers;
};

// Single-well piece σ·w(|x-ξ|/ε) + ε⁴ W((x-ξ)/ε), added into (U, V).  An empty
// correction evaluator (zero()) drops the ε⁴ term.
void add_well(const Grid& g, double eps, const Eigen::VectorXd& xi, const ProfilePair& pp,
              const CorrectionField& corr, double* U, double* V);

// Σ_l over wells; `corrections` may be empty (all corrections zeroed) or hold
// one evaluator per peak.
Field2 assemble_approximation(const ScaleParams& sp, const PeakSet& peaks, const ProfilePair& pp,
                              const std::vector<CorrectionField>& corrections, const Grid& g);

// Periodic box covering the wells with margin `margin_y`·ε and spacing
// ≤ h_y·ε.
Grid solution_grid(const PotentialSpec& spec, double eps, double margin_y = 20, double h_y = 0.2);

double field_mass(const Field2& f);  // ∫(u² + v²)

} // namespace cnls
