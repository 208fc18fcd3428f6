#pragma once
#include "cnls/assembler.hpp"
#include "cnls/corrections.hpp"
#include "cnls/grid.hpp"
#include "cnls/potentials.hpp"
#include "cnls/profiles.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cnls {

// Everything a solve at fixed ε needs besides the initial data.
struct Problem {
    PotentialSpec spec;
    ProfilePair pp;
    std::vector<CorrectionField> corrections;  // one per well, or empty
};

struct SolveOptions {
    double tol = 1e-10;  // sup-norm of the residual
    int max_iter = 12;
    double gmres_rtol = 1e-12;
    int gmres_restart = 80;
    int gmres_max = 3000;
    double positivity_tol = 1e-10;  // relative to max u
};

struct SolvedState {
    Field2 fields;
    ScaleParams sp;
    PeakSet peaks;    // maxima of σ₁u + σ₂v
    PeakSet centers;  // Lyapunov–Schmidt centres: u - U(centres) ⟂_H kernel
    double remainder_H_norm = 0;
    double remainder_sup = 0;
    double residual_norm = 0;  // sup
    double constraint_norm = 0;
    int iterations = 0;
    std::vector<double> step_norms;
    std::vector<double> residual_history;
    int gmres_iterations = 0;
    double min_value = 0;
    bool positive = true;
    std::string to_json() const;
};

// Pointwise residual of -ε²Δu + (ε²P+1)u - μ₁u³ - βuv² (and the v equation).
Field2 residual_eq1(const Field2& f, const ScaleParams& sp, const PotentialSpec& spec, const CouplingParams& cp);

// ((a,b),(c,d))_H with ‖u‖²_{ε,P} = ∫ ε²|∇u|² + (ε²P+1)u².
double h_inner(const Field2& a, const Field2& b, const ScaleParams& sp, const PotentialSpec& spec);
inline double h_norm(const Field2& a, const ScaleParams& sp, const PotentialSpec& spec)
{
    return std::sqrt(h_inner(a, a, sp, spec));
}

SolvedState newton_ls_solve(const Field2& initial, const ScaleParams& sp, const Problem& pr, const PeakSet& peaks0,
                            const SolveOptions& opt = {});

// Convenience: assemble at the wells and solve.
SolvedState solve_at(double eps, const Problem& pr, const SolveOptions& opt = {}, double margin_y = 20,
                     double h_y = 0.2);

struct RemainderReport {
    double H_norm = 0, sup = 0;
    std::vector<double> projections;  // ⟨(φ,ψ), Z_lj⟩_H / ‖Z_lj‖_H
    Field2 remainder;
};

// (φ, ψ) = (u, v) - Σ_l [profile + ε⁴ correction] at the given centres.
RemainderReport remainder_report(const SolvedState& st, const Problem& pr, const PeakSet& centers);

// Local maxima of σ₁u + σ₂v near each guess: 3^N quadratic fit around the
// discrete maximum, then Newton on the trigonometric interpolant.
PeakSet recover_peaks(const Field2& f, const CouplingParams& cp, const PeakSet& guesses, double radius);

// max |f(x) - f(R_d x)| for the reflection about the box centre along axis d.
double reflection_defect(const Field2& f, int axis);
bool reflection_symmetric(const PotentialSpec& spec, const Grid& g, int axis);

} // namespace cnls
