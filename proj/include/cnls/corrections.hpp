#pragma once
#include "cnls/grid.hpp"
#include "cnls/potentials.hpp"
#include "cnls/profiles.hpp"

#include <memory>

namespace cnls {

// Radial pieces of the correction solve for one σ-block with w²-coefficient λ:
//   z0: (-Δ_N     + 1 - λw²) z0 = -r² w
//   g2: (-Δ_{N+4} + 1 - λw²) g2 = -w      (so g2(r)·H(y) solves the ℓ = 2 part
//                                          for any harmonic quadratic H)
struct RadialBlock {
    double lambda = 0;
    Eigen::VectorXd z0, g2;
    RadialTable z0t, g2t;
    double residual = 0;  // collocation residual relative to max(1, |f|∞)
};

class CorrectionBasis {
public:
    explicit CorrectionBasis(const ProfilePair& pp);
    const ProfilePair& profiles() const { return pp_; }
    const RadialBlock& parallel() const { return par_; }
    const RadialBlock& perp() const { return perp_; }
    double residual() const { return std::max(par_.residual, perp_.residual); }

private:
    ProfilePair pp_;
    RadialBlock par_, perp_;
};

// Analytic evaluator of (W*_l, W⋆_l) in rescaled coordinates relative to the
// well centre.  Coefficients: c_i = σ₁²p_i + σ₂²q_i, d_i = σ₁σ₂(p_i - q_i).
class CorrectionField {
public:
    CorrectionField() = default;
    CorrectionField(std::shared_ptr<const CorrectionBasis> basis, const CriticalPoint& well);
    void eval(const double* y, double& ws, double& wt) const;
    bool zero() const { return zero_; }
    int dim() const { return dim_; }
    double cbar() const { return cbar_; }
    double dbar() const { return dbar_; }

private:
    std::shared_ptr<const CorrectionBasis> basis_;
    int dim_ = 0;
    bool zero_ = true;
    double cbar_ = 0, dbar_ = 0;
    std::array<double, 3> hc_{}, hd_{};
};

struct CorrectionPair {
    int well = 0;
    Field2 fields;          // (W*, W⋆) sampled on a y-grid centred at the well
    CorrectionField field;  // off-grid evaluator (radial path)
    double residual = 0;    // sup of the discrete correction-system residual
};

// Radial-harmonic path; the grid must be centred at the origin.
CorrectionPair solve_correction_pair(int l, const PotentialSpec& spec, std::shared_ptr<const CorrectionBasis> basis,
                                     const Grid& ygrid);

// Fallback: full-grid GMRES on the coupled system, translation kernel
// projected out.  Must agree with the radial path.
CorrectionPair solve_correction_pair_grid(int l, const PotentialSpec& spec, const ProfilePair& pp, const Grid& ygrid,
                                          double rtol = 1e-11);

// Discrete residual L(W) - RHS of the correction system on the pair's grid.
double correction_residual(const CorrectionPair& c, const PotentialSpec& spec, const ProfilePair& pp);

struct RadialCorrection {
    Eigen::VectorXd r, z0;
    double wz0_integral = 0;
    double residual = 0;
};

RadialCorrection solve_z0_radial(const GroundState& gs);

struct CorrectionIntegrals {
    double I = 0, I_target = 0;      // Lemma-type identity for ∫(∇w·∇W + wW)
    double half = 0, half_target = 0;  // ∫(w*W* + w⋆W⋆) vs ½ S_l ∫wz₀
    double I_gap() const;
    double half_gap() const;
};

// Grid quadrature with spectral gradients on the pair's y-grid.  dim = 2.
CorrectionIntegrals correction_integrals(const ProfilePair& pp, const CorrectionPair& c, const PotentialSpec& spec,
                                         int l, double wz0);

// Least-squares slope of log max_{|y|∈shell}|W| against |y| over [r_lo, r_hi],
// plus the same after removing the algebraic prefactor r^{(N+3)/2}.
struct DecayFit {
    double slope = 0;
    double reduced_slope = 0;
};
DecayFit correction_decay(const CorrectionField& f, double r_lo = 6, double r_hi = 10);

} // namespace cnls
