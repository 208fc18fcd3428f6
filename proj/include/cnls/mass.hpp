#pragma once
#include "cnls/potentials.hpp"
#include "cnls/profiles.hpp"
#include "cnls/solver.hpp"

#include <functional>
#include <optional>

namespace cnls {

struct MassParams {
    double rho = 0;
    double rho0_sq = 0;
    double A = 0;  // N = 2 expansion constant
    int dim = 2;
    int k = 1;
};

// k (σ₁² + σ₂²) ∫_{R^N} w²
double rho0_squared(const ProfilePair& pp, int k, int dim);

// N = 3: (‖u‖² + ‖v‖²)/(ε²ρ²) (target 1);  N = 2: ε⁻² ∫(u² + v²) (target ρ²).
double mass_map(const SolvedState& st, double rho);

// The displayed constant  -¾ S ∫|x|²w²  (dim = 2).
double constant_A(const PotentialSpec& spec, const CouplingParams& cp, const GroundState& gs);
// The coefficient implied by F̄(ε) = ρ₀² + ε⁴ S ∫wz₀ + …, i.e. S ∫wz₀.
double consistent_A(const PotentialSpec& spec, const CouplingParams& cp, const GroundState& gs, double wz0);

// N = 3: ρ₀⁴ρ⁻⁴.  N = 2: s⁻¹(1 + (C/2A)s - (3C²/8A²)s²), s = ((ρ²-ρ₀²)/A)^{1/2},
// with the bracketed terms only when c_fit is given.
double lambda_prediction(double rho, const MassParams& mp, std::optional<double> c_fit = std::nullopt);

struct MassRoot {
    double epsilon = 0;
    double deviation = 0;  // mass map minus its target at ε̃
    int evaluations = 0;
    double bracket_lo = 0, bracket_hi = 0;
};

// Bisection on dev(ε) = mass map - target over the bracket.  `dev` is
// expected to warm-start itself from its previous evaluation.
MassRoot bisect_mass(const std::function<double(double)>& dev, double lo, double hi, double tol);

// Radial coupled solve for a single isotropic well in N = 3 (or any N):
// -ΔU + (1 + ε²P(ξ+εy))U = μ₁U³ + βUV² with P radial about ξ.
class RadialPath {
public:
    RadialPath(const ProfilePair& pp, const PotentialSpec& spec, int n = 200, double R = 20);
    // Solves at ε (warm-started) and returns ∫(U² + V²) dy.
    double solve(double eps);
    double residual() const { return residual_; }
    int newton_iterations() const { return iters_; }
    const Eigen::VectorXd& U() const { return U_; }
    const Eigen::VectorXd& V() const { return V_; }
    const ChebRadial& cheb() const { return ch_; }

private:
    ProfilePair pp_;
    PotentialSpec spec_;
    ChebRadial ch_;
    Eigen::VectorXd U_, V_;
    double residual_ = 0;
    int iters_ = 0;
};

// N = 3 mass root on the radial path: F(ε) = ε∫(U²+V²)dy / ρ² = 1 in the
// bracket (ρ²/2ρ₀², 3ρ²/2ρ₀²).
struct RadialMassRoot {
    MassRoot root;
    double lambda = 0;
    double F = 0;
};
RadialMassRoot find_epsilon_for_mass_radial(double rho, RadialPath& path, double rho0_sq, double tol = 1e-8);

// N = 2: full 2D solves on one fixed grid (sized for the whole bracket) so
// each evaluation warm-starts from the previous solution.
struct GridMassRoot {
    MassRoot root;
    SolvedState state;
};
GridMassRoot find_epsilon_for_mass(double rho, const Problem& pr, double eps_lo, double eps_hi, double tol,
                                   const SolveOptions& opt = {});

} // namespace cnls
