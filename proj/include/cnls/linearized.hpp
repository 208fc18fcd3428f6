#pragma once
#include "cnls/grid.hpp"
#include "cnls/profiles.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cnls {

struct SigmaEigenBasis {
    std::array<double, 2> e_parallel, e_perp;
    double lambda_parallel, lambda_perp;
    Eigen::Matrix2d matrix;  // w²-coefficient matrix of the linearization
};

SigmaEigenBasis sigma_eigen_decomposition(const CouplingParams& cp);

// Coupled linearization at (σ₁w, σ₂w) centred at `center`, discretized
// spectrally on a grid in rescaled (y) coordinates.
class LinearizedOperator {
public:
    LinearizedOperator(const ProfilePair& pp, const Grid& g, const std::array<double, 3>& center = {0, 0, 0});
    Field2 apply(const Field2& in);
    void apply(const double* a, const double* b, double* out_a, double* out_b);
    const Grid& grid() const { return sp_->grid(); }
    const std::vector<double>& w() const { return w_; }
    Spectral& spectral() { return *sp_; }

private:
    CouplingParams cp_;
    std::unique_ptr<Spectral> sp_;
    std::vector<double> w_, c11_, c22_, c12_, tmp_;
};

// Values Λ (ascending, ≤ lambda_max) for which -Δ + 1 - Λw² has a kernel in
// angular mode ell.
std::vector<double> degeneracy_thresholds(const GroundState& gs, int ell, double lambda_max, int n_cheb = 160);

struct DegeneracyInfo {
    bool flagged = false;
    double lambda_perp = 0;
    double nearest_threshold = 0;
    int nearest_ell = -1;
    double distance = 0;
};

DegeneracyInfo near_degeneracy(const GroundState& gs, const CouplingParams& cp, double window = 0.05);

struct SpectrumMode {
    int index;
    double singular_value;
    double kernel_angle_deg;
    std::string block;  // "parallel" | "perp"
    int ell;
};

struct SpectrumReport {
    std::vector<SpectrumMode> modes;
    double grid_error_scale = 0;
    int near_zero = 0;
    double gap_ratio = 0;  // first value above the scale / scale
    std::string to_json() const;
};

// Smallest singular values of the linearization, using its exact angular
// decomposition: per block (∥/⊥) and angular mode ℓ a radial operator with
// multiplicity.  The error scale compares two radial resolutions.
SpectrumReport kernel_diagnostics(const ProfilePair& pp, int n_modes, int n_cheb = 160, int ell_max = 4);

int harmonic_multiplicity(int dim, int ell);

} // namespace cnls
