#pragma once
#include "cnls/potentials.hpp"
#include "cnls/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cnls {

// One problem plus the knobs of every pipeline.  Loaded from an INI-style
// file (see README); every key has a default.
struct RunConfig {
    std::string mode = "verify-all";
    int dim = 2;
    double mu1 = 1, mu2 = 2, beta = 5;
    PotentialSpec spec;

    // solution grids: margin and spacing in units of ε
    double margin_y = 20, h_y = 0.15;
    SolveOptions solver;

    // ground state
    double r_max = 20;
    int n_nodes = 400;

    // correction y-grid (half-width, spacing)
    double corr_half = 26, corr_h = 0.125;

    // solve / sweep
    double epsilon = 0.3;
    std::string sweep_parameter = "epsilon";  // or "rho"
    std::vector<double> sweep_values{0.5, 0.4, 0.3, 0.25, 0.2};

    // mass root: ρ² = rho_sq_factor·ρ₀²; N = 2 bracket for ε (0 → automatic)
    double rho_sq_factor = 0.99;
    double eps_lo = 0, eps_hi = 0;
    double mass_tol = 1e-8;

    // N = 3 radial path (mass roots, acceptance)
    double radial_p = 1, radial_q = 1, radial_blend = 3;
    std::vector<double> rho_factors{0.3, 0.2, 0.1};

    // uniqueness probe
    double uniq_epsilon = 0.3;
    int uniq_restarts = 5;
    double uniq_scale = 0.05;

    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out = "out";

    CouplingParams coupling() const;  // throws InadmissibleCoupling
    void validate() const;            // throws ConfigError naming the field
};

RunConfig default_config();
RunConfig load_config(const std::string& path);

// Comma-separated numbers.
std::vector<double> parse_list(const std::string& s, const std::string& field);

} // namespace cnls
