#pragma once
#include "cnls/chebyshev.hpp"
#include "cnls/radial_table.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace cnls {

// Positive radial solution of -Δw + w = w³ in R^N.
struct GroundState {
    int dim = 2;
    double r_max = 20;
    std::vector<double> r_grid;  // Chebyshev–Lobatto nodes, ascending
    std::vector<double> values;
    double tail_constant = 0;
    double residual = 0;  // sup over interior nodes

    // Derived, rebuilt by finalize().
    std::shared_ptr<const ChebRadial> cheb;
    RadialTable table;

    void finalize();
    Eigen::VectorXd vec() const { return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()); }
    double w(double r) const { return table.value(r); }
    double dw(double r) const { return table.deriv(r); }
    double w0() const { return values.front(); }

    // ∫_{R^N} |x|^{2m} w^p
    double moment(int p, int m = 0) const;
    double grad_sq() const;  // ∫|∇w|²
};

GroundState solve_ground_state(int dim, double r_max = 20.0, int n_nodes = 400, double tol = 1e-8);

// Bisection shooting on w(0) with adaptive Dormand–Prince; the scalar
// starting point for the collocation Newton solve.
double shoot_w0(int dim, double lo = 0.5, double hi = 6.0, double r_end = 14.0);

void write_ground_state(std::ostream& os, const GroundState& gs);
GroundState read_ground_state(std::istream& is);

struct CouplingParams {
    double mu1, mu2, beta, sigma1, sigma2;
    double s2() const { return sigma1 * sigma1 + sigma2 * sigma2; }
};

bool admissible(double mu1, double mu2, double beta);
std::string admissible_intervals(double mu1, double mu2);
CouplingParams coupling_sigmas(double mu1, double mu2, double beta);

struct ProfilePair {
    std::shared_ptr<const GroundState> gs;
    CouplingParams cp;
    double w_star(double r) const { return cp.sigma1 * gs->w(r); }
    double w_star2(double r) const { return cp.sigma2 * gs->w(r); }
    // Sup over interior collocation nodes of the limiting-system residual.
    double residual() const;
};

ProfilePair make_profiles(std::shared_ptr<const GroundState> gs, const CouplingParams& cp, int dim_expected = 0);

} // namespace cnls
