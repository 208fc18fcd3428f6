#pragma once
#include <Eigen/Dense>
#include <vector>

namespace cnls {

// Chebyshev–Lobatto collocation on [0, R], nodes in increasing order
// (r[0] = 0, r[n] = R).  Radial integrals carry the R^N surface factor.
class ChebRadial {
public:
    ChebRadial(int n, double R, int dim);

    int n() const { return n_; }
    double R() const { return R_; }
    int dim() const { return dim_; }
    const Eigen::VectorXd& r() const { return r_; }
    const Eigen::MatrixXd& D1() const { return D1_; }
    const Eigen::MatrixXd& D2() const { return D2_; }

    // D2 + (d-1)/r D1 for effective dimension d; row 0 left as plain D2 (the
    // regular-origin row is replaced by a boundary condition anyway).
    Eigen::MatrixXd laplacian(int dim_eff) const;

    // ∫_{R^d} f(|x|) dx with d = dim_eff (defaults to dim()).
    double integrate(const Eigen::VectorXd& f, int dim_eff = 0) const;
    Eigen::VectorXd weights(int dim_eff = 0) const;

    double eval(const Eigen::VectorXd& f, double r) const;
    Eigen::VectorXd eval(const Eigen::VectorXd& f, const Eigen::VectorXd& rs) const;

    // Solve (-Δ_d + 1 - coef) f = rhs with f'(0) = 0 and the asymptotic Robin
    // condition f' + f (1 + (d-1)/(2R)) = 0 at R.
    Eigen::VectorXd solve(int dim_eff, const Eigen::VectorXd& coef, const Eigen::VectorXd& rhs) const;

    // Operator (-Δ_d + 1 - coef) on the interior unknowns after eliminating the
    // two boundary conditions above; indices 1..n-1.
    Eigen::MatrixXd reduced(int dim_eff, const Eigen::VectorXd& coef) const;
    Eigen::VectorXd lift(int dim_eff, const Eigen::VectorXd& interior) const;

    double robin(int dim_eff) const { return 1.0 + (dim_eff - 1) / (2.0 * R_); }

private:
    int n_, dim_;
    double R_;
    Eigen::VectorXd r_, cc_, bary_;
    Eigen::MatrixXd D1_, D2_;
    Eigen::MatrixXd boundary_map(int dim_eff) const;
};

double surface_area(int dim);

} // namespace cnls
