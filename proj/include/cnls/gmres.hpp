#pragma once
#include <functional>
#include <vector>

namespace cnls {

using LinearMap = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct GmresResult {
    int iterations = 0;
    double rel_residual = 0;
    bool converged = false;
};

// Restarted GMRES (modified Gram–Schmidt, Givens rotations) with optional
// right preconditioner M ≈ A⁻¹.  x holds the initial guess on entry.
GmresResult gmres(const LinearMap& A, const LinearMap& M, const std::vector<double>& b, std::vector<double>& x,
                  double rtol, int restart = 60, int max_iter = 600);

// Preconditioned MINRES for symmetric (possibly indefinite) A with SPD
// preconditioner M ≈ A⁻¹.  Stops on the M-norm residual estimate.
GmresResult minres(const LinearMap& A, const LinearMap& M, const std::vector<double>& b, std::vector<double>& x,
                   double rtol, int max_iter = 5000);

} // namespace cnls
