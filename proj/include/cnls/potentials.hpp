#pragma once
#include "cnls/profiles.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace cnls {

struct CriticalPoint {
    Eigen::VectorXd xi;
    Eigen::VectorXd p, q;
    // Optional diagonal cubic terms Σ c_i (x_i - ξ_i)^3; zero by default.
    Eigen::VectorXd cubic_p, cubic_q;
};

struct PotentialSpec {
    int dim = 2;
    std::vector<CriticalPoint> wells;
    double blend_radius = 0.5;

    void validate() const;  // throws ConfigError
    PotentialSpec scaled(double factor) const;  // all coefficients × factor
    bool has_cubic() const;
};

enum class Which { P, Q };

// Smooth cutoff: 1 on [0, R_b], 0 beyond 2R_b, C^∞ in between.
struct Bump {
    double v, d1, d2;
};
Bump blend(double r, double Rb);

double potential_value(const PotentialSpec& s, Which w, const Eigen::VectorXd& x);
Eigen::VectorXd potential_gradient(const PotentialSpec& s, Which w, const Eigen::VectorXd& x);
Eigen::MatrixXd potential_hessian(const PotentialSpec& s, Which w, const Eigen::VectorXd& x);

struct HypothesisReport {
    std::vector<double> det;  // per well, det((β-μ₂)P'' + (β-μ₁)Q'')
    bool h2 = false;
    std::optional<double> S;  // H3 sum, N = 2 only
    bool h3 = false;
    int mass_side = 0;  // -1: ρ² < ρ₀², +1: ρ² > ρ₀², 0: n/a
    std::string describe() const;
};

HypothesisReport hypothesis_report(const PotentialSpec& s, const CouplingParams& cp);

// Σ_l Σ_i (σ₁² p_li + σ₂² q_li), defined for any dimension.
double h3_sum(const PotentialSpec& s, const CouplingParams& cp);

} // namespace cnls
