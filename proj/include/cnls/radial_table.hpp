#pragma once
#include <Eigen/Dense>
#include <vector>

namespace cnls {

class ChebRadial;

// Fast off-node evaluation of a radial function: quintic Hermite on a uniform
// table over [0, R]; beyond R the Robin tail f(R) e^{-(r-R)} (R/r)^{(d-1)/2}.
class RadialTable {
public:
    RadialTable() = default;
    RadialTable(const ChebRadial& cheb, const Eigen::VectorXd& f, int tail_dim, double dr = 0.005);

    double value(double r) const;
    double deriv(double r) const;
    double deriv2(double r) const;
    double R() const { return R_; }
    bool empty() const { return f_.empty(); }

private:
    double R_ = 0, dr_ = 1, alpha_ = 0;
    std::vector<double> f_, d1_, d2_;
    void locate(double r, int& i, double& t) const;
};

} // namespace cnls
