#include "cnls/radial_table.hpp"
#include "cnls/chebyshev.hpp"

#include <cmath>

namespace cnls {

RadialTable::RadialTable(const ChebRadial& cheb, const Eigen::VectorXd& f, int tail_dim, double dr)
    : R_(cheb.R()), alpha_(0.5 * (tail_dim - 1))
{
    int m = static_cast<int>(std::ceil(R_ / dr));
    dr_ = R_ / m;
    Eigen::VectorXd f1 = cheb.D1() * f, f2 = cheb.D2() * f;
    f_.resize(m + 1);
    d1_.resize(m + 1);
    d2_.resize(m + 1);
    for (int i = 0; i <= m; ++i) {
        double r = i * dr_;
        f_[i] = cheb.eval(f, r);
        d1_[i] = cheb.eval(f1, r);
        d2_[i] = cheb.eval(f2, r);
    }
}

void RadialTable::locate(double r, int& i, double& t) const
{
    double s = r / dr_;
    i = static_cast<int>(s);
    if (i >= static_cast<int>(f_.size()) - 1) i = static_cast<int>(f_.size()) - 2;
    t = s - i;
}

// Quintic Hermite basis on [0,1] with value/first/second derivative data.
namespace {
struct Basis {
    double h0, h1, g0, g1, k0, k1;
};
Basis basis(double t, int order)
{
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    switch (order) {
    case 0:
        return {1 - 10 * t3 + 15 * t4 - 6 * t5, 10 * t3 - 15 * t4 + 6 * t5,
                t - 6 * t3 + 8 * t4 - 3 * t5, -4 * t3 + 7 * t4 - 3 * t5,
                0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5, 0.5 * t3 - t4 + 0.5 * t5};
    case 1:
        return {-30 * t2 + 60 * t3 - 30 * t4, 30 * t2 - 60 * t3 + 30 * t4,
                1 - 18 * t2 + 32 * t3 - 15 * t4, -12 * t2 + 28 * t3 - 15 * t4,
                t - 4.5 * t2 + 6 * t3 - 2.5 * t4, 1.5 * t2 - 4 * t3 + 2.5 * t4};
    default:
        return {-60 * t + 180 * t2 - 120 * t3, 60 * t - 180 * t2 + 120 * t3,
                -36 * t + 96 * t2 - 60 * t3, -24 * t + 84 * t2 - 60 * t3,
                1 - 9 * t + 18 * t2 - 10 * t3, 3 * t - 12 * t2 + 10 * t3};
    }
}
} // namespace

double RadialTable::value(double r) const
{
    if (r > R_) return f_.back() * std::exp(-(r - R_)) * std::pow(R_ / r, alpha_);
    int i;
    double t;
    locate(r, i, t);
    Basis b = basis(t, 0);
    double h = dr_;
    return b.h0 * f_[i] + b.h1 * f_[i + 1] + h * (b.g0 * d1_[i] + b.g1 * d1_[i + 1]) +
           h * h * (b.k0 * d2_[i] + b.k1 * d2_[i + 1]);
}

double RadialTable::deriv(double r) const
{
    if (r > R_) return -value(r) * (1.0 + alpha_ / r);
    int i;
    double t;
    locate(r, i, t);
    Basis b = basis(t, 1);
    double h = dr_;
    return (b.h0 * f_[i] + b.h1 * f_[i + 1]) / h + (b.g0 * d1_[i] + b.g1 * d1_[i + 1]) +
           h * (b.k0 * d2_[i] + b.k1 * d2_[i + 1]);
}

double RadialTable::deriv2(double r) const
{
    if (r > R_) {
        double a = 1.0 + alpha_ / r;
        return value(r) * (a * a + alpha_ / (r * r));
    }
    int i;
    double t;
    locate(r, i, t);
    Basis b = basis(t, 2);
    double h = dr_;
    return (b.h0 * f_[i] + b.h1 * f_[i + 1]) / (h * h) + (b.g0 * d1_[i] + b.g1 * d1_[i + 1]) / h +
           (b.k0 * d2_[i] + b.k1 * d2_[i + 1]);
}

} // namespace cnls
