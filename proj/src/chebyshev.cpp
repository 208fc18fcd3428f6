#include "cnls/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace cnls {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double surface_area(int dim)
{
    switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default:
        // |S^{d-1}| = 2 π^{d/2} / Γ(d/2)
        return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
    }
}

ChebRadial::ChebRadial(int n, double R, int dim) : n_(n), dim_(dim), R_(R)
{
    const double pi = std::numbers::pi;
    VectorXd x(n + 1), c(n + 1);
    for (int j = 0; j <= n; ++j) {
        x[j] = -std::cos(pi * j / n);  // ascending
        c[j] = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    }
    MatrixXd D(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        double s = 0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            D(i, j) = (c[i] / c[j]) / (x[i] - x[j]);
            s += D(i, j);
        }
        D(i, i) = -s;
    }
    r_ = (x.array() + 1.0) * (0.5 * R);
    r_[0] = 0.0;
    r_[n] = R;
    D1_ = D * (2.0 / R);
    D2_ = D1_ * D1_;

    // Clenshaw–Curtis weights on [-1,1]
    cc_.setZero(n + 1);
    for (int k = 0; k <= n; ++k) {
        double theta = pi * k / n, s = 0;
        for (int j = 0; j <= n / 2; ++j) {
            double b = (j == 0 || 2 * j == n) ? 1.0 : 2.0;
            s += b / (1.0 - 4.0 * j * j) * std::cos(2.0 * j * theta);
        }
        double ck = (k == 0 || k == n) ? 1.0 : 2.0;
        cc_[n - k] = ck / n * s;  // node k of cos-ordering is ascending index n-k
    }
    cc_ *= 0.5 * R;

    bary_.resize(n + 1);
    for (int j = 0; j <= n; ++j)
        bary_[j] = ((j == 0 || j == n) ? 0.5 : 1.0) * ((j % 2) ? -1.0 : 1.0);
}

MatrixXd ChebRadial::laplacian(int d) const
{
    MatrixXd L = D2_;
    for (int i = 1; i <= n_; ++i)
        L.row(i) += ((d - 1) / r_[i]) * D1_.row(i);
    return L;
}

VectorXd ChebRadial::weights(int d) const
{
    if (d == 0) d = dim_;
    VectorXd w(n_ + 1);
    for (int j = 0; j <= n_; ++j)
        w[j] = cc_[j] * surface_area(d) * std::pow(r_[j], d - 1);
    return w;
}

double ChebRadial::integrate(const VectorXd& f, int d) const
{
    return weights(d).dot(f);
}

double ChebRadial::eval(const VectorXd& f, double r) const
{
    double num = 0, den = 0;
    for (int j = 0; j <= n_; ++j) {
        double dr = r - r_[j];
        if (dr == 0.0) return f[j];
        double q = bary_[j] / dr;
        num += q * f[j];
        den += q;
    }
    return num / den;
}

VectorXd ChebRadial::eval(const VectorXd& f, const VectorXd& rs) const
{
    VectorXd out(rs.size());
    for (Eigen::Index i = 0; i < rs.size(); ++i) out[i] = eval(f, rs[i]);
    return out;
}

// Boundary unknowns (index 0 and n) as a linear map of the interior ones:
// f'(0) = 0 and f'(R) + rob f(R) = 0.
MatrixXd ChebRadial::boundary_map(int d) const
{
    const int m = n_ - 1;
    Eigen::Matrix2d Bb;
    MatrixXd Bi(2, m);
    Bb << D1_(0, 0), D1_(0, n_), D1_(n_, 0), D1_(n_, n_) + robin(d);
    Bi.row(0) = D1_.row(0).segment(1, m);
    Bi.row(1) = D1_.row(n_).segment(1, m);
    return -Bb.inverse() * Bi;
}

MatrixXd ChebRadial::reduced(int d, const VectorXd& coef) const
{
    const int m = n_ - 1;
    MatrixXd A = -laplacian(d);
    for (int i = 0; i <= n_; ++i) A(i, i) += 1.0 - coef[i];
    MatrixXd Bm = boundary_map(d);
    MatrixXd Ar = A.block(1, 1, m, m);
    Ar += A.block(1, 0, m, 1) * Bm.row(0) + A.block(1, n_, m, 1) * Bm.row(1);
    return Ar;
}

VectorXd ChebRadial::lift(int d, const VectorXd& in) const
{
    VectorXd f(n_ + 1);
    f.segment(1, n_ - 1) = in;
    VectorXd b = boundary_map(d) * in;
    f[0] = b[0];
    f[n_] = b[1];
    return f;
}

VectorXd ChebRadial::solve(int d, const VectorXd& coef, const VectorXd& rhs) const
{
    MatrixXd A = reduced(d, coef);
    VectorXd in = A.partialPivLu().solve(rhs.segment(1, n_ - 1));
    return lift(d, in);
}

} // namespace cnls
