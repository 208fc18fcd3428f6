#pragma once
// Independent reference computations used only by the tests.  They share no
// code with the library: different discretizations, different integrators.
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <functional>
#include <vector>
#include <algorithm>

namespace oracle {

using State = std::array<double, 2>;

// Classical RK4 with fixed step from the origin series; returns +1 overshoot,
// -1 undershoot.
inline int rk4_shoot(int dim, double a, double r_end = 14.0, double h = 1e-3)
{
    double r = 1e-5, c = (a - a * a * a) / dim;
    State y{a + 0.5 * c * r * r, c * r};
    auto f = [dim](double t, const State& s) {
        return State{s[1], -(dim - 1) / t * s[1] + s[0] - s[0] * s[0] * s[0]};
    };
    while (r < r_end) {
        State k1 = f(r, y);
        State y2{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
        State k2 = f(r + 0.5 * h, y2);
        State y3{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
        State k3 = f(r + 0.5 * h, y3);
        State y4{y[0] + h * k3[0], y[1] + h * k3[1]};
        State k4 = f(r + h, y4);
        for (int i = 0; i < 2; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        r += h;
        if (y[0] < 0) return 1;
        if (y[1] > 0) return -1;
    }
    return 0;
}

inline double shoot_w0(int dim, double h = 1e-3)
{
    double lo = 0.5, hi = 6.0;
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (lo + hi);
        (rk4_shoot(dim, m, 14.0, h) == 1 ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

// Fourth-order finite differences on a uniform radial grid r_i = (i+1/2) h
// (staggered, so the origin is handled by symmetry), solving
//   -f'' - (d-1)/r f' + (1 - c(r)) f = g(r)
// with f = 0 beyond R.  Returns samples.
struct FdRadial {
    int d;
    double h, R;
    std::vector<double> r;
    FdRadial(int d_, double R_, int m) : d(d_), h(R_ / m), R(R_)
    {
        for (int i = 0; i < m; ++i) r.push_back((i + 0.5) * h);
    }
    // -Δ_d + 1 - c(r) with 5-point stencils, mirror f(-r) = f(r) below 0 and
    // f = 0 beyond R.
    Eigen::SparseMatrix<double> matrix(const std::vector<double>& c) const
    {
        const int m = static_cast<int>(r.size());
        std::vector<Eigen::Triplet<double>> t;
        auto idx = [&](int j) { return j < 0 ? -j - 1 : j; };
        const double c2[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
        const double c1[5] = {1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12};
        for (int i = 0; i < m; ++i) {
            for (int k = -2; k <= 2; ++k) {
                int j = i + k;
                if (j >= m) continue;
                t.emplace_back(i, idx(j), -c2[k + 2] / (h * h) - (d - 1) / r[i] * c1[k + 2] / h);
            }
            t.emplace_back(i, i, 1.0 - c[i]);
        }
        Eigen::SparseMatrix<double> A(m, m);
        A.setFromTriplets(t.begin(), t.end());
        return A;
    }
    std::vector<double> solve(const std::vector<double>& c, const std::vector<double>& g) const
    {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(matrix(c));
        Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(g.data(), g.size()));
        return std::vector<double>(x.data(), x.data() + x.size());
    }
    // Newton for -Δw + w = w³ started from a sech-shaped guess.
    std::vector<double> ground_state(double w0_guess) const
    {
        const size_t m = r.size();
        std::vector<double> w(m), c(m), res(m);
        for (size_t i = 0; i < m; ++i) w[i] = w0_guess / std::cosh(r[i] * 1.2);
        for (int it = 0; it < 40; ++it) {
            std::vector<double> zero(m, 0.0);
            Eigen::SparseMatrix<double> L = matrix(zero);
            Eigen::VectorXd wv = Eigen::Map<Eigen::VectorXd>(w.data(), m);
            Eigen::VectorXd F = L * wv - wv.array().cube().matrix();
            for (size_t i = 0; i < m; ++i) c[i] = 3 * w[i] * w[i];
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(matrix(c));
            Eigen::VectorXd dw = lu.solve(-F);
            wv += dw;
            for (size_t i = 0; i < m; ++i) w[i] = wv[i];
            if (dw.cwiseAbs().maxCoeff() < 1e-14) break;
        }
        return w;
    }
    double integrate(const std::vector<double>& f) const
    {
        double area = d == 1 ? 2.0 : (d == 2 ? 2 * M_PI : 4 * M_PI);
        double s = 0;
        for (size_t i = 0; i < r.size(); ++i) s += f[i] * std::pow(r[i], d - 1);
        return s * h * area;
    }
};

// ∫ w z0 for -Δz + z - 3w²z = -|x|²w (2D).  Midpoint quadrature is O(h²)
// and the stencils O(h⁴), so two Richardson levels.
inline double fd_wz0(int m)
{
    auto run = [](int mm) {
        FdRadial fd(2, 20.0, mm);
        std::vector<double> w = fd.ground_state(2.2);
        std::vector<double> c(w.size()), g(w.size()), f(w.size());
        for (size_t i = 0; i < w.size(); ++i) {
            c[i] = 3 * w[i] * w[i];
            g[i] = -fd.r[i] * fd.r[i] * w[i];
        }
        std::vector<double> z = fd.solve(c, g);
        for (size_t i = 0; i < w.size(); ++i) f[i] = w[i] * z[i];
        return fd.integrate(f);
    };
    double a = run(m), b = run(2 * m), c = run(4 * m);
    double ab = (4 * b - a) / 3, bc = (4 * c - b) / 3;
    return (16 * bc - ab) / 15;
}

// ∫|x|^p w² (2D), same Richardson scheme.
inline double fd_moment(int p, int m)
{
    auto run = [p](int mm) {
        FdRadial fd(2, 20.0, mm);
        std::vector<double> w = fd.ground_state(2.2), f(w.size());
        for (size_t i = 0; i < w.size(); ++i) f[i] = std::pow(fd.r[i], p) * w[i] * w[i];
        return fd.integrate(f);
    };
    double a = run(m), b = run(2 * m), c = run(4 * m);
    double ab = (4 * b - a) / 3, bc = (4 * c - b) / 3;
    return (16 * bc - ab) / 15;
}

} // namespace oracle

namespace oracle {

// Dense Fourier differentiation matrix (second derivative) on n periodic
// points of spacing h, n even.
inline Eigen::MatrixXd fourier_d2(int n, double h)
{
    Eigen::MatrixXd D(n, n);
    const double L = n * h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int k = i - j;
            if (k == 0)
                D(i, j) = -double(n) * n / 12.0 - 1.0 / 6.0;
            else {
                double s = std::sin(M_PI * k / n);
                D(i, j) = -std::pow(-1.0, k) * 0.5 / (s * s);
            }
        }
    // scale from the [0, 2π) reference to length L
    return D * std::pow(2 * M_PI / L, 2);
}

// Eigenvalues (sorted by |.|) of the coupled 2D linearization on an n×n
// Fourier grid of spacing h centred at the origin.  w is supplied by the
// caller as a function of r.
inline Eigen::VectorXd dense_linearized_spectrum(int n, double h, double mu1, double mu2, double beta,
                                                 double s1, double s2, const std::function<double(double)>& w)
{
    const int N = n * n;
    Eigen::MatrixXd D2 = fourier_d2(n, h);
    Eigen::MatrixXd Lap = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Lap(i * n + j, k * n + j) += D2(i, k);
                Lap(i * n + j, i * n + k) += D2(j, k);
            }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    A.topLeftCorner(N, N) = -Lap;
    A.bottomRightCorner(N, N) = -Lap;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = (i - n / 2) * h, y = (j - n / 2) * h;
            double ww = w(std::hypot(x, y)), w2 = ww * ww;
            int p = i * n + j;
            A(p, p) += 1 - (3 * mu1 * s1 * s1 + beta * s2 * s2) * w2;
            A(N + p, N + p) += 1 - (3 * mu2 * s2 * s2 + beta * s1 * s1) * w2;
            A(p, N + p) = A(N + p, p) = -2 * beta * s1 * s2 * w2;
        }
    // eigenvalues nearest zero: subspace iteration with A^{-1}, then Rayleigh–Ritz
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const int m = 10;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2 * N, m);
    for (int i = 0; i < 2 * N; ++i)
        for (int k = 0; k < m; ++k) X(i, k) = std::sin(0.37 * (i + 1) * (k + 1)) + 0.01 * k;
    for (int it = 0; it < 60; ++it) {
        X = lu.solve(X);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
        X = qr.householderQ() * Eigen::MatrixXd::Identity(2 * N, m);
    }
    Eigen::MatrixXd T = X.transpose() * A * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()), Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    std::vector<double> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    return Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
}

} // namespace oracle
