#include "cnls/gmres.hpp"

#include <cmath>

namespace cnls {

namespace {
double dotv(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
} // namespace

GmresResult gmres(const LinearMap& A, const LinearMap& M, const std::vector<double>& b, std::vector<double>& x,
                  double rtol, int restart, int max_iter)
{
    const size_t n = b.size();
    GmresResult res;
    const double bnorm = std::sqrt(dotv(b, b));
    if (bnorm == 0) {
        x.assign(n, 0.0);
        res.converged = true;
        return res;
    }
    if (x.size() != n) x.assign(n, 0.0);

    std::vector<double> r(n), t(n), z(n);
    std::vector<std::vector<double>> V(restart + 1, std::vector<double>(n));
    std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), g(restart + 1);

    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (M)
            M(in, out);
        else
            out = in;
    };

    while (res.iterations < max_iter) {
        A(x, t);
        for (size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
        double beta = std::sqrt(dotv(r, r));
        res.rel_residual = beta / bnorm;
        if (res.rel_residual <= rtol) {
            res.converged = true;
            return res;
        }
        for (size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < restart && res.iterations < max_iter; ++k, ++res.iterations) {
            precond(V[k], z);
            A(z, V[k + 1]);
            auto& w = V[k + 1];
            for (int j = 0; j <= k; ++j) {
                H[j][k] = dotv(w, V[j]);
                for (size_t i = 0; i < n; ++i) w[i] -= H[j][k] * V[j][i];
            }
            H[k + 1][k] = std::sqrt(dotv(w, w));
            if (H[k + 1][k] > 0)
                for (size_t i = 0; i < n; ++i) w[i] /= H[k + 1][k];
            for (int j = 0; j < k; ++j) {
                double a = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
                H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
                H[j][k] = a;
            }
            double d = std::hypot(H[k][k], H[k + 1][k]);
            cs[k] = d > 0 ? H[k][k] / d : 1.0;
            sn[k] = d > 0 ? H[k + 1][k] / d : 0.0;
            H[k][k] = d;
            H[k + 1][k] = 0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            res.rel_residual = std::abs(g[k + 1]) / bnorm;
            if (res.rel_residual <= rtol || d == 0) {
                ++k;
                ++res.iterations;
                break;
            }
        }
        // back substitution and update x += M V y
        std::vector<double> y(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
            y[i] = H[i][i] != 0 ? s / H[i][i] : 0.0;
        }
        std::fill(t.begin(), t.end(), 0.0);
        for (int j = 0; j < k; ++j)
            for (size_t i = 0; i < n; ++i) t[i] += y[j] * V[j][i];
        precond(t, z);
        for (size_t i = 0; i < n; ++i) x[i] += z[i];
    }
    A(x, t);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
    res.rel_residual = std::sqrt(dotv(r, r)) / bnorm;
    res.converged = res.rel_residual <= rtol;
    return res;
}

GmresResult minres(const LinearMap& A, const LinearMap& M, const std::vector<double>& b, std::vector<double>& x,
                   double rtol, int max_iter)
{
    const size_t n = b.size();
    GmresResult res;
    if (x.size() != n) x.assign(n, 0.0);
    std::vector<double> r1(n), r2(n), y(n), v(n), w(n, 0.0), w1(n), w2(n, 0.0), t(n);
    A(x, t);
    for (size_t i = 0; i < n; ++i) r1[i] = b[i] - t[i];
    M(r1, y);
    const double beta1 = std::sqrt(std::max(0.0, dotv(r1, y)));
    if (beta1 == 0) {
        res.converged = true;
        return res;
    }
    r2 = r1;
    double oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1, cs = -1, sn = 0;
    while (res.iterations < max_iter) {
        ++res.iterations;
        const double s = 1.0 / beta;
        for (size_t i = 0; i < n; ++i) v[i] = s * y[i];
        A(v, y);
        if (res.iterations >= 2)
            for (size_t i = 0; i < n; ++i) y[i] -= (beta / oldb) * r1[i];
        const double alfa = dotv(v, y);
        for (size_t i = 0; i < n; ++i) y[i] -= (alfa / beta) * r2[i];
        std::swap(r1, r2);
        r2 = y;
        M(r2, y);
        oldb = beta;
        beta = std::sqrt(std::max(0.0, dotv(r2, y)));
        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        const double gamma = std::max(std::hypot(gbar, beta), 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;
        std::swap(w1, w2);
        std::swap(w2, w);
        for (size_t i = 0; i < n; ++i) {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        res.rel_residual = phibar / beta1;
        if (res.rel_residual <= rtol || beta == 0) {
            res.converged = true;
            break;
        }
    }
    return res;
}

} // namespace cnls
