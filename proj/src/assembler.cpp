#include "cnls/assembler.hpp"
#include "cnls/errors.hpp"

#include <cmath>

namespace cnls {

ScaleParams ScaleParams::from_epsilon(double eps)
{
    if (!(eps > 0)) throw ConfigError("scale: epsilon must be positive");
    return {eps, 1.0 / (eps * eps)};
}

ScaleParams ScaleParams::from_lambda(double lambda)
{
    if (!(lambda > 0)) throw ConfigError("scale: lambda must be positive");
    return {1.0 / std::sqrt(lambda), lambda};
}

Field2 scale_transform(const Field2& f, const ScaleParams& sp, ScaleDirection dir)
{
    const double s = dir == ScaleDirection::to_original ? sp.epsilon : 1.0 / sp.epsilon;
    Field2 out = f;
    for (auto& x : out.u) x *= s;
    for (auto& x : out.v) x *= s;
    return out;
}

void add_well(const Grid& g, double eps, const Eigen::VectorXd& xi, const ProfilePair& pp,
              const CorrectionField& corr, double* U, double* V)
{
    const double e4 = std::pow(eps, 4);
    const bool with_corr = !corr.zero();
    double x[3], y[3] = {0, 0, 0};
    for (size_t i = 0; i < g.size(); ++i) {
        g.point(i, x);
        double r2 = 0;
        for (int d = 0; d < g.dim; ++d) {
            y[d] = (x[d] - xi[d]) / eps;
            r2 += y[d] * y[d];
        }
        const double w = pp.gs->w(std::sqrt(r2));
        U[i] += pp.cp.sigma1 * w;
        V[i] += pp.cp.sigma2 * w;
        if (with_corr) {
            double a, b;
            corr.eval(y, a, b);
            U[i] += e4 * a;
            V[i] += e4 * b;
        }
    }
}

Field2 assemble_approximation(const ScaleParams& sp, const PeakSet& peaks, const ProfilePair& pp,
                              const std::vector<CorrectionField>& corrections, const Grid& g)
{
    const double eps = sp.epsilon;
    if (!corrections.empty() && corrections.size() != peaks.centers.size())
        throw ConfigError("assemble: one correction per peak required");
    // spectral discretization: ε/4 is ample (fields converge exponentially)
    if (g.h > 0.25 * eps * (1 + 1e-12)) throw ConfigError("assemble: grid spacing must be at most ε/4");
    for (const auto& c : peaks.centers) {
        if (c.size() != g.dim) throw ConfigError("assemble: peak dimension does not match the grid");
        for (int d = 0; d < g.dim; ++d) {
            const double lo = g.x0[d], hi = g.x0[d] + g.length(d);
            if (c[d] - lo < 10 * eps || hi - c[d] < 10 * eps)
                throw ConfigError("assemble: peak closer than 10ε to the box boundary");
        }
    }
    Field2 f(g);
    CorrectionField none;
    for (size_t l = 0; l < peaks.centers.size(); ++l)
        add_well(g, eps, peaks.centers[l], pp, corrections.empty() ? none : corrections[l], f.u.data(), f.v.data());
    return f;
}

Grid solution_grid(const PotentialSpec& spec, double eps, double margin_y, double h_y)
{
    double lo[3], hi[3];
    for (int d = 0; d < spec.dim; ++d) {
        lo[d] = 1e300;
        hi[d] = -1e300;
        for (const auto& w : spec.wells) {
            lo[d] = std::min(lo[d], w.xi[d]);
            hi[d] = std::max(hi[d], w.xi[d]);
        }
    }
    return Grid::covering(spec.dim, lo, hi, margin_y * eps, h_y * eps);
}

double field_mass(const Field2& f)
{
    double s = 0;
    for (size_t i = 0; i < f.u.size(); ++i) s += f.u[i] * f.u[i] + f.v[i] * f.v[i];
    return s * f.grid.cell();
}

} // namespace cnls
