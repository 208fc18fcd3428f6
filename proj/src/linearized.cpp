#include "cnls/linearized.hpp"
#include "cnls/errors.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace cnls {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SigmaEigenBasis sigma_eigen_decomposition(const CouplingParams& cp)
{
    SigmaEigenBasis b;
    const double s1 = cp.sigma1, s2 = cp.sigma2, s = std::sqrt(cp.s2());
    b.matrix << 3 * cp.mu1 * s1 * s1 + cp.beta * s2 * s2, 2 * cp.beta * s1 * s2, 2 * cp.beta * s1 * s2,
        3 * cp.mu2 * s2 * s2 + cp.beta * s1 * s1;
    b.e_parallel = {s1 / s, s2 / s};
    b.e_perp = {s2 / s, -s1 / s};
    b.lambda_parallel = 3.0;
    b.lambda_perp = 3.0 - 2.0 * cp.beta * cp.s2();
    return b;
}

LinearizedOperator::LinearizedOperator(const ProfilePair& pp, const Grid& g, const std::array<double, 3>& c)
    : cp_(pp.cp), sp_(std::make_unique<Spectral>(g))
{
    const size_t n = g.size();
    w_.resize(n);
    c11_.resize(n);
    c22_.resize(n);
    c12_.resize(n);
    tmp_.resize(n);
    const double s1 = cp_.sigma1, s2 = cp_.sigma2;
    double x[3];
    for (size_t i = 0; i < n; ++i) {
        g.point(i, x);
        double r2 = 0;
        for (int d = 0; d < g.dim; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        double w = pp.gs->w(std::sqrt(r2)), w2 = w * w;
        w_[i] = w;
        c11_[i] = (3 * cp_.mu1 * s1 * s1 + cp_.beta * s2 * s2) * w2;
        c22_[i] = (3 * cp_.mu2 * s2 * s2 + cp_.beta * s1 * s1) * w2;
        c12_[i] = 2 * cp_.beta * s1 * s2 * w2;
    }
}

void LinearizedOperator::apply(const double* a, const double* b, double* oa, double* ob)
{
    const size_t n = w_.size();
    sp_->laplacian(a, tmp_.data());
    for (size_t i = 0; i < n; ++i) oa[i] = -tmp_[i] + a[i] - c11_[i] * a[i] - c12_[i] * b[i];
    sp_->laplacian(b, tmp_.data());
    for (size_t i = 0; i < n; ++i) ob[i] = -tmp_[i] + b[i] - c22_[i] * b[i] - c12_[i] * a[i];
}

Field2 LinearizedOperator::apply(const Field2& in)
{
    if (!(in.grid == grid())) throw ConfigError("linearized: grid mismatch");
    Field2 out(in.grid);
    apply(in.u.data(), in.v.data(), out.u.data(), out.v.data());
    return out;
}

int harmonic_multiplicity(int dim, int ell)
{
    if (dim == 1) return ell <= 1 ? 1 : 0;
    if (dim == 2) return ell == 0 ? 1 : 2;
    return 2 * ell + 1;
}

namespace {

VectorXd w_on(const GroundState& gs, const ChebRadial& c)
{
    VectorXd w(c.n() + 1);
    for (int i = 0; i <= c.n(); ++i) w[i] = gs.w(c.r()[i]);
    return w;
}

struct BlockSpectrum {
    VectorXd mu;       // real parts, sorted by |.|
    MatrixXd vectors;  // interior eigenvectors, same order
};

BlockSpectrum block_spectrum(const ChebRadial& c, const VectorXd& w, int dim, int ell, double lam, bool vectors)
{
    int d = dim + 2 * ell;
    MatrixXd A = c.reduced(d, (lam * w.array().square()).matrix());
    Eigen::EigenSolver<MatrixXd> es(A, vectors);
    const int m = static_cast<int>(A.rows());
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    VectorXd ev = es.eigenvalues().real();
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(ev[a]) < std::abs(ev[b]); });
    BlockSpectrum out;
    out.mu.resize(m);
    if (vectors) out.vectors.resize(m, m);
    for (int i = 0; i < m; ++i) {
        out.mu[i] = ev[order[i]];
        if (vectors) out.vectors.col(i) = es.eigenvectors().col(order[i]).real();
    }
    return out;
}

} // namespace

std::vector<double> degeneracy_thresholds(const GroundState& gs, int ell, double lambda_max, int n_cheb)
{
    ChebRadial c(n_cheb, gs.r_max, gs.dim);
    VectorXd w = w_on(gs, c);
    int d = gs.dim + 2 * ell;
    MatrixXd A = c.reduced(d, VectorXd::Zero(n_cheb + 1));
    VectorXd w2 = w.segment(1, n_cheb - 1).array().square();
    MatrixXd B = A.partialPivLu().solve(MatrixXd(w2.asDiagonal()));
    Eigen::EigenSolver<MatrixXd> es(B, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        auto z = es.eigenvalues()[i];
        if (z.real() > 1e-6 && std::abs(z.imag()) < 1e-8 * std::abs(z.real())) {
            double L = 1.0 / z.real();
            if (L <= lambda_max) out.push_back(L);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

DegeneracyInfo near_degeneracy(const GroundState& gs, const CouplingParams& cp, double window)
{
    DegeneracyInfo info;
    info.lambda_perp = sigma_eigen_decomposition(cp).lambda_perp;
    info.distance = std::numeric_limits<double>::infinity();
    if (info.lambda_perp < 0.5) return info;  // below the first threshold (Λ = 1): no kernel possible
    for (int ell = 0; ell <= 12; ++ell) {
        if (harmonic_multiplicity(gs.dim, ell) == 0) break;
        auto th = degeneracy_thresholds(gs, ell, info.lambda_perp + 1.0);
        for (double L : th) {
            double dist = std::abs(L - info.lambda_perp);
            if (dist < info.distance) {
                info.distance = dist;
                info.nearest_threshold = L;
                info.nearest_ell = ell;
            }
        }
    }
    info.flagged = info.distance < window;
    return info;
}

SpectrumReport kernel_diagnostics(const ProfilePair& pp, int n_modes, int n_cheb, int ell_max)
{
    SpectrumReport rep;
    if (n_modes <= 0) return rep;
    const GroundState& gs = *pp.gs;
    const int dim = gs.dim;
    SigmaEigenBasis sb = sigma_eigen_decomposition(pp.cp);
    ChebRadial c1(n_cheb, gs.r_max, dim), c2(3 * n_cheb / 4, gs.r_max, dim);
    VectorXd w1 = w_on(gs, c1), w2 = w_on(gs, c2);

    // translation profile g = w'/r in the ℓ = 1 parallel block
    VectorXd gw(n_cheb + 1);
    for (int i = 0; i <= n_cheb; ++i) {
        double r = c1.r()[i];
        gw[i] = r > 0 ? gs.dw(r) / r : gs.table.deriv2(0.0);
    }
    VectorXd wq = c1.weights(dim + 2);

    struct Entry {
        double sv, angle;
        std::string block;
        int ell;
    };
    std::vector<Entry> all;
    double noise = 0;
    for (int blk = 0; blk < 2; ++blk) {
        double lam = blk == 0 ? sb.lambda_parallel : sb.lambda_perp;
        for (int ell = 0; ell <= ell_max; ++ell) {
            int mult = harmonic_multiplicity(dim, ell);
            if (mult == 0) continue;
            bool want_vec = blk == 0 && ell == 1;
            BlockSpectrum a = block_spectrum(c1, w1, dim, ell, lam, want_vec);
            BlockSpectrum b = block_spectrum(c2, w2, dim, ell, lam, false);
            int take = std::min<int>(n_modes, static_cast<int>(b.mu.size()));
            for (int i = 0; i < take; ++i) noise = std::max(noise, std::abs(a.mu[i] - b.mu[i]));
            for (int i = 0; i < take; ++i) {
                double angle = 90.0;
                if (want_vec) {
                    VectorXd g = c1.lift(dim + 2, a.vectors.col(i));
                    VectorXd gg = g.cwiseProduct(wq);
                    double ip = std::abs(gg.dot(gw));
                    double na = std::sqrt(g.cwiseProduct(wq).dot(g)), nb = std::sqrt(gw.cwiseProduct(wq).dot(gw));
                    angle = std::acos(std::min(1.0, ip / (na * nb))) * 180.0 / std::numbers::pi;
                }
                for (int k = 0; k < mult; ++k) all.push_back({std::abs(a.mu[i]), angle, blk ? "perp" : "parallel", ell});
            }
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return x.sv < y.sv; });
    rep.grid_error_scale = std::max(10.0 * noise, 1e-9);
    for (const auto& e : all) {
        if (e.sv < rep.grid_error_scale)
            ++rep.near_zero;
        else {
            rep.gap_ratio = e.sv / rep.grid_error_scale;
            break;
        }
    }
    for (int i = 0; i < n_modes && i < static_cast<int>(all.size()); ++i)
        rep.modes.push_back({i, all[i].sv, all[i].angle, all[i].block, all[i].ell});
    return rep;
}

std::string SpectrumReport::to_json() const
{
    nlohmann::json j;
    j["grid_error_scale"] = grid_error_scale;
    j["near_zero_count"] = near_zero;
    j["gap_ratio"] = gap_ratio;
    j["modes"] = nlohmann::json::array();
    for (const auto& m : modes)
        j["modes"].push_back({{"index", m.index},
                              {"singular_value", m.singular_value},
                              {"kernel_angle_deg", m.kernel_angle_deg},
                              {"block", m.block},
                              {"ell", m.ell}});
    return j.dump(2);
}

} // namespace cnls
