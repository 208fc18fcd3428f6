#include "cnls/profiles.hpp"
#include "cnls/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace cnls {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using State = std::array<double, 2>;

// Integrates from the origin series until the orbit overshoots (w < 0) or
// turns back up (w' > 0).  Returns +1 for overshoot, -1 for undershoot, 0 if
// neither happened by r_end.
int shoot_once(int dim, double a, double r_end, std::vector<std::pair<double, State>>* path = nullptr)
{
    namespace ode = boost::numeric::odeint;
    const double r0 = 1e-6;
    const double c = (a - a * a * a) / dim;
    State y{a + 0.5 * c * r0 * r0, c * r0};
    auto rhs = [dim](const State& s, State& ds, double r) {
        ds[0] = s[1];
        ds[1] = -(dim - 1) / r * s[1] + s[0] - s[0] * s[0] * s[0];
    };
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, 1e-4);
    if (path) path->push_back({r0, y});
    while (stepper.current_time() < r_end) {
        stepper.do_step(rhs);
        const State& s = stepper.current_state();
        if (path) path->push_back({stepper.current_time(), s});
        if (s[0] < 0) return 1;
        if (s[1] > 0) return -1;
    }
    return 0;
}

} // namespace

double shoot_w0(int dim, double lo, double hi, double r_end)
{
    if (shoot_once(dim, lo, r_end) != -1 || shoot_once(dim, hi, r_end) != 1)
        throw SolverError("ground state: shooting bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] does not contain a decaying solution");
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        double m = 0.5 * (lo + hi);
        int s = shoot_once(dim, m, r_end);
        if (s == 1)
            hi = m;
        else
            lo = m;  // undershoot, or undecided at r_end (treated as low)
    }
    return 0.5 * (lo + hi);
}

void GroundState::finalize()
{
    cheb = std::make_shared<ChebRadial>(static_cast<int>(r_grid.size()) - 1, r_max, dim);
    table = RadialTable(*cheb, vec(), dim);
}

double GroundState::moment(int p, int m) const
{
    VectorXd f = vec();
    VectorXd g = f.array().pow(p) * cheb->r().array().pow(2 * m);
    return cheb->integrate(g);
}

double GroundState::grad_sq() const
{
    VectorXd d = cheb->D1() * vec();
    return cheb->integrate(d.array().square().matrix());
}

GroundState solve_ground_state(int dim, double r_max, int n_nodes, double tol)
{
    if (dim < 1 || dim > 3) throw ConfigError("ground state: dim must be 1, 2 or 3");
    if (r_max < 15) throw ConfigError("ground state: r_max must be >= 15");
    if (n_nodes < 400) throw ConfigError("ground state: n_nodes must be >= 400");
    if (!(tol > 0)) throw ConfigError("ground state: tol must be positive");

    double a = shoot_w0(dim);
    std::vector<std::pair<double, State>> path;
    // run slightly below the root so the orbit stays positive and monotone
    shoot_once(dim, std::nextafter(a, 0.0), 9.0, &path);

    ChebRadial cheb(n_nodes, r_max, dim);
    const VectorXd& r = cheb.r();
    const double r_sw = std::min(6.0, path.back().first);
    double w_sw = 0;
    VectorXd w(n_nodes + 1);
    {
        size_t k = 0;
        for (int i = 0; i <= n_nodes; ++i) {
            if (r[i] <= r_sw) {
                while (k + 1 < path.size() && path[k + 1].first < r[i]) ++k;
                const auto& p0 = path[k];
                const auto& p1 = path[std::min(k + 1, path.size() - 1)];
                double t = p1.first > p0.first ? (r[i] - p0.first) / (p1.first - p0.first) : 0.0;
                w[i] = (1 - t) * p0.second[0] + t * p1.second[0];
                w_sw = w[i];
            } else {
                w[i] = w_sw * std::exp(-(r[i] - r_sw)) * std::pow(r_sw / r[i], 0.5 * (dim - 1));
            }
        }
    }

    MatrixXd L = cheb.laplacian(dim);
    const MatrixXd& D1 = cheb.D1();
    const double rob = cheb.robin(dim);
    auto residual = [&](const VectorXd& v) {
        VectorXd F = L * v - v + v.array().cube().matrix();
        F[0] = D1.row(0).dot(v);
        F[n_nodes] = D1.row(n_nodes).dot(v) + rob * v[n_nodes];
        return F;
    };
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        VectorXd F = residual(w);
        MatrixXd J = L;
        J.diagonal().array() += -1.0 + 3.0 * w.array().square();
        J.row(0) = D1.row(0);
        J.row(n_nodes) = D1.row(n_nodes);
        J(n_nodes, n_nodes) += rob;
        VectorXd dw = J.partialPivLu().solve(-F);
        w += dw;
        double step = dw.lpNorm<Eigen::Infinity>();
        if (step < 1e-13 || (step > 0.5 * best && step < 1e-10)) break;
        best = std::min(best, step);
    }

    GroundState gs;
    gs.dim = dim;
    gs.r_max = r_max;
    gs.r_grid.assign(r.data(), r.data() + r.size());
    gs.values.assign(w.data(), w.data() + w.size());
    VectorXd F = residual(w);
    gs.residual = F.segment(1, n_nodes - 1).lpNorm<Eigen::Infinity>();
    for (int i = 0; i < n_nodes; ++i)
        if (!(w[i] > 0)) throw SolverError("ground state: non-positive value at r = " + std::to_string(r[i]));
    // tail constant from the last quarter of the grid
    double sum = 0;
    int cnt = 0;
    for (int i = 0; i <= n_nodes; ++i)
        if (r[i] >= 0.5 * r_max && r[i] <= 0.75 * r_max) {
            sum += w[i] * std::exp(r[i]) * std::pow(r[i], 0.5 * (dim - 1));
            ++cnt;
        }
    gs.tail_constant = sum / cnt;
    if (gs.residual > tol)
        throw SolverError("ground state: residual " + std::to_string(gs.residual) + " above tolerance");
    gs.finalize();
    return gs;
}

void write_ground_state(std::ostream& os, const GroundState& gs)
{
    std::ostringstream hdr;
    hdr << std::setprecision(17) << "# dim=" << gs.dim << " rmax=" << gs.r_max << " tail=" << gs.tail_constant;
    os << hdr.str() << "\n";
    os << std::setprecision(17);
    for (size_t i = 0; i < gs.r_grid.size(); ++i) os << gs.r_grid[i] << " " << gs.values[i] << "\n";
}

GroundState read_ground_state(std::istream& is)
{
    GroundState gs;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# dim=", 0) != 0)
        throw ConfigError("ground state table: missing '# dim=<N> rmax=<R> tail=<C>' header");
    if (std::sscanf(line.c_str(), "# dim=%d rmax=%lf tail=%lf", &gs.dim, &gs.r_max, &gs.tail_constant) != 3)
        throw ConfigError("ground state table: malformed header");
    double r, w;
    while (is >> r >> w) {
        gs.r_grid.push_back(r);
        gs.values.push_back(w);
    }
    if (gs.r_grid.size() < 3) throw ConfigError("ground state table: too few rows");
    gs.finalize();
    return gs;
}

bool admissible(double mu1, double mu2, double beta)
{
    if (beta == 0) return false;
    double lo = std::min(mu1, mu2), hi = std::max(mu1, mu2);
    return (beta > -std::sqrt(mu1 * mu2) && beta < lo) || beta > hi;
}

std::string admissible_intervals(double mu1, double mu2)
{
    std::ostringstream os;
    os << std::setprecision(6) << "(" << -std::sqrt(mu1 * mu2) << ", " << std::min(mu1, mu2) << ") U ("
       << std::max(mu1, mu2) << ", inf), beta != 0";
    return os.str();
}

CouplingParams coupling_sigmas(double mu1, double mu2, double beta)
{
    if (!(mu1 > 0 && mu2 > 0)) throw ConfigError("coupling: mu1, mu2 must be positive");
    if (!admissible(mu1, mu2, beta)) {
        std::ostringstream os;
        os << "inadmissible coupling beta=" << beta << ": must lie in " << admissible_intervals(mu1, mu2);
        throw InadmissibleCoupling(os.str());
    }
    double den = beta * beta - mu1 * mu2;
    return {mu1, mu2, beta, std::sqrt((beta - mu2) / den), std::sqrt((beta - mu1) / den)};
}

double ProfilePair::residual() const
{
    const ChebRadial& c = *gs->cheb;
    VectorXd w = gs->vec();
    VectorXd u = cp.sigma1 * w, v = cp.sigma2 * w;
    MatrixXd L = c.laplacian(gs->dim);
    VectorXd r1 = -(L * u) + u - (cp.mu1 * u.array().cube() + cp.beta * u.array() * v.array().square()).matrix();
    VectorXd r2 = -(L * v) + v - (cp.mu2 * v.array().cube() + cp.beta * v.array() * u.array().square()).matrix();
    int n = c.n();
    return std::max(r1.segment(1, n - 1).lpNorm<Eigen::Infinity>(), r2.segment(1, n - 1).lpNorm<Eigen::Infinity>());
}

ProfilePair make_profiles(std::shared_ptr<const GroundState> gs, const CouplingParams& cp, int dim_expected)
{
    if (dim_expected && gs->dim != dim_expected)
        throw ConfigError("profiles: ground state has dim " + std::to_string(gs->dim) + ", expected " +
                          std::to_string(dim_expected));
    if (!admissible(cp.mu1, cp.mu2, cp.beta)) throw InadmissibleCoupling("profiles: inadmissible coupling");
    return {std::move(gs), cp};
}

} // namespace cnls
