#include "cnls/grid.hpp"
#include "cnls/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>

namespace cnls {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

int good_size(int n)
{
    if (n < 2) n = 2;
    for (;; ++n) {
        if (n % 2) continue;
        int m = n;
        for (int p : {2, 3, 5})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

constexpr char kMagic[8] = {'C', 'N', 'L', 'S', 'F', '2', '\0', '\1'};
} // namespace

double Grid::cell() const { return std::pow(h, dim); }

void Grid::point(size_t idx, double* x) const
{
    for (int d = dim - 1; d >= 0; --d) {
        x[d] = x0[d] + h * double(idx % n[d]);
        idx /= n[d];
    }
}

bool Grid::operator==(const Grid& o) const
{
    return dim == o.dim && n == o.n && x0 == o.x0 && h == o.h;
}

Grid Grid::covering(int dim, const double* lo, const double* hi, double margin, double h_target)
{
    Grid g;
    g.dim = dim;
    // one spacing for all axes: take the finest requirement
    double h = h_target;
    for (int d = 0; d < dim; ++d) {
        double L = hi[d] - lo[d] + 2 * margin;
        int n = good_size(static_cast<int>(std::ceil(L / h_target)));
        h = std::min(h, L / n);
    }
    g.h = h;
    for (int d = 0; d < dim; ++d) {
        double L = hi[d] - lo[d] + 2 * margin;
        int n = good_size(static_cast<int>(std::ceil(L / h - 1e-9)));
        g.n[d] = n;
        // centre the box on the wells
        g.x0[d] = 0.5 * (lo[d] + hi[d]) - 0.5 * n * h;
    }
    return g;
}

void write_field_binary(std::ostream& os, const Field2& f)
{
    os.write(kMagic, 8);
    int32_t dim = f.grid.dim;
    os.write(reinterpret_cast<const char*>(&dim), 4);
    for (int d = 0; d < dim; ++d) {
        int32_t n = f.grid.n[d];
        os.write(reinterpret_cast<const char*>(&n), 4);
    }
    for (int d = 0; d < dim; ++d) os.write(reinterpret_cast<const char*>(&f.grid.x0[d]), 8);
    os.write(reinterpret_cast<const char*>(&f.grid.h), 8);
    os.write(reinterpret_cast<const char*>(f.u.data()), std::streamsize(8 * f.u.size()));
    os.write(reinterpret_cast<const char*>(f.v.data()), std::streamsize(8 * f.v.size()));
    if (!os) throw std::runtime_error("field write failed");
}

Field2 read_field_binary(std::istream& is, int expected_dim)
{
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("field: bad magic");
    int32_t dim;
    is.read(reinterpret_cast<char*>(&dim), 4);
    if (!is || dim < 1 || dim > 3) throw ConfigError("field: bad dimension in header");
    if (expected_dim && dim != expected_dim)
        throw ConfigError("field: header dim " + std::to_string(dim) + " != expected " + std::to_string(expected_dim));
    Grid g;
    g.dim = dim;
    for (int d = 0; d < dim; ++d) {
        int32_t n;
        is.read(reinterpret_cast<char*>(&n), 4);
        if (n < 1) throw ConfigError("field: bad size in header");
        g.n[d] = n;
    }
    for (int d = 0; d < dim; ++d) is.read(reinterpret_cast<char*>(&g.x0[d]), 8);
    is.read(reinterpret_cast<char*>(&g.h), 8);
    Field2 f(g);
    is.read(reinterpret_cast<char*>(f.u.data()), std::streamsize(8 * f.u.size()));
    is.read(reinterpret_cast<char*>(f.v.data()), std::streamsize(8 * f.v.size()));
    if (!is) throw ConfigError("field: truncated data");
    return f;
}

void write_field_binary(const std::string& path, const Field2& f)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_field_binary(os, f);
}

Field2 read_field_binary(const std::string& path, int expected_dim)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_field_binary(is, expected_dim);
}

void write_field_csv(std::ostream& os, const Field2& f)
{
    static const char* ax[] = {"x", "y", "z"};
    for (int d = 0; d < f.grid.dim; ++d) os << ax[d] << ",";
    os << "u,v\n" << std::setprecision(17);
    double x[3];
    for (size_t i = 0; i < f.grid.size(); ++i) {
        f.grid.point(i, x);
        for (int d = 0; d < f.grid.dim; ++d) os << x[d] << ",";
        os << f.u[i] << "," << f.v[i] << "\n";
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sup_norm(const std::vector<double>& a)
{
    double s = 0;
    for (double x : a) s = std::max(s, std::abs(x));
    return s;
}

Spectral::Spectral(const Grid& g) : g_(g)
{
    const int D = g.dim;
    int n[3] = {g.n[0], g.n[1], g.n[2]};
    nr_ = g.size();
    size_t last = size_t(n[D - 1] / 2 + 1);
    nc_ = nr_ / n[D - 1] * last;
    rbuf_ = fftw_alloc_real(nr_);
    cbuf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(nc_));
    {
        std::lock_guard<std::mutex> lk(planner_mutex());
        fwd_ = fftw_plan_dft_r2c(D, n, rbuf_, reinterpret_cast<fftw_complex*>(cbuf_), FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(D, n, reinterpret_cast<fftw_complex*>(cbuf_), rbuf_, FFTW_ESTIMATE);
    }
    for (int d = 0; d < 3; ++d) {
        kk_[d].assign(nc_, 0.0);
        nyq_axis_[d].assign(nc_, 0);
    }
    k2_.resize(nc_);
    wt_.resize(nc_);
    nyq_.assign(nc_, 0);
    const double two_pi = 2 * std::numbers::pi;
    for (size_t m = 0; m < nc_; ++m) {
        size_t rem = m;
        int idx[3] = {0, 0, 0};
        idx[D - 1] = int(rem % last);
        rem /= last;
        for (int d = D - 2; d >= 0; --d) {
            idx[d] = int(rem % n[d]);
            rem /= n[d];
        }
        double k2 = 0;
        bool nq = false;
        for (int d = 0; d < D; ++d) {
            int i = idx[d];
            int s = (i <= n[d] / 2) ? i : i - n[d];
            if (n[d] % 2 == 0 && i == n[d] / 2) {
                nq = true;
                nyq_axis_[d][m] = 1;
            }
            kk_[d][m] = two_pi * s / g.length(d);
            k2 += kk_[d][m] * kk_[d][m];
        }
        k2_[m] = k2;
        nyq_[m] = nq;
        int il = idx[D - 1];
        wt_[m] = (il == 0 || (n[D - 1] % 2 == 0 && il == n[D - 1] / 2)) ? 1.0 : 2.0;
    }
}

Spectral::~Spectral()
{
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(rbuf_);
    fftw_free(cbuf_);
}

void Spectral::forward(const double* in)
{
    std::memcpy(rbuf_, in, nr_ * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(fwd_));
}

void Spectral::backward(double* out)
{
    fftw_execute(static_cast<fftw_plan>(bwd_));
    const double s = 1.0 / double(nr_);
    for (size_t i = 0; i < nr_; ++i) out[i] = rbuf_[i] * s;
}

void Spectral::laplacian(const double* in, double* out)
{
    forward(in);
    for (size_t m = 0; m < nc_; ++m) cbuf_[m] *= -k2_[m];
    backward(out);
}

void Spectral::derivative(const double* in, int d, double* out)
{
    forward(in);
    for (size_t m = 0; m < nc_; ++m) {
        double k = kk_[d][m];
        // odd derivative: drop the Nyquist mode along this axis
        if (nyq_axis_[d][m]) k = 0;
        cbuf_[m] *= std::complex<double>(0.0, k);
    }
    backward(out);
}

void Spectral::helmholtz_inverse(const double* in, double* out, double a, double b)
{
    forward(in);
    for (size_t m = 0; m < nc_; ++m) cbuf_[m] /= (a * k2_[m] + b);
    backward(out);
}

void Spectral::helmholtz(const double* in, double* out, double a, double b)
{
    forward(in);
    for (size_t m = 0; m < nc_; ++m) cbuf_[m] *= (a * k2_[m] + b);
    backward(out);
}

std::vector<std::complex<double>> Spectral::spectrum(const double* in)
{
    forward(in);
    return std::vector<std::complex<double>>(cbuf_, cbuf_ + nc_);
}

TrigInterp::TrigInterp(Spectral& sp, const double* field) : sp_(&sp), F_(sp.spectrum(field))
{
    const double s = 1.0 / double(sp.grid().size());
    for (size_t m = 0; m < F_.size(); ++m) F_[m] *= (sp.nyquist(m) ? 0.0 : sp.weight(m) * s);
}

template <class Fn>
void TrigInterp::sum(const double* x, Fn&& fn) const
{
    const Grid& g = sp_->grid();
    for (size_t m = 0; m < F_.size(); ++m) {
        if (F_[m] == 0.0) continue;
        double ph = 0;
        for (int d = 0; d < g.dim; ++d) ph += sp_->k(m, d) * (x[d] - g.x0[d]);
        fn(m, F_[m] * std::complex<double>(std::cos(ph), std::sin(ph)));
    }
}

double TrigInterp::value(const double* x) const
{
    double s = 0;
    sum(x, [&](size_t, std::complex<double> c) { s += c.real(); });
    return s;
}

void TrigInterp::gradient(const double* x, double* gr) const
{
    const int D = sp_->grid().dim;
    for (int d = 0; d < D; ++d) gr[d] = 0;
    sum(x, [&](size_t m, std::complex<double> c) {
        for (int d = 0; d < D; ++d) gr[d] += -sp_->k(m, d) * c.imag();
    });
}

void TrigInterp::hessian(const double* x, double* H) const
{
    const int D = sp_->grid().dim;
    for (int i = 0; i < D * D; ++i) H[i] = 0;
    sum(x, [&](size_t m, std::complex<double> c) {
        for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b) H[a * D + b] += -sp_->k(m, a) * sp_->k(m, b) * c.real();
    });
}

} // namespace cnls
