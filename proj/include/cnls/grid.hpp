#pragma once
#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace cnls {

// Uniform periodic tensor grid, row-major with the last axis fastest.
struct Grid {
    int dim = 2;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> x0{0, 0, 0};
    double h = 1;

    size_t size() const { return size_t(n[0]) * n[1] * n[2]; }
    double coord(int d, int i) const { return x0[d] + i * h; }
    double length(int d) const { return n[d] * h; }
    double cell() const;  // h^dim
    void point(size_t idx, double* x) const;
    bool operator==(const Grid& o) const;

    // Box [lo - margin, hi + margin] with spacing ≤ h_target, sizes rounded
    // up to even 2^a 3^b 5^c.
    static Grid covering(int dim, const double* lo, const double* hi, double margin, double h_target);
};

struct Field2 {
    Grid grid;
    std::vector<double> u, v;
    Field2() = default;
    explicit Field2(const Grid& g) : grid(g), u(g.size(), 0.0), v(g.size(), 0.0) {}
};

void write_field_binary(std::ostream& os, const Field2& f);
Field2 read_field_binary(std::istream& is, int expected_dim = 0);
void write_field_binary(const std::string& path, const Field2& f);
Field2 read_field_binary(const std::string& path, int expected_dim = 0);
void write_field_csv(std::ostream& os, const Field2& f);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double sup_norm(const std::vector<double>& a);

// Fourier pseudo-spectral operators on one grid.  Not shareable across
// threads (owns work buffers); construct one per worker.
class Spectral {
public:
    explicit Spectral(const Grid& g);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const Grid& grid() const { return g_; }

    void laplacian(const double* in, double* out);
    void derivative(const double* in, int d, double* out);
    // out = (a(-Δ) + b)^{-1} in
    void helmholtz_inverse(const double* in, double* out, double a, double b);
    // out = (a(-Δ)) in + b in  — forward Helmholtz
    void helmholtz(const double* in, double* out, double a, double b);

    // Half spectrum (r2c layout) of a field, unnormalized.
    std::vector<std::complex<double>> spectrum(const double* in);
    size_t spectrum_size() const { return nc_; }
    // wavenumber component d of half-spectrum index m; nyquist flag per axis
    double k(size_t m, int d) const { return kk_[d][m]; }
    bool nyquist(size_t m) const { return nyq_[m]; }
    double weight(size_t m) const { return wt_[m]; }  // Hermitian multiplicity

private:
    Grid g_;
    size_t nr_, nc_;
    double* rbuf_;
    std::complex<double>* cbuf_;
    void* fwd_;
    void* bwd_;
    std::array<std::vector<double>, 3> kk_;
    std::vector<double> k2_, wt_;
    std::vector<char> nyq_;
    std::array<std::vector<char>, 3> nyq_axis_;
    void forward(const double* in);
    void backward(double* out);
};

// Evaluates the trigonometric interpolant of a field (and its gradient and
// Hessian) at arbitrary points.
class TrigInterp {
public:
    TrigInterp(Spectral& sp, const double* field);
    double value(const double* x) const;
    void gradient(const double* x, double* g) const;
    void hessian(const double* x, double* H) const;  // dim×dim row-major
private:
    const Spectral* sp_;
    std::vector<std::complex<double>> F_;
    template <class Fn>
    void sum(const double* x, Fn&& fn) const;
};

} // namespace cnls
