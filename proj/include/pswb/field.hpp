#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "grid.hpp"

namespace pswb {

using MatCR = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Complex samples on a centered (x, xi) lattice; values(m, k) sits at (x_m, xi_k).
struct PhaseSpaceField {
    int nx = 0, nxi = 0;
    double dx = 0.0, dxi = 0.0;
    MatCR values;

    PhaseSpaceField() = default;
    PhaseSpaceField(int nx_, double dx_, int nxi_, double dxi_)
        : nx(nx_), nxi(nxi_), dx(dx_), dxi(dxi_), values(MatCR::Zero(nx_, nxi_))
    {
    }
    /// Field over the time-frequency plane of a signal grid.
    explicit PhaseSpaceField(const Grid& g) : PhaseSpaceField(g.N, g.dx, g.N, g.dxi()) {}

    double x(int m) const { return (m - nx / 2) * dx; }
    double xi(int k) const { return (k - nxi / 2) * dxi; }
    double x0() const { return x(0); }
    double xi0() const { return xi(0); }
    Grid x_grid() const { return Grid(nx, dx); }

    cd& operator()(int m, int k) { return values(m, k); }
    const cd& operator()(int m, int k) const { return values(m, k); }

    bool same_lattice(const PhaseSpaceField& o) const
    {
        return nx == o.nx && nxi == o.nxi && std::abs(dx - o.dx) <= 1e-15 * dx &&
               std::abs(dxi - o.dxi) <= 1e-15 * dxi;
    }
    void check_same(const PhaseSpaceField& o) const
    {
        if (!same_lattice(o)) throw GridMismatch("fields live on different lattices");
    }

    double norm2() const { return values.squaredNorm() * dx * dxi; }
    double norm() const { return std::sqrt(norm2()); }

    PhaseSpaceField& operator+=(const PhaseSpaceField& o)
    {
        check_same(o);
        values += o.values;
        return *this;
    }
    PhaseSpaceField& operator-=(const PhaseSpaceField& o)
    {
        check_same(o);
        values -= o.values;
        return *this;
    }
    friend PhaseSpaceField operator+(PhaseSpaceField a, const PhaseSpaceField& b) { return a += b; }
    friend PhaseSpaceField operator-(PhaseSpaceField a, const PhaseSpaceField& b) { return a -= b; }
    friend PhaseSpaceField operator*(cd c, PhaseSpaceField a)
    {
        a.values *= c;
        return a;
    }

    PhaseSpaceField real_part() const
    {
        PhaseSpaceField r = *this;
        r.values = values.real().cast<cd>();
        return r;
    }
    PhaseSpaceField abs2() const
    {
        PhaseSpaceField r = *this;
        r.values = values.cwiseAbs2().cast<cd>();
        return r;
    }

    /// Central n x n block (same spacings).
    PhaseSpaceField crop(int n) const
    {
        if (n > nx || n > nxi || n % 2) throw DimensionError("crop size must be even and fit the field");
        PhaseSpaceField r(n, dx, n, dxi);
        r.values = values.block(nx / 2 - n / 2, nxi / 2 - n / 2, n, n);
        return r;
    }
};

/// <F, G> = sum F conj(G) dx dxi.
inline cd inner(const PhaseSpaceField& a, const PhaseSpaceField& b)
{
    a.check_same(b);
    cd s = (a.values.array() * b.values.array().conjugate()).sum();
    return s * (a.dx * a.dxi);
}

inline double distance(const PhaseSpaceField& a, const PhaseSpaceField& b) { return (a - b).norm(); }

inline double relative_distance(const PhaseSpaceField& a, const PhaseSpaceField& b)
{
    double n = b.norm();
    return n > 0 ? distance(a, b) / n : distance(a, b);
}

inline double relative_distance_up_to_phase(const PhaseSpaceField& a, const PhaseSpaceField& b)
{
    cd ip = inner(a, b);
    cd ph = std::abs(ip) > 0 ? std::conj(ip) / std::abs(ip) : cd(1.0);
    return relative_distance(ph * a, b);
}

inline double sup_distance(const PhaseSpaceField& a, const PhaseSpaceField& b)
{
    a.check_same(b);
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

// ---- line resampling ----

namespace detail {

/// out(u) = in(u + delta) along a line, using a 2x zero-padded trigonometric interpolant
/// (content leaving the window is dropped, nothing wraps in).
inline void padded_shift(cd* data, int n, int stride, double delta, std::vector<cd>& buf)
{
    if (std::abs(delta) < 1e-14) return;
    double r = std::round(delta);
    if (std::abs(delta - r) < 1e-12) {
        const int s = static_cast<int>(r);
        buf.assign(static_cast<size_t>(n), cd(0.0));
        for (int u = 0; u < n; ++u) {
            int src = u + s;
            if (src >= 0 && src < n) buf[u] = data[static_cast<size_t>(src) * stride];
        }
        for (int u = 0; u < n; ++u) data[static_cast<size_t>(u) * stride] = buf[u];
        return;
    }
    const int m = 2 * n;
    buf.assign(static_cast<size_t>(m), cd(0.0));
    for (int u = 0; u < n; ++u) buf[u + n / 2] = data[static_cast<size_t>(u) * stride];
    fft(buf.data(), m, -1);
    for (int k = 0; k < m; ++k) {
        int kc = k < m / 2 ? k : k - m;
        double ph = 2.0 * kPi * kc * delta / m;
        buf[k] *= kc == -m / 2 ? cd(std::cos(ph)) : cd(std::cos(ph), std::sin(ph));
    }
    fft(buf.data(), m, +1);
    for (int u = 0; u < n; ++u) data[static_cast<size_t>(u) * stride] = buf[u + n / 2] / static_cast<double>(m);
}

/// out(u) = in(scale * (u - n/2) + n/2) along a line, band-limited, zero outside.
inline void padded_scale(cd* data, int n, int stride, double scale, std::vector<cd>& buf)
{
    if (std::abs(scale - 1.0) < 1e-15) return;
    if (std::abs(scale + 1.0) < 1e-15) {
        buf.resize(static_cast<size_t>(n));
        for (int u = 0; u < n; ++u) buf[u] = data[static_cast<size_t>((n - u) % n) * stride];
        for (int u = 0; u < n; ++u) data[static_cast<size_t>(u) * stride] = buf[u];
        return;
    }
    const int m = 2 * n;
    buf.assign(static_cast<size_t>(m), cd(0.0));
    for (int u = 0; u < n; ++u) buf[u + n / 2] = data[static_cast<size_t>(u) * stride];
    fft(buf.data(), m, -1);
    std::vector<cd> out(static_cast<size_t>(n));
    for (int u = 0; u < n; ++u) {
        double pos = scale * (u - n / 2) + n / 2 + n / 2; // padded fractional index
        cd acc = 0.0;
        for (int k = 0; k < m; ++k) {
            int kc = k < m / 2 ? k : k - m;
            double ph = 2.0 * kPi * kc * pos / m;
            acc += kc == -m / 2 ? buf[k] * std::cos(ph) : buf[k] * cd(std::cos(ph), std::sin(ph));
        }
        out[u] = acc / static_cast<double>(m);
    }
    for (int u = 0; u < n; ++u) data[static_cast<size_t>(u) * stride] = out[u];
}

// elementary pullbacks G(X) = F(M X)

inline void pull_lower_shear(PhaseSpaceField& f, double l) // F(x, l x + xi)
{
    std::vector<cd> buf;
    for (int m = 0; m < f.nx; ++m)
        padded_shift(f.values.data() + static_cast<size_t>(m) * f.nxi, f.nxi, 1, l * f.x(m) / f.dxi, buf);
}

inline void pull_upper_shear(PhaseSpaceField& f, double u) // F(x + u xi, xi)
{
    std::vector<cd> buf;
    for (int k = 0; k < f.nxi; ++k) padded_shift(f.values.data() + k, f.nx, f.nxi, u * f.xi(k) / f.dx, buf);
}

inline void pull_scale(PhaseSpaceField& f, double d1, double d2) // F(d1 x, d2 xi)
{
    std::vector<cd> buf;
    if (std::abs(d1 - 1.0) > 1e-15)
        for (int k = 0; k < f.nxi; ++k) padded_scale(f.values.data() + k, f.nx, f.nxi, d1, buf);
    if (std::abs(d2 - 1.0) > 1e-15)
        for (int m = 0; m < f.nx; ++m)
            padded_scale(f.values.data() + static_cast<size_t>(m) * f.nxi, f.nxi, 1, d2, buf);
}

inline void pull_J(PhaseSpaceField& f) // F(xi, -x)
{
    if (f.nx != f.nxi || std::abs(f.dx - f.dxi) > 1e-15 * f.dx)
        throw GridMismatch("rotation pullback needs a square self-dual lattice");
    const int n = f.nx;
    MatCR out(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) out(m, k) = f.values(k, (n - m) % n);
    f.values = std::move(out);
}

} // namespace detail

/// G(X) = F(M X) for an invertible 2x2 M. Unit-determinant M uses three shears; otherwise
/// an LDU split with band-limited axis rescaling. Off-window content is dropped.
inline PhaseSpaceField pullback(const PhaseSpaceField& F, const MatD& M)
{
    if (M.rows() != 2 || M.cols() != 2) throw DimensionError("pullback needs a 2x2 matrix");
    const double a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-14) throw SingularMatrix("pullback matrix is singular");
    PhaseSpaceField G = F;
    const double tiny = 1e-12;
    // P_{XY} = P_Y after P_X, so factors are applied left to right
    if (std::abs(det - 1.0) < 1e-12 && (std::abs(c) > tiny || std::abs(b) > tiny)) {
        const bool use_c = std::abs(c) > tiny &&
                           (std::abs(b) <= tiny ||
                            std::max(std::abs((a - 1) / c), std::abs((d - 1) / c)) <=
                                std::max(std::abs((d - 1) / b), std::abs((a - 1) / b)) + 1e-12);
        if (use_c) {
            // M = U_{(a-1)/c} V_c U_{(d-1)/c}
            detail::pull_upper_shear(G, (a - 1) / c);
            detail::pull_lower_shear(G, c);
            detail::pull_upper_shear(G, (d - 1) / c);
        } else {
            // M = V_{(d-1)/b} U_b V_{(a-1)/b}
            detail::pull_lower_shear(G, (d - 1) / b);
            detail::pull_upper_shear(G, b);
            detail::pull_lower_shear(G, (a - 1) / b);
        }
        return G;
    }
    if (std::abs(a) > tiny) {
        // M = [[1,0],[c/a,1]] diag(a, det/a) [[1,b/a],[0,1]]
        detail::pull_lower_shear(G, c / a);
        detail::pull_scale(G, a, det / a);
        detail::pull_upper_shear(G, b / a);
        return G;
    }
    // M = J M' with M' = J^{-1} M
    detail::pull_J(G);
    MatD Jinv(2, 2);
    Jinv << 0, -1, 1, 0;
    return pullback(G, Jinv * M);
}

/// Exact on-grid translation G(x, xi) = F(x - sx dx, xi - sk dxi), periodic.
inline PhaseSpaceField translate(const PhaseSpaceField& F, int sx, int sk)
{
    PhaseSpaceField G = F;
    for (int m = 0; m < F.nx; ++m)
        for (int k = 0; k < F.nxi; ++k)
            G(m, k) = F(((m - sx) % F.nx + F.nx) % F.nx, ((k - sk) % F.nxi + F.nxi) % F.nxi);
    return G;
}

// ---- export ----

inline void write_field_csv(const std::string& path, const PhaseSpaceField& F)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << "m,k,x,xi,re,im\n";
    for (int m = 0; m < F.nx; ++m)
        for (int k = 0; k < F.nxi; ++k)
            out << m << ',' << k << ',' << format_double(F.x(m)) << ',' << format_double(F.xi(k)) << ','
                << format_double(F(m, k).real()) << ',' << format_double(F(m, k).imag()) << '\n';
}

inline PhaseSpaceField read_field_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open field file " + path);
    std::string line;
    struct Row {
        int m, k;
        double x, xi;
        cd v;
    };
    std::vector<Row> rows;
    int mmax = -1, kmax = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'm') continue;
        std::stringstream ls(line);
        std::string c[6];
        for (auto& cell : c)
            if (!std::getline(ls, cell, ',')) throw ParseError("field row needs m,k,x,xi,re,im: " + line);
        try {
            Row r{parse_int(c[0]), parse_int(c[1]), parse_double(c[2]), parse_double(c[3]),
                  cd(parse_double(c[4]), parse_double(c[5]))};
            mmax = std::max(mmax, r.m);
            kmax = std::max(kmax, r.k);
            rows.push_back(r);
        } catch (const std::exception&) {
            throw ParseError("bad number in field row: " + line);
        }
    }
    const int nx = mmax + 1, nxi = kmax + 1;
    if (nx < 2 || nxi < 2 || static_cast<size_t>(nx) * nxi != rows.size())
        throw ParseError("field file is not a full lattice: " + path);
    double dx = 0, dxi = 0;
    for (const auto& r : rows) {
        if (r.m == 1 && r.k == 0) dx = r.x;
        if (r.m == 0 && r.k == 1) dxi = r.xi;
    }
    double x0 = rows.front().x, xi0 = rows.front().xi;
    dx -= x0;
    dxi -= xi0;
    PhaseSpaceField F(nx, dx, nxi, dxi);
    for (const auto& r : rows) {
        if (r.m < 0 || r.k < 0) throw ParseError("negative index in field file");
        F(r.m, r.k) = r.v;
    }
    return F;
}

/// Binary PGM (P5, 16-bit big-endian), magnitude normalized to the maximum; rows are xi from top.
inline void write_field_pgm(const std::string& path, const PhaseSpaceField& F)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << "P5\n" << F.nx << ' ' << F.nxi << "\n65535\n";
    double mx = F.values.cwiseAbs().maxCoeff();
    if (!(mx > 0)) mx = 1.0;
    for (int k = F.nxi - 1; k >= 0; --k)
        for (int m = 0; m < F.nx; ++m) {
            auto v = static_cast<std::uint16_t>(std::lround(65535.0 * std::abs(F(m, k)) / mx));
            unsigned char b[2] = {static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v & 0xff)};
            out.write(reinterpret_cast<const char*>(b), 2);
        }
}

} // namespace pswb
