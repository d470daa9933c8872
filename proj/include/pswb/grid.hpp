#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "linalg.hpp"

namespace pswb {

inline constexpr double kPi = 3.14159265358979323846;
inline const cd kI{0.0, 1.0};

/// Uniform centered grid x_k = (k - N/2) dx with dual spacing dxi = 1/(N dx).
struct Grid {
    int N = 0;
    double dx = 0.0;

    Grid() = default;
    Grid(int n, double spacing) : N(n), dx(spacing)
    {
        if (n < 8 || n % 4 != 0) throw DimensionError("grid size must be a multiple of 4 and at least 8");
        if (!(spacing > 0.0)) throw DimensionError("grid spacing must be positive");
    }

    /// dx = 1/sqrt(N), so that x and xi share spacing and extent.
    static Grid self_dual(int n) { return Grid(n, 1.0 / std::sqrt(static_cast<double>(n))); }

    double x0() const { return -0.5 * N * dx; }
    double x(int k) const { return (k - N / 2) * dx; }
    double dxi() const { return 1.0 / (N * dx); }
    double xi0() const { return -0.5 * N * dxi(); }
    double xi(int k) const { return (k - N / 2) * dxi(); }
    double x_max() const { return 0.5 * N * dx; }
    double xi_max() const { return 0.5 * N * dxi(); }

    bool operator==(const Grid& o) const { return N == o.N && std::abs(dx - o.dx) <= 1e-15 * dx; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Complex samples on a centered grid.
struct Signal {
    Grid grid;
    std::vector<cd> v;

    Signal() = default;
    explicit Signal(const Grid& g) : grid(g), v(static_cast<size_t>(g.N), cd(0.0)) {}
    Signal(const Grid& g, std::vector<cd> samples) : grid(g), v(std::move(samples))
    {
        if (static_cast<int>(v.size()) != g.N) throw DimensionError("sample count does not match grid");
    }

    static Signal from_function(const Grid& g, const std::function<cd(double)>& f)
    {
        Signal s(g);
        for (int k = 0; k < g.N; ++k) s.v[k] = f(g.x(k));
        return s;
    }

    int size() const { return grid.N; }
    cd& operator[](int k) { return v[static_cast<size_t>(k)]; }
    const cd& operator[](int k) const { return v[static_cast<size_t>(k)]; }

    double norm2() const
    {
        double s = 0.0;
        for (const auto& z : v) s += std::norm(z);
        return s * grid.dx;
    }
    double norm() const { return std::sqrt(norm2()); }

    Signal& operator+=(const Signal& o)
    {
        check_same(o);
        for (int k = 0; k < size(); ++k) v[k] += o.v[k];
        return *this;
    }
    Signal& operator-=(const Signal& o)
    {
        check_same(o);
        for (int k = 0; k < size(); ++k) v[k] -= o.v[k];
        return *this;
    }
    Signal& operator*=(cd c)
    {
        for (auto& z : v) z *= c;
        return *this;
    }
    friend Signal operator+(Signal a, const Signal& b) { return a += b; }
    friend Signal operator-(Signal a, const Signal& b) { return a -= b; }
    friend Signal operator*(cd c, Signal a) { return a *= c; }

    Signal conj() const
    {
        Signal s = *this;
        for (auto& z : s.v) z = std::conj(z);
        return s;
    }

    void check_same(const Signal& o) const
    {
        if (grid != o.grid) throw GridMismatch("signals live on different grids");
    }
};

/// <f, g> = sum f conj(g) dx.
inline cd inner(const Signal& f, const Signal& g)
{
    f.check_same(g);
    cd s = 0.0;
    for (int k = 0; k < f.size(); ++k) s += f[k] * std::conj(g[k]);
    return s * f.grid.dx;
}

inline double distance(const Signal& a, const Signal& b) { return (a - b).norm(); }

inline double relative_distance(const Signal& a, const Signal& b)
{
    double n = b.norm();
    return n > 0 ? distance(a, b) / n : distance(a, b);
}

/// Distance after removing the best global unit phase.
inline double distance_up_to_phase(const Signal& a, const Signal& b)
{
    cd ip = inner(a, b);
    cd ph = std::abs(ip) > 0 ? std::conj(ip) / std::abs(ip) : cd(1.0);
    return distance(ph * a, b);
}

inline double relative_distance_up_to_phase(const Signal& a, const Signal& b)
{
    double n = b.norm();
    return n > 0 ? distance_up_to_phase(a, b) / n : distance_up_to_phase(a, b);
}

// ---- centered transforms ----

/// Centered DFT over a length-N buffer: out_k = sum_j in_j e^{-2 pi i (j-N/2)(k-N/2)/N} (sign -1).
inline void centered_dft(cd* data, int n, int sign)
{
    // (-1)^j pre and (-1)^k post twiddles; e^{i pi N/2} = 1 for N divisible by 4
    for (int j = 1; j < n; j += 2) data[j] = -data[j];
    fft(data, n, sign);
    for (int k = 1; k < n; k += 2) data[k] = -data[k];
    if (n % 4 != 0) {
        cd ph = std::exp(cd(0.0, sign * kPi * n / 2.0));
        for (int k = 0; k < n; ++k) data[k] *= ph;
    }
}

/// Unitary Fourier transform: F(xi_k) = dx sum f(x_j) e^{-2 pi i x_j xi_k}, on the dual grid.
/// The result lives on Grid(N, dxi); on a self-dual grid it is the same grid.
inline Signal fourier(const Signal& f)
{
    Grid dual(f.grid.N, f.grid.dxi());
    Signal out(dual, f.v);
    centered_dft(out.v.data(), f.grid.N, -1);
    for (auto& z : out.v) z *= f.grid.dx;
    return out;
}

inline Signal inverse_fourier(const Signal& F)
{
    Grid dual(F.grid.N, F.grid.dxi());
    Signal out(dual, F.v);
    centered_dft(out.v.data(), F.grid.N, +1);
    for (auto& z : out.v) z *= F.grid.dx;
    return out;
}

/// Fractional periodic shift out(u) = in(u + delta) in samples.
/// The integer part is an exact rotation; the fractional part uses a Fourier phase
/// with unit multiplier on the Nyquist bin, so the map is unitary and preserves realness.
inline void periodic_shift(cd* data, int n, double delta, std::vector<cd>& scratch)
{
    double fl = std::floor(delta);
    double frac = delta - fl;
    int ishift = static_cast<int>(((static_cast<long long>(fl) % n) + n) % n);
    if (frac > 1e-15) {
        scratch.assign(data, data + n);
        fft(scratch.data(), n, -1);
        for (int k = 0; k < n; ++k) {
            int kc = k < n / 2 ? k : k - n;
            if (kc == -n / 2) continue;
            scratch[k] *= std::exp(cd(0.0, 2.0 * kPi * kc * frac / n));
        }
        fft(scratch.data(), n, +1);
        const double inv = 1.0 / n;
        for (int k = 0; k < n; ++k) data[k] = scratch[k] * inv;
    }
    if (ishift != 0) {
        scratch.assign(data, data + n);
        for (int u = 0; u < n; ++u) data[u] = scratch[(u + ishift) % n];
    }
}

/// Band-limited evaluation of the samples at arbitrary points, using the trigonometric
/// interpolant of the signal zero-padded to 2N.
inline std::vector<cd> bandlimited_eval(const Signal& f, const std::vector<double>& pts)
{
    const int n = f.grid.N, m = 2 * n;
    const double dx = f.grid.dx;
    std::vector<cd> pad(static_cast<size_t>(m), cd(0.0));
    // padded grid starts at x = -N dx, sample j of f sits at padded index j + N/2
    for (int j = 0; j < n; ++j) pad[j + n / 2] = f[j];
    fft(pad.data(), m, -1);
    const double start = -n * dx;
    std::vector<cd> out(pts.size());
    for (size_t p = 0; p < pts.size(); ++p) {
        double u = (pts[p] - start) / dx; // fractional padded index
        cd acc = 0.0;
        for (int k = 0; k < m; ++k) {
            int kc = k < m / 2 ? k : k - m;
            double ph = 2.0 * kPi * kc * u / m;
            if (kc == -m / 2)
                acc += pad[k] * std::cos(ph);
            else
                acc += pad[k] * cd(std::cos(ph), std::sin(ph));
        }
        out[p] = acc / static_cast<double>(m);
    }
    return out;
}

/// The same band-limited interpolant sampled at dx/2 over twice the extent (N -> 4N): the
/// zero-padded 2N spectrum is padded again to 4N. On a self-dual grid the result is self-dual.
inline Signal oversample2(const Signal& f)
{
    const int n = f.grid.N, m = 2 * n, big = 4 * n;
    std::vector<cd> pad(static_cast<size_t>(m), cd(0.0));
    for (int j = 0; j < n; ++j) pad[j + n / 2] = f[j];
    fft(pad.data(), m, -1);
    std::vector<cd> spec(static_cast<size_t>(big), cd(0.0));
    for (int k = 0; k < m; ++k) {
        int kc = k < m / 2 ? k : k - m;
        if (kc == -m / 2) {
            spec[m / 2] += 0.5 * pad[k];
            spec[big - m / 2] += 0.5 * pad[k];
        } else {
            spec[(kc + big) % big] = pad[k];
        }
    }
    fft(spec.data(), big, +1);
    const bool self_dual = std::abs(f.grid.dx * f.grid.dx * n - 1.0) < 1e-12;
    Grid g = self_dual ? Grid::self_dual(big) : Grid(big, 0.5 * f.grid.dx);
    Signal out(g);
    for (int i = 0; i < big; ++i) out[i] = spec[i] / static_cast<double>(m);
    return out;
}

// ---- corpus ----

inline std::vector<std::string> corpus_names()
{
    return {"gaussian", "hermite0", "hermite1", "hermite2", "hermite3",
            "chirp", "rect", "two-gaussians", "modulated-rect"};
}

/// L2-normalized Hermite function of order k adapted to e^{-pi x^2}.
inline double hermite_function(int k, double x)
{
    const double s = std::sqrt(2.0 * kPi) * x;
    double h0 = 1.0, h1 = 2.0 * s, hk = h0;
    if (k == 0)
        hk = h0;
    else if (k == 1)
        hk = h1;
    else {
        for (int j = 2; j <= k; ++j) {
            hk = 2.0 * s * h1 - 2.0 * (j - 1) * h0;
            h0 = h1;
            h1 = hk;
        }
    }
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    const double c = std::pow(2.0, 0.25) / std::sqrt(std::pow(2.0, k) * fact);
    return c * hk * std::exp(-kPi * x * x);
}

inline Signal corpus(const std::string& name, const Grid& g, double chirp_rate = 1.0)
{
    if (name == "gaussian")
        return Signal::from_function(g, [](double x) { return cd(std::exp(-kPi * x * x)); });
    if (name.rfind("hermite", 0) == 0 && name.size() == 8 && name[7] >= '0' && name[7] <= '3') {
        int k = name[7] - '0';
        return Signal::from_function(g, [k](double x) { return cd(hermite_function(k, x)); });
    }
    if (name == "chirp")
        return Signal::from_function(g, [chirp_rate](double x) {
            return std::exp(cd(-kPi * x * x, kPi * chirp_rate * x * x));
        });
    if (name == "rect")
        return Signal::from_function(g, [](double x) { return cd(std::abs(x) <= 1.0 + 1e-12 ? 1.0 : 0.0); });
    if (name == "two-gaussians")
        return Signal::from_function(g, [](double x) {
            return cd(std::exp(-kPi * (x - 2) * (x - 2)) + std::exp(-kPi * (x + 2) * (x + 2)));
        });
    if (name == "modulated-rect")
        return Signal::from_function(g, [](double x) {
            return std::abs(x) <= 1.0 + 1e-12 ? std::exp(cd(0.0, 2.0 * kPi * 2.0 * x)) : cd(0.0);
        });
    if (name == "chirped-rect")
        return Signal::from_function(g, [chirp_rate](double x) {
            return std::abs(x) <= 1.0 + 1e-12 ? std::exp(cd(0.0, kPi * chirp_rate * x * x)) : cd(0.0);
        });
    throw ParseError("unknown corpus signal: " + name);
}

/// Time-frequency shift pi(x0, xi0) f(x) = e^{2 pi i xi0 x} f(x - x0) for on-grid x0.
inline Signal tf_shift(const Signal& f, int shift_samples, int mod_bins)
{
    const Grid& g = f.grid;
    Signal out(g);
    const int n = g.N;
    for (int k = 0; k < n; ++k) {
        int src = ((k - shift_samples) % n + n) % n;
        out[k] = f[src] * std::exp(cd(0.0, 2.0 * kPi * mod_bins * g.dxi() * g.x(k)));
    }
    return out;
}

// ---- I/O ----

inline void write_signal_csv(const std::string& path, const Signal& s)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << "k,x,re,im\n";
    for (int k = 0; k < s.size(); ++k)
        out << k << ',' << format_double(s.grid.x(k)) << ',' << format_double(s[k].real()) << ','
            << format_double(s[k].imag()) << '\n';
}

inline Signal read_signal_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open signal file " + path);
    std::string line;
    std::vector<double> xs;
    std::vector<cd> vs;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
        std::stringstream ls(line);
        std::string c[4];
        for (auto& cell : c)
            if (!std::getline(ls, cell, ',')) throw ParseError("signal row needs k,x,re,im: " + line);
        try {
            xs.push_back(parse_double(c[1]));
            vs.emplace_back(parse_double(c[2]), parse_double(c[3]));
        } catch (const std::exception&) {
            throw ParseError("bad number in signal row: " + line);
        }
    }
    if (vs.size() < 8) throw ParseError("signal file too short: " + path);
    const int n = static_cast<int>(vs.size());
    double dx = (xs.back() - xs.front()) / (n - 1);
    // the endpoints lose an ulp or two; snap back so self-dual files reload onto the same grid
    if (std::abs(dx * dx * n - 1.0) < 1e-12) dx = Grid::self_dual(n).dx;
    Grid g(n, dx);
    if (std::abs(xs.front() - g.x(0)) > 1e-9 * std::max(1.0, std::abs(g.x(0))))
        throw GridMismatch("signal grid is not centered at the origin");
    return Signal(g, vs);
}

/// Raw little-endian: u64 N, then N pairs of f64 (re, im). The grid is taken as self-dual.
inline void write_signal_raw(const std::string& path, const Signal& s)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    std::uint64_t n = static_cast<std::uint64_t>(s.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const auto& z : s.v) {
        double re = z.real(), im = z.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

inline Signal read_signal_raw(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open signal file " + path);
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || n < 8 || n > (1u << 24)) throw ParseError("bad raw signal header in " + path);
    Signal s(Grid::self_dual(static_cast<int>(n)));
    for (auto& z : s.v) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof re);
        in.read(reinterpret_cast<char*>(&im), sizeof im);
        if (!in) throw ParseError("truncated raw signal " + path);
        z = cd(re, im);
    }
    return s;
}

inline Signal read_signal(const std::string& path)
{
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") return read_signal_raw(path);
    return read_signal_csv(path);
}

inline void write_signal(const std::string& path, const Signal& s)
{
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
        write_signal_raw(path, s);
    else
        write_signal_csv(path, s);
}

} // namespace pswb
