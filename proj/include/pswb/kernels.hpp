#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfr.hpp"
#include "weyl.hpp"

namespace pswb {

/// Bounded operator on a signal grid: (T f)_p = sum_q matrix(p, q) f_q (kernel already scaled by dx).
struct DiscreteOperator {
    Grid grid;
    MatC matrix;

    static DiscreteOperator identity(const Grid& g) { return {g, MatC::Identity(g.N, g.N)}; }

    /// pi(x0, xi0) with on-grid shift (samples) and modulation (dual bins).
    static DiscreteOperator tf_shift(const Grid& g, int shift_samples, int mod_bins)
    {
        MatC m = MatC::Zero(g.N, g.N);
        for (int k = 0; k < g.N; ++k) {
            int src = ((k - shift_samples) % g.N + g.N) % g.N;
            m(k, src) = std::exp(cd(0.0, 2.0 * kPi * mod_bins * g.dxi() * g.x(k)));
        }
        return {g, m};
    }

    /// Matrix of the unitary centered Fourier transform (self-dual grids).
    static DiscreteOperator fourier(const Grid& g)
    {
        MatC m(g.N, g.N);
        for (int q = 0; q < g.N; ++q) {
            Signal e(g);
            e[q] = 1.0;
            Signal F = pswb::fourier(e);
            for (int p = 0; p < g.N; ++p) m(p, q) = F[p];
        }
        return {g, m};
    }

    static DiscreteOperator weyl(const WeylOperator& op) { return {op.grid, op.M}; }

    Signal apply(const Signal& f) const
    {
        if (f.grid != grid) throw GridMismatch("signal grid does not match the operator");
        Eigen::Map<const VecC> in(f.v.data(), grid.N);
        VecC out = matrix * in;
        return Signal(grid, std::vector<cd>(out.data(), out.data() + out.size()));
    }

    DiscreteOperator operator*(const DiscreteOperator& o) const { return {grid, matrix * o.matrix}; }
};

/// K_A as an (N^2) x (N^2) matrix over phase-space points X = m N + k, acting on W-fields by
/// (K W)(X) = sum_Y K(X, Y) W(Y).
struct WignerKernel4D {
    Grid grid;
    MatC tensor;

    PhaseSpaceField apply(const PhaseSpaceField& W) const
    {
        if (!W.same_lattice(PhaseSpaceField(grid))) throw GridMismatch("field does not match the kernel grid");
        const Eigen::Index nn = static_cast<Eigen::Index>(grid.N) * grid.N;
        Eigen::Map<const VecC> in(W.values.data(), nn);
        PhaseSpaceField out(grid);
        Eigen::Map<VecC>(out.values.data(), nn) = tensor * in;
        return out;
    }
};

inline constexpr int kMaxKernelN = 64;

/// Column Y of K_A is L(T L^{-1}(e_Y) T^H): the representation conjugates F -> T F T^H.
inline WignerKernel4D wigner_kernel(const DiscreteOperator& T, const TfrMap& kind)
{
    const Grid& g = T.grid;
    if (g.N > kMaxKernelN) throw SizeOverflow("Wigner kernels are limited to N <= 64");
    if (kind.grid != g) throw GridMismatch("representation grid does not match the operator");
    const int n = g.N;
    const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
    WignerKernel4D K{g, MatC(nn, nn)};
    const MatC Th = T.matrix.adjoint();
    PhaseSpaceField e(g);
    for (Eigen::Index y = 0; y < nn; ++y) {
        e.values.setZero();
        e.values.data()[y] = 1.0;
        MatCR F = kind.inverse(e);
        MatCR G = T.matrix * F * Th;
        PhaseSpaceField col = kind.forward(G);
        K.tensor.col(y) = Eigen::Map<const VecC>(col.values.data(), nn);
    }
    return K;
}

/// Relative L2 gap between W_A(Tf, Tg) and K_A W_A(f, g).
inline double intertwining_residual(const DiscreteOperator& T, const TfrMap& kind, const Signal& f, const Signal& g)
{
    WignerKernel4D K = wigner_kernel(T, kind);
    PhaseSpaceField lhs = kind.forward(outer(T.apply(f), T.apply(g)));
    PhaseSpaceField rhs = K.apply(kind.forward(outer(f, g)));
    return relative_distance(rhs, lhs);
}

/// Same kernel through the covariant route: reorder K_W(X, Y) to the doubled variables
/// (x, y, xi, -eta), multiply the 4-D spectrum by e^{-i pi B_{A'} zeta.zeta} and reorder back.
inline WignerKernel4D doubled_covariance_kernel(const SympMat<double>& A, const DiscreteOperator& T)
{
    const Grid& g = T.grid;
    if (g.N > 48) throw SizeOverflow("the covariant kernel route is limited to N <= 48");
    if (A.half_dim() != 2) throw DimensionError("covariant kernels need a 4x4 projection");
    if (!covariance_matrix(A)) throw NotCovariantError("A is not covariant");
    const MatD B = doubled_covariance_matrix(A);
    WignerKernel4D KW = wigner_kernel(T, TfrMap::wigner(g));
    const int n = g.N;
    const size_t N = static_cast<size_t>(n);
    auto flip = [n](int k) { return (n - k) % n; };
    std::vector<cd> buf(N * N * N * N);
    // doubled layout [x][y][xi][eta']
    auto at = [N](size_t a, size_t b, size_t c, size_t d) { return ((a * N + b) * N + c) * N + d; };
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int m2 = 0; m2 < n; ++m2)
                for (int k2 = 0; k2 < n; ++k2)
                    buf[at(m, m2, k, flip(k2))] = KW.tensor(m * n + k, m2 * n + k2);
    fft_nd(buf.data(), {n, n, n, n}, -1);
    const double d1 = 1.0 / (n * g.dx), d2 = 1.0 / (n * g.dxi());
    auto freq = [n](int k, double d) {
        int kc = k < n / 2 ? k : k - n;
        return kc == -n / 2 ? 0.0 : kc * d;
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const double z[4] = {freq(a, d1), freq(b, d1), freq(c, d2), freq(d, d2)};
                    double q = 0.0;
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j) q += B(i, j) * z[i] * z[j];
                    buf[at(a, b, c, d)] *= std::exp(cd(0.0, -kPi * q));
                }
    fft_nd(buf.data(), {n, n, n, n}, +1);
    const double inv = 1.0 / (static_cast<double>(n) * n * n * n);
    WignerKernel4D K{g, MatC(KW.tensor.rows(), KW.tensor.cols())};
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int m2 = 0; m2 < n; ++m2)
                for (int k2 = 0; k2 < n; ++k2)
                    K.tensor(m * n + k, m2 * n + k2) = buf[at(m, m2, k, flip(k2))] * inv;
    return K;
}

inline double relative_distance(const WignerKernel4D& a, const WignerKernel4D& b)
{
    double nb = b.tensor.norm();
    double d = (a.tensor - b.tensor).norm();
    return nb > 0 ? d / nb : d;
}

/// Raw little-endian f64 (re, im) pairs in row-major (X, Y) order, plus a JSON sidecar at path + ".json".
inline void write_kernel(const std::string& path, const WignerKernel4D& K, const std::string& kind)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    for (Eigen::Index r = 0; r < K.tensor.rows(); ++r)
        for (Eigen::Index c = 0; c < K.tensor.cols(); ++c) {
            double v[2] = {K.tensor(r, c).real(), K.tensor(r, c).imag()};
            out.write(reinterpret_cast<const char*>(v), sizeof v);
        }
    nlohmann::json side = {{"dims", {K.grid.N, K.grid.N, K.grid.N, K.grid.N}},
                           {"layout", "row-major [m][k][m2][k2], complex128 as (re, im) f64 pairs"},
                           {"grid", {{"N", K.grid.N}, {"dx", K.grid.dx}, {"dxi", K.grid.dxi()}}},
                           {"kind", kind}};
    std::ofstream sc(path + ".json");
    if (!sc) throw ParseError("cannot write " + path + ".json");
    sc << side.dump(2) << '\n';
}

inline WignerKernel4D read_kernel(const std::string& path)
{
    std::ifstream sc(path + ".json");
    if (!sc) throw ParseError("missing kernel sidecar " + path + ".json");
    nlohmann::json side;
    try {
        sc >> side;
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad kernel sidecar: ") + e.what());
    }
    Grid g(side.at("grid").at("N").get<int>(), side.at("grid").at("dx").get<double>());
    const Eigen::Index nn = static_cast<Eigen::Index>(g.N) * g.N;
    WignerKernel4D K{g, MatC(nn, nn)};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    for (Eigen::Index r = 0; r < nn; ++r)
        for (Eigen::Index c = 0; c < nn; ++c) {
            double v[2];
            if (!in.read(reinterpret_cast<char*>(v), sizeof v)) throw ParseError("kernel file truncated: " + path);
            K.tensor(r, c) = cd(v[0], v[1]);
        }
    return K;
}

} // namespace pswb
