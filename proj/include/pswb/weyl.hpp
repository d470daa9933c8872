#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tfr.hpp"

namespace pswb {

using SymbolFn = std::function<cd(double, double)>;
/// Symbol on R^4 = (z1, z2, w1, w2), positions first.
using Symbol4Fn = std::function<cd(double, double, double, double)>;

inline PhaseSpaceField sample_symbol(const Grid& g, const SymbolFn& a)
{
    PhaseSpaceField s(g);
    for (int m = 0; m < s.nx; ++m)
        for (int k = 0; k < s.nxi; ++k) s(m, k) = a(s.x(m), s.xi(k));
    return s;
}

/// Discrete Weyl operator: (Op f)_p = sum_q M(p, q) f_q with M = dx L^{-1}(a),
/// L the Wigner map, so that <Op(a) f, g> = <a, W(g, f)> holds exactly.
struct WeylOperator {
    Grid grid;
    MatC M;

    Signal apply(const Signal& f) const
    {
        if (f.grid != grid) throw GridMismatch("signal grid does not match the operator");
        Eigen::Map<const VecC> in(f.v.data(), grid.N);
        VecC out = M * in;
        return Signal(grid, std::vector<cd>(out.data(), out.data() + out.size()));
    }

    WeylOperator operator*(const WeylOperator& o) const
    {
        if (o.grid != grid) throw GridMismatch("operators act on different grids");
        return {grid, M * o.M};
    }
    WeylOperator adjoint() const { return {grid, M.adjoint()}; }
};

inline WeylOperator weyl_operator(const PhaseSpaceField& a, const Grid& g)
{
    if (!a.same_lattice(PhaseSpaceField(g))) throw GridMismatch("symbol lattice does not match the signal grid");
    MatCR K = detail::lag_inverse(a, g, 0.5);
    return {g, MatC(K * g.dx)};
}

inline WeylOperator weyl_operator(const SymbolFn& a, const Grid& g) { return weyl_operator(sample_symbol(g, a), g); }

inline Signal weyl_apply(const PhaseSpaceField& a, const Signal& f) { return weyl_operator(a, f.grid).apply(f); }
inline Signal weyl_apply(const SymbolFn& a, const Signal& f) { return weyl_operator(a, f.grid).apply(f); }

/// Largest singular value by power iteration on M^H M.
inline double operator_norm(const MatC& M, int iters = 200, double tol = 1e-12)
{
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd(0.0, 1.0);
    VecC v(M.cols());
    for (auto& z : v) z = cd(nd(rng), nd(rng));
    v.normalize();
    double prev = 0.0;
    for (int i = 0; i < iters; ++i) {
        VecC w = M.adjoint() * (M * v);
        double lam = w.norm();
        if (lam == 0.0) return 0.0;
        v = w / lam;
        if (std::abs(lam - prev) <= tol * lam) {
            prev = lam;
            break;
        }
        prev = lam;
    }
    return std::sqrt(prev);
}

inline double operator_norm(const WeylOperator& op) { return operator_norm(op.M); }

/// Relative gap between S^{-1} Op(a) S f and Op(a o S) f.
inline double weyl_metaplectic_conjugation_check(const SympMat<double>& S, const SymbolFn& a, const Signal& f,
                                                 const QuadChirpSampler& pol = {})
{
    MetaplecticFactorization mp = factorize(S);
    Signal lhs = apply(inverse(mp), weyl_apply(a, apply(mp, f, pol)), pol);
    const MatD s = S.matrix();
    SymbolFn aS = [&](double x, double xi) { return a(s(0, 0) * x + s(0, 1) * xi, s(1, 0) * x + s(1, 1) * xi); };
    Signal rhs = weyl_apply(aS, f);
    return relative_distance(lhs, rhs);
}

// ---- lifted symbols ----

struct LiftedSymbols {
    Symbol4Fn b, b_tilde, c;
};

/// sigma(r, y, rho, eta) = a(r, rho), sigma~ = conj(a)(y, -eta); b = sigma o A^{-1}, b~ = sigma~ o A^{-1}, c = b b~.
inline LiftedSymbols lift_symbols(const SymbolFn& a, const SympMat<double>& A)
{
    if (A.half_dim() != 2) throw DimensionError("symbol lifting needs a 4x4 projection");
    auto Ainv = std::make_shared<MatD>(symplectic_inverse(A).matrix());
    auto pre = [Ainv](double z1, double z2, double w1, double w2) {
        Eigen::Vector4d v(z1, z2, w1, w2);
        return Eigen::Vector4d(*Ainv * v);
    };
    LiftedSymbols out;
    out.b = [a, pre](double z1, double z2, double w1, double w2) {
        auto u = pre(z1, z2, w1, w2);
        return a(u(0), u(2));
    };
    out.b_tilde = [a, pre](double z1, double z2, double w1, double w2) {
        auto u = pre(z1, z2, w1, w2);
        return std::conj(a(u(1), -u(3)));
    };
    out.c = [b = out.b, bt = out.b_tilde](double z1, double z2, double w1, double w2) {
        return b(z1, z2, w1, w2) * bt(z1, z2, w1, w2);
    };
    return out;
}

/// Weyl operator on an n x n lattice of spacing h (functions of two variables), with kernel
/// K(p, q) = sum_w c((z_p + z_q)/2, w) e^{2 pi i (z_p - z_q).w} dw^2 evaluated at exact midpoints,
/// lags taken in [-n/2, n/2) per axis. Stores K[p1, q1, p2, q2].
struct Weyl2D {
    int n = 0;
    double h = 0.0;
    std::vector<cd> K;

    PhaseSpaceField apply(const PhaseSpaceField& F) const
    {
        if (F.nx != n || F.nxi != n || std::abs(F.dx - h) > 1e-15 * h || std::abs(F.dxi - h) > 1e-15 * h)
            throw GridMismatch("field lattice does not match the 2D Weyl operator");
        PhaseSpaceField out = F;
        const size_t nn = static_cast<size_t>(n);
        for (int p1 = 0; p1 < n; ++p1)
            for (int p2 = 0; p2 < n; ++p2) {
                cd acc = 0.0;
                for (int q1 = 0; q1 < n; ++q1) {
                    const cd* row = &K[((p1 * nn + q1) * nn + p2) * nn];
                    for (int q2 = 0; q2 < n; ++q2) acc += row[q2] * F(q1, q2);
                }
                out(p1, p2) = acc * (h * h);
            }
        return out;
    }
};

inline Weyl2D weyl2d_operator(const Symbol4Fn& c, int n, double h)
{
    if (n > 64) throw SizeOverflow("2D Weyl operator is limited to n <= 64");
    Grid g(n, h);
    const double dw = g.dxi();
    const size_t nn = static_cast<size_t>(n);
    std::vector<cd> K(nn * nn * nn * nn, cd(0.0));
    auto idx = [nn](size_t a, size_t b, size_t c2, size_t d) { return ((a * nn + b) * nn + c2) * nn + d; };
    // midpoint of (q, l) is x_q + l h / 2, i.e. half-lattice index J = 2 q + l
    std::vector<cd> buf(nn * nn), col(nn);
    for (int J1 = -n / 2; J1 < 2 * n + n / 2; ++J1)
        for (int J2 = -n / 2; J2 < 2 * n + n / 2; ++J2) {
            const double z1 = 0.5 * h * (J1 - n), z2 = 0.5 * h * (J2 - n);
            for (int k1 = 0; k1 < n; ++k1)
                for (int k2 = 0; k2 < n; ++k2)
                    buf[k1 * nn + k2] = c(z1, z2, (k1 - n / 2) * dw, (k2 - n / 2) * dw);
            for (int k1 = 0; k1 < n; ++k1) centered_dft(&buf[k1 * nn], n, +1);
            for (int k2 = 0; k2 < n; ++k2) {
                for (int k1 = 0; k1 < n; ++k1) col[k1] = buf[k1 * nn + k2];
                centered_dft(col.data(), n, +1);
                for (int k1 = 0; k1 < n; ++k1) buf[k1 * nn + k2] = col[k1];
            }
            // buf[j1, j2] now holds the lag (j1 - n/2, j2 - n/2) coefficient
            for (int l1 = -n / 2; l1 < n / 2; ++l1) {
                if ((J1 - l1) % 2 != 0) continue;
                const int q1 = (J1 - l1) / 2;
                if (q1 < 0 || q1 >= n) continue;
                const int p1 = ((q1 + l1) % n + n) % n;
                for (int l2 = -n / 2; l2 < n / 2; ++l2) {
                    if ((J2 - l2) % 2 != 0) continue;
                    const int q2 = (J2 - l2) / 2;
                    if (q2 < 0 || q2 >= n) continue;
                    const int p2 = ((q2 + l2) % n + n) % n;
                    K[idx(p1, q1, p2, q2)] = buf[(l1 + n / 2) * nn + (l2 + n / 2)] * (dw * dw);
                }
            }
        }
    return {n, h, std::move(K)};
}

// ---- Fourier integral operators ----

/// K f(x) = |A|^{-1/2} int e^{2 pi i Phi(x, xi)} a(x, xi) f^(xi) dxi with
/// Phi = 1/2 C A^{-1} x^2 + A^{-1} x xi - 1/2 A^{-1} B xi^2, for S = [[A, B], [C, D]] with A != 0.
inline Signal fio_apply(const SympMat<double>& S, const SymbolFn& a, const Signal& f, const QuadChirpSampler& pol = {})
{
    if (S.half_dim() != 1) throw DimensionError("FIO supports n = 1 only");
    const MatD s = S.matrix();
    const double A = s(0, 0), B = s(0, 1), C = s(1, 0);
    if (std::abs(A) < 1e-12) throw Unsupported("FIO needs a free canonical map (A invertible)");
    const Grid& g = f.grid;
    Signal F = fourier(f);
    const double q1 = C / A, q2 = B / A;
    if (std::abs(q1) * g.x_max() * g.dx > 0.5 * (1.0 + pol.chirp_slack))
        throw AliasingRisk("FIO position chirp rate " + format_double(q1) + " aliases on this grid");
    if (std::abs(q2) * F.grid.x_max() * F.grid.dx > 0.5 * (1.0 + pol.chirp_slack))
        throw AliasingRisk("FIO frequency chirp rate " + format_double(q2) + " aliases on this grid");
    Signal out(g);
    const double amp = F.grid.dx / std::sqrt(std::abs(A));
    for (int m = 0; m < g.N; ++m) {
        const double x = g.x(m);
        cd acc = 0.0;
        for (int k = 0; k < g.N; ++k) {
            const double xi = F.grid.x(k);
            const double phi = 0.5 * q1 * x * x + x * xi / A - 0.5 * q2 * xi * xi;
            acc += std::exp(cd(0.0, 2.0 * kPi * phi)) * a(x, xi) * F[k];
        }
        out[m] = acc * amp;
    }
    return out;
}

} // namespace pswb
