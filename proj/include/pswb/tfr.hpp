#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "field.hpp"
#include "metaplectic.hpp"
#include "symplectic.hpp"

namespace pswb {

/// F(p, q) = f_p conj(g_q).
inline MatCR outer(const Signal& f, const Signal& g)
{
    f.check_same(g);
    const int n = f.grid.N;
    MatCR F(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) F(p, q) = f[p] * std::conj(g[q]);
    return F;
}

namespace detail {

/// Exact inverse of periodic_shift(data, n, delta).
inline void periodic_unshift(cd* data, int n, double delta, std::vector<cd>& scratch)
{
    double fl = std::floor(delta);
    double frac = delta - fl;
    int ishift = static_cast<int>(((static_cast<long long>(fl) % n) + n) % n);
    if (ishift != 0) {
        scratch.assign(data, data + n);
        for (int u = 0; u < n; ++u) data[(u + ishift) % n] = scratch[u];
    }
    if (frac > 1e-15) {
        scratch.assign(data, data + n);
        fft(scratch.data(), n, -1);
        for (int k = 0; k < n; ++k) {
            int kc = k < n / 2 ? k : k - n;
            if (kc == -n / 2) continue;
            scratch[k] *= std::exp(cd(0.0, -2.0 * kPi * kc * frac / n));
        }
        fft(scratch.data(), n, +1);
        const double inv = 1.0 / n;
        for (int k = 0; k < n; ++k) data[k] = scratch[k] * inv;
    }
}

inline bool is_half(double tau) { return std::abs(tau - 0.5) < 1e-15; }

/// Lag map: G(m, l) = F(m + tau l, m - (1 - tau) l) by fractional shifts, then a DFT over l.
/// At tau = 1/2 the Nyquist lag mixes F(a, b) and F(b, a) unitarily so that W(g, f) = conj W(f, g)
/// exactly and x-independent symbols stay Fourier multipliers.
inline PhaseSpaceField lag_forward(const MatCR& F, const Grid& g, double tau)
{
    const int n = g.N;
    if (F.rows() != n || F.cols() != n) throw DimensionError("lag map input must be N x N");
    MatCR G(n, n);
    std::vector<cd> s(static_cast<size_t>(n)), scratch;
    for (int j = 0; j < n; ++j) {
        const int l = j - n / 2;
        if (is_half(tau) && l == -n / 2) {
            for (int m = 0; m < n / 2; ++m) {
                int a = ((m - n / 4) % n + n) % n, b = (m + n / 4) % n;
                cd p = F(a, b), q = F(b, a);
                G(m, j) = 0.5 * (cd(1, 1) * p + cd(1, -1) * q);
                G(m + n / 2, j) = 0.5 * (cd(1, -1) * p + cd(1, 1) * q);
            }
            continue;
        }
        for (int u = 0; u < n; ++u) s[u] = F(u, ((u - l) % n + n) % n);
        periodic_shift(s.data(), n, tau * l, scratch);
        for (int m = 0; m < n; ++m) G(m, j) = s[m];
    }
    PhaseSpaceField W(g);
    std::vector<cd> row(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) {
        for (int j = 0; j < n; ++j) row[j] = G(m, j);
        centered_dft(row.data(), n, -1);
        for (int k = 0; k < n; ++k) W(m, k) = row[k] * g.dx;
    }
    return W;
}

inline MatCR lag_inverse(const PhaseSpaceField& W, const Grid& g, double tau)
{
    const int n = g.N;
    if (!W.same_lattice(PhaseSpaceField(g))) throw GridMismatch("field does not match the signal grid");
    MatCR G(n, n);
    std::vector<cd> row(static_cast<size_t>(n));
    const double scale = 1.0 / (n * g.dx);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) row[k] = W(m, k);
        centered_dft(row.data(), n, +1);
        for (int j = 0; j < n; ++j) G(m, j) = row[j] * scale;
    }
    MatCR F(n, n);
    std::vector<cd> s(static_cast<size_t>(n)), scratch;
    for (int j = 0; j < n; ++j) {
        const int l = j - n / 2;
        if (is_half(tau) && l == -n / 2) {
            for (int m = 0; m < n / 2; ++m) {
                int a = ((m - n / 4) % n + n) % n, b = (m + n / 4) % n;
                cd g1 = G(m, j), g2 = G(m + n / 2, j);
                F(a, b) = 0.5 * (cd(1, -1) * g1 + cd(1, 1) * g2);
                F(b, a) = 0.5 * (cd(1, 1) * g1 + cd(1, -1) * g2);
            }
            continue;
        }
        for (int m = 0; m < n; ++m) s[m] = G(m, j);
        periodic_unshift(s.data(), n, tau * l, scratch);
        for (int u = 0; u < n; ++u) F(u, ((u - l) % n + n) % n) = s[u];
    }
    return F;
}

/// V[m, k] = dx sum_j F(j, j - m + N/2) e^{-2 pi i xi_k x_j}.
inline PhaseSpaceField stft_forward(const MatCR& F, const Grid& g)
{
    const int n = g.N;
    if (F.rows() != n || F.cols() != n) throw DimensionError("STFT map input must be N x N");
    PhaseSpaceField V(g);
    std::vector<cd> h(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) {
        for (int j = 0; j < n; ++j) h[j] = F(j, ((j - m + n / 2) % n + n) % n);
        centered_dft(h.data(), n, -1);
        for (int k = 0; k < n; ++k) V(m, k) = h[k] * g.dx;
    }
    return V;
}

inline MatCR stft_inverse(const PhaseSpaceField& V, const Grid& g)
{
    const int n = g.N;
    MatCR F(n, n);
    std::vector<cd> h(static_cast<size_t>(n));
    const double scale = 1.0 / (n * g.dx);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) h[k] = V(m, k);
        centered_dft(h.data(), n, +1);
        for (int j = 0; j < n; ++j) F(j, ((j - m + n / 2) % n + n) % n) = h[j] * scale;
    }
    return F;
}

/// Multiply the periodic 2D spectrum by e^{-i pi sign B zeta.zeta}; Nyquist components count as 0.
inline void covariance_chirp(PhaseSpaceField& W, const MatD& B, double sign)
{
    const int nx = W.nx, nk = W.nxi;
    std::vector<cd> buf(static_cast<size_t>(std::max(nx, nk)));
    for (int m = 0; m < nx; ++m) centered_dft(W.values.data() + static_cast<size_t>(m) * nk, nk, -1);
    for (int k = 0; k < nk; ++k) {
        for (int m = 0; m < nx; ++m) buf[m] = W(m, k);
        centered_dft(buf.data(), nx, -1);
        for (int m = 0; m < nx; ++m) W(m, k) = buf[m];
    }
    const double d1 = 1.0 / (nx * W.dx), d2 = 1.0 / (nk * W.dxi);
    for (int m = 0; m < nx; ++m) {
        double z1 = m == 0 ? 0.0 : (m - nx / 2) * d1;
        for (int k = 0; k < nk; ++k) {
            double z2 = k == 0 ? 0.0 : (k - nk / 2) * d2;
            double q = B(0, 0) * z1 * z1 + (B(0, 1) + B(1, 0)) * z1 * z2 + B(1, 1) * z2 * z2;
            W(m, k) *= std::exp(cd(0.0, -kPi * sign * q));
        }
    }
    for (int m = 0; m < nx; ++m) centered_dft(W.values.data() + static_cast<size_t>(m) * nk, nk, +1);
    for (int k = 0; k < nk; ++k) {
        for (int m = 0; m < nx; ++m) buf[m] = W(m, k);
        centered_dft(buf.data(), nx, +1);
        for (int m = 0; m < nx; ++m) W(m, k) = buf[m];
    }
    W.values /= static_cast<double>(nx) * nk;
}

} // namespace detail

/// A unitary quadratic representation F = f conj(g)^T -> field, with its exact inverse.
struct TfrMap {
    enum Kind { Wigner, Tau, Stft, Covariant } kind = Wigner;
    Grid grid;
    double tau = 0.5;
    MatD B = MatD::Zero(2, 2);

    static TfrMap wigner(const Grid& g) { return {Wigner, g, 0.5, MatD::Zero(2, 2)}; }
    static TfrMap tau_wigner(const Grid& g, double t) { return {Tau, g, t, MatD::Zero(2, 2)}; }
    static TfrMap stft(const Grid& g) { return {Stft, g, 0.0, MatD::Zero(2, 2)}; }
    static TfrMap covariant(const Grid& g, const SympMat<double>& A)
    {
        if (A.half_dim() != 2) throw DimensionError("covariant representation needs a 4x4 projection");
        auto b = covariance_matrix(A);
        if (!b) throw NotCovariantError("A is not covariant");
        return {Covariant, g, 0.5, *b};
    }

    /// Same representation on another grid.
    TfrMap on(const Grid& g) const
    {
        TfrMap t = *this;
        t.grid = g;
        return t;
    }

    PhaseSpaceField forward(const MatCR& F) const
    {
        switch (kind) {
        case Stft: return detail::stft_forward(F, grid);
        case Covariant: {
            PhaseSpaceField W = detail::lag_forward(F, grid, 0.5);
            detail::covariance_chirp(W, B, 1.0);
            return W;
        }
        default: return detail::lag_forward(F, grid, tau);
        }
    }

    MatCR inverse(const PhaseSpaceField& W) const
    {
        switch (kind) {
        case Stft: return detail::stft_inverse(W, grid);
        case Covariant: {
            PhaseSpaceField V = W;
            detail::covariance_chirp(V, B, -1.0);
            return detail::lag_inverse(V, grid, 0.5);
        }
        default: return detail::lag_inverse(W, grid, tau);
        }
    }

    std::string name() const
    {
        switch (kind) {
        case Wigner: return "wigner";
        case Tau: return "tau(" + format_double(tau) + ")";
        case Stft: return "stft";
        case Covariant: return "covariant";
        }
        return "";
    }
};

inline PhaseSpaceField cross_wigner(const Signal& f, const Signal& g)
{
    return TfrMap::wigner(f.grid).forward(outer(f, g));
}

inline PhaseSpaceField wigner(const Signal& f) { return cross_wigner(f, f); }

inline PhaseSpaceField tau_wigner(const Signal& f, const Signal& g, double tau)
{
    if (!(tau >= 0.0 && tau <= 1.0)) throw DimensionError("tau must lie in [0, 1]");
    return TfrMap::tau_wigner(f.grid, tau).forward(outer(f, g));
}

inline PhaseSpaceField stft(const Signal& f, const Signal& window)
{
    return TfrMap::stft(f.grid).forward(outer(f, window));
}

/// W_A(f, g) = F^{-1}[e^{-i pi B_A zeta.zeta} F W(f, g)].
inline PhaseSpaceField covariant_wa(const Signal& f, const Signal& g, const SympMat<double>& A)
{
    return TfrMap::covariant(f.grid, A).forward(outer(f, g));
}

/// F_2 T_M (f conj g): W(x, xi) = |det M|^{1/2} int f((Mz)_1) conj(g((Mz)_2)) e^{-2 pi i xi y} dy, z = (x, y).
/// The change of variables is approximate (band-limited shears and rescaling).
inline PhaseSpaceField matrix_wigner(const Signal& f, const Signal& g, const MatD& M)
{
    f.check_same(g);
    const Grid& gr = f.grid;
    const int n = gr.N;
    PhaseSpaceField H(n, gr.dx, n, gr.dx);
    H.values = outer(f, g);
    const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    PhaseSpaceField P = pullback(H, M);
    PhaseSpaceField W(gr);
    std::vector<cd> row(static_cast<size_t>(n));
    const double c = std::sqrt(std::abs(det)) * gr.dx;
    for (int m = 0; m < n; ++m) {
        for (int q = 0; q < n; ++q) row[q] = P(m, q);
        centered_dft(row.data(), n, -1);
        for (int k = 0; k < n; ++k) W(m, k) = row[k] * c;
    }
    return W;
}

/// Periodic convolution of W(f, f) with Phi(X) = sqrt(2) e^{-2 pi |X|^2}.
inline PhaseSpaceField husimi(const Signal& f)
{
    PhaseSpaceField W = wigner(f);
    const int nx = W.nx, nk = W.nxi;
    MatCR ker(nx, nk);
    for (int m = 0; m < nx; ++m) {
        double x = (m < nx / 2 ? m : m - nx) * W.dx;
        for (int k = 0; k < nk; ++k) {
            double xi = (k < nk / 2 ? k : k - nk) * W.dxi;
            ker(m, k) = std::sqrt(2.0) * std::exp(-2.0 * kPi * (x * x + xi * xi));
        }
    }
    fft_nd(W.values.data(), {nx, nk}, -1);
    fft_nd(ker.data(), {nx, nk}, -1);
    W.values.array() *= ker.array();
    fft_nd(W.values.data(), {nx, nk}, +1);
    W.values *= W.dx * W.dxi / (static_cast<double>(nx) * nk);
    return W;
}

/// Relative L2 gap between W(Sf, Sg) and W(f, g) o S^{-1}.
inline double symplectic_covariance_check(const SympMat<double>& S, const Signal& f, const Signal& g,
                                          const QuadChirpSampler& pol = {})
{
    MetaplecticFactorization mp = factorize(S);
    PhaseSpaceField lhs = cross_wigner(apply(mp, f, pol), apply(mp, g, pol));
    PhaseSpaceField rhs = pullback(cross_wigner(f, g), symplectic_inverse(S).matrix());
    return relative_distance(lhs, rhs);
}

} // namespace pswb
