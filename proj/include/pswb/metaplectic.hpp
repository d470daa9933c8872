#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "grid.hpp"
#include "symplectic.hpp"

namespace pswb {

/// One generator: Fourier (projection J), Dilation(e) (projection D_e), Chirp(q) (projection V_q).
struct Factor {
    enum Kind { Fourier, Dilation, Chirp } kind;
    double param = 0.0;

    static Factor fourier() { return {Fourier, 0.0}; }
    static Factor dilation(double e) { return {Dilation, e}; }
    static Factor chirp(double q) { return {Chirp, q}; }

    MatD projection() const
    {
        MatD m(2, 2);
        switch (kind) {
        case Fourier: m << 0, 1, -1, 0; break;
        case Dilation: m << 1.0 / param, 0, 0, param; break;
        case Chirp: m << 1, 0, param, 1; break;
        }
        return m;
    }

    std::string str() const
    {
        switch (kind) {
        case Fourier: return "Fourier";
        case Dilation: return "Dilation(" + format_double(param) + ")";
        case Chirp: return "Chirp(" + format_double(param) + ")";
        }
        return "";
    }
};

/// Guards against chirps and dilations that would alias on the current grid.
struct QuadChirpSampler {
    double chirp_slack = 1e-9;      // allowed relative excess over |q| x_max dx <= 1/2
    double dilation_leak = 1e-10;   // allowed energy fraction pushed off the grid
};

/// Word F_1 F_2 ... F_k (matrix order); applied to signals right to left.
struct MetaplecticFactorization {
    std::vector<Factor> factors;
    cd phase{1.0, 0.0};

    MatD projection() const
    {
        MatD m = MatD::Identity(2, 2);
        for (const auto& f : factors) m = m * f.projection();
        return m;
    }

    std::string str() const
    {
        std::string s;
        for (const auto& f : factors) s += (s.empty() ? "" : " * ") + f.str();
        return s.empty() ? "Identity" : s;
    }
};

namespace detail {

inline void push_factor(std::vector<Factor>& w, Factor f, double tol = 1e-12)
{
    if (f.kind == Factor::Chirp && std::abs(f.param) <= tol) return;
    if (f.kind == Factor::Dilation && std::abs(f.param - 1.0) <= tol) return;
    w.push_back(f);
}

/// U_p = [[1,p],[0,1]] = D_{-1} J V_{-p} J.
inline void push_upper(std::vector<Factor>& w, double p, double tol = 1e-12)
{
    if (std::abs(p) <= tol) return;
    w.push_back(Factor::dilation(-1.0));
    w.push_back(Factor::fourier());
    w.push_back(Factor::chirp(-p));
    w.push_back(Factor::fourier());
}

inline double word_cost(const std::vector<Factor>& w)
{
    double rate = 0.0, pen = 0.0;
    for (const auto& f : w) {
        if (f.kind == Factor::Chirp) rate = std::max(rate, std::abs(f.param));
        if (f.kind == Factor::Dilation && std::abs(std::abs(f.param) - 1.0) > 1e-12) pen = 0.5;
    }
    return rate + pen;
}

/// Tracks c e^{-pi z x^2} through the word and returns the phase making <S phi, phi> >= 0.
inline cd gaussian_phase(const std::vector<Factor>& w)
{
    cd c = 1.0, z = 1.0;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        switch (it->kind) {
        case Factor::Chirp: z -= cd(0.0, it->param); break;
        case Factor::Fourier:
            c /= std::sqrt(z);
            z = 1.0 / z;
            break;
        case Factor::Dilation:
            c *= std::sqrt(std::abs(it->param));
            z *= it->param * it->param;
            break;
        }
    }
    cd ov = c / std::sqrt(z + 1.0);
    return std::abs(ov) > 0 ? std::conj(ov) / std::abs(ov) : cd(1.0);
}

} // namespace detail

/// Factor S in Sp(1) into generators. Several exact decompositions are tried and the one with
/// the smallest chirp rates (and no non-unit dilation when possible) is returned.
inline MetaplecticFactorization factorize(const SympMat<double>& S)
{
    if (S.half_dim() != 1) throw DimensionError("numeric factorization supports n = 1 only");
    if (!is_symplectic(S.matrix(), 1e-10)) throw NotSymplectic("factorize: matrix is not symplectic");
    const double a = S.matrix()(0, 0), b = S.matrix()(0, 1), c = S.matrix()(1, 0), d = S.matrix()(1, 1);
    const double tiny = 1e-12;
    std::vector<std::vector<Factor>> cands;
    if (std::abs(b) > tiny) {
        std::vector<Factor> w;
        detail::push_factor(w, Factor::chirp(d / b));
        detail::push_factor(w, Factor::dilation(1.0 / b));
        w.push_back(Factor::fourier());
        detail::push_factor(w, Factor::chirp(a / b));
        cands.push_back(w);

        std::vector<Factor> u;
        detail::push_factor(u, Factor::chirp((d - 1.0) / b));
        detail::push_upper(u, b);
        detail::push_factor(u, Factor::chirp((a - 1.0) / b));
        cands.push_back(u);
    }
    if (std::abs(c) > tiny) {
        std::vector<Factor> w;
        detail::push_upper(w, (a - 1.0) / c);
        detail::push_factor(w, Factor::chirp(c));
        detail::push_upper(w, (d - 1.0) / c);
        cands.push_back(w);
    }
    if (std::abs(a) > tiny) {
        std::vector<Factor> w;
        detail::push_factor(w, Factor::chirp(c / a));
        detail::push_factor(w, Factor::dilation(1.0 / a));
        detail::push_upper(w, b / a);
        cands.push_back(w);
    }
    const std::vector<Factor>* best = nullptr;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& w : cands) {
        double cost = detail::word_cost(w);
        if (best == nullptr || cost < best_cost - 1e-12 ||
            (std::abs(cost - best_cost) <= 1e-12 && w.size() < best->size())) {
            best = &w;
            best_cost = cost;
        }
    }
    MetaplecticFactorization out;
    out.factors = *best;
    out.phase = detail::gaussian_phase(out.factors);
    return out;
}

inline MetaplecticFactorization propagator_quadratic(const QuadraticForm& a, double t)
{
    return factorize(hamilton_flow(a, t));
}

namespace detail {

inline void require_self_dual(const Grid& g)
{
    if (std::abs(g.dx * g.dx * g.N - 1.0) > 1e-9)
        throw GridMismatch("metaplectic operators need a self-dual grid (dx = 1/sqrt(N))");
}

inline void apply_chirp(Signal& f, double q, const QuadChirpSampler& pol)
{
    const Grid& g = f.grid;
    if (std::abs(q) * g.x_max() * g.dx > 0.5 * (1.0 + pol.chirp_slack))
        throw AliasingRisk("chirp rate " + format_double(q) + " exceeds the grid Nyquist limit");
    for (int k = 0; k < g.N; ++k) f[k] *= std::exp(cd(0.0, kPi * q * g.x(k) * g.x(k)));
}

inline void apply_dilation(Signal& f, double e, const QuadChirpSampler& pol)
{
    const Grid& g = f.grid;
    const int n = g.N;
    if (std::abs(e - 1.0) <= 1e-15) return;
    if (std::abs(e + 1.0) <= 1e-15) {
        Signal r(g);
        for (int k = 0; k < n; ++k) r[k] = f[(n - k) % n];
        f = r;
        return;
    }
    const double total = f.norm2();
    if (total > 0) {
        double leak = 0.0;
        if (std::abs(e) < 1.0) {
            const double lim = std::abs(e) * g.x_max();
            for (int k = 0; k < n; ++k)
                if (std::abs(g.x(k)) >= lim) leak += std::norm(f[k]) * g.dx;
        } else {
            Signal F = fourier(f);
            const double lim = g.xi_max() / std::abs(e);
            for (int k = 0; k < n; ++k)
                if (std::abs(F.grid.x(k)) >= lim) leak += std::norm(F[k]) * F.grid.dx;
        }
        if (leak > pol.dilation_leak * total)
            throw AliasingRisk("dilation by " + format_double(e) + " would push energy off the grid");
    }
    std::vector<double> pts(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) pts[k] = e * g.x(k);
    std::vector<cd> vals = bandlimited_eval(f, pts);
    const double s = std::sqrt(std::abs(e));
    for (int k = 0; k < n; ++k) f[k] = s * vals[k];
}

} // namespace detail

inline Signal apply(const MetaplecticFactorization& F, const Signal& f, const QuadChirpSampler& pol = {})
{
    detail::require_self_dual(f.grid);
    Signal out = f;
    for (auto it = F.factors.rbegin(); it != F.factors.rend(); ++it) {
        switch (it->kind) {
        case Factor::Chirp: detail::apply_chirp(out, it->param, pol); break;
        case Factor::Fourier: out = Signal(f.grid, fourier(out).v); break;
        case Factor::Dilation: detail::apply_dilation(out, it->param, pol); break;
        }
    }
    out *= F.phase;
    return out;
}

/// Ŝ^{-1}: reverse the word with inverted factors.
inline MetaplecticFactorization inverse(const MetaplecticFactorization& F)
{
    MetaplecticFactorization r;
    for (auto it = F.factors.rbegin(); it != F.factors.rend(); ++it) {
        switch (it->kind) {
        case Factor::Chirp: r.factors.push_back(Factor::chirp(-it->param)); break;
        case Factor::Dilation: r.factors.push_back(Factor::dilation(1.0 / it->param)); break;
        case Factor::Fourier:
            // J^{-1} = D_{-1} J
            r.factors.push_back(Factor::dilation(-1.0));
            r.factors.push_back(Factor::fourier());
            break;
        }
    }
    r.phase = std::conj(F.phase);
    return r;
}

} // namespace pswb
