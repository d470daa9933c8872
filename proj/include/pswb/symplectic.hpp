#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace pswb {

inline constexpr double kSympTol = 1e-12;

/// 2n x 2n matrix known to satisfy S^T J S = J.
template <class T>
class SympMat {
public:
    SympMat() = default;

    /// Checks the symplectic condition; throws NotSymplectic on failure.
    explicit SympMat(Mat<T> m, double tol = kSympTol);

    static SympMat unchecked(Mat<T> m)
    {
        SympMat s;
        s.m_ = std::move(m);
        return s;
    }

    const Mat<T>& matrix() const { return m_; }
    Eigen::Index half_dim() const { return m_.rows() / 2; }

    /// Block (i, j) of size b x b, zero-based.
    Mat<T> block(Eigen::Index i, Eigen::Index j, Eigen::Index b) const
    {
        return m_.block(i * b, j * b, b, b);
    }
    Mat<T> A() const { return block(0, 0, half_dim()); }
    Mat<T> B() const { return block(0, 1, half_dim()); }
    Mat<T> C() const { return block(1, 0, half_dim()); }
    Mat<T> D() const { return block(1, 1, half_dim()); }

    SympMat operator*(const SympMat& o) const { return unchecked(Mat<T>(m_ * o.m_)); }
    bool operator==(const SympMat& o) const { return equal(m_, o.m_); }

private:
    Mat<T> m_;
};

template <class T>
Mat<T> standard_J(Eigen::Index n)
{
    Mat<T> j = zeros<T>(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        j(i, n + i) = T(1);
        j(n + i, i) = T(-1);
    }
    return j;
}

template <class T>
double symplectic_residual(const Mat<T>& s)
{
    if (s.rows() != s.cols() || s.rows() % 2 != 0)
        throw DimensionError("symplectic test needs a square matrix of even size");
    const Mat<T> j = standard_J<T>(s.rows() / 2);
    Mat<T> r = Mat<T>(s.transpose() * j * s) - j;
    double m = 0.0;
    for (Eigen::Index a = 0; a < r.rows(); ++a)
        for (Eigen::Index b = 0; b < r.cols(); ++b) m = std::max(m, magnitude(r(a, b)));
    return m;
}

template <class T>
bool is_symplectic(const Mat<T>& s, double tol = kSympTol)
{
    if (s.rows() != s.cols() || s.rows() % 2 != 0)
        throw DimensionError("symplectic test needs a square matrix of even size");
    const Mat<T> j = standard_J<T>(s.rows() / 2);
    Mat<T> r = s.transpose() * j * s;
    return equal<T>(r, j, is_exact_v<T> ? 0.0 : tol);
}

template <class T>
SympMat<T>::SympMat(Mat<T> m, double tol) : m_(std::move(m))
{
    if (!is_symplectic(m_, tol)) throw NotSymplectic("matrix is not symplectic");
}

/// Inverse via S^{-1} = -J S^T J.
template <class T>
SympMat<T> symplectic_inverse(const SympMat<T>& s)
{
    const Mat<T> j = standard_J<T>(s.half_dim());
    return SympMat<T>::unchecked(Mat<T>(-(j * s.matrix().transpose() * j)));
}

// ---- generators ----

template <class T>
SympMat<T> generator_J(Eigen::Index n)
{
    return SympMat<T>::unchecked(standard_J<T>(n));
}

template <class T>
SympMat<T> dilation(const Mat<T>& e)
{
    if (e.rows() != e.cols()) throw DimensionError("dilation needs a square matrix");
    const Eigen::Index n = e.rows();
    Mat<T> einv = inverse(e);
    Mat<T> d = zeros<T>(2 * n, 2 * n);
    d.block(0, 0, n, n) = einv;
    d.block(n, n, n, n) = e.transpose();
    return SympMat<T>::unchecked(d);
}

template <class T>
SympMat<T> shear(const Mat<T>& q, double tol = 0.0)
{
    if (q.rows() != q.cols()) throw DimensionError("shear needs a square matrix");
    if (!equal<T>(q, Mat<T>(q.transpose()), tol)) throw NotSymmetric("shear matrix is not symmetric");
    const Eigen::Index n = q.rows();
    Mat<T> v = identity<T>(2 * n);
    v.block(n, 0, n, n) = q;
    return SympMat<T>::unchecked(v);
}

template <class T>
SympMat<T> dilation(const T& e)
{
    Mat<T> m(1, 1);
    m(0, 0) = e;
    return dilation<T>(m);
}

template <class T>
SympMat<T> shear(const T& q)
{
    Mat<T> m(1, 1);
    m(0, 0) = q;
    return shear<T>(m);
}

inline SympMat<double> rotation(double t)
{
    MatD r(2, 2);
    r << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    return SympMat<double>::unchecked(r);
}

/// Upper shear [[1,p],[0,1]].
template <class T>
SympMat<T> upper_shear(const T& p)
{
    Mat<T> r = identity<T>(2);
    r(0, 1) = p;
    return SympMat<T>::unchecked(r);
}

// ---- tensor, conjugate, doubling ----

template <class T>
SympMat<T> tensor(const SympMat<T>& s1, const SympMat<T>& s2)
{
    if (s1.half_dim() != s2.half_dim()) throw DimensionError("tensor factors differ in size");
    const Eigen::Index n = s1.half_dim();
    Mat<T> r = zeros<T>(4 * n, 4 * n);
    r.block(0, 0, n, n) = s1.A();
    r.block(0, 2 * n, n, n) = s1.B();
    r.block(2 * n, 0, n, n) = s1.C();
    r.block(2 * n, 2 * n, n, n) = s1.D();
    r.block(n, n, n, n) = s2.A();
    r.block(n, 3 * n, n, n) = s2.B();
    r.block(3 * n, n, n, n) = s2.C();
    r.block(3 * n, 3 * n, n, n) = s2.D();
    return SympMat<T>::unchecked(r);
}

template <class T>
SympMat<T> conjugate(const SympMat<T>& s)
{
    const Eigen::Index n = s.half_dim();
    Mat<T> r = s.matrix();
    r.block(0, n, n, n) = Mat<T>(-s.B());
    r.block(n, 0, n, n) = Mat<T>(-s.C());
    return SympMat<T>::unchecked(r);
}

/// Signed permutation P+ (sign = +1) or P- (sign = -1), built from n x n blocks.
template <class T>
Mat<T> doubling_permutation(Eigen::Index n, int sign)
{
    Mat<T> p = zeros<T>(4 * n, 4 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i, i) = T(1);
        p(n + i, 2 * n + i) = T(1);
        p(2 * n + i, n + i) = T(1);
        p(3 * n + i, 3 * n + i) = T(sign);
    }
    return p;
}

/// A' = D_{P-} (A tensor conj(A)) D_{P+}.
template <class T>
SympMat<T> doubling(const SympMat<T>& a)
{
    if (a.half_dim() % 2 != 0) throw DimensionError("doubling needs half_dim 2n");
    const Eigen::Index n = a.half_dim() / 2;
    auto dm = dilation<T>(doubling_permutation<T>(n, -1));
    auto dp = dilation<T>(doubling_permutation<T>(n, +1));
    return dm * tensor(a, conjugate(a)) * dp;
}

/// Block closed form of the doubled matrix.
template <class T>
SympMat<T> doubling_closed_form(const SympMat<T>& a)
{
    if (a.half_dim() % 2 != 0) throw DimensionError("doubling needs half_dim 2n");
    const Eigen::Index n = a.half_dim() / 2;
    // sign of the second diagonal copy for block row i, column j
    static const int sgn[4][4] = {{1, 1, -1, -1}, {-1, -1, 1, 1}, {-1, -1, 1, 1}, {1, 1, -1, -1}};
    Mat<T> r = zeros<T>(8 * n, 8 * n);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Mat<T> b = a.block(i, j, n);
            r.block(2 * n * i, 2 * n * j, n, n) = b;
            r.block(2 * n * i + n, 2 * n * j + n, n, n) = sgn[i][j] > 0 ? b : Mat<T>(-b);
        }
    return SympMat<T>::unchecked(r);
}

// ---- distinguished 4n x 4n projections ----

template <class T>
SympMat<T> A_tau(const T& tau, Eigen::Index n = 1)
{
    Mat<T> r = zeros<T>(4 * n, 4 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = T(1) - tau;
        r(i, n + i) = tau;
        r(n + i, 2 * n + i) = tau;
        r(n + i, 3 * n + i) = -(T(1) - tau);
        r(2 * n + i, 2 * n + i) = T(1);
        r(2 * n + i, 3 * n + i) = T(1);
        r(3 * n + i, i) = T(-1);
        r(3 * n + i, n + i) = T(1);
    }
    return SympMat<T>::unchecked(r);
}

template <class T>
SympMat<T> A_st(Eigen::Index n = 1)
{
    Mat<T> r = zeros<T>(4 * n, 4 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = T(1);
        r(i, n + i) = T(-1);
        r(n + i, 2 * n + i) = T(1);
        r(n + i, 3 * n + i) = T(1);
        r(2 * n + i, 3 * n + i) = T(-1);
        r(3 * n + i, i) = T(-1);
    }
    return SympMat<T>::unchecked(r);
}

template <class T>
SympMat<T> A_FT2(Eigen::Index n = 1)
{
    Mat<T> r = zeros<T>(4 * n, 4 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = T(1);
        r(n + i, 3 * n + i) = T(1);
        r(2 * n + i, 2 * n + i) = T(1);
        r(3 * n + i, n + i) = T(-1);
    }
    return SympMat<T>::unchecked(r);
}

/// Projection of the matrix Wigner distribution with invertible M (2n x 2n).
template <class T>
SympMat<T> A_M(const Mat<T>& m)
{
    if (m.rows() != m.cols() || m.rows() % 2 != 0) throw DimensionError("M must be 2n x 2n");
    const Eigen::Index n = m.rows() / 2;
    Mat<T> mi = inverse(m);
    Mat<T> r = zeros<T>(4 * n, 4 * n);
    auto blk = [n](const Mat<T>& x, int i, int j) { return Mat<T>(x.block(i * n, j * n, n, n)); };
    r.block(0, 0, n, n) = blk(mi, 0, 0);
    r.block(0, n, n, n) = blk(mi, 0, 1);
    r.block(n, 2 * n, n, n) = blk(m, 0, 1).transpose();
    r.block(n, 3 * n, n, n) = blk(m, 1, 1).transpose();
    r.block(2 * n, 2 * n, n, n) = blk(m, 0, 0).transpose();
    r.block(2 * n, 3 * n, n, n) = blk(m, 1, 0).transpose();
    r.block(3 * n, 0, n, n) = Mat<T>(-blk(mi, 1, 0));
    r.block(3 * n, n, n, n) = Mat<T>(-blk(mi, 1, 1));
    return SympMat<T>::unchecked(r);
}

/// E_tau = [[I, tau I], [I, -(1-tau) I]].
template <class T>
Mat<T> E_tau(const T& tau, Eigen::Index n = 1)
{
    Mat<T> e = zeros<T>(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        e(i, i) = T(1);
        e(i, n + i) = tau;
        e(n + i, i) = T(1);
        e(n + i, n + i) = -(T(1) - tau);
    }
    return e;
}

template <class T>
Mat<T> E_st(Eigen::Index n = 1)
{
    Mat<T> e = zeros<T>(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        e(i, n + i) = T(1);
        e(n + i, i) = T(-1);
        e(n + i, n + i) = T(1);
    }
    return e;
}

// ---- covariance and shift-invertibility ----

/// B_A when A has the covariant template, nullopt otherwise.
template <class T>
std::optional<Mat<T>> covariance_matrix(const SympMat<T>& a, double tol = 1e-10)
{
    if (a.half_dim() % 2 != 0) throw DimensionError("covariance test needs half_dim 2n");
    const Eigen::Index n = a.half_dim() / 2;
    const double t = is_exact_v<T> ? 0.0 : tol;
    auto b = [&](int i, int j) { return a.block(i - 1, j - 1, n); };
    const Mat<T> I = identity<T>(n);
    const Mat<T> Z = zeros<T>(n, n);
    const Mat<T> a11 = b(1, 1), a13 = b(1, 3), a21 = b(2, 1);
    bool ok = equal<T>(b(1, 2), Mat<T>(I - a11), t) && equal<T>(b(1, 4), a13, t) &&
              equal<T>(b(2, 2), Mat<T>(-a21), t) &&
              equal<T>(b(2, 3), Mat<T>(I - a11.transpose()), t) &&
              equal<T>(b(2, 4), Mat<T>(-a11.transpose()), t) && equal<T>(b(3, 1), Z, t) &&
              equal<T>(b(3, 2), Z, t) && equal<T>(b(3, 3), I, t) && equal<T>(b(3, 4), I, t) &&
              equal<T>(b(4, 1), Mat<T>(-I), t) && equal<T>(b(4, 2), I, t) &&
              equal<T>(b(4, 3), Z, t) && equal<T>(b(4, 4), Z, t) &&
              equal<T>(a13, Mat<T>(a13.transpose()), t) && equal<T>(a21, Mat<T>(a21.transpose()), t);
    if (!ok) return std::nullopt;
    Mat<T> half = I / T(2);
    Mat<T> out = zeros<T>(2 * n, 2 * n);
    out.block(0, 0, n, n) = a13;
    out.block(0, n, n, n) = half - a11;
    out.block(n, 0, n, n) = Mat<T>(half - a11.transpose());
    out.block(n, n, n, n) = Mat<T>(-a21);
    return out;
}

/// E_A = (A11, A13; A21, A23) read from the blocks, whether or not it is invertible.
template <class T>
Mat<T> shift_block(const SympMat<T>& a)
{
    if (a.half_dim() % 2 != 0) throw DimensionError("shift-invertibility needs half_dim 2n");
    const Eigen::Index n = a.half_dim() / 2;
    Mat<T> e(2 * n, 2 * n);
    e.block(0, 0, n, n) = a.block(0, 0, n);
    e.block(0, n, n, n) = a.block(0, 2, n);
    e.block(n, 0, n, n) = a.block(1, 0, n);
    e.block(n, n, n, n) = a.block(1, 2, n);
    return e;
}

template <class T>
std::optional<Mat<T>> shift_invertibility(const SympMat<T>& a)
{
    Mat<T> e = shift_block(a);
    T det = determinant(e);
    if constexpr (is_exact_v<T>) {
        if (det == 0) return std::nullopt;
    } else {
        if (std::abs(det) <= 1e-12) return std::nullopt;
    }
    return e;
}

/// C = A (S1 tensor conj(S2)).
template <class T>
SympMat<T> interaction_matrix(const SympMat<T>& a, const SympMat<T>& s1, const SympMat<T>& s2)
{
    if (s1.half_dim() != s2.half_dim() || a.half_dim() != 2 * s1.half_dim())
        throw DimensionError("interaction matrix dimensions disagree");
    return a * tensor(s1, conjugate(s2));
}

/// B_{A'} for covariant A, assembled blockwise from A11, A13, A21.
template <class T>
Mat<T> doubled_covariance_matrix(const SympMat<T>& a)
{
    if (!covariance_matrix(a)) throw NotCovariantError("A is not covariant");
    const Eigen::Index n = a.half_dim() / 2;
    const Mat<T> a11 = a.block(0, 0, n), a13 = a.block(0, 2, n), a21 = a.block(1, 0, n);
    const Mat<T> I2 = identity<T>(2 * n);
    Mat<T> d11 = zeros<T>(2 * n, 2 * n), d13 = zeros<T>(2 * n, 2 * n), d21 = zeros<T>(2 * n, 2 * n);
    d11.block(0, 0, n, n) = a11;
    d11.block(n, n, n, n) = a11;
    d13.block(0, 0, n, n) = a13;
    d13.block(n, n, n, n) = Mat<T>(-a13);
    d21.block(0, 0, n, n) = a21;
    d21.block(n, n, n, n) = Mat<T>(-a21);
    Mat<T> out = zeros<T>(4 * n, 4 * n);
    out.block(0, 0, 2 * n, 2 * n) = d13;
    out.block(0, 2 * n, 2 * n, 2 * n) = Mat<T>(I2 / T(2) - d11);
    out.block(2 * n, 0, 2 * n, 2 * n) = Mat<T>(I2 / T(2) - d11.transpose());
    out.block(2 * n, 2 * n, 2 * n, 2 * n) = Mat<T>(-d21);
    return out;
}

// ---- quadratic forms and Hamilton flow ----

/// a(X) = <X, Q X> with symmetric Q.
struct QuadraticForm {
    MatD Q;

    QuadraticForm() = default;
    explicit QuadraticForm(MatD q) : Q(std::move(q))
    {
        if (Q.rows() != Q.cols() || Q.rows() % 2 != 0)
            throw DimensionError("quadratic form needs a 2n x 2n matrix");
        if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw NotSymmetric("quadratic form matrix is not symmetric");
    }

    Eigen::Index dim() const { return Q.rows() / 2; }
    double operator()(const Eigen::VectorXd& x) const { return x.dot(Q * x); }

    /// a = alpha x^2 + 2 beta x xi + gamma xi^2 (n = 1).
    static QuadraticForm from_coefficients(double alpha, double beta, double gamma)
    {
        MatD q(2, 2);
        q << alpha, beta, beta, gamma;
        return QuadraticForm(q);
    }
    static QuadraticForm free_particle() { return from_coefficients(0, 0, 1); }
    static QuadraticForm harmonic_oscillator() { return from_coefficients(0.5, 0, 0.5); }
};

inline MatD hamilton_map(const QuadraticForm& a) { return standard_J<double>(a.dim()) * a.Q; }

/// S_t = exp(2 t F) with F = J Q.
inline SympMat<double> hamilton_flow(const QuadraticForm& a, double t)
{
    MatD f = hamilton_map(a);
    return SympMat<double>::unchecked(expm<double>(MatD(2.0 * t * f)));
}

// ---- random words in the generators ----

/// Random rational in [-5, 5] with denominator up to 8.
inline Rational random_param(std::mt19937_64& rng, bool nonzero)
{
    std::uniform_int_distribution<int> den(1, 8);
    for (;;) {
        int q = den(rng);
        std::uniform_int_distribution<int> num(-5 * q, 5 * q);
        Rational r(num(rng), q);
        if (!nonzero || r != 0) return r;
    }
}

/// Random element of Sp(n) as a product of at most max_len generators with rational parameters.
inline SympMat<Rational> random_symplectic(std::mt19937_64& rng, Eigen::Index n, int max_len = 8)
{
    std::uniform_int_distribution<int> len(1, max_len);
    std::uniform_int_distribution<int> kind(0, 2);
    SympMat<Rational> s = SympMat<Rational>::unchecked(identity<Rational>(2 * n));
    const int L = len(rng);
    for (int k = 0; k < L; ++k) {
        switch (kind(rng)) {
        case 0:
            s = s * generator_J<Rational>(n);
            break;
        case 1: {
            // triangular E with nonzero diagonal keeps it invertible
            MatQ e = zeros<Rational>(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j <= i; ++j) e(i, j) = random_param(rng, i == j);
            s = s * dilation<Rational>(e);
            break;
        }
        default: {
            MatQ q = zeros<Rational>(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j <= i; ++j) q(i, j) = q(j, i) = random_param(rng, false);
            s = s * shear<Rational>(q);
            break;
        }
        }
    }
    return s;
}

} // namespace pswb
