#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"

namespace pswb {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using cd = std::complex<double>;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using MatQ = Mat<Rational>;
using MatD = Mat<double>;
using MatC = Mat<cd>;
using VecC = Eigen::Matrix<cd, Eigen::Dynamic, 1>;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double v) { return v; }

template <class T>
MatD to_double(const Mat<T>& m)
{
    MatD out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
    return out;
}

/// Exact rational from a double (every finite double is a dyadic rational).
inline Rational to_rational(double v)
{
    if (!std::isfinite(v)) throw ParseError("non-finite value cannot be made exact");
    int e = 0;
    double m = std::frexp(v, &e);
    // 53 mantissa bits
    auto mi = static_cast<long long>(std::ldexp(m, 53));
    Rational r(mi);
    int shift = e - 53;
    Rational two(2);
    Rational p(1);
    for (int k = 0; k < std::abs(shift); ++k) p *= two;
    return shift >= 0 ? r * p : r / p;
}

template <class T>
bool is_zero(const T& v, double tol = 0.0)
{
    if constexpr (is_exact_v<T>) {
        (void)tol;
        return v == 0;
    } else {
        return std::abs(v) <= tol;
    }
}

template <class T>
double magnitude(const T& v)
{
    if constexpr (is_exact_v<T>)
        return std::abs(to_double(v));
    else
        return std::abs(v);
}

template <class T>
Mat<T> identity(Eigen::Index n)
{
    Mat<T> m = Mat<T>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
}

template <class T>
Mat<T> zeros(Eigen::Index r, Eigen::Index c)
{
    Mat<T> m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = T(0);
    return m;
}

template <class T>
bool equal(const Mat<T>& a, const Mat<T>& b, double tol = 0.0)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!is_zero<T>(a(i, j) - b(i, j), tol)) return false;
    return true;
}

namespace detail {

// Gauss-Jordan with first-nonzero pivoting in exact mode, partial pivoting otherwise.
template <class T>
Eigen::Index pick_pivot(const Mat<T>& a, Eigen::Index col)
{
    Eigen::Index best = -1;
    double bestv = 0.0;
    for (Eigen::Index r = col; r < a.rows(); ++r) {
        if constexpr (is_exact_v<T>) {
            if (a(r, col) != 0) return r;
        } else {
            double v = std::abs(a(r, col));
            if (v > bestv) {
                bestv = v;
                best = r;
            }
        }
    }
    return best;
}

template <class T>
double singular_tol(const Mat<T>& a)
{
    if constexpr (is_exact_v<T>) {
        return 0.0;
    } else {
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j)));
        return 1e-13 * std::max(1.0, s) * static_cast<double>(a.rows());
    }
}

} // namespace detail

template <class T>
T determinant(Mat<T> a)
{
    if (a.rows() != a.cols()) throw DimensionError("determinant of a non-square matrix");
    const Eigen::Index n = a.rows();
    T det(1);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = detail::pick_pivot(a, c);
        if (p < 0 || is_zero<T>(a(p, c), 0.0)) return T(0);
        if (p != c) {
            a.row(p).swap(a.row(c));
            det = -det;
        }
        det *= a(c, c);
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (is_zero<T>(a(r, c), 0.0)) continue;
            T f = a(r, c) / a(c, c);
            for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
        }
    }
    return det;
}

template <class T>
Mat<T> inverse(const Mat<T>& m)
{
    if (m.rows() != m.cols()) throw DimensionError("inverse of a non-square matrix");
    const Eigen::Index n = m.rows();
    const double tol = detail::singular_tol(m);
    Mat<T> a = m;
    Mat<T> inv = identity<T>(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = detail::pick_pivot(a, c);
        if (p < 0 || is_zero<T>(a(p, c), tol)) throw SingularMatrix("matrix is singular");
        if (p != c) {
            a.row(p).swap(a.row(c));
            inv.row(p).swap(inv.row(c));
        }
        T piv = a(c, c);
        for (Eigen::Index k = 0; k < n; ++k) {
            a(c, k) /= piv;
            inv(c, k) /= piv;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c || is_zero<T>(a(r, c), 0.0)) continue;
            T f = a(r, c);
            for (Eigen::Index k = 0; k < n; ++k) {
                a(r, k) -= f * a(c, k);
                inv(r, k) -= f * inv(c, k);
            }
        }
    }
    return inv;
}

/// Matrix exponential by scaling and squaring with a degree-18 Taylor polynomial.
template <class S>
Mat<S> expm(const Mat<S>& a)
{
    if (a.rows() != a.cols()) throw DimensionError("expm of a non-square matrix");
    const Eigen::Index n = a.rows();
    double norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) row += std::abs(a(i, j));
        norm = std::max(norm, row);
    }
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    Mat<S> x = a / static_cast<double>(std::ldexp(1.0, squarings));
    Mat<S> result = Mat<S>::Identity(n, n);
    Mat<S> term = Mat<S>::Identity(n, n);
    for (int k = 1; k <= 18; ++k) {
        term = (term * x) / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// ---- CSV serialization ----

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Whole-string decimal parse; unlike std::stod it accepts subnormals.
inline double parse_double(const std::string& s)
{
    const char* b = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(b, &end);
    if (end == b) throw ParseError("bad number: '" + s + "'");
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') throw ParseError("bad number: '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s)
{
    const double v = parse_double(s);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ParseError("expected an integer: '" + s + "'");
    return static_cast<int>(v);
}

inline std::string format_scalar(const Rational& r)
{
    std::string s = r.str();
    return s;
}
inline std::string format_scalar(double v) { return format_double(v); }

template <class T>
std::string matrix_to_csv(const Mat<T>& m)
{
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << format_scalar(m(i, j));
        }
        os << '\n';
    }
    return os.str();
}

/// Parses "p/q", integers, and decimals ("1.25", "-3e-2") exactly.
inline Rational parse_rational(std::string s)
{
    auto trim = [](std::string& t) {
        size_t a = t.find_first_not_of(" \t\r\n");
        size_t b = t.find_last_not_of(" \t\r\n");
        t = a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    trim(s);
    if (s.empty()) throw ParseError("empty matrix entry");
    if (s.find('/') != std::string::npos) {
        try {
            return Rational(s);
        } catch (const std::exception&) {
            throw ParseError("bad rational entry: " + s);
        }
    }
    std::string mant = s;
    long exp10 = 0;
    size_t epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        try {
            exp10 = std::stol(s.substr(epos + 1));
        } catch (const std::exception&) {
            throw ParseError("bad exponent in entry: " + s);
        }
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        neg = mant[0] == '-';
        mant = mant.substr(1);
    }
    std::string digits;
    long frac = 0;
    bool dot = false;
    for (char c : mant) {
        if (c == '.') {
            if (dot) throw ParseError("bad decimal entry: " + s);
            dot = true;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            if (dot) ++frac;
        } else {
            throw ParseError("bad matrix entry: " + s);
        }
    }
    if (digits.empty()) throw ParseError("bad matrix entry: " + s);
    Rational v(digits);
    long e = exp10 - frac;
    Rational ten(10), p(1);
    for (long k = 0; k < std::labs(e); ++k) p *= ten;
    v = e >= 0 ? v * p : v / p;
    return neg ? Rational(-v) : v;
}

inline std::vector<std::vector<std::string>> read_csv_cells(std::istream& in)
{
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

template <class T>
Mat<T> matrix_from_csv(std::istream& in)
{
    auto rows = read_csv_cells(in);
    if (rows.empty()) throw ParseError("empty matrix file");
    const size_t cols = rows.front().size();
    Mat<T> m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ParseError("ragged matrix rows");
        for (size_t j = 0; j < cols; ++j) {
            Rational r = parse_rational(rows[i][j]);
            if constexpr (is_exact_v<T>)
                m(i, j) = r;
            else
                m(i, j) = to_double(r);
        }
    }
    return m;
}

template <class T>
Mat<T> load_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file " + path);
    return matrix_from_csv<T>(in);
}

template <class T>
void save_matrix(const std::string& path, const Mat<T>& m)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << matrix_to_csv(m);
}

} // namespace pswb
