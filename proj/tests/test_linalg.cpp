#include <gtest/gtest.h>

#include <sstream>

#include "pswb/linalg.hpp"

using namespace pswb;

TEST(Linalg, ExactInverseRoundTrip)
{
    MatQ m(3, 3);
    m << Rational(2), Rational(1, 3), Rational(0), Rational(-1), Rational(5, 2), Rational(7),
        Rational(0), Rational(4), Rational(1, 5);
    MatQ inv = inverse(m);
    EXPECT_TRUE(equal<Rational>(MatQ(m * inv), identity<Rational>(3)));
}

TEST(Linalg, SingularMatrixThrows)
{
    MatQ m(2, 2);
    m << Rational(1), Rational(2), Rational(2), Rational(4);
    EXPECT_THROW(inverse(m), SingularMatrix);
    EXPECT_EQ(determinant(m), Rational(0));
}

TEST(Linalg, DeterminantMatchesCofactorExpansion)
{
    MatQ m(3, 3);
    m << Rational(1), Rational(2), Rational(3), Rational(0), Rational(1, 2), Rational(-1),
        Rational(4), Rational(0), Rational(2);
    // 1*(1 - 0) - 2*(0 + 4) + 3*(0 - 2) = -13
    EXPECT_EQ(determinant(m), Rational(-13));
}

TEST(Linalg, ExpmOfNilpotentIsPolynomial)
{
    MatD n(2, 2);
    n << 0, 3, 0, 0;
    MatD e = expm<double>(n);
    EXPECT_NEAR(e(0, 0), 1, 1e-15);
    EXPECT_NEAR(e(0, 1), 3, 1e-15);
    EXPECT_NEAR(e(1, 0), 0, 1e-15);
}

TEST(Linalg, ExpmOfLargeRotationGenerator)
{
    MatD g(2, 2);
    g << 0, 10, -10, 0;
    MatD e = expm<double>(g);
    EXPECT_NEAR(e(0, 0), std::cos(10.0), 1e-12);
    EXPECT_NEAR(e(0, 1), std::sin(10.0), 1e-12);
}

TEST(Linalg, ParseRationalForms)
{
    EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
    EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
    EXPECT_EQ(parse_rational("2e-1"), Rational(1, 5));
    EXPECT_EQ(parse_rational(" 7 "), Rational(7));
    EXPECT_THROW(parse_rational("abc"), ParseError);
}

TEST(Linalg, CsvRoundTripExact)
{
    MatQ m(2, 2);
    m << Rational(1, 2), Rational(-3), Rational(0), Rational(7, 9);
    std::istringstream in(matrix_to_csv(m));
    MatQ back = matrix_from_csv<Rational>(in);
    EXPECT_TRUE(equal<Rational>(m, back));
}

TEST(Linalg, CsvFloatUses17Digits)
{
    MatD m(1, 1);
    m << 0.1;
    std::string s = matrix_to_csv(m);
    EXPECT_EQ(s, "0.10000000000000001\n");
    std::istringstream in(s);
    EXPECT_EQ(matrix_from_csv<double>(in)(0, 0), 0.1);
}

TEST(Linalg, ToRationalIsExact)
{
    EXPECT_EQ(to_rational(0.375), Rational(3, 8));
    EXPECT_EQ(to_double(to_rational(0.1)), 0.1);
}
