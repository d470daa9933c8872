#include <gtest/gtest.h>

#include <random>

#include "pswb/weyl.hpp"

using namespace pswb;

namespace {

Signal random_smooth(const Grid& g, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Signal s(g);
    for (int t = 0; t < 3; ++t) {
        double x0 = nd(rng), xi0 = nd(rng);
        cd amp(nd(rng), nd(rng));
        for (int k = 0; k < g.N; ++k) {
            double x = g.x(k);
            s[k] += amp * std::exp(cd(-kPi * (x - x0) * (x - x0), 2 * kPi * xi0 * x));
        }
    }
    return s;
}

SympMat<double> m2(double a, double b, double c, double d)
{
    MatD m(2, 2);
    m << a, b, c, d;
    return SympMat<double>(m, 1e-10);
}

cd bump(double x, double xi) { return std::exp(-kPi * ((x - 0.5) * (x - 0.5) + xi * xi)); }

} // namespace

TEST(Weyl, ConstantSymbolIsMultiple)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(1);
    Signal f = random_smooth(g, rng);
    Signal out = weyl_apply([](double, double) { return cd(2.5, -1.0); }, f);
    Signal ref = f;
    ref *= cd(2.5, -1.0);
    EXPECT_LT(relative_distance(out, ref), 1e-10);
}

TEST(Weyl, PositionSymbolMultiplies)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(2);
    Signal f = random_smooth(g, rng);
    Signal out = weyl_apply([](double x, double) { return cd(x); }, f);
    Signal ref = Signal::from_function(g, [](double) { return cd(0.0); });
    for (int k = 0; k < g.N; ++k) ref[k] = g.x(k) * f[k];
    EXPECT_LT(relative_distance(out, ref), 1e-8);
}

TEST(Weyl, FrequencySymbolActsInFourierDomain)
{
    Grid g = Grid::self_dual(128);
    Signal f = corpus("hermite1", g);
    Signal out = fourier(weyl_apply([](double, double xi) { return cd(xi); }, f));
    Signal F = fourier(f);
    for (int k = 0; k < g.N; ++k) F[k] *= F.grid.x(k);
    EXPECT_LT(relative_distance(out, F), 1e-8);
}

TEST(Weyl, DualityWithCrossWigner)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(3);
    Signal f = random_smooth(g, rng), h = random_smooth(g, rng);
    PhaseSpaceField a = sample_symbol(g, bump);
    cd lhs = inner(weyl_apply(a, f), h);
    cd rhs = inner(a, cross_wigner(h, f));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
}

TEST(Weyl, RealSymbolGivesSelfAdjointOperator)
{
    Grid g = Grid::self_dual(64);
    WeylOperator op = weyl_operator([](double x, double xi) { return cd(std::cos(x) * xi * xi); }, g);
    EXPECT_LT((op.M - op.M.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * op.M.cwiseAbs().maxCoeff());
}

TEST(Weyl, OperatorNormOfConstantSymbol)
{
    Grid g = Grid::self_dual(32);
    WeylOperator op = weyl_operator([](double, double) { return cd(3.0); }, g);
    EXPECT_NEAR(operator_norm(op), 3.0, 1e-9);
    WeylOperator b = weyl_operator(bump, g);
    double nb = operator_norm(b);
    EXPECT_GT(nb, 0.0);
    EXPECT_LE(nb, 1.0 + 1e-9);
}

TEST(Weyl, MetaplecticConjugation)
{
    Grid g = Grid::self_dual(256);
    Signal f = corpus("hermite2", g);
    EXPECT_LT(weyl_metaplectic_conjugation_check(m2(0, 1, -1, 0), bump, f), 1e-6);
    EXPECT_LT(weyl_metaplectic_conjugation_check(m2(1, 0, 1, 1), bump, f), 1e-6);
    EXPECT_LT(weyl_metaplectic_conjugation_check(rotation(0.7), bump, f), 1e-6);
}

TEST(Weyl, LiftedSymbolsIntertwineCovariantRepresentation)
{
    Grid g(64, 1.0 / 8.0);
    Signal f = corpus("hermite1", g), h = corpus("gaussian", g);
    Signal af = weyl_apply(bump, f), ah = weyl_apply(bump, h);
    // tau = 1/4 kernels spread further in lag, so they get a wider operator window
    for (auto [tau, nc] : {std::pair{0.5, 32}, std::pair{0.25, 48}}) {
        SympMat<double> A = A_tau<double>(tau);
        LiftedSymbols L = lift_symbols(bump, A);
        PhaseSpaceField w = covariant_wa(f, h, A).crop(nc);
        PhaseSpaceField one = weyl2d_operator(L.b, nc, g.dx).apply(w).crop(32);
        EXPECT_LT(relative_distance(one, covariant_wa(af, h, A).crop(32)), 1e-3) << tau;
        PhaseSpaceField two = weyl2d_operator(L.b_tilde, nc, g.dx).apply(w).crop(32);
        EXPECT_LT(relative_distance(two, covariant_wa(f, ah, A).crop(32)), 1e-3) << tau;
        PhaseSpaceField wf = covariant_wa(f, f, A).crop(nc);
        PhaseSpaceField both = weyl2d_operator(L.c, nc, g.dx).apply(wf).crop(32);
        EXPECT_LT(relative_distance(both, covariant_wa(af, af, A).crop(32)), 1e-3) << tau;
    }
}

TEST(Weyl, LiftedSymbolsFollowPrecomposition)
{
    SympMat<double> A = A_tau<double>(0.5);
    LiftedSymbols L = lift_symbols(bump, A);
    // z = A (r, y, rho, eta)
    double r = 0.3, y = -0.2, rho = 0.7, eta = 0.1;
    Eigen::Vector4d u(r, y, rho, eta);
    Eigen::Vector4d z = A.matrix() * u;
    EXPECT_LT(std::abs(L.b(z(0), z(1), z(2), z(3)) - bump(r, rho)), 1e-14);
    EXPECT_LT(std::abs(L.b_tilde(z(0), z(1), z(2), z(3)) - std::conj(bump(y, -eta))), 1e-14);
}

TEST(Fio, UnitAmplitudeMatchesMetaplectic)
{
    Grid g = Grid::self_dual(256);
    Signal f = corpus("hermite1", g);
    auto one = [](double, double) { return cd(1.0); };
    for (const auto& S : {m2(1, 0, 1, 1), m2(1, 1, 0, 1), rotation(0.3), m2(2, 0, 0, 0.5)}) {
        Signal a = fio_apply(S, one, f);
        Signal b = apply(factorize(S), f);
        EXPECT_LT(relative_distance_up_to_phase(a, b), 1e-8);
    }
}

TEST(Fio, RejectsNonFreeMapsAndAliasing)
{
    Grid g = Grid::self_dual(64);
    Signal f = corpus("gaussian", g);
    auto one = [](double, double) { return cd(1.0); };
    EXPECT_THROW(fio_apply(m2(0, 1, -1, 0), one, f), Unsupported);
    EXPECT_THROW(fio_apply(m2(1, 0, 3, 1), one, f), AliasingRisk);
}
