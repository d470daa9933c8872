#include <gtest/gtest.h>

#include <random>

#include "pswb/tfr.hpp"

using namespace pswb;

namespace {

Signal random_smooth(const Grid& g, std::mt19937_64& rng, double spread = 1.2)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Signal s(g);
    for (int t = 0; t < 3; ++t) {
        double x0 = spread * nd(rng), xi0 = spread * nd(rng);
        cd amp(nd(rng), nd(rng));
        for (int k = 0; k < g.N; ++k) {
            double x = g.x(k);
            s[k] += amp * std::exp(cd(-kPi * (x - x0) * (x - x0), 2 * kPi * xi0 * x));
        }
    }
    return s;
}

Signal random_noise(const Grid& g, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Signal s(g);
    for (auto& v : s.v) v = cd(nd(rng), nd(rng));
    return s;
}

SympMat<double> m2(double a, double b, double c, double d)
{
    MatD m(2, 2);
    m << a, b, c, d;
    return SympMat<double>(m, 1e-10);
}

} // namespace

TEST(Wigner, GaussianMatchesClosedForm)
{
    Grid g = Grid::self_dual(256);
    PhaseSpaceField W = wigner(corpus("gaussian", g));
    double err = 0.0;
    for (int m = 0; m < g.N; ++m)
        for (int k = 0; k < g.N; ++k) {
            double x = W.x(m), xi = W.xi(k);
            double ref = std::sqrt(2.0) * std::exp(-2 * kPi * (x * x + xi * xi));
            err = std::max(err, std::abs(W(m, k) - ref));
        }
    EXPECT_LT(err, 1e-6);
}

TEST(Wigner, RealAndHermitianSymmetricForArbitrarySamples)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(3);
    Signal f = random_noise(g, rng), h = random_noise(g, rng);
    PhaseSpaceField W = wigner(f);
    EXPECT_LT(W.values.imag().cwiseAbs().maxCoeff(), 1e-12 * W.values.cwiseAbs().maxCoeff());
    PhaseSpaceField a = cross_wigner(f, h), b = cross_wigner(h, f);
    EXPECT_LT((a.values - b.values.conjugate()).cwiseAbs().maxCoeff(), 1e-12 * a.values.cwiseAbs().maxCoeff());
}

TEST(Wigner, MarginalsGiveEnergyDensities)
{
    Grid g = Grid::self_dual(128);
    std::mt19937_64 rng(4);
    Signal f = random_smooth(g, rng);
    PhaseSpaceField W = wigner(f);
    Signal F = fourier(f);
    double ex = 0.0, exi = 0.0;
    for (int m = 0; m < g.N; ++m) {
        cd s = W.values.row(m).sum() * W.dxi;
        ex = std::max(ex, std::abs(s - std::norm(f[m])));
    }
    for (int k = 0; k < g.N; ++k) {
        cd s = W.values.col(k).sum() * W.dx;
        exi = std::max(exi, std::abs(s - std::norm(F[k])));
    }
    EXPECT_LT(ex, 1e-10);
    EXPECT_LT(exi, 1e-8);
}

TEST(Wigner, MoyalHoldsForEveryUnitaryKind)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(5);
    Signal f1 = random_noise(g, rng), g1 = random_noise(g, rng), f2 = random_noise(g, rng),
           g2 = random_noise(g, rng);
    cd ref = inner(f1, f2) * std::conj(inner(g1, g2));
    for (const TfrMap& L : {TfrMap::wigner(g), TfrMap::tau_wigner(g, 0.0), TfrMap::tau_wigner(g, 0.3),
                            TfrMap::stft(g), TfrMap::covariant(g, A_tau<double>(0.25))}) {
        cd got = inner(L.forward(outer(f1, g1)), L.forward(outer(f2, g2)));
        EXPECT_LT(std::abs(got - ref), 1e-10 * std::abs(ref)) << L.name();
    }
}

TEST(Wigner, InverseMapsAreExact)
{
    Grid g = Grid::self_dual(32);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd(0.0, 1.0);
    MatCR F(g.N, g.N);
    for (int p = 0; p < g.N; ++p)
        for (int q = 0; q < g.N; ++q) F(p, q) = cd(nd(rng), nd(rng));
    for (const TfrMap& L : {TfrMap::wigner(g), TfrMap::tau_wigner(g, 0.7), TfrMap::stft(g),
                            TfrMap::covariant(g, A_tau<double>(0.75))}) {
        MatCR back = L.inverse(L.forward(F));
        EXPECT_LT((back - F).cwiseAbs().maxCoeff(), 1e-12) << L.name();
    }
}

TEST(Wigner, PolarizationIdentity)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(7);
    Signal f = random_smooth(g, rng), h = random_smooth(g, rng);
    PhaseSpaceField lhs = cross_wigner(f, h);
    PhaseSpaceField acc(g);
    for (int k = 0; k < 4; ++k) {
        cd ik = std::pow(kI, k);
        Signal s = f;
        for (int j = 0; j < g.N; ++j) s[j] += ik * h[j];
        acc.values += ik * wigner(s).values;
    }
    acc.values *= 0.25;
    EXPECT_LT(sup_distance(lhs, acc), 1e-12 * lhs.values.cwiseAbs().maxCoeff());
}

TEST(TauWigner, HalfEqualsCrossWigner)
{
    Grid g = Grid::self_dual(64);
    std::mt19937_64 rng(8);
    Signal f = random_noise(g, rng), h = random_noise(g, rng);
    EXPECT_LT(sup_distance(tau_wigner(f, h, 0.5), cross_wigner(f, h)), 1e-14);
}

TEST(TauWigner, ZeroIsRihaczek)
{
    Grid g = Grid::self_dual(256);
    Signal f = corpus("gaussian", g), h = corpus("chirp", g);
    PhaseSpaceField R = tau_wigner(f, h, 0.0);
    Signal H = fourier(h);
    double err = 0.0;
    for (int m = 0; m < g.N; ++m)
        for (int k = 0; k < g.N; ++k) {
            cd ref = f[m] * std::conj(H[k]) * std::exp(cd(0.0, -2 * kPi * R.x(m) * R.xi(k)));
            err = std::max(err, std::abs(R(m, k) - ref));
        }
    EXPECT_LT(err, 1e-6);
}

TEST(TauWigner, RejectsOutOfRangeTau)
{
    Grid g = Grid::self_dual(16);
    Signal f = corpus("gaussian", g);
    EXPECT_THROW(tau_wigner(f, f, 1.5), DimensionError);
}

TEST(Covariant, ChirpRouteMatchesTauWigner)
{
    Grid g = Grid::self_dual(256);
    Signal f = corpus("hermite1", g), h = corpus("two-gaussians", g);
    for (double tau : {0.25, 0.75}) {
        PhaseSpaceField a = covariant_wa(f, h, A_tau<double>(tau));
        PhaseSpaceField b = tau_wigner(f, h, tau);
        EXPECT_LT(relative_distance(a, b), 1e-6) << tau;
    }
}

TEST(Covariant, StftProjectionIsNotCovariant)
{
    Grid g = Grid::self_dual(16);
    Signal f = corpus("gaussian", g);
    EXPECT_THROW(covariant_wa(f, f, A_st<double>()), NotCovariantError);
}

TEST(Stft, MatchesDirectSum)
{
    Grid g = Grid::self_dual(128);
    std::mt19937_64 rng(9);
    Signal f = random_smooth(g, rng), w = corpus("gaussian", g);
    PhaseSpaceField V = stft(f, w);
    double err = 0.0;
    for (int m = 0; m < g.N; m += 5)
        for (int k = 0; k < g.N; k += 3) {
            cd acc = 0.0;
            for (int j = 0; j < g.N; ++j) {
                double t = g.x(j), x = V.x(m);
                acc += f[j] * std::exp(-kPi * (t - x) * (t - x)) * std::exp(cd(0.0, -2 * kPi * V.xi(k) * t));
            }
            err = std::max(err, std::abs(V(m, k) - acc * g.dx));
        }
    EXPECT_LT(err, 1e-8);
}

TEST(MatrixWigner, TauMatrixGivesCrossWigner)
{
    Grid g = Grid::self_dual(128);
    Signal f = corpus("gaussian", g), h = corpus("hermite2", g);
    PhaseSpaceField a = matrix_wigner(f, h, E_tau<double>(0.5));
    EXPECT_LT(relative_distance(a, cross_wigner(f, h)), 1e-6);
}

TEST(MatrixWigner, StftMatrixGivesStft)
{
    Grid g = Grid::self_dual(128);
    Signal f = corpus("hermite1", g), w = corpus("gaussian", g);
    PhaseSpaceField a = matrix_wigner(f, w, E_st<double>());
    EXPECT_LT(relative_distance_up_to_phase(a, stft(f, w)), 1e-6);
}

TEST(MatrixWigner, IdentityGivesProduct)
{
    Grid g = Grid::self_dual(64);
    Signal f = corpus("gaussian", g), h = corpus("chirp", g);
    PhaseSpaceField a = matrix_wigner(f, h, MatD::Identity(2, 2));
    Signal H = fourier(h);
    double err = 0.0;
    for (int m = 0; m < g.N; ++m)
        for (int k = 1; k < g.N; ++k) err = std::max(err, std::abs(a(m, k) - f[m] * std::conj(H[g.N - k])));
    EXPECT_LT(err, 1e-8);
}

TEST(Husimi, EqualsSquaredGaussianStft)
{
    Grid g = Grid::self_dual(256);
    for (const char* name : {"hermite1", "two-gaussians", "chirp"}) {
        Signal f = corpus(name, g);
        PhaseSpaceField Q = husimi(f);
        PhaseSpaceField V = stft(f, corpus("gaussian", g)).abs2();
        EXPECT_LT(relative_distance(Q, V), 1e-6) << name;
        EXPECT_GE(Q.values.real().minCoeff(), -1e-12) << name;
    }
}

TEST(Covariance, WignerTransportsUnderSymplecticMaps)
{
    Grid g = Grid::self_dual(512);
    Signal f = corpus("hermite1", g), h = corpus("gaussian", g);
    EXPECT_LT(symplectic_covariance_check(m2(0, 1, -1, 0), f, h), 1e-4);
    EXPECT_LT(symplectic_covariance_check(m2(1, 0, 1, 1), f, h), 1e-4);
    double t = 0.4;
    EXPECT_LT(symplectic_covariance_check(rotation(t), f, h), 1e-4);
}

TEST(Field, PullbackComposes)
{
    Grid g = Grid::self_dual(128);
    PhaseSpaceField W = wigner(corpus("hermite2", g));
    MatD S = rotation(0.3).matrix(), T = m2(1, 0.5, 0, 1).matrix();
    PhaseSpaceField a = pullback(pullback(W, S), T);
    PhaseSpaceField b = pullback(W, S * T);
    EXPECT_LT(relative_distance(a, b), 1e-6);
    MatD D(2, 2);
    D << 0.8, 0, 0, 1.25;
    PhaseSpaceField c = pullback(pullback(W, D), D.inverse());
    EXPECT_LT(relative_distance(c, W), 1e-6);
}

TEST(Field, CsvRoundTrip)
{
    Grid g = Grid::self_dual(16);
    PhaseSpaceField W = wigner(corpus("hermite1", g));
    std::string path = testing::TempDir() + "w.csv";
    write_field_csv(path, W);
    PhaseSpaceField R = read_field_csv(path);
    ASSERT_TRUE(R.same_lattice(W));
    EXPECT_LT(sup_distance(R, W), 1e-15);
}
