#include <gtest/gtest.h>

#include "pswb/schrodinger.hpp"

using namespace pswb;

namespace {

cd bump(double x, double xi) { return std::exp(-kPi * (x * x + xi * xi)); }

EvolutionSpec free_spec(double t)
{
    EvolutionSpec s;
    s.t_final = t;
    return s;
}

EvolutionSpec oscillator_spec(double t)
{
    EvolutionSpec s;
    s.a = QuadraticForm::harmonic_oscillator();
    s.t_final = t;
    return s;
}

} // namespace

TEST(Evolve, ZeroTimeReturnsInput)
{
    Grid g = Grid::self_dual(64);
    Signal f = corpus("chirped-rect", g);
    EvolutionSpec s = free_spec(0.0);
    s.sigma = bump;
    Signal out = evolve(s, f);
    EXPECT_EQ(out.v, f.v);
}

TEST(Evolve, OscillatorGroundStateOnlyPicksUpPhase)
{
    Grid g = Grid::self_dual(128);
    Signal h0 = corpus("hermite0", g);
    for (double t : {0.3, 1.7}) {
        Signal u = evolve(oscillator_spec(t), h0);
        double err = 0.0;
        for (int k = 0; k < g.N; ++k) err = std::max(err, std::abs(std::abs(u[k]) - std::abs(h0[k])));
        EXPECT_LT(err, 1e-8) << t;
    }
}

TEST(Evolve, NormIsConservedWithRealPerturbation)
{
    Grid g = Grid::self_dual(64);
    Signal f = corpus("rect", g);
    EvolutionSpec s = free_spec(0.4);
    s.sigma = bump;
    EXPECT_NEAR(evolve(s, f).norm(), f.norm(), 1e-8);
    s = oscillator_spec(0.9);
    EXPECT_NEAR(evolve(s, f).norm(), f.norm(), 1e-8);
}

TEST(Evolve, GroupLawUpToPhase)
{
    Grid g = Grid::self_dual(128);
    Signal f = corpus("hermite2", g);
    for (auto make : {free_spec, oscillator_spec}) {
        Signal once = evolve(make(0.7), f);
        Signal twice = evolve(make(0.3), evolve(make(0.4), f));
        EXPECT_LT(relative_distance_up_to_phase(once, twice), 1e-6);
    }
}

TEST(Evolve, StrangSplittingIsSecondOrder)
{
    Grid g = Grid::self_dual(64);
    Signal f = corpus("hermite1", g);
    auto run = [&](int n) {
        EvolutionSpec s = oscillator_spec(1.0);
        s.sigma = [](double x, double xi) { return cd(std::exp(-(x - 0.5) * (x - 0.5) - xi * xi)); };
        s.n_steps = n;
        return evolve(s, f);
    };
    Signal ref = run(256);
    double e1 = distance(run(8), ref), e2 = distance(run(16), ref);
    EXPECT_GT(e1 / e2, 3.5);
    EXPECT_LT(e1 / e2, 4.5);
}

TEST(Evolve, QuadraticPerturbationMatchesOneShotPropagator)
{
    // sigma = eps xi^2 commutes with xi^2, so the splitting is exact
    Grid g = Grid::self_dual(64);
    Signal f = corpus("gaussian", g);
    const double eps = 0.1, t = 0.3;
    EvolutionSpec s = free_spec(t);
    s.sigma = [eps](double, double xi) { return cd(eps * xi * xi); };
    s.n_steps = 4;
    QuadraticForm scaled = QuadraticForm::free_particle();
    scaled.Q *= 1.0 + eps;
    Signal ref = apply(propagator_quadratic(scaled, t), f);
    EXPECT_LT(relative_distance_up_to_phase(evolve(s, f), ref), 1e-8);
}

TEST(Evolve, RejectsOversizedPerturbationSteps)
{
    Grid g = Grid::self_dual(64);
    EvolutionSpec s = free_spec(1.0);
    s.sigma = [](double, double) { return cd(1000.0); };
    s.n_steps = 1;
    EXPECT_THROW(evolve(s, corpus("gaussian", g)), ConvergenceError);
    s.n_steps = -2;
    EXPECT_THROW(evolve(s, corpus("gaussian", g)), DimensionError);
}

TEST(Transport, WignerFollowsTheHamiltonFlow)
{
    Grid g = Grid::self_dual(512);
    EXPECT_LT(wigner_transport_error(free_spec(1.0), corpus("gaussian", g)), 1e-4);
    EXPECT_LT(wigner_transport_error(oscillator_spec(0.7), corpus("hermite1", g)), 1e-4);
    EvolutionSpec s = free_spec(1.0);
    s.sigma = bump;
    EXPECT_THROW(wigner_transport_error(s, corpus("gaussian", g)), Unsupported);
}

TEST(Propagation, FreeParticleShearsRectFlags)
{
    Grid g = Grid::self_dual(512);
    Signal r = corpus("rect", g);
    PropagationResult p = propagation_experiment(free_spec(0.5), r, TfrMap::wigner(g));
    EXPECT_TRUE(p.verdict.holds);
    EXPECT_FALSE(p.report_out.empty_at(1.0));
    // the sheared flags are not where the input ones were
    EXPECT_FALSE(inclusion_check(p.report_out, p.report_in).holds);

    EvolutionSpec s = free_spec(0.5);
    s.sigma = bump;
    EXPECT_TRUE(propagation_experiment(s, r, TfrMap::wigner(g)).verdict.holds);
}

TEST(Propagation, OscillatorRotatesRectFlags)
{
    Grid g = Grid::self_dual(512);
    for (double t : {kPi / 6, kPi / 4}) {
        PropagationResult p = propagation_experiment(oscillator_spec(t), corpus("rect", g), TfrMap::wigner(g));
        EXPECT_TRUE(p.verdict.holds) << t;
        EXPECT_FALSE(p.report_out.empty_at(1.0)) << t;
    }
}

TEST(Propagation, StftIsRejected)
{
    Grid g = Grid::self_dual(64);
    EXPECT_THROW(propagation_experiment(free_spec(0.5), corpus("rect", g), TfrMap::stft(g)), Unsupported);
}

TEST(Superposition, PerturbedAndFreeBranchesStayOnTheShear)
{
    Grid g = Grid::self_dual(512);
    EvolutionSpec s1 = free_spec(0.5), s2 = free_spec(0.5);
    s1.sigma = bump;
    SuperpositionResult r = superposition_experiment(corpus("rect", g), s1, s2);
    EXPECT_TRUE(r.verdict.holds);
    EXPECT_FALSE(r.report_sum.empty_at(1.0));
}

TEST(Superposition, GaussianDataStaysClean)
{
    Grid g = Grid::self_dual(512);
    EvolutionSpec s1 = free_spec(0.5), s2 = free_spec(0.5);
    s2.sigma = bump;
    SuperpositionResult r = superposition_experiment(corpus("gaussian", g), s1, s2);
    for (double s : r.report_in.options.s_grid) {
        EXPECT_TRUE(r.report_in.empty_at(s));
        EXPECT_TRUE(r.report_sum.empty_at(s));
    }
}

TEST(Superposition, NeedsSharedQuadraticPart)
{
    Grid g = Grid::self_dual(64);
    EXPECT_THROW(superposition_experiment(corpus("rect", g), free_spec(0.5), oscillator_spec(0.5)), Unsupported);
}

TEST(Interaction, EqualFormsFollowTheShear)
{
    Grid g = Grid::self_dual(512);
    InteractionExperiment E{corpus("rect", g), corpus("gaussian", g), free_spec(0.5), free_spec(0.5),
                            TfrMap::wigner(g), A_tau<double>(0.5)};
    InteractionResult r = interaction_experiment(E);
    EXPECT_TRUE(r.supported);
    EXPECT_TRUE(r.E_identity);
    EXPECT_TRUE(r.verdict.holds);
    EXPECT_FALSE(r.cross_report_t.empty_at(1.0));

    E.spec1.sigma = bump;
    E.spec2.sigma = [](double x, double xi) { return cd(1.0 + 0.5 * std::exp(-(x - 0.5) * (x - 0.5) - (xi - 1) * (xi - 1))); };
    EXPECT_TRUE(interaction_experiment(E).verdict.holds);
}

TEST(Interaction, GaussianPairStaysClean)
{
    Grid g = Grid::self_dual(512);
    Signal u = corpus("gaussian", g);
    InteractionExperiment E{u, u, free_spec(0.5), free_spec(0.5), TfrMap::wigner(g), A_tau<double>(0.5)};
    InteractionResult r = interaction_experiment(E);
    for (double s : r.cross_report_0.options.s_grid) {
        EXPECT_TRUE(r.cross_report_0.empty_at(s));
        EXPECT_TRUE(r.cross_report_t.empty_at(s));
    }
}

TEST(Interaction, DifferentFormsCheckTheShiftBlockIdentity)
{
    Grid g = Grid::self_dual(64);
    InteractionExperiment E{corpus("rect", g), corpus("gaussian", g), free_spec(0.5), oscillator_spec(0.5),
                            TfrMap::wigner(g), A_tau<double>(0.5)};
    InteractionResult r = interaction_experiment(E);
    EXPECT_TRUE(r.E_identity);
    EXPECT_EQ(r.supported, covariance_matrix(r.C_t).has_value());
    EXPECT_LT((r.C_t.matrix() - interaction_matrix(A_tau<double>(0.5), hamilton_flow(E.spec1.a, 0.5),
                                                   hamilton_flow(E.spec2.a, 0.5)).matrix())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
}
