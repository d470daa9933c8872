#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "wavefront.hpp"
#include "weyl.hpp"

namespace pswb {

struct EvolutionSpec {
    QuadraticForm a = QuadraticForm::free_particle();
    SymbolFn sigma;     // bounded perturbation; empty means zero
    double t_final = 0.0;
    int n_steps = 0;    // 0 selects 64 steps per unit time

    int steps() const
    {
        if (n_steps < 0) throw DimensionError("n_steps must be positive");
        if (n_steps > 0) return n_steps;
        return std::max(1, static_cast<int>(std::ceil(64.0 * std::abs(t_final) - 1e-12)));
    }
};

/// v -> exp(-2 pi i h Op(sigma)) v by a Taylor series on vectors, split into substeps with
/// 2 pi ||Op|| h <= 1/2 each (same sign as the metaplectic propagator of a quadratic form).
struct PerturbationStep {
    const WeylOperator* op = nullptr;
    double h = 0.0;
    int substeps = 1;

    PerturbationStep(const WeylOperator& o, double norm, double step) : op(&o), h(step)
    {
        if (norm * 2.0 * std::abs(step) > 10.0)
            throw ConvergenceError("perturbation step too large: ||Op(sigma)|| dt = " +
                                   format_double(norm * 2.0 * std::abs(step)));
        substeps = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * norm * std::abs(step) / 0.5)));
    }

    VecC operator()(VecC v) const
    {
        const cd c(0.0, -2.0 * kPi * h / substeps);
        for (int s = 0; s < substeps; ++s) {
            VecC term = v, sum = v;
            const double ref = v.norm();
            for (int k = 1; k < 60; ++k) {
                term = (c / static_cast<double>(k)) * (op->M * term);
                sum += term;
                if (term.norm() <= 1e-17 * ref) break;
            }
            v = sum;
        }
        return v;
    }
};

/// sigma = 0: one metaplectic propagator. Otherwise Strang splitting
/// E(dt/2) S(dt) E(dt/2) per step, E the perturbation exponential.
inline Signal evolve(const EvolutionSpec& spec, const Signal& u0, const QuadChirpSampler& pol = {})
{
    if (spec.t_final == 0.0) return u0;
    if (!spec.sigma) return apply(propagator_quadratic(spec.a, spec.t_final), u0, pol);
    const int n = spec.steps();
    const double dt = spec.t_final / n;
    const WeylOperator op = weyl_operator(spec.sigma, u0.grid);
    const PerturbationStep half(op, operator_norm(op.M, 60, 1e-8), 0.5 * dt);
    const MetaplecticFactorization step = propagator_quadratic(spec.a, dt);
    const int N = u0.grid.N;
    VecC v = half(Eigen::Map<const VecC>(u0.v.data(), N));
    for (int k = 0; k < n; ++k) {
        Signal s(u0.grid, std::vector<cd>(v.data(), v.data() + N));
        s = apply(step, s, pol);
        v = half(Eigen::Map<const VecC>(s.v.data(), N));
        if (k + 1 < n) v = half(v);
    }
    return Signal(u0.grid, std::vector<cd>(v.data(), v.data() + N));
}

/// Relative L2 distance between W(u(t)) and the S_t^{-1}-pullback of W(u0); sigma must be zero.
inline double wigner_transport_error(const EvolutionSpec& spec, const Signal& u0)
{
    if (spec.sigma) throw Unsupported("Wigner transport is exact only for a purely quadratic Hamiltonian");
    const SympMat<double> S = hamilton_flow(spec.a, spec.t_final);
    return relative_distance(wigner(evolve(spec, u0)), pullback(wigner(u0), symplectic_inverse(S).matrix()));
}

/// Experiments run on the 2x-oversampled grid (oversample2) unless told otherwise: wrap-around
/// images of the periodic phase space then fall outside the analysis disc, which stops at half
/// the source band (half_band).
inline Signal experiment_signal(const Signal& u, bool oversample) { return oversample ? oversample2(u) : u; }

struct PropagationResult {
    Signal u_in, u_out; // on the analysis grid
    WaveFrontReport report_in, report_out;
    SympMat<double> map;
    InclusionResult verdict;
};

/// WF(u(t)) against S_t WF(u0), with S_t the Hamilton flow of the quadratic part.
inline PropagationResult propagation_experiment(const EvolutionSpec& spec, const Signal& u0, const TfrMap& kind,
                                                const WavefrontOptions& opt = {},
                                                const ConeDecomposition& cones = ConeDecomposition::standard(),
                                                bool oversample = true)
{
    if (kind.kind == TfrMap::Stft) throw Unsupported("propagation needs a covariant representation");
    const Signal a = experiment_signal(u0, oversample);
    const TfrMap k = kind.on(a.grid);
    const WavefrontOptions o = oversample ? half_band(u0.grid, opt) : opt;
    const Signal ut = evolve(spec, a);
    PropagationResult r{a, ut, wavefront_report(k.forward(outer(a, a)), cones, o),
                        wavefront_report(k.forward(outer(ut, ut)), cones, o),
                        hamilton_flow(spec.a, spec.t_final),
                        {}};
    r.verdict = inclusion_check(r.report_out, r.report_in, r.map.matrix());
    return r;
}

struct InteractionExperiment {
    Signal u01, u02;
    EvolutionSpec spec1, spec2;
    TfrMap kind;
    SympMat<double> A; // projection of the representation on the doubled space
};

struct InteractionResult {
    WaveFrontReport cross_report_0, cross_report_t;
    SympMat<double> map;     // S_t for equal forms, identity otherwise
    SympMat<double> C_t;     // A (S_1 tensor conj S_2)
    bool E_identity = false; // E_{C_t} = E_A S_{1,t}
    bool supported = true;
    InclusionResult verdict;
};

inline InteractionResult interaction_experiment(const InteractionExperiment& E, const WavefrontOptions& opt = {},
                                                const ConeDecomposition& cones = ConeDecomposition::standard(),
                                                bool oversample = true)
{
    E.u01.check_same(E.u02);
    if (std::abs(E.spec1.t_final - E.spec2.t_final) > 1e-15) throw DimensionError("evolutions end at different times");
    const double t = E.spec1.t_final;
    InteractionResult r;
    const SympMat<double> S1 = hamilton_flow(E.spec1.a, t), S2 = hamilton_flow(E.spec2.a, t);
    r.C_t = interaction_matrix(E.A, S1, S2);
    const MatD EC = shift_block(r.C_t), EA = shift_block(E.A);
    r.E_identity = (EC - EA * S1.matrix()).cwiseAbs().maxCoeff() < 1e-10;
    r.map = SympMat<double>::unchecked(MatD::Identity(2, 2));
    const bool same_form = (E.spec1.a.Q - E.spec2.a.Q).cwiseAbs().maxCoeff() < 1e-15;
    // rebasing on C_t is only computable when C_t is again covariant
    if (!same_form && !covariance_matrix(r.C_t)) {
        r.supported = false;
        return r;
    }
    const Signal a1 = experiment_signal(E.u01, oversample), a2 = experiment_signal(E.u02, oversample);
    const TfrMap k = E.kind.on(a1.grid);
    const WavefrontOptions o = oversample ? half_band(E.u01.grid, opt) : opt;
    const Signal u1 = evolve(E.spec1, a1), u2 = evolve(E.spec2, a2);
    r.cross_report_t = wavefront_report(k.forward(outer(u1, u2)), cones, o);
    if (same_form) {
        r.map = S1;
        r.cross_report_0 = wavefront_report(k.forward(outer(a1, a2)), cones, o);
    } else {
        r.cross_report_0 = wavefront_report(TfrMap::covariant(a1.grid, r.C_t).forward(outer(a1, a2)), cones, o);
    }
    r.verdict = inclusion_check(r.cross_report_t, r.cross_report_0, r.map.matrix());
    return r;
}

struct SuperpositionResult {
    WaveFrontReport report_in, report_sum;
    InclusionResult verdict;
};

/// WF(u1(t) + u2(t)) against S_t WF(u0) for two evolutions sharing the quadratic part.
inline SuperpositionResult superposition_experiment(const Signal& u0, const EvolutionSpec& spec1,
                                                    const EvolutionSpec& spec2, const WavefrontOptions& opt = {},
                                                    const ConeDecomposition& cones = ConeDecomposition::standard(),
                                                    bool oversample = true)
{
    if ((spec1.a.Q - spec2.a.Q).cwiseAbs().maxCoeff() > 1e-15)
        throw Unsupported("superposition needs a shared quadratic part");
    if (std::abs(spec1.t_final - spec2.t_final) > 1e-15) throw DimensionError("evolutions end at different times");
    const Signal a = experiment_signal(u0, oversample);
    const WavefrontOptions o = oversample ? half_band(u0.grid, opt) : opt;
    const Signal sum = evolve(spec1, a) + evolve(spec2, a);
    SuperpositionResult r{wavefront_report(wigner(a), cones, o), wavefront_report(wigner(sum), cones, o), {}};
    r.verdict = inclusion_check(r.report_sum, r.report_in, hamilton_flow(spec1.a, spec1.t_final).matrix());
    return r;
}

} // namespace pswb
