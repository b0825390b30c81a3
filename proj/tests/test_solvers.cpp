// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <mnbf/evaluation.hpp>
#include <mnbf/solvers.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace mnbf;

namespace
{
    struct SmallInstance
    {
        ArrayGeometry geometry{4, 0.5};
        AngleGrid grid = AngleGrid::uniform(10.0);
        SteeringMatrix steering{geometry, grid};
        CovarianceMatrix covariance;
    };

    SmallInstance small_instance(std::mt19937_64 &rng)
    {
        SmallInstance inst;
        inst.covariance = {oracle::random_pd(rng, 4), CovarianceKind::analytic};
        return inst;
    }

    std::vector<bool> mainlobe_mask(const AngleGrid &grid, const LobePartition &p)
    {
        std::vector<bool> mask(grid.size(), false);
        for (std::size_t n : p.mainlobe_indices)
            mask[n] = true;
        return mask;
    }

    double max_abs_diff(const CVector &a, const CVector &b) { return (a - b).cwiseAbs().maxCoeff(); }
} // namespace

TEST(MvdrClosedForm, IsotropicNoiseGivesMatchedFilter)
{
    const CovarianceMatrix r{CMatrix::Identity(8, 8), CovarianceKind::analytic};
    const CVector a0 = CVector::Ones(8);
    const WeightVector w = mvdr_closed_form(r, a0, 0.0);
    EXPECT_LT(max_abs_diff(w.w, a0 / 8.0), 1e-15);
}

TEST(MvdrClosedForm, AnalyticCovarianceReachesOptimalSinr)
{
    // With the exact covariance, MVDR is the max-SINR beamformer:
    // SINR = sigma_s^2 a0^H R_in^-1 a0.
    const Scenario s = Scenario::reference();
    const WeightVector w = mvdr_closed_form(true_covariance(s), s.geometry, 0.0);
    const CVector a0 = steering_vector(s.geometry, 0.0);
    const CMatrix r_in = true_covariance(s, false).entries;
    const double optimum = 10.0 * std::log10(10.0 * a0.dot(r_in.ldlt().solve(a0)).real());
    EXPECT_NEAR(sinr(w, s), optimum, 1e-9);
    EXPECT_LT(w.distortionless_error(s.geometry), 1e-10);
}

TEST(MvdrClosedForm, BeatsRandomFeasiblePerturbations)
{
    std::mt19937_64 rng(51);
    const CovarianceMatrix r{oracle::random_pd(rng, 4), CovarianceKind::analytic};
    const CVector a0 = steering_vector(ArrayGeometry(4, 0.5), 25.0);
    const WeightVector w = mvdr_closed_form(r, a0, 25.0);
    EXPECT_LT(std::abs(w.w.dot(a0) - 1.0), 1e-10);
    const double best = w.w.dot(r.entries * w.w).real();
    for (int i = 0; i < 10000; ++i)
    {
        CVector p = w.w + 0.3 * oracle::random_cvector(rng, 4);
        p -= a0 * ((a0.dot(p) - 1.0) / a0.squaredNorm());
        EXPECT_GT(p.dot(r.entries * p).real(), best);
    }
}

TEST(MvdrClosedForm, SingularCovarianceAsksForLoading)
{
    const CVector x = CVector::Ones(4);
    const CovarianceMatrix r = sample_covariance({CMatrix(x)});
    EXPECT_THROW(mvdr_closed_form(r, x, 0.0), SingularCovarianceError);
    EXPECT_NO_THROW(mvdr_closed_form(sample_covariance({CMatrix(x)}, 1e-3), x, 0.0));
}

TEST(SolveComposite, ZeroGammaIsClosedForm)
{
    std::mt19937_64 rng(61);
    const SmallInstance inst = small_instance(rng);
    const WeightVector mvdr = mvdr_closed_form(inst.covariance, inst.steering.steering_column(), 0.0);
    const SolveResult sparse = sparse_beamformer(inst.covariance, inst.steering, PenaltySpec::sparse(0.0));
    const SolveResult mixed = mixed_norm_beamformer(inst.covariance, inst.steering,
                                                    PenaltySpec::mixed(0.0, partition_lobes(inst.grid, 2)));
    EXPECT_LT(max_abs_diff(sparse.weights.w, mvdr.w), 1e-5);
    EXPECT_LT(max_abs_diff(mixed.weights.w, mvdr.w), 1e-5);
    EXPECT_TRUE(sparse.diagnostics.converged);
    EXPECT_EQ(sparse.diagnostics.iterations_used, 1);
}

TEST(SolveComposite, TinyGammaApproachesClosedForm)
{
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 10; ++trial)
    {
        const SmallInstance inst = small_instance(rng);
        const WeightVector mvdr = mvdr_closed_form(inst.covariance, inst.steering.steering_column(), 0.0);
        const SolveResult sparse = sparse_beamformer(inst.covariance, inst.steering, PenaltySpec::sparse(1e-6));
        const SolveResult mixed = mixed_norm_beamformer(inst.covariance, inst.steering,
                                                        PenaltySpec::mixed(1e-6, partition_lobes(inst.grid, 2)));
        EXPECT_LT(max_abs_diff(sparse.weights.w, mvdr.w), 1e-3);
        EXPECT_LT(max_abs_diff(mixed.weights.w, mvdr.w), 1e-3);
    }
}

TEST(SparseBeamformer, MatchesSubgradientOracle)
{
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 20; ++trial)
    {
        const SmallInstance inst = small_instance(rng);
        const PenaltySpec penalty = PenaltySpec::sparse(1.0);
        const SolveResult result = sparse_beamformer(inst.covariance, inst.steering, penalty);
        ASSERT_TRUE(result.diagnostics.converged) << "trial " << trial;
        const auto ref = oracle::projected_subgradient(inst.covariance.entries, inst.steering.entries(),
                                                       inst.steering.steering_column(), 1.0,
                                                       std::vector<bool>(inst.grid.size(), false), false);
        const double obj = beamformer_objective(inst.covariance, inst.steering, penalty, result.weights.w);
        EXPECT_NEAR(obj, result.diagnostics.objective_value, 1e-9 * obj);
        EXPECT_LT(std::abs(obj - ref.objective), 1e-3 * ref.objective) << "trial " << trial;
    }
}

TEST(MixedNormBeamformer, MatchesSubgradientOracle)
{
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 20; ++trial)
    {
        const SmallInstance inst = small_instance(rng);
        const LobePartition part = partition_lobes(inst.grid, 2);
        const PenaltySpec penalty = PenaltySpec::mixed(1.0, part);
        const SolveResult result = mixed_norm_beamformer(inst.covariance, inst.steering, penalty);
        ASSERT_TRUE(result.diagnostics.converged) << "trial " << trial;
        const auto ref = oracle::projected_subgradient(inst.covariance.entries, inst.steering.entries(),
                                                       inst.steering.steering_column(), 1.0,
                                                       mainlobe_mask(inst.grid, part), true);
        const double obj = beamformer_objective(inst.covariance, inst.steering, penalty, result.weights.w);
        EXPECT_LT(std::abs(obj - ref.objective), 1e-3 * ref.objective) << "trial " << trial;
    }
}

TEST(SolveComposite, EveryIterateIsDistortionless)
{
    std::mt19937_64 rng(81);
    const SmallInstance inst = small_instance(rng);
    const CVector a0 = inst.steering.steering_column();
    CompositeSolver solver(inst.covariance, inst.steering, PenaltySpec::mixed(1.0, partition_lobes(inst.grid, 3)));
    double worst = 0.0;
    int seen = 0;
    solver.set_observer([&](const IterationState &state)
                        {
        worst = std::max(worst, std::abs(state.w->dot(a0) - 1.0));
        ++seen; });
    const SolveResult result = solver.solve();
    EXPECT_EQ(seen, result.diagnostics.iterations_used);
    EXPECT_LT(worst, 1e-13);
}

TEST(SolveComposite, BestObjectiveDecreasesOnRandomInstances)
{
    std::mt19937_64 rng(82);
    for (int trial = 0; trial < 20; ++trial)
    {
        const SmallInstance inst = small_instance(rng);
        const PenaltySpec penalty = trial % 2 ? PenaltySpec::sparse(2.0) : PenaltySpec::mixed(2.0, partition_lobes(inst.grid, 1));
        CompositeSolver solver(inst.covariance, inst.steering, penalty);
        double first = std::numeric_limits<double>::quiet_NaN(), previous = std::numeric_limits<double>::infinity();
        bool monotone = true;
        solver.set_observer([&](const IterationState &state)
                            {
            if (std::isnan(first))
                first = state.objective;
            monotone = monotone && state.best_objective <= previous;
            previous = state.best_objective; });
        const SolveResult result = solver.solve();
        EXPECT_TRUE(monotone);
        EXPECT_LE(result.diagnostics.objective_value, first);
        // The starting point is the closed-form MVDR, which is feasible.
        const WeightVector mvdr = mvdr_closed_form(inst.covariance, inst.steering.steering_column(), 0.0);
        EXPECT_LE(result.diagnostics.objective_value, beamformer_objective(inst.covariance, inst.steering, penalty, mvdr.w) + 1e-12);
    }
}

TEST(MixedNormBeamformer, ObjectiveNoWorseThanMvdrPoint)
{
    const Scenario s = Scenario::reference(5);
    const CovarianceMatrix r = sample_covariance(generate_snapshots(s));
    const AngleGrid grid = AngleGrid::uniform(1.0);
    const SteeringMatrix a(s.geometry, grid);
    const PenaltySpec penalty = PenaltySpec::mixed(10.0, partition_lobes(grid, 23));
    const SolveResult result = mixed_norm_beamformer(r, a, penalty);
    EXPECT_TRUE(result.diagnostics.converged);
    const WeightVector mvdr = mvdr_closed_form(r, s.geometry, 0.0);
    EXPECT_LE(beamformer_objective(r, a, penalty, result.weights.w), beamformer_objective(r, a, penalty, mvdr.w));
    EXPECT_LT(result.weights.distortionless_error(s.geometry), 1e-12);
}

TEST(MixedNormBeamformer, ZeroHalfWidthCoincidesWithSparse)
{
    // With b = 0 the mainlobe term is |w^H a0| = 1, the same constant the l1 term picks up
    // from the SOI column, so both problems have identical objectives.
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 5; ++trial)
    {
        const SmallInstance inst = small_instance(rng);
        const PenaltySpec sparse_pen = PenaltySpec::sparse(1.0);
        const PenaltySpec mixed_pen = PenaltySpec::mixed(1.0, partition_lobes(inst.grid, 0));
        SolverOptions tight;
        tight.abs_tol = 1e-10;
        tight.rel_tol = 1e-9;
        tight.max_iterations = 200000;
        const SolveResult sparse = sparse_beamformer(inst.covariance, inst.steering, sparse_pen, tight);
        const SolveResult mixed = mixed_norm_beamformer(inst.covariance, inst.steering, mixed_pen, tight);
        EXPECT_NEAR(sparse.diagnostics.objective_value, mixed.diagnostics.objective_value, 1e-7);
        EXPECT_LT(max_abs_diff(sparse.weights.w, mixed.weights.w), 1e-4);
        EXPECT_NEAR(beamformer_objective(inst.covariance, inst.steering, sparse_pen, mixed.weights.w),
                    beamformer_objective(inst.covariance, inst.steering, mixed_pen, mixed.weights.w), 1e-12);
    }
}

TEST(SolveComposite, CommonPhaseLeavesObjectiveUnchanged)
{
    std::mt19937_64 rng(101);
    const SmallInstance inst = small_instance(rng);
    const cplx phase = std::polar(1.0, 1.234);
    // Build a rotated problem by hand: every steering column times the same phase.
    const SteeringMatrix &a = inst.steering;
    const PenaltySpec penalty = PenaltySpec::mixed(1.5, partition_lobes(inst.grid, 2));
    const SolveResult base = mixed_norm_beamformer(inst.covariance, a, penalty);

    const CVector w = base.weights.w;
    const CVector w_rot = w * phase; // w'^H (phase * a) = w^H a
    const double direct = oracle::objective(inst.covariance.entries, a.entries(), 1.5, mainlobe_mask(inst.grid, penalty.partition), true, w);
    const double rotated = oracle::objective(inst.covariance.entries, a.entries() * phase, 1.5, mainlobe_mask(inst.grid, penalty.partition), true, w_rot);
    EXPECT_NEAR(direct, rotated, 1e-12 * direct);
    EXPECT_NEAR(std::abs(w_rot.dot(a.steering_column() * phase) - 1.0), 0.0, 1e-12);

    // Optimal value of the rotated problem from the oracle matches the original optimum.
    const auto ref_rot = oracle::projected_subgradient(inst.covariance.entries, a.entries() * phase, a.steering_column() * phase,
                                                       1.5, mainlobe_mask(inst.grid, penalty.partition), true, 400000, 8);
    EXPECT_LT(std::abs(ref_rot.objective - base.diagnostics.objective_value), 1e-3 * ref_rot.objective);
}

TEST(SolveComposite, NonConvergenceIsReportedNotThrown)
{
    const Scenario s = Scenario::reference(1);
    const CovarianceMatrix r = sample_covariance(generate_snapshots(s));
    const AngleGrid grid = AngleGrid::uniform(1.0);
    const SteeringMatrix a(s.geometry, grid);
    SolverOptions opts;
    opts.max_iterations = 3;
    const SolveResult result = mixed_norm_beamformer(r, a, PenaltySpec::mixed(10.0, partition_lobes(grid, 23)), opts);
    EXPECT_FALSE(result.diagnostics.converged);
    EXPECT_EQ(result.diagnostics.iterations_used, 3);
    EXPECT_LT(result.weights.distortionless_error(s.geometry), 1e-12);
}

TEST(SolveComposite, AdaptiveRhoStillConverges)
{
    std::mt19937_64 rng(111);
    const SmallInstance inst = small_instance(rng);
    SolverOptions opts;
    opts.adaptive_rho = true;
    const PenaltySpec penalty = PenaltySpec::sparse(1.0);
    const SolveResult adaptive = sparse_beamformer(inst.covariance, inst.steering, penalty, opts);
    const SolveResult fixed = sparse_beamformer(inst.covariance, inst.steering, penalty);
    EXPECT_TRUE(adaptive.diagnostics.converged);
    EXPECT_NEAR(adaptive.diagnostics.objective_value, fixed.diagnostics.objective_value, 1e-4 * fixed.diagnostics.objective_value);
}

TEST(SolveComposite, RejectsInconsistentInputs)
{
    std::mt19937_64 rng(121);
    const SmallInstance inst = small_instance(rng);
    const LobePartition other = partition_lobes(AngleGrid::uniform(5.0), 2);
    EXPECT_THROW(mixed_norm_beamformer(inst.covariance, inst.steering, PenaltySpec::mixed(1.0, other)), std::domain_error);
    EXPECT_THROW(sparse_beamformer(inst.covariance, inst.steering, PenaltySpec::mixed(1.0, partition_lobes(inst.grid, 1))),
                 std::invalid_argument);
    EXPECT_THROW(mixed_norm_beamformer(inst.covariance, inst.steering, PenaltySpec::sparse(1.0)), std::invalid_argument);
    EXPECT_THROW(sparse_beamformer(inst.covariance, inst.steering, PenaltySpec::sparse(-1.0)), std::domain_error);
    SolverOptions bad;
    bad.over_relaxation = 2.0;
    EXPECT_THROW(sparse_beamformer(inst.covariance, inst.steering, PenaltySpec::sparse(1.0), bad), std::domain_error);
    const CovarianceMatrix wrong{CMatrix::Identity(3, 3), CovarianceKind::analytic};
    EXPECT_THROW(sparse_beamformer(wrong, inst.steering, PenaltySpec::sparse(1.0)), std::domain_error);
}

TEST(Solvers, EveryReturnedWeightIsDistortionless)
{
    std::mt19937_64 rng(131);
    for (int trial = 0; trial < 10; ++trial)
    {
        const Scenario s = Scenario::reference(500 + static_cast<std::uint64_t>(trial));
        const CovarianceMatrix r = sample_covariance(generate_snapshots(s));
        const double steer = std::uniform_int_distribution<int>(-10, 10)(rng);
        const AngleGrid grid = AngleGrid::uniform(1.0, steer);
        const SteeringMatrix a(s.geometry, grid);
        for (Method m : {Method::mvdr, Method::sparse, Method::mixed})
        {
            const SolveResult res = design_beamformer(m, r, a, 10.0, 23, {});
            EXPECT_LE(res.weights.distortionless_error(s.geometry), 1e-6);
            EXPECT_EQ(res.weights.steering_angle_deg, steer);
        }
    }
}
