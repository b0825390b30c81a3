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

#ifndef MNBF_SOLVERS_HPP
#define MNBF_SOLVERS_HPP

#include "array_model.hpp"
#include "prox.hpp"
#include "signal_sim.hpp"
#include "weight_vector.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace mnbf
{
    class SingularCovarianceError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class PenaltyMode
    {
        sparse_only, // gamma * ||w^H A||_1 over the whole grid
        mixed        // gamma * (||w^H A_M||_inf + ||w^H A_S||_1)
    };

    struct PenaltySpec
    {
        double gamma = 10.0;
        LobePartition partition;
        PenaltyMode mode = PenaltyMode::sparse_only;

        static PenaltySpec sparse(double gamma) { return {gamma, {}, PenaltyMode::sparse_only}; }
        static PenaltySpec mixed(double gamma, LobePartition partition)
        {
            return {gamma, std::move(partition), PenaltyMode::mixed};
        }
    };

    struct SolverOptions
    {
        int max_iterations = 20000;
        double abs_tol = 1e-7;
        double rel_tol = 1e-5;
        double penalty_parameter_rho = 1.0;
        double over_relaxation = 1.0;
        bool adaptive_rho = false;
        int adaptation_interval = 50;

        void validate() const
        {
            if (max_iterations < 1)
                throw std::domain_error("SolverOptions: max_iterations must be at least 1");
            if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
                throw std::domain_error("SolverOptions: tolerances must be positive");
            if (!(penalty_parameter_rho > 0.0))
                throw std::domain_error("SolverOptions: rho must be positive");
            if (adaptation_interval < 1)
                throw std::domain_error("SolverOptions: adaptation interval must be at least 1");
            if (!(over_relaxation >= 1.0 && over_relaxation <= 1.8))
                throw std::domain_error("SolverOptions: over-relaxation must lie in [1, 1.8]");
        }
    };

    struct SolveDiagnostics
    {
        int iterations_used = 0;
        double final_primal_residual = 0.0;
        double final_dual_residual = 0.0;
        double objective_value = 0.0;
        bool converged = false;
    };

    struct SolveResult
    {
        WeightVector weights;
        SolveDiagnostics diagnostics;
    };

    // Penalty term (without gamma) evaluated on the conjugated gains A^H w.
    // Magnitudes of A^H w and w^H A coincide.
    inline double penalty_norm(const CVector &gains, const PenaltySpec &penalty)
    {
        if (penalty.mode == PenaltyMode::sparse_only)
            return gains.cwiseAbs().sum();

        double peak = 0.0;
        for (std::size_t n : penalty.partition.mainlobe_indices)
            peak = std::max(peak, std::abs(gains(static_cast<Eigen::Index>(n))));
        double side = 0.0;
        for (std::size_t n : penalty.partition.sidelobe_indices)
            side += std::abs(gains(static_cast<Eigen::Index>(n)));
        return peak + side;
    }

    // w^H R w + gamma * penalty(w^H A).
    inline double beamformer_objective(const CovarianceMatrix &covariance, const SteeringMatrix &steering,
                                       const PenaltySpec &penalty, const CVector &w)
    {
        const double quadratic = w.dot(covariance.entries * w).real();
        if (penalty.gamma == 0.0)
            return quadratic;
        return quadratic + penalty.gamma * penalty_norm(steering.entries().adjoint() * w, penalty);
    }

    // w = R^-1 a0 / (a0^H R^-1 a0).
    inline WeightVector mvdr_closed_form(const CovarianceMatrix &covariance, const CVector &a0, double steering_angle_deg)
    {
        if (covariance.size() != a0.size())
            throw std::domain_error("mvdr_closed_form: covariance and steering vector sizes differ");
        if (a0.norm() == 0.0)
            throw std::domain_error("mvdr_closed_form: steering vector is zero");

        const CMatrix herm = 0.5 * (covariance.entries + covariance.entries.adjoint());
        Eigen::LLT<CMatrix> llt(herm);
        const double diag_max = herm.diagonal().real().cwiseAbs().maxCoeff();
        bool singular = llt.info() != Eigen::Success || !(diag_max > 0.0);
        if (!singular)
        {
            const double l_min = llt.matrixLLT().diagonal().real().minCoeff();
            singular = !(l_min * l_min > 1e-14 * diag_max);
        }
        if (singular)
            throw SingularCovarianceError("mvdr_closed_form: covariance is singular or indefinite; "
                                          "enable diagonal loading");

        const CVector r_inv_a = llt.solve(a0);
        const cplx denom = a0.dot(r_inv_a);
        return {r_inv_a / std::conj(denom), steering_angle_deg};
    }

    inline WeightVector mvdr_closed_form(const CovarianceMatrix &covariance, const ArrayGeometry &geometry,
                                         double steering_angle_deg)
    {
        return mvdr_closed_form(covariance, steering_vector(geometry, steering_angle_deg), steering_angle_deg);
    }

    // Per-iteration snapshot handed to an optional observer.
    struct IterationState
    {
        int iteration = 0;
        double objective = 0.0;
        double best_objective = 0.0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        double rho = 0.0;
        const CVector *w = nullptr;
    };

    // Minimises w^H R w + gamma * penalty(w^H A) subject to w^H a0 = 1 by ADMM on the split
    // z = A^H w. The constraint is removed by writing w = w_p + B v with w_p = a0/||a0||^2 and
    // B an orthonormal basis of the complement of a0, so every iterate is feasible.
    class CompositeSolver
    {
    public:
        using Observer = std::function<void(const IterationState &)>;

        CompositeSolver(const CovarianceMatrix &covariance, const SteeringMatrix &steering, PenaltySpec penalty,
                        SolverOptions options = {})
            : penalty_(std::move(penalty)), options_(options), steering_angle_deg_(steering.grid().steering_angle_deg())
        {
            options_.validate();
            if (!(penalty_.gamma >= 0.0) || !std::isfinite(penalty_.gamma))
                throw std::domain_error("CompositeSolver: gamma must be a non-negative finite number");
            if (covariance.size() != steering.rows())
                throw std::domain_error("CompositeSolver: covariance size does not match the array");
            if (penalty_.mode == PenaltyMode::mixed)
                check_partition(steering);

            const Eigen::Index m = steering.rows();
            const Eigen::Index n = steering.cols();
            const CVector a0 = steering.steering_column();

            w_p_ = a0 / a0.squaredNorm();
            const CMatrix a0_col = a0;
            Eigen::HouseholderQR<CMatrix> qr(a0_col);
            const CMatrix q = qr.householderQ() * CMatrix::Identity(m, m);
            basis_ = q.rightCols(m - 1);

            const CMatrix r = 0.5 * (covariance.entries + covariance.entries.adjoint());
            quad_ = basis_.adjoint() * r * basis_;
            quad_ = 0.5 * (quad_ + quad_.adjoint()).eval();
            lin_ = basis_.adjoint() * r * w_p_;
            const_ = w_p_.dot(r * w_p_).real();

            gains_map_ = steering.entries().adjoint() * basis_;
            gains_offset_ = steering.entries().adjoint() * w_p_;
            gram_ = gains_map_.adjoint() * gains_map_;
            gh_offset_ = gains_map_.adjoint() * gains_offset_;
            num_gains_ = n;

            // rho is given relative to the curvature ratio of the two ADMM blocks so that one
            // default works regardless of the covariance scale.
            const double gram_trace = gram_.trace().real();
            const double quad_trace = 2.0 * quad_.trace().real();
            rho_scale_ = gram_trace > 0.0 && quad_trace > 0.0 ? quad_trace / gram_trace : 1.0;

            if (penalty_.mode == PenaltyMode::mixed)
            {
                main_begin_ = static_cast<Eigen::Index>(penalty_.partition.mainlobe_indices.front());
                main_len_ = static_cast<Eigen::Index>(penalty_.partition.mainlobe_indices.size());
            }
        }

        void set_observer(Observer observer) { observer_ = std::move(observer); }

        SolveResult solve()
        {
            const Eigen::Index dof = basis_.cols();
            CVector v = CVector::Zero(dof);
            Eigen::LLT<CMatrix> quad_llt(quad_);
            const bool quad_pd = quad_llt.info() == Eigen::Success;
            if (quad_pd)
                v = -quad_llt.solve(lin_);

            if (penalty_.gamma == 0.0)
            {
                if (!quad_pd)
                    throw SingularCovarianceError("CompositeSolver: covariance is singular on the constraint set; "
                                                  "enable diagonal loading");
                SolveResult result{make_weights(v), {}};
                result.diagnostics.iterations_used = 1;
                result.diagnostics.objective_value = quadratic_value(v);
                result.diagnostics.converged = true;
                return result;
            }

            double rho = options_.penalty_parameter_rho * rho_scale_;
            Eigen::LLT<CMatrix> kkt = factor(rho);

            // Only G v and G^H z are formed per iteration; G^H u and G^H x follow from them.
            CVector x = gains_offset_ + gains_map_ * v;
            CVector z = x;
            CVector u = CVector::Zero(num_gains_);
            CVector gh_z = gains_map_.adjoint() * z;
            CVector gh_u = CVector::Zero(dof);
            CVector gh_z_old(dof);

            CVector best_v = v;
            double best_objective = objective_from(v, x);

            const double alpha = options_.over_relaxation;
            const double sqrt_n = std::sqrt(static_cast<double>(num_gains_));
            const double sqrt_dof = std::sqrt(static_cast<double>(dof));

            SolveDiagnostics diag;
            for (int it = 1; it <= options_.max_iterations; ++it)
            {
                v = kkt.solve(rho * (gh_z - gh_u - gh_offset_) - 2.0 * lin_);
                x.noalias() = gains_map_ * v;
                x += gains_offset_;
                const CVector gh_x = gram_ * v + gh_offset_;

                const CVector x_hat = alpha * x + (1.0 - alpha) * z;
                const CVector gh_x_hat = alpha * gh_x + (1.0 - alpha) * gh_z;
                z = x_hat + u;
                apply_prox(z, penalty_.gamma / rho);
                u += x_hat - z;

                gh_z_old = gh_z;
                gh_z.noalias() = gains_map_.adjoint() * z;
                gh_u += gh_x_hat - gh_z;

                const double primal = (x - z).norm();
                const double dual = rho * (gh_z - gh_z_old).norm();
                const double eps_primal = sqrt_n * options_.abs_tol + options_.rel_tol * std::max(x.norm(), z.norm());
                const double eps_dual = sqrt_dof * options_.abs_tol + options_.rel_tol * rho * gh_u.norm();

                const double objective = objective_from(v, x);
                if (objective < best_objective)
                {
                    best_objective = objective;
                    best_v = v;
                }

                diag.iterations_used = it;
                diag.final_primal_residual = primal;
                diag.final_dual_residual = dual;

                if (observer_)
                {
                    const CVector w = w_p_ + basis_ * v;
                    observer_({it, objective, best_objective, primal, dual, rho, &w});
                }

                if (primal <= eps_primal && dual <= eps_dual)
                {
                    diag.converged = true;
                    break;
                }

                if (options_.adaptive_rho && it % options_.adaptation_interval == 0)
                {
                    // Residual balancing on tolerance-normalised residuals: factor 2 once one
                    // dominates the other by 10x.
                    const double primal_ratio = primal / eps_primal;
                    const double dual_ratio = dual / eps_dual;
                    double scale = 1.0;
                    if (primal_ratio > 10.0 * dual_ratio)
                        scale = 2.0;
                    else if (dual_ratio > 10.0 * primal_ratio)
                        scale = 0.5;
                    if (scale != 1.0)
                    {
                        rho *= scale;
                        u /= scale;
                        gh_u /= scale;
                        kkt = factor(rho);
                    }
                }
            }

            diag.objective_value = best_objective;
            return {make_weights(best_v), diag};
        }

    private:
        void check_partition(const SteeringMatrix &steering) const
        {
            const auto &part = penalty_.partition;
            const auto n = static_cast<std::size_t>(steering.cols());
            const std::size_t centre = steering.grid().soi_index();
            if (part.mainlobe_indices.size() != 2 * part.b + 1 ||
                part.mainlobe_indices.size() + part.sidelobe_indices.size() != n ||
                part.mainlobe_indices.front() + part.b != centre || part.mainlobe_indices.back() != centre + part.b)
                throw std::domain_error("CompositeSolver: lobe partition does not match the steering grid");
        }

        Eigen::LLT<CMatrix> factor(double rho) const
        {
            const CMatrix kkt = 2.0 * quad_ + rho * gram_;
            Eigen::LLT<CMatrix> llt(kkt);
            if (llt.info() != Eigen::Success)
                throw SingularCovarianceError("CompositeSolver: quadratic subproblem is not positive definite");
            return llt;
        }

        void apply_prox(CVector &z, double tau) const
        {
            if (penalty_.mode == PenaltyMode::sparse_only)
            {
                prox_l1_complex_inplace(z, tau);
                return;
            }
            prox_linf_complex_inplace(z.segment(main_begin_, main_len_), tau);
            if (main_begin_ > 0)
                prox_l1_complex_inplace(z.head(main_begin_), tau);
            const Eigen::Index tail = num_gains_ - main_begin_ - main_len_;
            if (tail > 0)
                prox_l1_complex_inplace(z.tail(tail), tau);
        }

        double quadratic_value(const CVector &v) const
        {
            return const_ + 2.0 * lin_.dot(v).real() + v.dot(quad_ * v).real();
        }

        double objective_from(const CVector &v, const CVector &gains) const
        {
            return quadratic_value(v) + penalty_.gamma * penalty_norm(gains, penalty_);
        }

        WeightVector make_weights(const CVector &v) const { return {w_p_ + basis_ * v, steering_angle_deg_}; }

        PenaltySpec penalty_;
        SolverOptions options_;
        double steering_angle_deg_;
        Observer observer_;

        CVector w_p_;
        CMatrix basis_;
        CMatrix quad_;
        CVector lin_;
        double const_ = 0.0;
        CMatrix gains_map_;
        CVector gains_offset_;
        CMatrix gram_;
        CVector gh_offset_;
        double rho_scale_ = 1.0;
        Eigen::Index num_gains_ = 0;
        Eigen::Index main_begin_ = 0;
        Eigen::Index main_len_ = 0;
    };

    inline SolveResult solve_composite(const CovarianceMatrix &covariance, const SteeringMatrix &steering,
                                       const PenaltySpec &penalty, const SolverOptions &options = {})
    {
        return CompositeSolver(covariance, steering, penalty, options).solve();
    }

    // l1 penalty on the gains over the whole steering grid.
    inline SolveResult sparse_beamformer(const CovarianceMatrix &covariance, const SteeringMatrix &steering,
                                         const PenaltySpec &penalty, const SolverOptions &options = {})
    {
        if (penalty.mode != PenaltyMode::sparse_only)
            throw std::invalid_argument("sparse_beamformer: penalty mode must be sparse_only");
        return solve_composite(covariance, steering, penalty, options);
    }

    // l-infinity penalty on the mainlobe gains plus l1 on the sidelobe gains.
    inline SolveResult mixed_norm_beamformer(const CovarianceMatrix &covariance, const SteeringMatrix &steering,
                                             const PenaltySpec &penalty, const SolverOptions &options = {})
    {
        if (penalty.mode != PenaltyMode::mixed)
            throw std::invalid_argument("mixed_norm_beamformer: penalty mode must be mixed");
        return solve_composite(covariance, steering, penalty, options);
    }

} // namespace mnbf

#endif // MNBF_SOLVERS_HPP
