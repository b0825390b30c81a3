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

#ifndef MNBF_EVALUATION_HPP
#define MNBF_EVALUATION_HPP

#include "array_model.hpp"
#include "signal_sim.hpp"
#include "solvers.hpp"
#include "weight_vector.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace mnbf
{
    enum class Method
    {
        mvdr,
        sparse,
        mixed
    };

    inline std::string_view to_string(Method method)
    {
        switch (method)
        {
        case Method::mvdr:
            return "mvdr";
        case Method::sparse:
            return "sparse";
        case Method::mixed:
            return "mixed";
        }
        return "?";
    }

    inline std::optional<Method> parse_method(std::string_view name)
    {
        if (name == "mvdr")
            return Method::mvdr;
        if (name == "sparse")
            return Method::sparse;
        if (name == "mixed")
            return Method::mixed;
        return std::nullopt;
    }

    struct BeamPattern
    {
        std::vector<double> angles_deg;
        std::vector<double> gains_db; // normalised, peak is exactly 0 dB
        std::vector<cplx> raw_gains;  // w^H a(theta)
    };

    inline BeamPattern beam_pattern(const WeightVector &weights, const SteeringMatrix &steering)
    {
        if (weights.size() != steering.rows())
            throw std::domain_error("beam_pattern: weight length does not match the array");

        const CVector gains = (weights.w.adjoint() * steering.entries()).transpose();
        BeamPattern pattern;
        pattern.angles_deg = steering.grid().angles_deg();
        pattern.raw_gains.assign(gains.data(), gains.data() + gains.size());
        pattern.gains_db.resize(pattern.raw_gains.size());

        double peak_db = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < pattern.raw_gains.size(); ++n)
        {
            pattern.gains_db[n] = 20.0 * std::log10(std::abs(pattern.raw_gains[n]));
            peak_db = std::max(peak_db, pattern.gains_db[n]);
        }
        if (!std::isfinite(peak_db))
            throw std::domain_error("beam_pattern: weights have zero gain at every grid angle");
        for (double &g : pattern.gains_db)
            g -= peak_db;
        return pattern;
    }

    // sigma_s^2 |w^H a0|^2 / (w^H (sum_j sigma_j^2 a_j a_j^H + Q) w), linear scale.
    // a0 is the true SOI direction, irrespective of where w was steered.
    inline double sinr_linear(const WeightVector &weights, const Scenario &scenario)
    {
        const CVector a0 = steering_vector(scenario.geometry, scenario.soi.doa_deg);
        const CMatrix interference = true_covariance(scenario, false).entries;
        const double numerator = scenario.source_variance(scenario.soi) * std::norm(weights.response(a0));
        const double denominator = weights.w.dot(interference * weights.w).real();
        if (!(denominator > 0.0))
            throw std::domain_error("sinr: interference-plus-noise power is zero");
        return numerator / denominator;
    }

    inline double sinr(const WeightVector &weights, const Scenario &scenario)
    {
        return 10.0 * std::log10(sinr_linear(weights, scenario));
    }

    // Everything a Monte Carlo run needs besides the per-trial randomness.
    struct ExperimentConfig
    {
        Scenario scenario = Scenario::reference();
        double grid_step_deg = 1.0;
        double gamma = 10.0;
        std::size_t b = 23;
        std::vector<Method> methods{Method::mvdr, Method::sparse, Method::mixed};
        std::size_t trials = 200;
        double mismatch_deg = 0.0;
        double diagonal_loading = 0.0;
        SolverOptions solver;
        unsigned threads = 0; // 0: one per hardware thread
        bool collect_patterns = false;

        double steering_angle_deg() const { return scenario.soi.doa_deg + mismatch_deg; }
    };

    struct SinrReport
    {
        Method method = Method::mvdr;
        double mean_sinr_db = 0.0;
        std::vector<double> per_trial_sinr_db; // converged trials only, in trial order
        std::size_t trials = 0;
        std::size_t nonconverged = 0;
        double mismatch_deg = 0.0;
        std::vector<double> mean_pattern_db; // per-trial normalised patterns averaged in dB
    };

    struct SweepResult
    {
        std::vector<std::size_t> b_values;
        std::vector<double> mean_sinr_db;
        std::size_t b_opt = 0;
        std::vector<std::size_t> nonconverged;
    };

    // dB of the arithmetic mean of linear SINRs.
    inline double mean_sinr_db(const std::vector<double> &per_trial_db)
    {
        if (per_trial_db.empty())
            return std::numeric_limits<double>::quiet_NaN();
        double sum = 0.0;
        for (double v : per_trial_db)
            sum += std::pow(10.0, v / 10.0);
        return 10.0 * std::log10(sum / static_cast<double>(per_trial_db.size()));
    }

    // Designs one beamformer. MVDR is reported as a converged zero-iteration solve.
    inline SolveResult design_beamformer(Method method, const CovarianceMatrix &covariance, const SteeringMatrix &steering,
                                         double gamma, std::size_t b, const SolverOptions &options)
    {
        switch (method)
        {
        case Method::mvdr:
        {
            SolveResult result{mvdr_closed_form(covariance, steering.steering_column(), steering.grid().steering_angle_deg()), {}};
            result.diagnostics.converged = true;
            result.diagnostics.objective_value = result.weights.w.dot(covariance.entries * result.weights.w).real();
            return result;
        }
        case Method::sparse:
            return sparse_beamformer(covariance, steering, PenaltySpec::sparse(gamma), options);
        case Method::mixed:
            return mixed_norm_beamformer(covariance, steering,
                                         PenaltySpec::mixed(gamma, partition_lobes(steering.grid(), b)), options);
        }
        throw std::invalid_argument("design_beamformer: unknown method");
    }

    namespace detail
    {
        // Runs body(i) for i in [0, count) on a small thread pool. Callers write into
        // per-index slots so the reduction order, and therefore the result, is fixed.
        template <typename Body>
        void parallel_for(std::size_t count, unsigned threads, Body &&body)
        {
            unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
            workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
            if (workers <= 1)
            {
                for (std::size_t i = 0; i < count; ++i)
                    body(i);
                return;
            }

            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::atomic<bool> failed{false};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned t = 0; t < workers; ++t)
                pool.emplace_back([&]
                                  {
                    for (std::size_t i = next++; i < count && !failed; i = next++)
                    {
                        try
                        {
                            body(i);
                        }
                        catch (...)
                        {
                            if (!failed.exchange(true))
                                failure = std::current_exception();
                        }
                    } });
            for (auto &th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);
        }

        inline Scenario trial_scenario(const Scenario &base, std::size_t trial)
        {
            Scenario s = base;
            s.rng_seed = base.rng_seed + static_cast<std::uint64_t>(trial);
            return s;
        }
    } // namespace detail

    // Fresh snapshots per trial (seed = base seed + trial index); each method is designed on the
    // sample covariance with the steering angle offset by mismatch_deg, then scored against the
    // true SOI direction. Non-converged designs are counted and left out of the mean.
    inline std::vector<SinrReport> monte_carlo(const ExperimentConfig &config)
    {
        if (config.trials < 1)
            throw std::domain_error("monte_carlo: at least one trial is required");
        config.scenario.validate();

        const AngleGrid grid = AngleGrid::uniform(config.grid_step_deg, config.steering_angle_deg());
        const SteeringMatrix steering(config.scenario.geometry, grid);
        const std::size_t num_methods = config.methods.size();

        struct TrialOutcome
        {
            double sinr_db = 0.0;
            bool converged = false;
            std::vector<double> pattern_db;
        };
        std::vector<TrialOutcome> outcomes(config.trials * num_methods);

        detail::parallel_for(config.trials, config.threads, [&](std::size_t trial)
                             {
            const Scenario scenario = detail::trial_scenario(config.scenario, trial);
            const CovarianceMatrix covariance = sample_covariance(generate_snapshots(scenario), config.diagonal_loading);
            for (std::size_t k = 0; k < num_methods; ++k)
            {
                const SolveResult result = design_beamformer(config.methods[k], covariance, steering, config.gamma, config.b, config.solver);
                TrialOutcome &out = outcomes[trial * num_methods + k];
                out.converged = result.diagnostics.converged;
                out.sinr_db = sinr(result.weights, scenario);
                if (config.collect_patterns)
                    out.pattern_db = beam_pattern(result.weights, steering).gains_db;
            } });

        std::vector<SinrReport> reports;
        reports.reserve(num_methods);
        for (std::size_t k = 0; k < num_methods; ++k)
        {
            SinrReport report;
            report.method = config.methods[k];
            report.trials = config.trials;
            report.mismatch_deg = config.mismatch_deg;
            if (config.collect_patterns)
                report.mean_pattern_db.assign(grid.size(), 0.0);
            for (std::size_t trial = 0; trial < config.trials; ++trial)
            {
                const TrialOutcome &out = outcomes[trial * num_methods + k];
                if (!out.converged)
                {
                    ++report.nonconverged;
                    continue;
                }
                report.per_trial_sinr_db.push_back(out.sinr_db);
                for (std::size_t n = 0; n < out.pattern_db.size(); ++n)
                    report.mean_pattern_db[n] += out.pattern_db[n];
            }
            const auto used = static_cast<double>(report.per_trial_sinr_db.size());
            for (double &g : report.mean_pattern_db)
                g /= used;
            report.mean_sinr_db = mean_sinr_db(report.per_trial_sinr_db);
            reports.push_back(std::move(report));
        }
        return reports;
    }

    inline std::size_t argmax_b(const std::vector<std::size_t> &b_values, const std::vector<double> &mean_db)
    {
        if (b_values.empty() || b_values.size() != mean_db.size())
            throw std::domain_error("argmax_b: empty or mismatched sweep");
        std::size_t best = 0;
        for (std::size_t i = 1; i < mean_db.size(); ++i)
            if (mean_db[i] > mean_db[best] || std::isnan(mean_db[best]))
                best = i;
        return b_values[best];
    }

    // Mean mixed-norm SINR for every b, using the same trial realisations for each b.
    inline SweepResult sweep_b(const ExperimentConfig &config, const std::vector<std::size_t> &b_values)
    {
        if (config.trials < 1)
            throw std::domain_error("sweep_b: at least one trial is required");
        if (b_values.empty())
            throw std::domain_error("sweep_b: no b values given");
        config.scenario.validate();

        const AngleGrid grid = AngleGrid::uniform(config.grid_step_deg, config.steering_angle_deg());
        const SteeringMatrix steering(config.scenario.geometry, grid);
        std::vector<LobePartition> partitions;
        partitions.reserve(b_values.size());
        for (std::size_t b : b_values)
            partitions.push_back(partition_lobes(grid, b));

        const std::size_t nb = b_values.size();
        std::vector<double> linear(config.trials * nb, 0.0);
        std::vector<char> converged(config.trials * nb, 0);

        detail::parallel_for(config.trials, config.threads, [&](std::size_t trial)
                             {
            const Scenario scenario = detail::trial_scenario(config.scenario, trial);
            const CovarianceMatrix covariance = sample_covariance(generate_snapshots(scenario), config.diagonal_loading);
            for (std::size_t i = 0; i < nb; ++i)
            {
                const SolveResult result = mixed_norm_beamformer(covariance, steering, PenaltySpec::mixed(config.gamma, partitions[i]), config.solver);
                linear[trial * nb + i] = sinr_linear(result.weights, scenario);
                converged[trial * nb + i] = result.diagnostics.converged ? 1 : 0;
            } });

        SweepResult result;
        result.b_values = b_values;
        result.mean_sinr_db.resize(nb);
        result.nonconverged.assign(nb, 0);
        for (std::size_t i = 0; i < nb; ++i)
        {
            double sum = 0.0;
            std::size_t used = 0;
            for (std::size_t trial = 0; trial < config.trials; ++trial)
            {
                if (!converged[trial * nb + i])
                {
                    ++result.nonconverged[i];
                    continue;
                }
                sum += linear[trial * nb + i];
                ++used;
            }
            result.mean_sinr_db[i] = used > 0 ? 10.0 * std::log10(sum / static_cast<double>(used))
                                              : std::numeric_limits<double>::quiet_NaN();
        }
        result.b_opt = argmax_b(result.b_values, result.mean_sinr_db);
        return result;
    }

} // namespace mnbf

#endif // MNBF_EVALUATION_HPP
