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

#ifndef MNBF_CLI_HPP
#define MNBF_CLI_HPP

#include "config.hpp"
#include "evaluation.hpp"
#include "report_io.hpp"
#include "signal_sim.hpp"
#include "solvers.hpp"

#include <iostream>
#include <ostream>
#include <string>

namespace mnbf::cli
{
    // Process exit codes.
    inline constexpr int exit_ok = 0;
    inline constexpr int exit_input_error = 1;
    inline constexpr int exit_not_converged = 2;

    struct CommandOutput
    {
        std::string text;
        int exit_code = exit_ok;
    };

    // Designs every configured method on one snapshot realisation (the config seed).
    inline CommandOutput design(const RunConfig &config)
    {
        validate(config);
        const auto &e = config.experiment;
        const CovarianceMatrix covariance = sample_covariance(generate_snapshots(e.scenario), e.diagonal_loading);
        const AngleGrid grid = AngleGrid::uniform(e.grid_step_deg, e.steering_angle_deg());
        const SteeringMatrix steering(e.scenario.geometry, grid);

        WeightFile file;
        file.num_antennas = e.scenario.geometry.num_antennas();
        file.spacing_over_wavelength = e.scenario.geometry.spacing_over_wavelength();
        file.seed = e.scenario.rng_seed;
        file.gamma = e.gamma;
        file.b = e.b;

        CommandOutput out;
        for (Method method : e.methods)
        {
            const SolveResult result = design_beamformer(method, covariance, steering, e.gamma, e.b, e.solver);
            if (!result.diagnostics.converged)
                out.exit_code = exit_not_converged;
            file.designs.push_back({method, result.weights, result.diagnostics});
        }
        out.text = to_json_text(file);
        return out;
    }

    // Normalised beam pattern of one design from a weight file.
    inline CommandOutput pattern(const RunConfig &config)
    {
        if (config.weights_path.empty())
            throw ConfigError("field 'weights': a weight file is required");
        if (!(config.experiment.grid_step_deg > 0.0))
            throw ConfigError("field 'grid_step_deg': must be positive");

        const WeightFile file = read_weight_file(config.weights_path);
        if (file.designs.empty())
            throw FormatError("weight file contains no designs");
        const DesignRecord *design = &file.designs.front();
        if (!config.method.empty())
        {
            const auto method = parse_method(config.method);
            if (!method)
                throw ConfigError("field 'method': unknown method '" + config.method + "'");
            design = &file.find(*method);
        }

        const ArrayGeometry geometry(file.num_antennas, file.spacing_over_wavelength);
        const AngleGrid grid = AngleGrid::uniform(config.experiment.grid_step_deg, design->weights.steering_angle_deg);
        const SteeringMatrix steering(geometry, grid);
        return {to_csv_text(beam_pattern(design->weights, steering)), exit_ok};
    }

    inline CommandOutput montecarlo(const RunConfig &config)
    {
        validate(config);
        const auto &e = config.experiment;
        MonteCarloDocument doc;
        doc.seed = e.scenario.rng_seed;
        doc.trials = e.trials;
        doc.mismatch_deg = e.mismatch_deg;
        doc.gamma = e.gamma;
        doc.b = e.b;
        doc.grid_step_deg = e.grid_step_deg;
        doc.reports = monte_carlo(e);

        CommandOutput out;
        for (const auto &r : doc.reports)
            if (r.nonconverged > 0)
                out.exit_code = exit_not_converged;
        out.text = to_json_text(doc, config.per_trial);
        return out;
    }

    inline CommandOutput sweep(const RunConfig &config)
    {
        validate(config);
        std::vector<std::size_t> b_values;
        for (std::size_t b = config.b_min; b <= config.b_max; ++b)
            b_values.push_back(b);
        const SweepResult result = sweep_b(config.experiment, b_values);

        CommandOutput out;
        for (std::size_t n : result.nonconverged)
            if (n > 0)
                out.exit_code = exit_not_converged;
        out.text = to_csv_text(result);
        return out;
    }

    // Runs a command, writes its output to config.out_path (stdout when empty) and maps
    // failures onto exit codes. Output is written even when the solver did not converge.
    template <typename Command>
    int run(Command &&command, const RunConfig &config, std::ostream &err = std::cerr)
    {
        try
        {
            const CommandOutput out = command(config);
            if (config.out_path.empty())
                std::cout << out.text;
            else
                detail::write_text(config.out_path, out.text);
            if (out.exit_code == exit_not_converged)
                err << "warning: solver did not converge for at least one design\n";
            return out.exit_code;
        }
        catch (const std::exception &ex)
        {
            err << "error: " << ex.what() << "\n";
            return exit_input_error;
        }
    }

} // namespace mnbf::cli

#endif // MNBF_CLI_HPP
