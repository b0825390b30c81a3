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

#include <mnbf/cli.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace
{
    struct Overrides
    {
        std::string config_path;
        std::optional<std::string> out;
        std::optional<std::size_t> trials;
        std::optional<double> mismatch;
        std::optional<std::uint64_t> seed;
        std::optional<double> gamma;
        std::optional<std::size_t> b;
        std::optional<double> grid_step;
        std::optional<std::string> weights;
        std::optional<std::string> method;
        std::optional<std::size_t> b_min;
        std::optional<std::size_t> b_max;
        std::optional<unsigned> threads;
        bool per_trial = false;
    };

    void add_common(CLI::App *cmd, Overrides &o)
    {
        cmd->add_option("--config", o.config_path, "Key-value config file (defaults reproduce the reference setup)");
        cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
        cmd->add_option("--grid-step", o.grid_step, "Angle grid step in degrees");
        cmd->add_option("--seed", o.seed, "Base RNG seed");
        cmd->add_option("--gamma", o.gamma, "Penalty weight");
        cmd->add_option("--b", o.b, "Mainlobe half-width in grid steps");
        cmd->add_option("--mismatch", o.mismatch, "Steering offset from the SOI DOA in degrees");
        cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    }

    mnbf::RunConfig resolve(const Overrides &o)
    {
        mnbf::RunConfig config = o.config_path.empty() ? mnbf::RunConfig{} : mnbf::load_config(o.config_path);
        auto &e = config.experiment;
        if (o.out)
            config.out_path = *o.out;
        if (o.trials)
            e.trials = *o.trials;
        if (o.mismatch)
            e.mismatch_deg = *o.mismatch;
        if (o.seed)
            e.scenario.rng_seed = *o.seed;
        if (o.gamma)
            e.gamma = *o.gamma;
        if (o.b)
            e.b = *o.b;
        if (o.grid_step)
            e.grid_step_deg = *o.grid_step;
        if (o.weights)
            config.weights_path = *o.weights;
        if (o.method)
            config.method = *o.method;
        if (o.b_min)
            config.b_min = *o.b_min;
        if (o.b_max)
            config.b_max = *o.b_max;
        if (o.threads)
            e.threads = *o.threads;
        if (o.per_trial)
            config.per_trial = true;
        return config;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Mixed-norm beamformer design and evaluation"};
    app.require_subcommand(1);

    Overrides o;
    auto *design = app.add_subcommand("design", "Design weights on one snapshot realisation");
    add_common(design, o);

    auto *pattern = app.add_subcommand("pattern", "Normalised beam pattern CSV from a weight file");
    add_common(pattern, o);
    pattern->add_option("--weights", o.weights, "Weight file written by 'design'");
    pattern->add_option("--method", o.method, "Design to plot (mvdr, sparse, mixed)");

    auto *montecarlo = app.add_subcommand("montecarlo", "Monte Carlo SINR report (JSON)");
    add_common(montecarlo, o);
    montecarlo->add_option("--trials", o.trials, "Number of trials");
    montecarlo->add_flag("--per-trial", o.per_trial, "Include per-trial SINRs");

    auto *sweep = app.add_subcommand("sweep-b", "Mean mixed-norm SINR per mainlobe half-width (CSV)");
    add_common(sweep, o);
    sweep->add_option("--trials", o.trials, "Trials per b");
    sweep->add_option("--b-min", o.b_min, "First b");
    sweep->add_option("--b-max", o.b_max, "Last b");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : mnbf::cli::exit_input_error;
    }

    mnbf::RunConfig config;
    try
    {
        config = resolve(o);
    }
    catch (const std::exception &ex)
    {
        std::cerr << "error: " << ex.what() << "\n";
        return mnbf::cli::exit_input_error;
    }

    if (*design)
        return mnbf::cli::run(mnbf::cli::design, config);
    if (*pattern)
        return mnbf::cli::run(mnbf::cli::pattern, config);
    if (*montecarlo)
        return mnbf::cli::run(mnbf::cli::montecarlo, config);
    return mnbf::cli::run(mnbf::cli::sweep, config);
}
