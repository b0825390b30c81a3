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

#ifndef MNBF_CONFIG_HPP
#define MNBF_CONFIG_HPP

#include "evaluation.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnbf
{
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Experiment settings plus the batch-run extras (sweep range, output paths).
    struct RunConfig
    {
        ExperimentConfig experiment;
        std::size_t b_min = 1;
        std::size_t b_max = 35;
        bool per_trial = false;
        std::string out_path;
        std::string weights_path;
        std::string method; // pattern: which design to read from the weight file
    };

    namespace detail
    {
        inline std::string trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r");
            if (first == std::string_view::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r");
            return std::string(s.substr(first, last - first + 1));
        }

        inline std::vector<std::string> split(std::string_view s, char sep)
        {
            std::vector<std::string> parts;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = s.find(sep, start);
                parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return parts;
        }

        inline double parse_double(const std::string &text)
        {
            if (text == "-inf")
                return -std::numeric_limits<double>::infinity();
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
                throw std::invalid_argument("expected a number, got '" + text + "'");
            return value;
        }

        template <typename Int>
        Int parse_int(const std::string &text)
        {
            Int value{};
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
                throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
            return value;
        }

        inline bool parse_bool(const std::string &text)
        {
            if (text == "true" || text == "1" || text == "yes")
                return true;
            if (text == "false" || text == "0" || text == "no")
                return false;
            throw std::invalid_argument("expected true/false, got '" + text + "'");
        }

        // "doa:power_db, doa:power_db, ..."; empty or "none" means no interferers.
        inline std::vector<SourceSpec> parse_sources(const std::string &text)
        {
            std::vector<SourceSpec> sources;
            if (text.empty() || text == "none")
                return sources;
            for (const auto &item : split(text, ','))
            {
                const auto fields = split(item, ':');
                if (fields.size() != 2)
                    throw std::invalid_argument("expected doa:power_db, got '" + item + "'");
                sources.push_back({parse_double(fields[0]), parse_double(fields[1])});
            }
            return sources;
        }

        inline std::vector<Method> parse_methods(const std::string &text)
        {
            std::vector<Method> methods;
            for (const auto &name : split(text, ','))
            {
                const auto m = parse_method(name);
                if (!m)
                    throw std::invalid_argument("unknown method '" + name + "' (expected mvdr, sparse or mixed)");
                methods.push_back(*m);
            }
            if (methods.empty())
                throw std::invalid_argument("no methods listed");
            return methods;
        }

        // Applies one key. Geometry is rebuilt at the end so both of its fields can be given
        // in any order.
        inline void apply_key(RunConfig &config, std::size_t &antennas, double &spacing, const std::string &key,
                              const std::string &value)
        {
            auto &e = config.experiment;
            auto &s = e.scenario;
            if (key == "num_antennas")
                antennas = parse_int<std::size_t>(value);
            else if (key == "spacing_over_wavelength")
                spacing = parse_double(value);
            else if (key == "soi_doa_deg")
                s.soi.doa_deg = parse_double(value);
            else if (key == "snr_db")
                s.soi.power_db = parse_double(value);
            else if (key == "interferers")
                s.interferers = parse_sources(value);
            else if (key == "noise_power")
                s.noise_power = parse_double(value);
            else if (key == "num_snapshots")
                s.num_snapshots = parse_int<std::size_t>(value);
            else if (key == "seed")
                s.rng_seed = parse_int<std::uint64_t>(value);
            else if (key == "grid_step_deg")
                e.grid_step_deg = parse_double(value);
            else if (key == "gamma")
                e.gamma = parse_double(value);
            else if (key == "b")
                e.b = parse_int<std::size_t>(value);
            else if (key == "methods")
                e.methods = parse_methods(value);
            else if (key == "trials")
                e.trials = parse_int<std::size_t>(value);
            else if (key == "mismatch_deg")
                e.mismatch_deg = parse_double(value);
            else if (key == "diagonal_loading")
                e.diagonal_loading = parse_double(value);
            else if (key == "threads")
                e.threads = parse_int<unsigned>(value);
            else if (key == "max_iterations")
                e.solver.max_iterations = parse_int<int>(value);
            else if (key == "abs_tol")
                e.solver.abs_tol = parse_double(value);
            else if (key == "rel_tol")
                e.solver.rel_tol = parse_double(value);
            else if (key == "rho")
                e.solver.penalty_parameter_rho = parse_double(value);
            else if (key == "over_relaxation")
                e.solver.over_relaxation = parse_double(value);
            else if (key == "adaptive_rho")
                e.solver.adaptive_rho = parse_bool(value);
            else if (key == "b_min")
                config.b_min = parse_int<std::size_t>(value);
            else if (key == "b_max")
                config.b_max = parse_int<std::size_t>(value);
            else if (key == "per_trial")
                config.per_trial = parse_bool(value);
            else if (key == "out")
                config.out_path = value;
            else if (key == "weights")
                config.weights_path = value;
            else if (key == "method")
                config.method = value;
            else
                throw std::invalid_argument("unknown key");
        }
    } // namespace detail

    // Checks cross-field constraints; throws ConfigError naming the offending field.
    inline void validate(const RunConfig &config)
    {
        const auto &e = config.experiment;
        auto fail = [](const std::string &field, const std::string &msg)
        { throw ConfigError("field '" + field + "': " + msg); };
        try
        {
            e.scenario.validate();
        }
        catch (const std::domain_error &err)
        {
            fail("scenario", err.what());
        }
        if (!(e.grid_step_deg > 0.0))
            fail("grid_step_deg", "must be positive");
        if (!(e.gamma >= 0.0) || !std::isfinite(e.gamma))
            fail("gamma", "must be a non-negative number");
        if (e.trials < 1)
            fail("trials", "must be at least 1");
        if (!(e.diagonal_loading >= 0.0))
            fail("diagonal_loading", "must be non-negative");
        if (!(std::abs(e.steering_angle_deg()) <= 90.0))
            fail("mismatch_deg", "steering angle leaves [-90, 90]");
        if (config.b_min > config.b_max)
            fail("b_min", "must not exceed b_max");
        try
        {
            e.solver.validate();
        }
        catch (const std::domain_error &err)
        {
            fail("solver", err.what());
        }
    }

    // Flat "key = value" text; '#' starts a comment. Unknown keys and malformed values are
    // reported with their line number.
    inline RunConfig parse_config(std::istream &in, RunConfig config = {})
    {
        std::size_t antennas = config.experiment.scenario.geometry.num_antennas();
        double spacing = config.experiment.scenario.geometry.spacing_over_wavelength();

        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
            if (body.empty())
                continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
            const std::string key = detail::trim(body.substr(0, eq));
            const std::string value = detail::trim(body.substr(eq + 1));
            try
            {
                detail::apply_key(config, antennas, spacing, key, value);
            }
            catch (const std::exception &err)
            {
                throw ConfigError("line " + std::to_string(line_no) + ": field '" + key + "': " + err.what());
            }
        }
        try
        {
            config.experiment.scenario.geometry = ArrayGeometry(antennas, spacing);
        }
        catch (const std::domain_error &err)
        {
            throw ConfigError(std::string("field 'num_antennas'/'spacing_over_wavelength': ") + err.what());
        }
        return config;
    }

    inline RunConfig parse_config_text(const std::string &text)
    {
        std::istringstream in(text);
        return parse_config(in);
    }

    inline RunConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        return parse_config(in);
    }

} // namespace mnbf

#endif // MNBF_CONFIG_HPP
