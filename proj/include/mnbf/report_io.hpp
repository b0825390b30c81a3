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

#ifndef MNBF_REPORT_IO_HPP
#define MNBF_REPORT_IO_HPP

#include "config.hpp"
#include "evaluation.hpp"
#include "solvers.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnbf
{
    // File formats written and read by the batch front-end:
    //   weight file   JSON, one entry per designed method with [re, im] pairs per antenna
    //   pattern       CSV "angle_deg,gain_db"
    //   Monte Carlo   JSON report, per-method mean SINR
    //   b-sweep       CSV "b,mean_sinr_db"
    // Reals are written with 17 significant digits so every file reads back exactly.

    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline std::string format_real(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value < 0 ? "-inf" : "inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }

    inline double read_real(const std::string &text)
    {
        if (text == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (text == "inf")
            return std::numeric_limits<double>::infinity();
        if (text == "-inf")
            return -std::numeric_limits<double>::infinity();
        try
        {
            return detail::parse_double(text);
        }
        catch (const std::invalid_argument &err)
        {
            throw FormatError(err.what());
        }
    }

    namespace detail
    {
        // JSON has no infinities; non-finite values travel as strings.
        inline nlohmann::json real_to_json(double value)
        {
            if (std::isfinite(value))
                return value;
            return format_real(value);
        }

        inline double real_from_json(const nlohmann::json &j)
        {
            if (j.is_string())
                return read_real(j.get<std::string>());
            return j.get<double>();
        }

        inline std::string slurp(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw FormatError("cannot open '" + path + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        inline void write_text(const std::string &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw FormatError("cannot write '" + path + "'");
            out << text;
        }
    } // namespace detail

    // ---- weight file ------------------------------------------------------

    struct DesignRecord
    {
        Method method = Method::mvdr;
        WeightVector weights;
        SolveDiagnostics diagnostics;
    };

    struct WeightFile
    {
        std::size_t num_antennas = 0;
        double spacing_over_wavelength = 0.5;
        std::uint64_t seed = 0;
        double gamma = 0.0;
        std::size_t b = 0;
        std::vector<DesignRecord> designs;

        const DesignRecord &find(Method method) const
        {
            for (const auto &d : designs)
                if (d.method == method)
                    return d;
            throw FormatError("weight file has no '" + std::string(to_string(method)) + "' design");
        }
    };

    inline std::string to_json_text(const WeightFile &file)
    {
        nlohmann::json root;
        root["format"] = "mnbf-weights";
        root["version"] = 1;
        root["num_antennas"] = file.num_antennas;
        root["spacing_over_wavelength"] = file.spacing_over_wavelength;
        root["seed"] = file.seed;
        root["gamma"] = file.gamma;
        root["b"] = file.b;
        nlohmann::json designs = nlohmann::json::array();
        for (const auto &d : file.designs)
        {
            nlohmann::json entry;
            entry["method"] = std::string(to_string(d.method));
            entry["steering_angle_deg"] = d.weights.steering_angle_deg;
            nlohmann::json w = nlohmann::json::array();
            for (Eigen::Index m = 0; m < d.weights.w.size(); ++m)
                w.push_back({d.weights.w(m).real(), d.weights.w(m).imag()});
            entry["weights"] = std::move(w);
            entry["diagnostics"] = {{"iterations_used", d.diagnostics.iterations_used},
                                    {"final_primal_residual", detail::real_to_json(d.diagnostics.final_primal_residual)},
                                    {"final_dual_residual", detail::real_to_json(d.diagnostics.final_dual_residual)},
                                    {"objective_value", detail::real_to_json(d.diagnostics.objective_value)},
                                    {"converged", d.diagnostics.converged}};
            designs.push_back(std::move(entry));
        }
        root["designs"] = std::move(designs);
        return root.dump(2) + "\n";
    }

    inline WeightFile weight_file_from_json_text(const std::string &text)
    {
        try
        {
            const auto root = nlohmann::json::parse(text);
            if (root.at("format").get<std::string>() != "mnbf-weights")
                throw FormatError("not a weight file");
            WeightFile file;
            file.num_antennas = root.at("num_antennas").get<std::size_t>();
            file.spacing_over_wavelength = root.at("spacing_over_wavelength").get<double>();
            file.seed = root.at("seed").get<std::uint64_t>();
            file.gamma = root.at("gamma").get<double>();
            file.b = root.at("b").get<std::size_t>();
            for (const auto &entry : root.at("designs"))
            {
                DesignRecord d;
                const auto method = parse_method(entry.at("method").get<std::string>());
                if (!method)
                    throw FormatError("unknown method in weight file");
                d.method = *method;
                d.weights.steering_angle_deg = entry.at("steering_angle_deg").get<double>();
                const auto &w = entry.at("weights");
                d.weights.w.resize(static_cast<Eigen::Index>(w.size()));
                for (std::size_t m = 0; m < w.size(); ++m)
                    d.weights.w(static_cast<Eigen::Index>(m)) = cplx(w[m].at(0).get<double>(), w[m].at(1).get<double>());
                const auto &diag = entry.at("diagnostics");
                d.diagnostics.iterations_used = diag.at("iterations_used").get<int>();
                d.diagnostics.final_primal_residual = detail::real_from_json(diag.at("final_primal_residual"));
                d.diagnostics.final_dual_residual = detail::real_from_json(diag.at("final_dual_residual"));
                d.diagnostics.objective_value = detail::real_from_json(diag.at("objective_value"));
                d.diagnostics.converged = diag.at("converged").get<bool>();
                if (static_cast<std::size_t>(d.weights.w.size()) != file.num_antennas)
                    throw FormatError("weight vector length does not match num_antennas");
                file.designs.push_back(std::move(d));
            }
            return file;
        }
        catch (const nlohmann::json::exception &err)
        {
            throw FormatError(std::string("malformed weight file: ") + err.what());
        }
    }

    inline WeightFile read_weight_file(const std::string &path) { return weight_file_from_json_text(detail::slurp(path)); }

    // ---- beam pattern CSV -------------------------------------------------

    inline std::string to_csv_text(const BeamPattern &pattern)
    {
        std::string out = "angle_deg,gain_db\n";
        for (std::size_t n = 0; n < pattern.angles_deg.size(); ++n)
            out += format_real(pattern.angles_deg[n]) + "," + format_real(pattern.gains_db[n]) + "\n";
        return out;
    }

    namespace detail
    {
        inline std::vector<std::vector<std::string>> read_csv(const std::string &text, const std::string &header)
        {
            std::istringstream in(text);
            std::string line;
            if (!std::getline(in, line) || trim(line) != header)
                throw FormatError("expected CSV header '" + header + "'");
            std::vector<std::vector<std::string>> rows;
            while (std::getline(in, line))
            {
                if (trim(line).empty())
                    continue;
                rows.push_back(split(line, ','));
            }
            return rows;
        }
    } // namespace detail

    // raw_gains are not stored in the CSV and come back empty.
    inline BeamPattern pattern_from_csv_text(const std::string &text)
    {
        BeamPattern pattern;
        for (const auto &row : detail::read_csv(text, "angle_deg,gain_db"))
        {
            if (row.size() != 2)
                throw FormatError("pattern CSV rows need two columns");
            pattern.angles_deg.push_back(read_real(row[0]));
            pattern.gains_db.push_back(read_real(row[1]));
        }
        return pattern;
    }

    // ---- b-sweep CSV ------------------------------------------------------

    inline std::string to_csv_text(const SweepResult &sweep)
    {
        std::string out = "b,mean_sinr_db\n";
        for (std::size_t i = 0; i < sweep.b_values.size(); ++i)
            out += std::to_string(sweep.b_values[i]) + "," + format_real(sweep.mean_sinr_db[i]) + "\n";
        return out;
    }

    inline SweepResult sweep_from_csv_text(const std::string &text)
    {
        SweepResult sweep;
        for (const auto &row : detail::read_csv(text, "b,mean_sinr_db"))
        {
            if (row.size() != 2)
                throw FormatError("sweep CSV rows need two columns");
            try
            {
                sweep.b_values.push_back(detail::parse_int<std::size_t>(row[0]));
            }
            catch (const std::invalid_argument &err)
            {
                throw FormatError(err.what());
            }
            sweep.mean_sinr_db.push_back(read_real(row[1]));
        }
        if (sweep.b_values.empty())
            throw FormatError("sweep CSV has no rows");
        sweep.b_opt = argmax_b(sweep.b_values, sweep.mean_sinr_db);
        return sweep;
    }

    // ---- Monte Carlo report -----------------------------------------------

    struct MonteCarloDocument
    {
        std::uint64_t seed = 0;
        std::size_t trials = 0;
        double mismatch_deg = 0.0;
        double gamma = 0.0;
        std::size_t b = 0;
        double grid_step_deg = 1.0;
        std::vector<SinrReport> reports;
    };

    inline std::string to_json_text(const MonteCarloDocument &doc, bool include_per_trial)
    {
        nlohmann::json root;
        root["format"] = "mnbf-montecarlo";
        root["version"] = 1;
        root["seed"] = doc.seed;
        root["trials"] = doc.trials;
        root["mismatch_deg"] = doc.mismatch_deg;
        root["gamma"] = doc.gamma;
        root["b"] = doc.b;
        root["grid_step_deg"] = doc.grid_step_deg;
        nlohmann::json methods = nlohmann::json::array();
        for (const auto &r : doc.reports)
        {
            nlohmann::json entry;
            entry["method"] = std::string(to_string(r.method));
            entry["mean_sinr_db"] = detail::real_to_json(r.mean_sinr_db);
            entry["trials"] = r.trials;
            entry["nonconverged"] = r.nonconverged;
            entry["mismatch_deg"] = r.mismatch_deg;
            if (include_per_trial)
            {
                nlohmann::json per = nlohmann::json::array();
                for (double v : r.per_trial_sinr_db)
                    per.push_back(detail::real_to_json(v));
                entry["per_trial_sinr_db"] = std::move(per);
            }
            methods.push_back(std::move(entry));
        }
        root["methods"] = std::move(methods);
        return root.dump(2) + "\n";
    }

    inline MonteCarloDocument montecarlo_from_json_text(const std::string &text)
    {
        try
        {
            const auto root = nlohmann::json::parse(text);
            if (root.at("format").get<std::string>() != "mnbf-montecarlo")
                throw FormatError("not a Monte Carlo report");
            MonteCarloDocument doc;
            doc.seed = root.at("seed").get<std::uint64_t>();
            doc.trials = root.at("trials").get<std::size_t>();
            doc.mismatch_deg = root.at("mismatch_deg").get<double>();
            doc.gamma = root.at("gamma").get<double>();
            doc.b = root.at("b").get<std::size_t>();
            doc.grid_step_deg = root.at("grid_step_deg").get<double>();
            for (const auto &entry : root.at("methods"))
            {
                SinrReport r;
                const auto method = parse_method(entry.at("method").get<std::string>());
                if (!method)
                    throw FormatError("unknown method in report");
                r.method = *method;
                r.mean_sinr_db = detail::real_from_json(entry.at("mean_sinr_db"));
                r.trials = entry.at("trials").get<std::size_t>();
                r.nonconverged = entry.at("nonconverged").get<std::size_t>();
                r.mismatch_deg = entry.at("mismatch_deg").get<double>();
                if (entry.contains("per_trial_sinr_db"))
                    for (const auto &v : entry.at("per_trial_sinr_db"))
                        r.per_trial_sinr_db.push_back(detail::real_from_json(v));
                doc.reports.push_back(std::move(r));
            }
            return doc;
        }
        catch (const nlohmann::json::exception &err)
        {
            throw FormatError(std::string("malformed Monte Carlo report: ") + err.what());
        }
    }

} // namespace mnbf

#endif // MNBF_REPORT_IO_HPP
