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

#ifndef MNBF_SIGNAL_SIM_HPP
#define MNBF_SIGNAL_SIM_HPP

#include "array_model.hpp"
#include "weight_vector.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace mnbf
{
    // One plane-wave source. power_db is relative to the per-antenna noise power
    // (SNR for the SOI, INR for interferers). -inf disables the source.
    struct SourceSpec
    {
        double doa_deg = 0.0;
        double power_db = 0.0;

        bool operator==(const SourceSpec &) const = default;
    };

    struct Scenario
    {
        ArrayGeometry geometry{8, 0.5};
        SourceSpec soi{0.0, 10.0};
        std::vector<SourceSpec> interferers;
        double noise_power = 1.0;
        std::size_t num_snapshots = 100;
        std::uint64_t rng_seed = 0;

        // Source variance in linear units.
        double source_variance(const SourceSpec &source) const
        {
            return noise_power * std::pow(10.0, source.power_db / 10.0);
        }

        void validate() const
        {
            auto check_doa = [](double doa)
            {
                if (!(doa >= -90.0 && doa <= 90.0))
                    throw std::domain_error("Scenario: DOA outside [-90, 90]");
            };
            check_doa(soi.doa_deg);
            for (const auto &interferer : interferers)
            {
                check_doa(interferer.doa_deg);
                if (interferer.doa_deg == soi.doa_deg)
                    throw std::domain_error("Scenario: interferer DOA coincides with the SOI DOA");
            }
            if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
                throw std::domain_error("Scenario: noise power must be non-negative");
            if (num_snapshots < 1)
                throw std::domain_error("Scenario: at least one snapshot is required");
        }

        // Reference setup: 8-element half-wavelength ULA, SOI at 0 deg / 10 dB,
        // interferers at -30, 30, 70 deg with INR 20, 20, 40 dB, 100 snapshots.
        static Scenario reference(std::uint64_t seed = 0)
        {
            Scenario s;
            s.interferers = {{-30.0, 20.0}, {30.0, 20.0}, {70.0, 40.0}};
            s.rng_seed = seed;
            return s;
        }
    };

    // Column k is the array snapshot x(k).
    struct SnapshotBlock
    {
        CMatrix data;

        Eigen::Index num_antennas() const { return data.rows(); }
        Eigen::Index num_snapshots() const { return data.cols(); }
    };

    enum class CovarianceKind
    {
        sample,
        analytic
    };

    struct CovarianceMatrix
    {
        CMatrix entries;
        CovarianceKind kind = CovarianceKind::sample;

        Eigen::Index size() const { return entries.rows(); }

        bool is_hermitian(double rel_tol = 1e-12) const
        {
            const double scale = std::max(entries.norm(), std::numeric_limits<double>::min());
            return (entries - entries.adjoint()).norm() <= rel_tol * scale;
        }

        bool is_psd(double trace_tol = 1e-10) const
        {
            const CMatrix herm = 0.5 * (entries + entries.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
            const double trace = herm.trace().real();
            return eig.eigenvalues().minCoeff() >= -trace_tol * std::abs(trace);
        }
    };

    namespace detail
    {
        // Circularly-symmetric complex Gaussian draws with the given variance.
        inline void fill_complex_gaussian(std::mt19937_64 &rng, double variance, cplx *out, std::size_t count)
        {
            std::normal_distribution<double> normal(0.0, 1.0);
            const double scale = std::sqrt(variance / 2.0);
            for (std::size_t i = 0; i < count; ++i)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                out[i] = scale * cplx(re, im);
            }
        }
    } // namespace detail

    // x(k) = s(k) a(theta_0) + sum_j beta_j(k) a(theta_j) + n(k), all draws i.i.d. CN.
    // Draw order is fixed (SOI, interferers in order, then noise column by column),
    // so a seed reproduces the block bit for bit.
    inline SnapshotBlock generate_snapshots(const Scenario &scenario)
    {
        scenario.validate();
        const auto m_count = static_cast<Eigen::Index>(scenario.geometry.num_antennas());
        const auto k_count = static_cast<Eigen::Index>(scenario.num_snapshots);

        std::mt19937_64 rng(scenario.rng_seed);
        SnapshotBlock block{CMatrix::Zero(m_count, k_count)};
        CVector amplitudes(k_count);

        auto add_source = [&](const SourceSpec &source)
        {
            detail::fill_complex_gaussian(rng, scenario.source_variance(source), amplitudes.data(),
                                          static_cast<std::size_t>(k_count));
            block.data.noalias() += steering_vector(scenario.geometry, source.doa_deg) * amplitudes.transpose();
        };
        add_source(scenario.soi);
        for (const auto &interferer : scenario.interferers)
            add_source(interferer);

        CMatrix noise(m_count, k_count);
        detail::fill_complex_gaussian(rng, scenario.noise_power, noise.data(), static_cast<std::size_t>(noise.size()));
        block.data += noise;
        return block;
    }

    // (1/K) sum_k x(k) x(k)^H, exactly Hermitian, plus optional diagonal loading delta*I.
    inline CovarianceMatrix sample_covariance(const SnapshotBlock &block, double diagonal_loading = 0.0)
    {
        if (block.num_snapshots() < 1)
            throw std::domain_error("sample_covariance: empty snapshot block");
        if (!(diagonal_loading >= 0.0))
            throw std::domain_error("sample_covariance: diagonal loading must be non-negative");

        CMatrix r = block.data * block.data.adjoint() / static_cast<double>(block.num_snapshots());
        r = 0.5 * (r + r.adjoint()).eval();
        r.diagonal().array() += diagonal_loading;
        return {std::move(r), CovarianceKind::sample};
    }

    // sigma_s^2 a0 a0^H + sum_j sigma_j^2 a_j a_j^H + sigma_n^2 I.
    // With include_soi = false this is the interference-plus-noise covariance.
    inline CovarianceMatrix true_covariance(const Scenario &scenario, bool include_soi = true)
    {
        scenario.validate();
        const auto m_count = static_cast<Eigen::Index>(scenario.geometry.num_antennas());
        CMatrix r = scenario.noise_power * CMatrix::Identity(m_count, m_count);

        auto add_source = [&](const SourceSpec &source)
        {
            const double variance = scenario.source_variance(source);
            if (variance == 0.0)
                return;
            const CVector a = steering_vector(scenario.geometry, source.doa_deg);
            r.noalias() += variance * a * a.adjoint();
        };
        if (include_soi)
            add_source(scenario.soi);
        for (const auto &interferer : scenario.interferers)
            add_source(interferer);
        return {std::move(r), CovarianceKind::analytic};
    }

    // y(k) = w^H x(k).
    inline CVector apply_weights(const WeightVector &weights, const SnapshotBlock &block)
    {
        if (weights.size() != block.num_antennas())
            throw std::domain_error("apply_weights: weight length does not match the number of antennas");
        return (weights.w.adjoint() * block.data).transpose();
    }

} // namespace mnbf

#endif // MNBF_SIGNAL_SIM_HPP
