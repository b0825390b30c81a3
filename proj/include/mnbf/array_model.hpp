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

#ifndef MNBF_ARRAY_MODEL_HPP
#define MNBF_ARRAY_MODEL_HPP

#include <Eigen/Dense>

#include <algorithm>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnbf
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;

    inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

    // Uniform linear array: M elements spaced d/lambda wavelengths apart.
    class ArrayGeometry
    {
    public:
        ArrayGeometry(std::size_t num_antennas, double spacing_over_wavelength)
            : num_antennas_(num_antennas), spacing_(spacing_over_wavelength)
        {
            if (num_antennas < 2)
                throw std::domain_error("ArrayGeometry: at least 2 antennas are required");
            if (!(spacing_over_wavelength > 0.0) || !std::isfinite(spacing_over_wavelength))
                throw std::domain_error("ArrayGeometry: element spacing must be positive");
        }

        std::size_t num_antennas() const { return num_antennas_; }
        double spacing_over_wavelength() const { return spacing_; }

        bool operator==(const ArrayGeometry &) const = default;

    private:
        std::size_t num_antennas_;
        double spacing_;
    };

    // Element m (0-based) is exp(j * m * 2*pi*(d/lambda) * sin(theta)).
    inline CVector steering_vector(const ArrayGeometry &geometry, double angle_deg)
    {
        if (!(angle_deg >= -90.0 && angle_deg <= 90.0))
            throw std::domain_error("steering_vector: angle " + std::to_string(angle_deg) + " deg outside [-90, 90]");

        const double increment = 2.0 * std::numbers::pi * geometry.spacing_over_wavelength() * std::sin(deg_to_rad(angle_deg));
        const auto m_count = static_cast<Eigen::Index>(geometry.num_antennas());
        CVector a(m_count);
        for (Eigen::Index m = 0; m < m_count; ++m)
            a(m) = std::polar(1.0, static_cast<double>(m) * increment);
        return a;
    }

    // Strictly increasing sampled DOAs in [-90, 90]; the steering angle must be one of them.
    class AngleGrid
    {
    public:
        AngleGrid(std::vector<double> angles_deg, std::size_t soi_index)
            : angles_(std::move(angles_deg)), soi_index_(soi_index)
        {
            if (angles_.empty())
                throw std::domain_error("AngleGrid: grid is empty");
            for (std::size_t n = 0; n < angles_.size(); ++n)
            {
                if (!(angles_[n] >= -90.0 && angles_[n] <= 90.0))
                    throw std::domain_error("AngleGrid: angle outside [-90, 90]");
                if (n > 0 && !(angles_[n] > angles_[n - 1]))
                    throw std::domain_error("AngleGrid: angles must be strictly increasing");
            }
            if (soi_index_ >= angles_.size())
                throw std::domain_error("AngleGrid: steering index out of range");
        }

        // Uniform grid from -90 to 90 with the given step, containing steering_deg.
        // The grid is anchored on the steering angle so it always lands on a grid point.
        static AngleGrid uniform(double step_deg, double steering_deg = 0.0)
        {
            if (!(step_deg > 0.0) || !std::isfinite(step_deg))
                throw std::domain_error("AngleGrid::uniform: step must be positive");
            if (!(steering_deg >= -90.0 && steering_deg <= 90.0))
                throw std::domain_error("AngleGrid::uniform: steering angle outside [-90, 90]");

            constexpr double slack = 1e-9;
            const auto below = static_cast<long>(std::floor((steering_deg + 90.0) / step_deg + slack));
            const auto above = static_cast<long>(std::floor((90.0 - steering_deg) / step_deg + slack));
            std::vector<double> angles;
            angles.reserve(static_cast<std::size_t>(below + above + 1));
            for (long k = -below; k <= above; ++k)
            {
                double angle = steering_deg + static_cast<double>(k) * step_deg;
                // Snap accumulated roundoff onto the interval ends and integers.
                if (std::abs(angle - std::round(angle)) < 1e-9)
                    angle = std::round(angle);
                angles.push_back(std::clamp(angle, -90.0, 90.0));
            }
            return AngleGrid(std::move(angles), static_cast<std::size_t>(below));
        }

        const std::vector<double> &angles_deg() const { return angles_; }
        std::size_t size() const { return angles_.size(); }
        std::size_t soi_index() const { return soi_index_; }
        double steering_angle_deg() const { return angles_[soi_index_]; }

    private:
        std::vector<double> angles_;
        std::size_t soi_index_;
    };

    // The M x N matrix whose columns are the steering vectors of every grid angle.
    class SteeringMatrix
    {
    public:
        SteeringMatrix(const ArrayGeometry &geometry, AngleGrid grid)
            : geometry_(geometry), grid_(std::move(grid)),
              entries_(static_cast<Eigen::Index>(geometry.num_antennas()), static_cast<Eigen::Index>(grid_.size()))
        {
            for (std::size_t n = 0; n < grid_.size(); ++n)
                entries_.col(static_cast<Eigen::Index>(n)) = steering_vector(geometry_, grid_.angles_deg()[n]);
        }

        const CMatrix &entries() const { return entries_; }
        const ArrayGeometry &geometry() const { return geometry_; }
        const AngleGrid &grid() const { return grid_; }
        Eigen::Index rows() const { return entries_.rows(); }
        Eigen::Index cols() const { return entries_.cols(); }
        CVector steering_column() const { return entries_.col(static_cast<Eigen::Index>(grid_.soi_index())); }

    private:
        ArrayGeometry geometry_;
        AngleGrid grid_;
        CMatrix entries_;
    };

    inline SteeringMatrix build_steering_matrix(const ArrayGeometry &geometry, const AngleGrid &grid)
    {
        return SteeringMatrix(geometry, grid);
    }

    // Mainlobe: the 2b+1 grid indices centred on the steering index. Sidelobe: everything else.
    // An empty sidelobe is allowed when the mainlobe spans the whole grid.
    struct LobePartition
    {
        std::size_t b = 0;
        std::vector<std::size_t> mainlobe_indices;
        std::vector<std::size_t> sidelobe_indices;
    };

    inline LobePartition partition_lobes(const AngleGrid &grid, std::size_t b)
    {
        const std::size_t centre = grid.soi_index();
        if (b > centre || centre + b >= grid.size())
            throw std::domain_error("partition_lobes: mainlobe half-width " + std::to_string(b) +
                                    " exceeds the grid around the steering angle");

        LobePartition partition;
        partition.b = b;
        partition.mainlobe_indices.reserve(2 * b + 1);
        partition.sidelobe_indices.reserve(grid.size() - (2 * b + 1));
        for (std::size_t n = 0; n < grid.size(); ++n)
        {
            if (n + b >= centre && n <= centre + b)
                partition.mainlobe_indices.push_back(n);
            else
                partition.sidelobe_indices.push_back(n);
        }
        return partition;
    }

} // namespace mnbf

#endif // MNBF_ARRAY_MODEL_HPP
