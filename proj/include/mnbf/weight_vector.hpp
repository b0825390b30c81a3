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

#ifndef MNBF_WEIGHT_VECTOR_HPP
#define MNBF_WEIGHT_VECTOR_HPP

#include "array_model.hpp"

#include <stdexcept>

namespace mnbf
{
    // Complex beamformer weights together with the angle they were designed to pass undistorted.
    struct WeightVector
    {
        CVector w;
        double steering_angle_deg = 0.0;

        Eigen::Index size() const { return w.size(); }

        // w^H a(theta)
        cplx response(const CVector &steering) const
        {
            if (steering.size() != w.size())
                throw std::domain_error("WeightVector::response: dimension mismatch");
            return w.dot(steering);
        }

        // |w^H a(theta_steer) - 1|
        double distortionless_error(const ArrayGeometry &geometry) const
        {
            return std::abs(response(steering_vector(geometry, steering_angle_deg)) - 1.0);
        }
    };

} // namespace mnbf

#endif // MNBF_WEIGHT_VECTOR_HPP
