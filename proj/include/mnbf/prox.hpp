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

#ifndef MNBF_PROX_HPP
#define MNBF_PROX_HPP

#include "array_model.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mnbf
{
    // Proximal operators for norms of complex vectors. The l1 norm is the sum of
    // element magnitudes and the l-infinity norm is the largest magnitude, so every
    // operator acts on magnitudes and leaves phases untouched.

    inline void check_tau(double tau)
    {
        if (!(tau > 0.0))
            throw std::domain_error("prox: threshold must be positive");
    }

    // argmin_x tau*||x||_1 + 0.5*||x - v||^2, in place.
    inline void prox_l1_complex_inplace(Eigen::Ref<CVector> v, double tau)
    {
        check_tau(tau);
        for (Eigen::Index i = 0; i < v.size(); ++i)
        {
            const double mag = std::abs(v(i));
            v(i) = mag > tau ? v(i) * ((mag - tau) / mag) : cplx(0.0, 0.0);
        }
    }

    inline CVector prox_l1_complex(const CVector &v, double tau)
    {
        CVector x = v;
        prox_l1_complex_inplace(x, tau);
        return x;
    }

    // Euclidean projection onto {x : sum_i |x_i| <= radius}, in place.
    // Uses the sorted cumulative-sum threshold on the magnitude vector.
    inline void project_l1_ball_complex_inplace(Eigen::Ref<CVector> v, double radius)
    {
        if (!(radius >= 0.0))
            throw std::domain_error("project_l1_ball_complex: radius must be non-negative");

        const auto n = static_cast<std::size_t>(v.size());
        std::vector<double> mags(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            mags[i] = std::abs(v(static_cast<Eigen::Index>(i)));
            total += mags[i];
        }
        if (total <= radius)
            return;
        if (radius == 0.0)
        {
            v.setZero();
            return;
        }

        std::vector<double> sorted = mags;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        double cumulative = 0.0;
        double threshold = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            cumulative += sorted[k];
            const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
            if (sorted[k] > candidate)
                threshold = candidate;
            else
                break;
        }

        for (std::size_t i = 0; i < n; ++i)
        {
            const auto idx = static_cast<Eigen::Index>(i);
            v(idx) = mags[i] > threshold ? v(idx) * ((mags[i] - threshold) / mags[i]) : cplx(0.0, 0.0);
        }
    }

    inline CVector project_l1_ball_complex(const CVector &v, double radius)
    {
        CVector x = v;
        project_l1_ball_complex_inplace(x, radius);
        return x;
    }

    // argmin_x tau*||x||_inf + 0.5*||x - v||^2 via Moreau: v - P_{||.||_1 <= tau}(v).
    inline void prox_linf_complex_inplace(Eigen::Ref<CVector> v, double tau)
    {
        check_tau(tau);
        CVector projected = v;
        project_l1_ball_complex_inplace(projected, tau);
        v -= projected;
    }

    inline CVector prox_linf_complex(const CVector &v, double tau)
    {
        CVector x = v;
        prox_linf_complex_inplace(x, tau);
        return x;
    }

} // namespace mnbf

#endif // MNBF_PROX_HPP
