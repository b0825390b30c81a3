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

#ifndef MNBF_MNBF_HPP
#define MNBF_MNBF_HPP

#include "array_model.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "evaluation.hpp"
#include "prox.hpp"
#include "report_io.hpp"
#include "signal_sim.hpp"
#include "solvers.hpp"
#include "weight_vector.hpp"

#endif // MNBF_MNBF_HPP
