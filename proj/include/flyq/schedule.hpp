// Copyright 2026 The flyq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "flyq/grid.hpp"

namespace flyq {

/// Default hard cap on synthesized coupling rates, rad/us. Hard-edged catch
/// targets need a larger cap to converge; tasks may override.
inline constexpr double kDefaultGammaMax = 1e4;

/// Denominator floor, relative to the total photon mass. Below it the
/// synthesized coupling shuts off instead of diverging.
inline constexpr double kDenFloorRel = 1e-8;

/// One region where synthesis altered the raw formula output.
struct ClampRecord {
    int channel = 0;  // 1-based
    double t_begin = 0.0;
    double t_end = 0.0;
    std::string reason;  // "den-floor", "gamma-cap", "residual-mass", "window-truncation"
    double detail = 0.0;  // skipped/residual mass, or the max raw value capped
};

/// Per-channel coupling rates gamma_j(t) >= 0 and detunings epsilon_j(t),
/// both in rad/us on a shared grid.
struct ControlSchedule {
    ControlSchedule(TimeGrid g, int channels, double cap = kDefaultGammaMax)
        : grid(std::move(g)), gamma_max(cap) {
        gamma.assign(static_cast<size_t>(channels), ArrayXd::Zero(grid.size()));
        epsilon.assign(static_cast<size_t>(channels), ArrayXd::Zero(grid.size()));
    }

    TimeGrid grid;
    std::vector<ArrayXd> gamma;
    std::vector<ArrayXd> epsilon;
    std::vector<ClampRecord> clamp_report;
    double gamma_max;

    int channels() const { return static_cast<int>(gamma.size()); }

    void validate() const {
        for (size_t j = 0; j < gamma.size(); ++j) {
            if (gamma[j].size() != grid.size() || epsilon[j].size() != grid.size()) {
                throw StructuralError("ControlSchedule: series length mismatch");
            }
            if (!gamma[j].allFinite() || !epsilon[j].allFinite()) {
                throw NumericalError("ControlSchedule: non-finite entry");
            }
            if ((gamma[j] < 0.0).any()) {
                throw StructuralError("ControlSchedule: negative coupling rate");
            }
            if ((gamma[j] > gamma_max * (1.0 + 1e-12)).any()) {
                throw StructuralError("ControlSchedule: coupling rate above gamma_max");
            }
        }
    }
};

}  // namespace flyq
