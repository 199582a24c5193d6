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

#include <stdexcept>
#include <string>

namespace flyq {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape/size/index mismatches between inputs.
struct StructuralError : Error {
    using Error::Error;
};

/// Non-finite data or a numerically unusable intermediate.
struct NumericalError : Error {
    using Error::Error;
};

/// Envelope window does not capture the wavepacket.
struct WindowTooNarrow : Error {
    WindowTooNarrow(const std::string& msg, double mass)
        : Error(msg), edge_mass(mass) {}
    double edge_mass;
};

/// Target phase profiles violate the task's phase rule.
struct PhaseMismatch : Error {
    using Error::Error;
};

/// Propagator sector block too ill-conditioned to invert reliably.
struct SectorIllConditioned : Error {
    SectorIllConditioned(const std::string& msg, double cond)
        : Error(msg), condition_number(cond) {}
    double condition_number;
};

/// Malformed task configuration (CLI layer).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace flyq
