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

#include <functional>
#include <vector>

#include "flyq/grid.hpp"

namespace flyq {

/// Generator sample at a grid index: G(t_i) for dV/dt = G(t) V.
using GeneratorFn = std::function<MatrixXcd(Index)>;

namespace detail {

inline void check_generator_sample(const MatrixXcd& g, Index i, Index dim) {
    if (g.rows() != dim || g.cols() != dim) {
        throw StructuralError("propagate_linear_ode: generator sample " + std::to_string(i) +
                              " has inconsistent dimensions");
    }
    if (!g.allFinite()) {
        throw NumericalError("propagate_linear_ode: non-finite generator sample at index " +
                             std::to_string(i));
    }
}

// One classic RK4 step for V' = G(t) V with G linear on the step.
inline void rk4_step(MatrixXcd& v, const MatrixXcd& g0, const MatrixXcd& gh,
                     const MatrixXcd& g1, double h) {
    const MatrixXcd k1 = g0 * v;
    const MatrixXcd k2 = gh * (v + (0.5 * h) * k1);
    const MatrixXcd k3 = gh * (v + (0.5 * h) * k2);
    const MatrixXcd k4 = g1 * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Fixed-step 4th-order integration of dV/dt = G(t) V with V(t_start) = initial.
/// Half-step generator values come from linear interpolation of the samples,
/// so the scheme integrates the piecewise-linear interpolant of G exactly to
/// 4th order. Returns V at every grid point.
inline std::vector<MatrixXcd> propagate_linear_ode(const GeneratorFn& generator,
                                                   const MatrixXcd& initial,
                                                   const TimeGrid& grid) {
    const Index dim = initial.rows();
    if (initial.cols() != dim) {
        throw StructuralError("propagate_linear_ode: initial matrix must be square");
    }
    const double h = grid.dt();
    std::vector<MatrixXcd> out;
    out.reserve(static_cast<size_t>(grid.size()));
    out.push_back(initial);

    MatrixXcd g0 = generator(0);
    detail::check_generator_sample(g0, 0, dim);
    for (Index i = 0; i + 1 < grid.size(); ++i) {
        MatrixXcd g1 = generator(i + 1);
        detail::check_generator_sample(g1, i + 1, dim);
        const MatrixXcd gh = 0.5 * (g0 + g1);
        MatrixXcd v = out.back();
        detail::rk4_step(v, g0, gh, g1, h);
        out.push_back(std::move(v));
        g0.swap(g1);
    }
    return out;
}

/// Convergence audit: propagate on the grid and on a 2x refined grid (refined
/// samples by linear interpolation) and report the max elementwise difference
/// at the shared points. The refined trajectory is streamed, not stored.
inline double step_doubling_error(const GeneratorFn& generator, const MatrixXcd& initial,
                                  const TimeGrid& grid) {
    const std::vector<MatrixXcd> coarse = propagate_linear_ode(generator, initial, grid);
    const double h2 = 0.5 * grid.dt();

    MatrixXcd v = initial;
    double max_diff = 0.0;
    MatrixXcd g0 = generator(0);
    for (Index i = 0; i + 1 < grid.size(); ++i) {
        const MatrixXcd g1 = generator(i + 1);
        const MatrixXcd gm = 0.5 * (g0 + g1);
        detail::rk4_step(v, g0, 0.5 * (g0 + gm), gm, h2);
        detail::rk4_step(v, gm, 0.5 * (gm + g1), g1, h2);
        max_diff = std::max(max_diff, (v - coarse[static_cast<size_t>(i) + 1]).cwiseAbs().maxCoeff());
        g0 = g1;
    }
    return max_diff;
}

}  // namespace flyq
