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

#include "flyq/grid.hpp"

namespace flyq {

namespace detail {

template <typename Array>
Array cumulative_trapezoid(const Array& f, const TimeGrid& grid) {
    if (f.size() != grid.size()) {
        throw StructuralError("cumulative_integral: series length does not match grid");
    }
    if (!f.allFinite()) {
        throw NumericalError("cumulative_integral: non-finite sample");
    }
    const double half_dt = 0.5 * grid.dt();
    Array out(f.size());
    out[0] = typename Array::Scalar(0);
    for (Index i = 1; i < f.size(); ++i) {
        out[i] = out[i - 1] + half_dt * (f[i - 1] + f[i]);
    }
    return out;
}

}  // namespace detail

/// Running trapezoidal integral; first element is 0, last equals quadrature().
inline ArrayXd cumulative_integral(const ArrayXd& f, const TimeGrid& grid) {
    return detail::cumulative_trapezoid(f, grid);
}

inline ArrayXcd cumulative_integral(const ArrayXcd& f, const TimeGrid& grid) {
    return detail::cumulative_trapezoid(f, grid);
}

/// Trapezoidal rule over the full grid. Exact for affine integrands.
inline double quadrature(const ArrayXd& f, const TimeGrid& grid) {
    if (f.size() != grid.size()) {
        throw StructuralError("quadrature: series length does not match grid");
    }
    if (!f.allFinite()) {
        throw NumericalError("quadrature: non-finite sample");
    }
    const Index n = f.size();
    double interior = 0.0;
    for (Index i = 1; i + 1 < n; ++i) interior += f[i];
    return grid.dt() * (0.5 * (f[0] + f[n - 1]) + interior);
}

inline cplx quadrature(const ArrayXcd& f, const TimeGrid& grid) {
    if (f.size() != grid.size()) {
        throw StructuralError("quadrature: series length does not match grid");
    }
    if (!f.allFinite()) {
        throw NumericalError("quadrature: non-finite sample");
    }
    const Index n = f.size();
    cplx interior(0.0, 0.0);
    for (Index i = 1; i + 1 < n; ++i) interior += f[i];
    return grid.dt() * (0.5 * (f[0] + f[n - 1]) + interior);
}

/// Remaining integral from each grid point to the grid end,
/// tail[i] = quadrature(f) - cumulative[i], evaluated right-to-left so the
/// far tail keeps full relative precision.
inline ArrayXd tail_integral(const ArrayXd& f, const TimeGrid& grid) {
    if (f.size() != grid.size()) {
        throw StructuralError("tail_integral: series length does not match grid");
    }
    if (!f.allFinite()) {
        throw NumericalError("tail_integral: non-finite sample");
    }
    const double half_dt = 0.5 * grid.dt();
    ArrayXd out(f.size());
    const Index n = f.size();
    out[n - 1] = 0.0;
    for (Index i = n - 2; i >= 0; --i) {
        out[i] = out[i + 1] + half_dt * (f[i] + f[i + 1]);
    }
    return out;
}

}  // namespace flyq
