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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "flyq/errors.hpp"

namespace flyq {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXi;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Frequencies quoted as "f MHz with x/2pi = f" convert to rad/us here,
/// at the interface boundary only. The math core works in rad/us and us.
inline double mhz_to_rad_per_us(double f_mhz) { return 2.0 * kPi * f_mhz; }

/// Uniform time grid on [t_start, t_end], times in us.
/// Timestamps are a pure function of (t_start, t_end, n_points), so grids
/// built from equal parameters are bit-identical.
class TimeGrid {
  public:
    TimeGrid(double t_start, double t_end, Index n_points)
        : t_start_(t_start), t_end_(t_end), n_(n_points) {
        if (!(t_end > t_start)) {
            throw StructuralError("TimeGrid: t_end must exceed t_start");
        }
        if (n_points < 3) {
            throw StructuralError("TimeGrid: n_points must be at least 3");
        }
        if (!std::isfinite(t_start) || !std::isfinite(t_end)) {
            throw NumericalError("TimeGrid: non-finite bounds");
        }
        dt_ = (t_end_ - t_start_) / static_cast<double>(n_ - 1);
    }

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    Index size() const { return n_; }
    double dt() const { return dt_; }

    double time(Index i) const { return t_start_ + static_cast<double>(i) * dt_; }

    ArrayXd times() const {
        ArrayXd t(n_);
        for (Index i = 0; i < n_; ++i) t[i] = time(i);
        return t;
    }

    /// Same span at doubled resolution (shares every coarse point).
    TimeGrid refined() const { return TimeGrid(t_start_, t_end_, 2 * n_ - 1); }

    bool operator==(const TimeGrid& o) const {
        return t_start_ == o.t_start_ && t_end_ == o.t_end_ && n_ == o.n_;
    }
    bool operator!=(const TimeGrid& o) const { return !(*this == o); }

  private:
    double t_start_;
    double t_end_;
    Index n_;
    double dt_;
};

/// Complex samples bound to a grid.
struct ComplexSeries {
    ComplexSeries(TimeGrid g, ArrayXcd v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size()) {
            throw StructuralError("ComplexSeries: length does not match grid");
        }
        if (!values.allFinite()) {
            throw NumericalError("ComplexSeries: non-finite value");
        }
    }

    TimeGrid grid;
    ArrayXcd values;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* who) {
    if (a != b) throw StructuralError(std::string(who) + ": grid mismatch");
}

}  // namespace flyq
