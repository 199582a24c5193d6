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

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "flyq/grid.hpp"
#include "flyq/integrate.hpp"

namespace flyq {

inline constexpr double kNormTol = 1e-6;
inline constexpr double kEdgeTol = 1e-4;
// Edge criterion in mass form: |xi(edge)| <= kEdgeTol * max|xi| corresponds to
// a relative mass density of kEdgeTol^2 at the window boundary.
inline constexpr double kEdgeMassTol = kEdgeTol * kEdgeTol;

/// Phase decoration for an analytic magnitude: xi = |xi| e^{-i phi} with
/// phi(t) = pi*[global_pi] + chirp*(t - t_start) + chirp2*(t - t_start)^2.
struct PhaseSpec {
    bool global_pi = false;
    double chirp_rad_per_us = 0.0;
    double chirp2_rad_per_us2 = 0.0;

    double at(double t, double t_start) const {
        const double u = t - t_start;
        return (global_pi ? kPi : 0.0) + chirp_rad_per_us * u + chirp2_rad_per_us2 * u * u;
    }
    bool trivial() const {
        return !global_pi && chirp_rad_per_us == 0.0 && chirp2_rad_per_us2 == 0.0;
    }
};

/// Sampled single-photon shape function, grid-normalized so that the
/// trapezoidal integral of |values|^2 is exactly 1.
///
/// Envelopes built from an analytic family additionally carry the family's
/// continuum-normalized density |xi(t)|^2 and its running masses, evaluated in
/// closed form at the grid points. Synthesis prefers those: ratios of closed-form
/// masses reproduce the analytic coupling formulas to round-off instead of
/// carrying the grid quadrature error into every schedule.
struct Envelope {
    ComplexSeries series;
    std::string label;

    ArrayXd density;    // |xi|^2, continuum-normalized when analytic
    ArrayXd head_mass;  // integral of density over (-inf, t_i]
    ArrayXd tail_mass;  // integral of density over [t_i, +inf)
    bool analytic = false;
    double grid_norm = 1.0;       // trapezoid norm of the raw samples
    double truncated_mass = 0.0;  // analytic mass outside the window

    const TimeGrid& grid() const { return series.grid; }
    const ArrayXcd& values() const { return series.values; }
    Index size() const { return series.grid.size(); }
};

namespace detail {

inline ArrayXcd apply_phase(const ArrayXd& magnitude, const PhaseSpec& phase,
                            const TimeGrid& grid) {
    ArrayXcd v(magnitude.size());
    if (phase.trivial()) {
        for (Index i = 0; i < magnitude.size(); ++i) v[i] = magnitude[i];
        return v;
    }
    for (Index i = 0; i < magnitude.size(); ++i) {
        const double phi = phase.at(grid.time(i), grid.t_start());
        v[i] = magnitude[i] * std::exp(cplx(0.0, -phi));
    }
    return v;
}

inline Envelope finish_analytic(TimeGrid grid, ArrayXd magnitude, ArrayXd density,
                                ArrayXd head, ArrayXd tail, const PhaseSpec& phase,
                                std::string label, bool allow_narrow) {
    const Index n = grid.size();
    const double edge_mass = head[0] + tail[n - 1];
    if (!allow_narrow && edge_mass > kEdgeMassTol) {
        throw WindowTooNarrow("make_envelope(" + label + "): window holds too little mass, " +
                                  std::to_string(edge_mass) + " outside",
                              edge_mass);
    }
    const double norm = quadrature(density, grid);
    if (norm <= 0.0) {
        throw NumericalError("make_envelope(" + label + "): zero mass on grid");
    }
    const double scale = 1.0 / std::sqrt(norm);
    ArrayXd scaled = magnitude * scale;

    Envelope e{ComplexSeries(grid, apply_phase(scaled, phase, grid)), std::move(label),
               std::move(density), std::move(head), std::move(tail)};
    e.analytic = true;
    e.grid_norm = norm;
    e.truncated_mass = edge_mass;
    return e;
}

}  // namespace detail

/// Exponentially decaying pulse |xi(t)| = sqrt(gamma_c) e^{-gamma_c t/2} with
/// support on t >= 0 (onset imposed; the tail truncates at the grid end).
inline Envelope make_envelope_exponential(double gamma_c, const TimeGrid& grid,
                                          const PhaseSpec& phase = {},
                                          bool allow_narrow = false) {
    if (!(gamma_c > 0.0)) {
        throw StructuralError("make_envelope_exponential: gamma_c must be positive");
    }
    const Index n = grid.size();
    ArrayXd magnitude(n), density(n), head(n), tail(n);
    // grid times near the onset can land a rounding ulp below zero
    const double onset_guard = -1e-12;
    for (Index i = 0; i < n; ++i) {
        const double t = grid.time(i);
        if (t < onset_guard) {
            magnitude[i] = 0.0;
            density[i] = 0.0;
            head[i] = 0.0;
            tail[i] = 1.0;
        } else {
            const double tt = std::max(t, 0.0);
            magnitude[i] = std::sqrt(gamma_c) * std::exp(-0.5 * gamma_c * tt);
            density[i] = gamma_c * std::exp(-gamma_c * tt);
            head[i] = -std::expm1(-gamma_c * tt);
            tail[i] = std::exp(-gamma_c * tt);
        }
    }
    return detail::finish_analytic(grid, std::move(magnitude), std::move(density),
                                   std::move(head), std::move(tail), phase, "exponential",
                                   allow_narrow);
}

/// Gaussian pulse |xi(t)| = (Omega^2/2pi)^{1/4} e^{-(Omega (t-t_c)/2)^2};
/// |xi|^2 is the normal density with sigma = 1/Omega.
inline Envelope make_envelope_gaussian(double omega, double t_center, const TimeGrid& grid,
                                       const PhaseSpec& phase = {}, bool allow_narrow = false) {
    if (!(omega > 0.0)) {
        throw StructuralError("make_envelope_gaussian: omega must be positive");
    }
    const Index n = grid.size();
    ArrayXd magnitude(n), density(n), head(n), tail(n);
    const double amp0 = std::pow(omega * omega / (2.0 * kPi), 0.25);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < n; ++i) {
        const double z = omega * (grid.time(i) - t_center);
        magnitude[i] = amp0 * std::exp(-0.25 * z * z);
        density[i] = omega / std::sqrt(2.0 * kPi) * std::exp(-0.5 * z * z);
        head[i] = 0.5 * std::erfc(-z * inv_sqrt2);
        tail[i] = 0.5 * std::erfc(z * inv_sqrt2);
    }
    return detail::finish_analytic(grid, std::move(magnitude), std::move(density),
                                   std::move(head), std::move(tail), phase, "gaussian",
                                   allow_narrow);
}

/// Envelope from raw complex samples; normalized by grid quadrature, masses by
/// running quadrature.
inline Envelope make_envelope_custom(const TimeGrid& grid, const ArrayXcd& samples,
                                     std::string label = "custom", bool allow_narrow = false) {
    if (samples.size() != grid.size()) {
        throw StructuralError("make_envelope_custom: sample length does not match grid");
    }
    ArrayXd raw_density = samples.abs2();
    const double norm = quadrature(raw_density, grid);
    if (norm <= 0.0) {
        throw NumericalError("make_envelope_custom: zero mass");
    }
    ArrayXcd v = samples / std::sqrt(norm);
    ArrayXd density = v.abs2();
    const double peak = density.maxCoeff();
    const double edge = std::max(density[0], density[grid.size() - 1]);
    if (!allow_narrow && edge > kEdgeTol * kEdgeTol * peak) {
        throw WindowTooNarrow("make_envelope_custom: envelope magnitude at window edge is " +
                                  std::to_string(std::sqrt(edge / peak)) + " of peak",
                              edge / peak);
    }
    Envelope e{ComplexSeries(grid, std::move(v)), std::move(label), density,
               cumulative_integral(density, grid), tail_integral(density, grid)};
    e.analytic = false;
    e.grid_norm = norm;
    e.truncated_mass = 0.0;
    return e;
}

/// Re-apply grid normalization; changes an already normalized envelope by
/// strictly less than 1e-12.
inline Envelope normalize(const Envelope& e) {
    if (e.analytic) {
        Envelope out = e;
        const double n2 = quadrature(out.values().abs2().eval(), out.grid());
        out.series.values /= std::sqrt(n2);
        return out;
    }
    return make_envelope_custom(e.grid(), e.values(), e.label, true);
}

/// Continuous unwrapped phase phi(t) from xi = |xi| e^{-i phi}. The profile is
/// frozen wherever |xi| drops below 1e-6 of peak (phase undefined there); the
/// first significant sample keeps its principal value, so a global factor
/// e^{i pi} reads back as phi = -pi.
inline ArrayXd phase_profile(const Envelope& e) {
    const ArrayXcd& v = e.values();
    const Index n = v.size();
    const double peak = std::sqrt(v.abs2().maxCoeff());
    const double floor = 1e-6 * peak;

    ArrayXd phi = ArrayXd::Zero(n);
    Index first = n;
    for (Index i = 0; i < n; ++i) {
        if (std::abs(v[i]) > floor) {
            first = i;
            break;
        }
    }
    if (first == n) return phi;

    double current = -std::arg(v[first]);
    for (Index i = 0; i <= first; ++i) phi[i] = current;
    for (Index i = first + 1; i < n; ++i) {
        if (std::abs(v[i]) > floor) {
            double delta = -std::arg(v[i]) - (-std::arg(v[i - 1]));
            // unwrap: principal branch of the increment
            delta = std::remainder(delta, 2.0 * kPi);
            if (std::abs(v[i - 1]) <= floor) delta = 0.0;  // re-entering after a gap
            current += delta;
        }
        phi[i] = current;
    }
    return phi;
}

/// Detuning schedule epsilon = dphi/dt via central differences on the
/// unwrapped phase (one-sided at the ends).
inline ArrayXd detuning_from_phase(const Envelope& e) {
    const ArrayXd phi = phase_profile(e);
    const Index n = phi.size();
    const double h = e.grid().dt();
    ArrayXd eps(n);
    eps[0] = (phi[1] - phi[0]) / h;
    eps[n - 1] = (phi[n - 1] - phi[n - 2]) / h;
    for (Index i = 1; i + 1 < n; ++i) eps[i] = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    return eps;
}

/// Difference of two phase profiles wrapped to (-pi, pi], evaluated where both
/// magnitudes are significant. Returns max |wrap(phi1 - phi2 - offset)|.
inline double max_phase_deviation(const Envelope& a, const Envelope& b, double offset) {
    require_same_grid(a.grid(), b.grid(), "max_phase_deviation");
    const ArrayXd pa = phase_profile(a);
    const ArrayXd pb = phase_profile(b);
    const double fa = 1e-6 * std::sqrt(a.values().abs2().maxCoeff());
    const double fb = 1e-6 * std::sqrt(b.values().abs2().maxCoeff());
    double worst = 0.0;
    for (Index i = 0; i < pa.size(); ++i) {
        if (std::abs(a.values()[i]) > fa && std::abs(b.values()[i]) > fb) {
            const double d = std::remainder(pa[i] - pb[i] - offset, 2.0 * kPi);
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

}  // namespace flyq
