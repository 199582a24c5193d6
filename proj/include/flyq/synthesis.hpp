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

#include <cmath>
#include <utility>
#include <vector>

#include "flyq/envelope.hpp"
#include "flyq/schedule.hpp"

namespace flyq {

inline constexpr double kMarginTol = 1e-10;
inline constexpr double kPhaseTol = 1e-6;
// Activity threshold for realizability: samples whose density is below this
// fraction of peak sit inside the den-floor clamp anyway.
inline constexpr double kActiveDensityRel = 1e-8;

/// Outcome of the tail-dominance check between two target shapes.
struct RealizabilityReport {
    bool realizable = false;
    std::vector<std::pair<double, double>> violation_times;
    ArrayXd margin;  // remaining mass of shape 2 minus remaining mass of shape 1
};

/// Requested shape pair cannot be produced with nonnegative couplings.
struct NotRealizable : Error {
    NotRealizable(const std::string& msg, RealizabilityReport r)
        : Error(msg), report(std::move(r)) {}
    RealizabilityReport report;
};

/// Tail-dominance check: the second shape's remaining mass must strictly
/// exceed the first's wherever either shape is active. Margins come from
/// backward cumulative quadrature of the sampled densities.
inline RealizabilityReport check_tail_dominance(const Envelope& e1, const Envelope& e2) {
    require_same_grid(e1.grid(), e2.grid(), "check_tail_dominance");
    const TimeGrid& grid = e1.grid();
    const ArrayXd d1 = e1.values().abs2();
    const ArrayXd d2 = e2.values().abs2();
    const ArrayXd tail1 = tail_integral(d1, grid);
    const ArrayXd tail2 = tail_integral(d2, grid);

    RealizabilityReport rep;
    rep.margin = tail2 - tail1;

    const double thr1 = kActiveDensityRel * d1.maxCoeff();
    const double thr2 = kActiveDensityRel * d2.maxCoeff();
    bool in_violation = false;
    double begin = 0.0;
    bool ok = true;
    for (Index i = 0; i < grid.size(); ++i) {
        const bool active = d1[i] > thr1 || d2[i] > thr2;
        const bool bad = active && rep.margin[i] <= kMarginTol;
        if (bad) ok = false;
        if (bad && !in_violation) {
            in_violation = true;
            begin = grid.time(i);
        } else if (!bad && in_violation) {
            in_violation = false;
            rep.violation_times.emplace_back(begin, grid.time(i - 1));
        }
    }
    if (in_violation) rep.violation_times.emplace_back(begin, grid.t_end());
    rep.realizable = ok;
    return rep;
}

/// Antisymmetric twin of check_tail_dominance's margin, for property tests.
inline ArrayXd dominance_margin(const Envelope& e1, const Envelope& e2) {
    return check_tail_dominance(e1, e2).margin;
}

/// Clamped coupling rate from a raw formula trace and its denominator series.
/// Wherever the denominator drops below kDenFloorRel * total_mass the rate is
/// forced to zero and the probability mass involved is recorded; elsewhere the
/// rate is capped at gamma_max.
inline std::pair<ArrayXd, std::vector<ClampRecord>> clamp_policy(
    const ArrayXd& raw_gamma, const ArrayXd& denominator, double total_mass,
    const TimeGrid& grid, double gamma_max = kDefaultGammaMax, int channel = 1) {
    if (raw_gamma.size() != grid.size() || denominator.size() != grid.size()) {
        throw StructuralError("clamp_policy: series length mismatch");
    }
    const double floor = kDenFloorRel * total_mass;
    ArrayXd gamma(grid.size());
    std::vector<ClampRecord> records;

    bool in_floor = false, in_cap = false;
    double floor_begin = 0.0, cap_begin = 0.0;
    double floor_mass = 0.0, cap_peak = 0.0;
    auto close_floor = [&](Index i) {
        records.push_back({channel, floor_begin, grid.time(i - 1), "den-floor", floor_mass});
        in_floor = false;
    };
    auto close_cap = [&](Index i) {
        records.push_back({channel, cap_begin, grid.time(i - 1), "gamma-cap", cap_peak});
        in_cap = false;
    };

    for (Index i = 0; i < grid.size(); ++i) {
        if (denominator[i] < floor) {
            gamma[i] = 0.0;
            if (!in_floor) {
                in_floor = true;
                floor_begin = grid.time(i);
                floor_mass = 0.0;
            }
            floor_mass = std::max(floor_mass, std::max(denominator[i], 0.0));
            if (in_cap) close_cap(i);
        } else {
            const double g = raw_gamma[i];
            if (!std::isfinite(g) || g < 0.0) {
                throw NumericalError("clamp_policy: invalid raw rate over a healthy denominator");
            }
            if (g > gamma_max) {
                gamma[i] = gamma_max;
                if (!in_cap) {
                    in_cap = true;
                    cap_begin = grid.time(i);
                    cap_peak = 0.0;
                }
                cap_peak = std::max(cap_peak, g);
            } else {
                gamma[i] = g;
                if (in_cap) close_cap(i);
            }
            if (in_floor) close_floor(i);
        }
    }
    if (in_floor) close_floor(grid.size());
    if (in_cap) close_cap(grid.size());
    return {std::move(gamma), std::move(records)};
}

namespace detail {

// gamma = num/den with the clamp policy; records the unemitted mass left when
// the window or the den-floor cuts the schedule off.
inline void emit_channel(ControlSchedule& s, int channel, const ArrayXd& num, const ArrayXd& den,
                         const Envelope& env, bool tail_type) {
    const TimeGrid& grid = s.grid;
    ArrayXd raw(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
        raw[i] = den[i] > 0.0 ? num[i] / den[i] : std::numeric_limits<double>::infinity();
    }
    auto [gamma, records] = clamp_policy(raw, den, 1.0, grid, s.gamma_max, channel);
    s.gamma[static_cast<size_t>(channel - 1)] = std::move(gamma);
    for (auto& r : records) s.clamp_report.push_back(std::move(r));

    if (tail_type) {
        // residual photon mass never emitted: denominator where emission stops
        const double floor = kDenFloorRel;
        double residual = den[grid.size() - 1];
        for (Index i = grid.size() - 1; i >= 0; --i) {
            if (den[i] >= floor) {
                residual = den[i];
                break;
            }
        }
        s.clamp_report.push_back(
            {channel, grid.t_end(), grid.t_end(), "residual-mass", residual});
    }
    if (env.truncated_mass > 0.0) {
        s.clamp_report.push_back(
            {channel, grid.t_start(), grid.t_end(), "window-truncation", env.truncated_mass});
    }
}

inline void check_alphas(cplx a1, cplx a2) {
    if (std::abs(std::norm(a1) + std::norm(a2) - 1.0) > 1e-9) {
        throw StructuralError("alpha coefficients must satisfy |a1|^2 + |a2|^2 = 1");
    }
}

// Difference of remaining masses, tail2 - tail1 == head1 - head2, evaluated
// through whichever form is well conditioned at each sample.
inline ArrayXd mass_difference(const Envelope& e1, const Envelope& e2) {
    ArrayXd out(e1.size());
    for (Index i = 0; i < e1.size(); ++i) {
        out[i] = e1.head_mass[i] < 0.5 ? e1.head_mass[i] - e2.head_mass[i]
                                       : e2.tail_mass[i] - e1.tail_mass[i];
    }
    return out;
}

}  // namespace detail

/// Coupling for releasing a single photon of shape xi from an excited
/// two-level atom: gamma(t) = |xi(t)|^2 / (mass still to be emitted after t);
/// detuning follows the shape's phase rate.
inline ControlSchedule synth_two_level_generate(const Envelope& xi,
                                                double gamma_max = kDefaultGammaMax) {
    ControlSchedule s(xi.grid(), 1, gamma_max);
    detail::emit_channel(s, 1, xi.density, xi.tail_mass, xi, /*tail_type=*/true);
    s.epsilon[0] = detuning_from_phase(xi);
    return s;
}

/// Mirror of generation for absorbing a photon: the denominator is the mass
/// already arrived, so the early-time divergence is clamped instead.
inline ControlSchedule synth_two_level_catch(const Envelope& xi,
                                             double gamma_max = kDefaultGammaMax) {
    ControlSchedule s(xi.grid(), 1, gamma_max);
    detail::emit_channel(s, 1, xi.density, xi.head_mass, xi, /*tail_type=*/false);
    s.epsilon[0] = detuning_from_phase(xi);
    return s;
}

/// Couplings that distribute one photon from a lambda atom into two channels,
/// leaving the atom entangled with the pair: gamma_k = |alpha_k xi_k|^2 over
/// the shared remaining mass. Targets must carry identical phase profiles.
inline ControlSchedule synth_lambda_generate(cplx alpha1, cplx alpha2, const Envelope& xi1,
                                             const Envelope& xi2,
                                             double gamma_max = kDefaultGammaMax) {
    require_same_grid(xi1.grid(), xi2.grid(), "synth_lambda_generate");
    detail::check_alphas(alpha1, alpha2);
    const double w1 = std::norm(alpha1);
    const double w2 = std::norm(alpha2);
    if (w1 > 0.0 && w2 > 0.0) {
        const double dev = max_phase_deviation(xi1, xi2, 0.0);
        if (dev > kPhaseTol) {
            throw PhaseMismatch("synth_lambda_generate: target phase profiles differ by up to " +
                                std::to_string(dev) + " rad");
        }
    }
    ControlSchedule s(xi1.grid(), 2, gamma_max);
    const ArrayXd den = w1 * xi1.tail_mass + w2 * xi2.tail_mass;
    detail::emit_channel(s, 1, (w1 * xi1.density).eval(), den, xi1, true);
    detail::emit_channel(s, 2, (w2 * xi2.density).eval(), den, xi2, true);
    s.epsilon[0] = w1 > 0.0 ? detuning_from_phase(xi1) : detuning_from_phase(xi2);
    // only the sum epsilon1 + epsilon2 is constrained; the full rate sits on
    // channel 1 by convention
    return s;
}

/// Couplings shaping the marginals of a cascaded photon pair from a ladder
/// atom. The second rate divides by the mass gap between the shapes, so the
/// first shape's tail must be strictly dominated.
inline ControlSchedule synth_xi_pair(const Envelope& xi1, const Envelope& xi2,
                                     double gamma_max = kDefaultGammaMax) {
    require_same_grid(xi1.grid(), xi2.grid(), "synth_xi_pair");
    RealizabilityReport rep = check_tail_dominance(xi1, xi2);
    if (!rep.realizable) {
        throw NotRealizable("synth_xi_pair: first shape's tail is not dominated", std::move(rep));
    }
    ControlSchedule s(xi1.grid(), 2, gamma_max);
    detail::emit_channel(s, 1, xi1.density, xi1.tail_mass, xi1, true);
    detail::emit_channel(s, 2, xi2.density, detail::mass_difference(xi1, xi2), xi2, true);
    // pair marginals carry no definite phases; detunings stay zero
    return s;
}

/// Catching a photon from channel 1 with a lambda atom: channel 1 runs the
/// two-level catch, channel 2 stays off so nothing leaks.
inline ControlSchedule synth_lambda_catch(const Envelope& xi,
                                          double gamma_max = kDefaultGammaMax) {
    ControlSchedule s(xi.grid(), 2, gamma_max);
    detail::emit_channel(s, 1, xi.density, xi.head_mass, xi, false);
    s.epsilon[0] = detuning_from_phase(xi);
    return s;
}

/// Catching a photon distributed over both channels with a vee atom: each
/// channel independently runs the two-level catch of its own shape.
inline ControlSchedule synth_v_catch(cplx alpha1, cplx alpha2, const Envelope& xi1,
                                     const Envelope& xi2, double gamma_max = kDefaultGammaMax) {
    require_same_grid(xi1.grid(), xi2.grid(), "synth_v_catch");
    detail::check_alphas(alpha1, alpha2);
    ControlSchedule s(xi1.grid(), 2, gamma_max);
    detail::emit_channel(s, 1, xi1.density, xi1.head_mass, xi1, false);
    detail::emit_channel(s, 2, xi2.density, xi2.head_mass, xi2, false);
    s.epsilon[0] = detuning_from_phase(xi1);
    s.epsilon[1] = detuning_from_phase(xi2);
    return s;
}

/// Converting a photon from channel 1 into channel 2 through a lambda atom.
/// Both rates divide by the same gained population, the arrived input mass
/// minus the emitted output mass; the shapes must carry inverted phases.
inline ControlSchedule synth_lambda_convert(const Envelope& xi1, const Envelope& xi2,
                                            double gamma_max = kDefaultGammaMax) {
    require_same_grid(xi1.grid(), xi2.grid(), "synth_lambda_convert");
    const double dev = max_phase_deviation(xi1, xi2, kPi);
    if (dev > kPhaseTol) {
        throw PhaseMismatch(
            "synth_lambda_convert: phase profiles must differ by an odd multiple of pi "
            "(worst deviation " +
            std::to_string(dev) + " rad)");
    }
    RealizabilityReport rep = check_tail_dominance(xi1, xi2);
    if (!rep.realizable) {
        throw NotRealizable("synth_lambda_convert: input must be absorbed ahead of emission",
                            std::move(rep));
    }
    ControlSchedule s(xi1.grid(), 2, gamma_max);
    const ArrayXd den = detail::mass_difference(xi1, xi2);
    detail::emit_channel(s, 1, xi1.density, den, xi1, false);
    detail::emit_channel(s, 2, xi2.density, den, xi2, true);
    s.epsilon[0] = detuning_from_phase(xi1);
    return s;
}

/// Unclamped formula traces for figure reproduction: sign preserved, no caps,
/// singular samples flagged. The library API never returns these.
struct RawTraces {
    ArrayXd gamma1;
    ArrayXd gamma2;
    Eigen::Array<bool, Eigen::Dynamic, 1> violation;
};

namespace detail {

inline ArrayXd raw_ratio(const ArrayXd& num, const ArrayXd& den) {
    ArrayXd out(num.size());
    for (Index i = 0; i < num.size(); ++i) {
        out[i] = num[i] / den[i];  // may be +-inf or nan where den == 0
    }
    return out;
}

}  // namespace detail

inline RawTraces raw_xi_pair_traces(const Envelope& xi1, const Envelope& xi2) {
    require_same_grid(xi1.grid(), xi2.grid(), "raw_xi_pair_traces");
    const ArrayXd den2 = detail::mass_difference(xi1, xi2);
    RawTraces r{detail::raw_ratio(xi1.density, xi1.tail_mass),
                detail::raw_ratio(xi2.density, den2),
                Eigen::Array<bool, Eigen::Dynamic, 1>(xi1.size())};
    for (Index i = 0; i < xi1.size(); ++i) {
        r.violation[i] = !(den2[i] > 0.0) || !std::isfinite(r.gamma2[i]) || r.gamma2[i] < 0.0;
    }
    return r;
}

inline RawTraces raw_lambda_convert_traces(const Envelope& xi1, const Envelope& xi2) {
    require_same_grid(xi1.grid(), xi2.grid(), "raw_lambda_convert_traces");
    const ArrayXd den = detail::mass_difference(xi1, xi2);
    RawTraces r{detail::raw_ratio(xi1.density, den), detail::raw_ratio(xi2.density, den),
                Eigen::Array<bool, Eigen::Dynamic, 1>(xi1.size())};
    for (Index i = 0; i < xi1.size(); ++i) {
        r.violation[i] = !(den[i] > 0.0) || !std::isfinite(r.gamma1[i]) ||
                         !std::isfinite(r.gamma2[i]) || r.gamma1[i] < 0.0 || r.gamma2[i] < 0.0;
    }
    return r;
}

}  // namespace flyq
