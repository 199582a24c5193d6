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

#include <vector>

#include "flyq/component.hpp"
#include "flyq/envelope.hpp"
#include "flyq/integrate.hpp"
#include "flyq/propagate.hpp"

namespace flyq {

inline constexpr double kGridTol = 1e-6;
inline constexpr double kCondMax = 1e12;
inline constexpr double kPairCrosscheckTol = 1e-5;

/// Non-unitary no-emission propagator V(t) and the conditional state it drags
/// along, V(t)|psi0>.
struct PropagatorTrajectory {
    TimeGrid grid;
    std::vector<MatrixXcd> V;
    MatrixXcd states;               // column i = V(t_i) |psi0>
    Eigen::ArrayXXd populations;    // (k, i) = |<k| V(t_i) |psi0>|^2
    VectorXcd psi0;
    double convergence_error = 0.0;
    bool convergence_warning = false;
};

/// Integrate dV/dt = [-iH(t) - 1/2 sum_j L_j^dag L_j] V from the identity and
/// derive per-state populations. A step-doubling audit runs alongside; when it
/// exceeds kGridTol the trajectory carries a warning (never fatal).
inline PropagatorTrajectory propagate(const SLHComponent& component, bool convergence_audit = true) {
    const TimeGrid& grid = component.grid;
    auto gen = [&component](Index i) { return component.generator_at(i); };

    PropagatorTrajectory traj{grid,
                              propagate_linear_ode(gen, MatrixXcd::Identity(component.dim, component.dim), grid),
                              MatrixXcd(component.dim, grid.size()),
                              Eigen::ArrayXXd(component.dim, grid.size()),
                              component.initial_state};
    for (Index i = 0; i < grid.size(); ++i) {
        traj.states.col(i) = traj.V[static_cast<size_t>(i)] * component.initial_state;
        traj.populations.col(i) = traj.states.col(i).cwiseAbs2().array();
    }
    if (convergence_audit) {
        traj.convergence_error =
            step_doubling_error(gen, MatrixXcd::Identity(component.dim, component.dim), grid);
        traj.convergence_warning = traj.convergence_error > kGridTol;
    }
    return traj;
}

/// Population series of one labeled basis state.
inline ArrayXd population_series(const PropagatorTrajectory& traj, const SLHComponent& component,
                                 const std::string& label) {
    for (Index k = 0; k < component.dim; ++k) {
        if (component.basis_labels[static_cast<size_t>(k)] == label) {
            return traj.populations.row(k).transpose();
        }
    }
    throw StructuralError("population_series: unknown basis label " + label);
}

namespace detail {

inline std::vector<Index> grading_indices(const VectorXi& excitation, int level) {
    std::vector<Index> idx;
    for (Index k = 0; k < excitation.size(); ++k) {
        if (excitation[k] == level) idx.push_back(k);
    }
    return idx;
}

inline int initial_sector(const SLHComponent& c) {
    int sector = -1;
    for (Index k = 0; k < c.dim; ++k) {
        if (std::abs(c.initial_state[k]) > 1e-14) {
            if (sector >= 0 && c.excitation[k] != sector) {
                throw StructuralError("initial state mixes excitation sectors");
            }
            sector = c.excitation[k];
        }
    }
    if (sector < 0) throw StructuralError("initial state is zero");
    return sector;
}

// Solve the grading-restricted block V(idx, idx) y = w, monitoring conditioning.
inline VectorXcd solve_sector(const MatrixXcd& v, const std::vector<Index>& idx,
                              const VectorXcd& w_full) {
    const Index m = static_cast<Index>(idx.size());
    if (m == 1) {
        const cplx b = v(idx[0], idx[0]);
        if (std::abs(b) == 0.0) {
            throw SectorIllConditioned("sector block is singular; widen the window",
                                       std::numeric_limits<double>::infinity());
        }
        VectorXcd y(1);
        y[0] = w_full[idx[0]] / b;
        return y;
    }
    MatrixXcd block(m, m);
    VectorXcd w(m);
    for (Index r = 0; r < m; ++r) {
        w[r] = w_full[idx[static_cast<size_t>(r)]];
        for (Index c = 0; c < m; ++c) {
            block(r, c) = v(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
        }
    }
    Eigen::PartialPivLU<MatrixXcd> lu(block);
    const MatrixXcd inv = lu.inverse();
    const double cond = block.cwiseAbs().maxCoeff() * inv.cwiseAbs().maxCoeff() *
                        static_cast<double>(m);
    if (!std::isfinite(cond) || cond > kCondMax) {
        throw SectorIllConditioned("sector block condition number " + std::to_string(cond) +
                                       " exceeds limit; widen the window",
                                   cond);
    }
    return inv * w;
}

}  // namespace detail

/// Output-field decomposition in the <= 1 emission layer: per channel j the
/// amplitude series xi_j^x(tau) = <x| V(t_end) Vinv(tau) L_j(tau) V(tau) |psi0>,
/// the no-emission amplitudes, and branch probabilities. The inverse is never
/// formed densely; each tau solves the one excitation-sector block the
/// insertion lives in.
struct EmissionResult {
    TimeGrid grid;
    VectorXcd vacuum_state;    // V(t_end) |psi0>
    double vacuum_probability = 0.0;
    std::vector<MatrixXcd> amplitudes;   // per channel: (basis state x) x (tau)
    std::vector<MatrixXcd> insertions;   // per channel: sector coords of Vinv L V |psi0>
    std::vector<Index> insertion_index;  // basis indices of the insertion sector
    std::vector<double> channel_probability;
    double total_probability = 0.0;  // vacuum + all single-photon branches

    ArrayXcd amplitude(int channel, Index basis_state) const {
        return amplitudes[static_cast<size_t>(channel)].row(basis_state).transpose();
    }
};

inline EmissionResult emit_single(const PropagatorTrajectory& traj, const SLHComponent& component) {
    const TimeGrid& grid = traj.grid;
    const Index n = grid.size();
    const int sector = detail::initial_sector(component);
    if (sector < 1) throw StructuralError("emit_single: initial state carries no excitation");
    const std::vector<Index> idx = detail::grading_indices(component.excitation, sector - 1);
    const Index m = static_cast<Index>(idx.size());
    const MatrixXcd& v_end = traj.V.back();

    EmissionResult em{grid, traj.states.col(n - 1)};
    em.vacuum_probability = em.vacuum_state.squaredNorm();
    em.insertion_index = idx;
    em.total_probability = em.vacuum_probability;

    for (int j = 0; j < component.channels(); ++j) {
        MatrixXcd amp = MatrixXcd::Zero(component.dim, n);
        MatrixXcd ins = MatrixXcd::Zero(m, n);
        ArrayXd mass(n);
        for (Index i = 0; i < n; ++i) {
            const VectorXcd w = component.coupling_at(j, i) * traj.states.col(i);
            const VectorXcd y = detail::solve_sector(traj.V[static_cast<size_t>(i)], idx, w);
            ins.col(i) = y;
            VectorXcd a = VectorXcd::Zero(component.dim);
            for (Index r = 0; r < m; ++r) a += y[r] * v_end.col(idx[static_cast<size_t>(r)]);
            amp.col(i) = a;
            mass[i] = a.squaredNorm();
        }
        em.channel_probability.push_back(quadrature(mass, grid));
        em.total_probability += em.channel_probability.back();
        em.amplitudes.push_back(std::move(amp));
        em.insertions.push_back(std::move(ins));
    }
    return em;
}

/// Joint amplitude of an ordered photon pair on the triangle tau1 <= tau2:
/// values(i, j) = xi(tau_j, tau_i) for j <= i, first photon into channel 1 at
/// tau_j, second into channel 2 at tau_i.
struct TwoPhotonAmplitude {
    TimeGrid grid;
    MatrixXcd values;  // lower-triangular
    double total_probability = 0.0;
    double crosscheck_residual = 0.0;  // generic path vs cumulative-integral closed form
};

inline TwoPhotonAmplitude emit_pair(const PropagatorTrajectory& traj,
                                    const SLHComponent& component) {
    if (component.dim != 3 || component.channels() != 2 ||
        detail::initial_sector(component) != 2 ||
        detail::grading_indices(component.excitation, 1).size() != 1) {
        throw StructuralError("emit_pair: component is not a two-excitation ladder");
    }
    const TimeGrid& grid = traj.grid;
    const Index n = grid.size();
    const Index e_idx = detail::grading_indices(component.excitation, 1)[0];
    const Index g_idx = detail::grading_indices(component.excitation, 0)[0];
    const std::vector<Index> sec1{e_idx};
    const std::vector<Index> sec0{g_idx};
    const cplx v_gg_end = traj.V.back()(g_idx, g_idx);

    // first insertion from |psi0>, second from the intermediate |e>
    ArrayXcd first(n), second(n);
    for (Index i = 0; i < n; ++i) {
        const MatrixXcd& v = traj.V[static_cast<size_t>(i)];
        const VectorXcd w1 = component.coupling_at(0, i) * traj.states.col(i);
        first[i] = detail::solve_sector(v, sec1, w1)[0];

        VectorXcd e_state = VectorXcd::Zero(3);
        e_state[e_idx] = v(e_idx, e_idx);
        const VectorXcd w2 = component.coupling_at(1, i) * e_state;
        second[i] = detail::solve_sector(v, sec0, w2)[0];
    }

    TwoPhotonAmplitude pair{grid, MatrixXcd::Zero(n, n)};
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
            pair.values(i, j) = v_gg_end * first[j] * second[i];
        }
    }

    // closed-form cross-check: sqrt(gamma1(t1) gamma2(t2))
    //   * exp(-Gamma1(t1)/2 - (Gamma2(t2) - Gamma2(t1))/2)
    //   * exp(-i Theta1(t1) - i (Theta2(t2) - Theta2(t1)))
    // with Gamma/Theta running trapezoidal integrals of the schedules.
    ArrayXd gamma1(n), gamma2(n), eps1(n), eps2(n);
    for (Index i = 0; i < n; ++i) {
        const MatrixXcd l1 = component.coupling_at(0, i);
        const MatrixXcd l2 = component.coupling_at(1, i);
        gamma1[i] = std::norm(l1(e_idx, 2));
        gamma2[i] = std::norm(l2(g_idx, e_idx));
        const MatrixXcd h = component.hamiltonian_at(i);
        eps1[i] = h(2, 2).real();
        eps2[i] = h(e_idx, e_idx).real();
    }
    const ArrayXd big_g1 = cumulative_integral(gamma1, grid);
    const ArrayXd big_g2 = cumulative_integral(gamma2, grid);
    const ArrayXd th1 = cumulative_integral(eps1, grid);
    const ArrayXd th2 = cumulative_integral(eps2, grid);
    ArrayXcd left(n), right(n);
    for (Index i = 0; i < n; ++i) {
        left[i] = std::sqrt(gamma1[i]) *
                  std::exp(cplx(-0.5 * (big_g1[i] - big_g2[i]), -(th1[i] - th2[i])));
        right[i] = std::sqrt(gamma2[i]) * std::exp(cplx(-0.5 * big_g2[i], -th2[i]));
    }
    double resid = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
            resid = std::max(resid, std::abs(pair.values(i, j) - left[j] * right[i]));
        }
    }
    pair.crosscheck_residual = resid;
    if (resid > kPairCrosscheckTol) {
        throw NumericalError("emit_pair: generic path and closed form disagree by " +
                             std::to_string(resid));
    }

    // total probability over the ordered triangle
    ArrayXd row_mass(n);
    for (Index i = 0; i < n; ++i) {
        ArrayXd row(i + 1);
        for (Index j = 0; j <= i; ++j) row[j] = std::norm(pair.values(i, j));
        if (i == 0) {
            row_mass[i] = 0.0;
        } else {
            double acc = 0.5 * (row[0] + row[i]);
            for (Index j = 1; j < i; ++j) acc += row[j];
            row_mass[i] = acc * grid.dt();
        }
    }
    pair.total_probability = quadrature(row_mass, grid);
    return pair;
}

/// Marginal arrival-time densities of the pair: channel 1's photon integrates
/// over the partner's later time, channel 2's over the earlier one.
inline std::pair<ArrayXd, ArrayXd> marginals(const TwoPhotonAmplitude& pair) {
    const Index n = pair.grid.size();
    const double h = pair.grid.dt();
    ArrayXd density1 = ArrayXd::Zero(n);
    ArrayXd density2 = ArrayXd::Zero(n);
    for (Index j = 0; j < n; ++j) {
        if (j + 1 < n) {
            double acc = 0.5 * (std::norm(pair.values(j, j)) + std::norm(pair.values(n - 1, j)));
            for (Index i = j + 1; i + 1 < n; ++i) acc += std::norm(pair.values(i, j));
            density1[j] = acc * h;
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (i > 0) {
            double acc = 0.5 * (std::norm(pair.values(i, 0)) + std::norm(pair.values(i, i)));
            for (Index j = 1; j < i; ++j) acc += std::norm(pair.values(i, j));
            density2[i] = acc * h;
        }
    }
    return {std::move(density1), std::move(density2)};
}

/// Overlap fidelity |integral conj(target) achieved dt|^2. The achieved series
/// is used as-is, so amplitude loss lowers the score.
inline double fidelity(const ArrayXcd& achieved, const TimeGrid& achieved_grid,
                       const Envelope& target) {
    require_same_grid(achieved_grid, target.grid(), "fidelity");
    const ArrayXcd integrand = target.values().conjugate() * achieved;
    return std::norm(quadrature(integrand, achieved_grid));
}

/// Same overlap with the achieved series normalized first: scores the shape
/// match alone, with the captured probability reported separately.
inline double shape_fidelity(const ArrayXcd& achieved, const TimeGrid& grid,
                             const Envelope& target) {
    const double mass = quadrature(achieved.abs2().eval(), grid);
    if (mass <= 0.0) return 0.0;
    return fidelity((achieved / std::sqrt(mass)).eval(), grid, target);
}

/// Pointwise excitation bookkeeping: populations plus emitted-so-far mass must
/// reproduce the initial excitation at every time.
struct ConservationReport {
    ArrayXd residual;
    double max_residual = 0.0;
};

/// Audit the norm identity of the unraveled joint state: at every grid time,
/// conditional populations + accumulated emission mass (+ two-photon mass for
/// ladder tasks) == 1.
inline ConservationReport conservation_audit(const PropagatorTrajectory& traj,
                                             const EmissionResult& em,
                                             const SLHComponent& component,
                                             const TwoPhotonAmplitude* pair = nullptr) {
    const TimeGrid& grid = traj.grid;
    const Index n = grid.size();
    ArrayXd total = ArrayXd::Zero(n);
    for (Index i = 0; i < n; ++i) total[i] = traj.populations.col(i).sum();

    const int sector = detail::initial_sector(component);
    if (sector == 1) {
        for (int j = 0; j < component.channels(); ++j) {
            ArrayXd mass(n);
            for (Index i = 0; i < n; ++i) mass[i] = em.amplitudes[static_cast<size_t>(j)].col(i).squaredNorm();
            total += cumulative_integral(mass, grid);
        }
    } else if (sector == 2 && pair != nullptr) {
        // one photon out, second excitation still on the atom
        const Index e_idx = detail::grading_indices(component.excitation, 1)[0];
        ArrayXd ins_mass(n);
        for (Index i = 0; i < n; ++i) ins_mass[i] = em.insertions[0].col(i).squaredNorm();
        const ArrayXd ins_cum = cumulative_integral(ins_mass, grid);
        for (Index i = 0; i < n; ++i) {
            const double vee = std::norm(traj.V[static_cast<size_t>(i)](e_idx, e_idx));
            total[i] += vee * ins_cum[i];
        }
        // both photons out
        ArrayXd row_mass = ArrayXd::Zero(n);
        for (Index i = 1; i < n; ++i) {
            double acc = 0.5 * (std::norm(pair->values(i, 0)) + std::norm(pair->values(i, i)));
            for (Index j = 1; j < i; ++j) acc += std::norm(pair->values(i, j));
            row_mass[i] = acc * grid.dt();
        }
        total += cumulative_integral(row_mass, grid);
    } else {
        throw StructuralError("conservation_audit: unsupported initial sector");
    }

    ConservationReport rep{(total - 1.0).abs(), 0.0};
    rep.max_residual = rep.residual.maxCoeff();
    return rep;
}

/// Accumulated population of the intermediate level of a ladder atom: the
/// probability that the first photon is out while the second is still stored.
inline ArrayXd accumulated_intermediate_population(const PropagatorTrajectory& traj,
                                                   const EmissionResult& em,
                                                   const SLHComponent& component) {
    const Index e_idx = detail::grading_indices(component.excitation, 1)[0];
    const Index n = traj.grid.size();
    ArrayXd ins_mass(n);
    for (Index i = 0; i < n; ++i) ins_mass[i] = em.insertions[0].col(i).squaredNorm();
    const ArrayXd ins_cum = cumulative_integral(ins_mass, traj.grid);
    ArrayXd pop(n);
    for (Index i = 0; i < n; ++i) {
        pop[i] = std::norm(traj.V[static_cast<size_t>(i)](e_idx, e_idx)) * ins_cum[i];
    }
    return pop;
}

}  // namespace flyq
