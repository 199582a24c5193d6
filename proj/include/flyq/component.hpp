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
#include <utility>
#include <vector>

#include "flyq/grid.hpp"
#include "flyq/schedule.hpp"

namespace flyq {

/// Standing-system level structures. Levels are ordered {g, e} for TwoLevel
/// and {g, e, f} otherwise, with f the highest excited state.
enum class AtomKind { TwoLevel, Lambda, Vee, Xi };

inline const char* to_string(AtomKind k) {
    switch (k) {
        case AtomKind::TwoLevel: return "two-level";
        case AtomKind::Lambda: return "lambda";
        case AtomKind::Vee: return "vee";
        case AtomKind::Xi: return "xi";
    }
    return "?";
}

/// H(t) = sum_k coefficient_k(t) * op_k with op_k Hermitian and real coefficients.
struct HamiltonianTerm {
    MatrixXcd op;
    ArrayXd coefficient;
};

/// L_j(t) = sum_m amplitude_m(t) * op_m. Plain atoms have one term per
/// channel; cascaded components gain a second (the upstream coupling).
struct CouplingChannel {
    std::vector<MatrixXcd> ops;
    std::vector<ArrayXd> amplitudes;

    MatrixXcd at(Index i) const {
        MatrixXcd l = amplitudes[0][i] * ops[0];
        for (size_t m = 1; m < ops.size(); ++m) l += amplitudes[m][i] * ops[m];
        return l;
    }
};

/// Finite-dimensional standing system in (S, L, H) form with S = identity:
/// a Hamiltonian schedule, per-channel coupling schedules, an excitation
/// grading of the basis, and an initial state.
struct SLHComponent {
    explicit SLHComponent(TimeGrid g) : grid(std::move(g)) {}

    Index dim = 0;
    TimeGrid grid;
    VectorXi excitation;  // excitation number of each basis state
    std::vector<HamiltonianTerm> hamiltonian;
    std::vector<CouplingChannel> couplings;
    VectorXcd initial_state;
    std::vector<std::string> basis_labels;

    int channels() const { return static_cast<int>(couplings.size()); }

    MatrixXcd hamiltonian_at(Index i) const {
        MatrixXcd h = MatrixXcd::Zero(dim, dim);
        for (const auto& term : hamiltonian) h += term.coefficient[i] * term.op;
        return h;
    }

    MatrixXcd coupling_at(int channel, Index i) const {
        return couplings[static_cast<size_t>(channel)].at(i);
    }

    /// G(t_i) = -i H(t_i) - 1/2 sum_j L_j(t_i)^dag L_j(t_i).
    MatrixXcd generator_at(Index i) const {
        MatrixXcd g = cplx(0.0, -1.0) * hamiltonian_at(i);
        for (int j = 0; j < channels(); ++j) {
            const MatrixXcd l = coupling_at(j, i);
            g.noalias() -= 0.5 * (l.adjoint() * l);
        }
        return g;
    }

    /// Structural invariants: Hermitian Hamiltonian terms, couplings that
    /// lower the excitation grading by exactly one, normalized initial state.
    void validate() const {
        for (const auto& term : hamiltonian) {
            if ((term.op - term.op.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
                throw StructuralError("SLHComponent: non-Hermitian Hamiltonian term");
            }
            if (!term.coefficient.allFinite() || term.coefficient.size() != grid.size()) {
                throw StructuralError("SLHComponent: bad Hamiltonian coefficient series");
            }
            for (Index r = 0; r < dim; ++r) {
                for (Index c = 0; c < dim; ++c) {
                    if (std::abs(term.op(r, c)) > 1e-14 && excitation[r] != excitation[c]) {
                        throw StructuralError("SLHComponent: Hamiltonian mixes excitation sectors");
                    }
                }
            }
        }
        for (const auto& ch : couplings) {
            if (ch.ops.size() != ch.amplitudes.size() || ch.ops.empty()) {
                throw StructuralError("SLHComponent: malformed coupling channel");
            }
            for (size_t m = 0; m < ch.ops.size(); ++m) {
                if (ch.amplitudes[m].size() != grid.size()) {
                    throw StructuralError("SLHComponent: coupling amplitude length mismatch");
                }
                if ((ch.amplitudes[m] < 0.0).any()) {
                    throw StructuralError("SLHComponent: coupling amplitude must be nonnegative");
                }
                for (Index r = 0; r < dim; ++r) {
                    for (Index c = 0; c < dim; ++c) {
                        if (std::abs(ch.ops[m](r, c)) > 1e-14 &&
                            excitation[r] != excitation[c] - 1) {
                            throw StructuralError(
                                "SLHComponent: coupling is not excitation-lowering");
                        }
                    }
                }
            }
        }
        if (std::abs(initial_state.norm() - 1.0) > 1e-12) {
            throw StructuralError("SLHComponent: initial state not normalized");
        }
    }
};

namespace detail {

inline MatrixXcd ketbra(Index dim, Index row, Index col) {
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    m(row, col) = 1.0;
    return m;
}

}  // namespace detail

/// Basis indices for the three-level kinds (g=0, e=1, f=2).
inline constexpr Index kG = 0;
inline constexpr Index kE = 1;
inline constexpr Index kF = 2;

/// Build the atom for a schedule. Channel counts: 1 for TwoLevel, 2 otherwise.
///
///   TwoLevel: H = eps |e><e|,                      L  = sqrt(gamma)  |g><e|
///   Lambda:   H = (eps1+eps2)|f><f|,               L1 = sqrt(gamma1) |g><f|,
///                                                  L2 = sqrt(gamma2) |e><f|
///   Xi:       H = eps1|f><f| + eps2|e><e|,         L1 = sqrt(gamma1) |e><f|,
///                                                  L2 = sqrt(gamma2) |g><e|
///   Vee:      H = eps1|f><f| + eps2|e><e|,         L1 = sqrt(gamma1) |g><f|,
///                                                  L2 = sqrt(gamma2) |g><e|
///
/// The initial state defaults to the level the task naturally starts from:
/// |e> (TwoLevel), |f> (Lambda, Xi), |g> (Vee).
inline SLHComponent build_component(AtomKind kind, const ControlSchedule& schedule) {
    const int want = kind == AtomKind::TwoLevel ? 1 : 2;
    if (schedule.channels() != want) {
        throw StructuralError(std::string("build_component: ") + to_string(kind) + " atom needs " +
                              std::to_string(want) + " channel(s), got " +
                              std::to_string(schedule.channels()));
    }
    schedule.validate();

    SLHComponent c(schedule.grid);

    auto amp = [](const ArrayXd& gamma) { return gamma.sqrt().eval(); };

    switch (kind) {
        case AtomKind::TwoLevel: {
            c.dim = 2;
            c.excitation = VectorXi(2);
            c.excitation << 0, 1;
            c.basis_labels = {"g", "e"};
            c.hamiltonian.push_back({detail::ketbra(2, 1, 1), schedule.epsilon[0]});
            c.couplings.push_back({{detail::ketbra(2, 0, 1)}, {amp(schedule.gamma[0])}});
            c.initial_state = VectorXcd::Unit(2, 1);
            break;
        }
        case AtomKind::Lambda: {
            c.dim = 3;
            c.excitation = VectorXi(3);
            c.excitation << 0, 0, 1;
            c.basis_labels = {"g", "e", "f"};
            c.hamiltonian.push_back(
                {detail::ketbra(3, kF, kF), schedule.epsilon[0] + schedule.epsilon[1]});
            c.couplings.push_back({{detail::ketbra(3, kG, kF)}, {amp(schedule.gamma[0])}});
            c.couplings.push_back({{detail::ketbra(3, kE, kF)}, {amp(schedule.gamma[1])}});
            c.initial_state = VectorXcd::Unit(3, kF);
            break;
        }
        case AtomKind::Xi: {
            c.dim = 3;
            c.excitation = VectorXi(3);
            c.excitation << 0, 1, 2;
            c.basis_labels = {"g", "e", "f"};
            c.hamiltonian.push_back({detail::ketbra(3, kF, kF), schedule.epsilon[0]});
            c.hamiltonian.push_back({detail::ketbra(3, kE, kE), schedule.epsilon[1]});
            c.couplings.push_back({{detail::ketbra(3, kE, kF)}, {amp(schedule.gamma[0])}});
            c.couplings.push_back({{detail::ketbra(3, kG, kE)}, {amp(schedule.gamma[1])}});
            c.initial_state = VectorXcd::Unit(3, kF);
            break;
        }
        case AtomKind::Vee: {
            c.dim = 3;
            c.excitation = VectorXi(3);
            c.excitation << 0, 1, 1;
            c.basis_labels = {"g", "e", "f"};
            c.hamiltonian.push_back({detail::ketbra(3, kF, kF), schedule.epsilon[0]});
            c.hamiltonian.push_back({detail::ketbra(3, kE, kE), schedule.epsilon[1]});
            c.couplings.push_back({{detail::ketbra(3, kG, kF)}, {amp(schedule.gamma[0])}});
            c.couplings.push_back({{detail::ketbra(3, kG, kE)}, {amp(schedule.gamma[1])}});
            c.initial_state = VectorXcd::Unit(3, kG);
            break;
        }
    }
    c.validate();
    return c;
}

}  // namespace flyq
