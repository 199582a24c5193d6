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

#include <unsupported/Eigen/KroneckerProduct>

#include "flyq/component.hpp"
#include "flyq/synthesis.hpp"

namespace flyq {

/// Two-level ancilla that emits exactly one photon with the given shape:
/// excited initial state, coupling running the two-level generation schedule
/// of |xi| and a detuning carrying the shape's phase rate.
inline SLHComponent make_photon_source(const Envelope& xi,
                                       double gamma_max = kDefaultGammaMax) {
    ControlSchedule s = synth_two_level_generate(xi, gamma_max);
    SLHComponent src = build_component(AtomKind::TwoLevel, s);
    src.basis_labels = {"gA", "eA"};
    return src;
}

/// Vee-type ancilla emitting a single photon distributed over two channels,
/// alpha1 |1_xi1, vac> + alpha2 |vac, 1_xi2>: the two excited levels decay
/// independently, each running its own two-level generation schedule.
inline SLHComponent make_distributed_photon_source(cplx alpha1, cplx alpha2, const Envelope& xi1,
                                                   const Envelope& xi2,
                                                   double gamma_max = kDefaultGammaMax) {
    require_same_grid(xi1.grid(), xi2.grid(), "make_distributed_photon_source");
    ControlSchedule s(xi1.grid(), 2, gamma_max);
    ControlSchedule s1 = synth_two_level_generate(xi1, gamma_max);
    ControlSchedule s2 = synth_two_level_generate(xi2, gamma_max);
    s.gamma[0] = s1.gamma[0];
    s.gamma[1] = s2.gamma[0];
    s.epsilon[0] = s1.epsilon[0];
    s.epsilon[1] = s2.epsilon[0];
    s.clamp_report = s1.clamp_report;
    for (auto r : s2.clamp_report) {
        r.channel = 2;
        s.clamp_report.push_back(std::move(r));
    }

    SLHComponent src = build_component(AtomKind::Vee, s);
    // channel 1 drains |f>, channel 2 drains |e>
    src.initial_state = VectorXcd::Zero(3);
    src.initial_state[kF] = alpha1;
    src.initial_state[kE] = alpha2;
    src.basis_labels = {"gA", "eA", "fA"};
    src.validate();
    return src;
}

namespace detail {

inline std::vector<std::string> product_labels(const SLHComponent& a, const SLHComponent& b) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(a.dim * b.dim));
    for (Index i = 0; i < a.dim; ++i) {
        for (Index j = 0; j < b.dim; ++j) {
            const std::string la = i < Index(a.basis_labels.size()) ? a.basis_labels[i]
                                                                    : std::to_string(i);
            const std::string lb = j < Index(b.basis_labels.size()) ? b.basis_labels[j]
                                                                    : std::to_string(j);
            out.push_back(la + "," + lb);
        }
    }
    return out;
}

// Series interference term (L_down^dag L_up - L_up^dag L_down) / 2i for one
// pair of single-term couplings; amplitudes multiply pointwise.
inline HamiltonianTerm interference_term(const MatrixXcd& up_op, const ArrayXd& up_amp,
                                         const MatrixXcd& down_op, const ArrayXd& down_amp) {
    const MatrixXcd cross = down_op.adjoint() * up_op;
    const MatrixXcd op = (cross - cross.adjoint()) / cplx(0.0, 2.0);
    return {op, (up_amp * down_amp).eval()};
}

}  // namespace detail

/// Series product: the source's single output channel feeds the atom's
/// into_channel (1-based). Operators embed as source (x) atom; the composed
/// component again has identity scattering, the atom's channel list, and
/// initial state source_initial (x) atom_initial.
inline SLHComponent series_product(const SLHComponent& source, const SLHComponent& atom,
                                   int into_channel) {
    if (source.channels() != 1) {
        throw StructuralError("series_product: source must have exactly one channel");
    }
    if (into_channel < 1 || into_channel > atom.channels()) {
        throw StructuralError("series_product: into_channel out of range");
    }
    require_same_grid(source.grid, atom.grid, "series_product");

    const Index dim = source.dim * atom.dim;
    const MatrixXcd ia = MatrixXcd::Identity(source.dim, source.dim);
    const MatrixXcd ib = MatrixXcd::Identity(atom.dim, atom.dim);

    SLHComponent c(source.grid);
    c.dim = dim;
    c.excitation.resize(dim);
    for (Index i = 0; i < source.dim; ++i) {
        for (Index j = 0; j < atom.dim; ++j) {
            c.excitation[i * atom.dim + j] = source.excitation[i] + atom.excitation[j];
        }
    }

    for (const auto& term : source.hamiltonian) {
        c.hamiltonian.push_back(
            {Eigen::kroneckerProduct(term.op, ib).eval(), term.coefficient});
    }
    for (const auto& term : atom.hamiltonian) {
        c.hamiltonian.push_back(
            {Eigen::kroneckerProduct(ia, term.op).eval(), term.coefficient});
    }

    const CouplingChannel& src_ch = source.couplings[0];
    for (int j = 0; j < atom.channels(); ++j) {
        const CouplingChannel& atom_ch = atom.couplings[static_cast<size_t>(j)];
        CouplingChannel ch;
        for (size_t m = 0; m < atom_ch.ops.size(); ++m) {
            ch.ops.push_back(Eigen::kroneckerProduct(ia, atom_ch.ops[m]).eval());
            ch.amplitudes.push_back(atom_ch.amplitudes[m]);
        }
        if (j + 1 == into_channel) {
            for (size_t m = 0; m < src_ch.ops.size(); ++m) {
                const MatrixXcd up = Eigen::kroneckerProduct(src_ch.ops[m], ib).eval();
                ch.ops.push_back(up);
                ch.amplitudes.push_back(src_ch.amplitudes[m]);
                for (size_t d = 0; d < atom_ch.ops.size(); ++d) {
                    c.hamiltonian.push_back(detail::interference_term(
                        up, src_ch.amplitudes[m],
                        Eigen::kroneckerProduct(ia, atom_ch.ops[d]).eval(),
                        atom_ch.amplitudes[d]));
                }
            }
        }
        c.couplings.push_back(std::move(ch));
    }

    c.initial_state = Eigen::kroneckerProduct(source.initial_state, atom.initial_state).eval();
    c.basis_labels = detail::product_labels(source, atom);
    c.validate();
    return c;
}

/// Channel-matched series product for a source with the same channel count as
/// the atom: source channel j feeds atom channel j for every j. Needed when
/// the incoming photon is a coherent superposition across both channels.
inline SLHComponent series_product_pairwise(const SLHComponent& source,
                                            const SLHComponent& atom) {
    if (source.channels() != atom.channels()) {
        throw StructuralError("series_product_pairwise: channel counts differ");
    }
    require_same_grid(source.grid, atom.grid, "series_product_pairwise");

    const Index dim = source.dim * atom.dim;
    const MatrixXcd ia = MatrixXcd::Identity(source.dim, source.dim);
    const MatrixXcd ib = MatrixXcd::Identity(atom.dim, atom.dim);

    SLHComponent c(source.grid);
    c.dim = dim;
    c.excitation.resize(dim);
    for (Index i = 0; i < source.dim; ++i) {
        for (Index j = 0; j < atom.dim; ++j) {
            c.excitation[i * atom.dim + j] = source.excitation[i] + atom.excitation[j];
        }
    }
    for (const auto& term : source.hamiltonian) {
        c.hamiltonian.push_back(
            {Eigen::kroneckerProduct(term.op, ib).eval(), term.coefficient});
    }
    for (const auto& term : atom.hamiltonian) {
        c.hamiltonian.push_back(
            {Eigen::kroneckerProduct(ia, term.op).eval(), term.coefficient});
    }
    for (int j = 0; j < atom.channels(); ++j) {
        const CouplingChannel& atom_ch = atom.couplings[static_cast<size_t>(j)];
        const CouplingChannel& src_ch = source.couplings[static_cast<size_t>(j)];
        CouplingChannel ch;
        for (size_t m = 0; m < atom_ch.ops.size(); ++m) {
            ch.ops.push_back(Eigen::kroneckerProduct(ia, atom_ch.ops[m]).eval());
            ch.amplitudes.push_back(atom_ch.amplitudes[m]);
        }
        for (size_t m = 0; m < src_ch.ops.size(); ++m) {
            const MatrixXcd up = Eigen::kroneckerProduct(src_ch.ops[m], ib).eval();
            ch.ops.push_back(up);
            ch.amplitudes.push_back(src_ch.amplitudes[m]);
            for (size_t d = 0; d < atom_ch.ops.size(); ++d) {
                c.hamiltonian.push_back(detail::interference_term(
                    up, src_ch.amplitudes[m],
                    Eigen::kroneckerProduct(ia, atom_ch.ops[d]).eval(), atom_ch.amplitudes[d]));
            }
        }
        c.couplings.push_back(std::move(ch));
    }
    c.initial_state = Eigen::kroneckerProduct(source.initial_state, atom.initial_state).eval();
    c.basis_labels = detail::product_labels(source, atom);
    c.validate();
    return c;
}

}  // namespace flyq
