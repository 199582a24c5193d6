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

#include <map>
#include <optional>
#include <string>

#include "flyq/cascade.hpp"
#include "flyq/simulator.hpp"
#include "flyq/synthesis.hpp"

namespace flyq {

enum class TaskKind {
    TwoLevelGenerate,
    TwoLevelCatch,
    LambdaGenerate,
    XiPair,
    LambdaCatch,
    VCatch,
    LambdaConvert
};

inline const char* to_string(TaskKind t) {
    switch (t) {
        case TaskKind::TwoLevelGenerate: return "two-level-generate";
        case TaskKind::TwoLevelCatch: return "two-level-catch";
        case TaskKind::LambdaGenerate: return "lambda-generate";
        case TaskKind::XiPair: return "xi-pair";
        case TaskKind::LambdaCatch: return "lambda-catch";
        case TaskKind::VCatch: return "v-catch";
        case TaskKind::LambdaConvert: return "lambda-convert";
    }
    return "?";
}

inline TaskKind task_from_string(const std::string& s) {
    for (TaskKind t : {TaskKind::TwoLevelGenerate, TaskKind::TwoLevelCatch,
                       TaskKind::LambdaGenerate, TaskKind::XiPair, TaskKind::LambdaCatch,
                       TaskKind::VCatch, TaskKind::LambdaConvert}) {
        if (s == to_string(t)) return t;
    }
    throw ConfigError("unknown task: " + s);
}

/// Pass/fail gates applied by verification.
struct Thresholds {
    double fidelity_min = 0.999;
    double leakage_max = 1e-3;
    double conservation_max = 1e-6;
};

/// One fully specified control run: the task, its target shapes per channel,
/// superposition coefficients where meaningful, and the working grid.
struct TaskSpec {
    TaskKind task;
    TimeGrid grid;
    std::vector<Envelope> targets;
    cplx alpha1{1.0, 0.0};
    cplx alpha2{0.0, 0.0};
    double gamma_max = kDefaultGammaMax;
    Thresholds thresholds;
};

/// Everything a verification run measures. `fidelities` score shapes with the
/// captured probability divided out; `probabilities` carry branch masses and
/// terminal populations; `leakage` collects what should have stayed empty.
struct SimulationReport {
    TaskKind task;
    TimeGrid grid;
    ControlSchedule schedule;
    std::map<std::string, double> fidelities;
    std::map<std::string, double> probabilities;
    std::map<std::string, double> leakage;
    double conservation_max_residual = 0.0;
    double convergence_error = 0.0;
    bool convergence_warning = false;
    double pair_crosscheck = 0.0;
    bool pass = false;

    bool meets(const Thresholds& th) const {
        for (const auto& [k, v] : fidelities) {
            (void)k;
            if (v < th.fidelity_min) return false;
        }
        for (const auto& [k, v] : leakage) {
            (void)k;
            if (v > th.leakage_max) return false;
        }
        return conservation_max_residual <= th.conservation_max;
    }
};

namespace detail {

inline Index label_index(const SLHComponent& c, const std::string& label) {
    for (Index k = 0; k < c.dim; ++k) {
        if (c.basis_labels[static_cast<size_t>(k)] == label) return k;
    }
    throw StructuralError("unknown basis label " + label);
}

inline ControlSchedule synthesize_for(const TaskSpec& spec) {
    switch (spec.task) {
        case TaskKind::TwoLevelGenerate:
            return synth_two_level_generate(spec.targets.at(0), spec.gamma_max);
        case TaskKind::TwoLevelCatch:
            return synth_two_level_catch(spec.targets.at(0), spec.gamma_max);
        case TaskKind::LambdaGenerate:
            return synth_lambda_generate(spec.alpha1, spec.alpha2, spec.targets.at(0),
                                         spec.targets.at(1), spec.gamma_max);
        case TaskKind::XiPair:
            return synth_xi_pair(spec.targets.at(0), spec.targets.at(1), spec.gamma_max);
        case TaskKind::LambdaCatch:
            return synth_lambda_catch(spec.targets.at(0), spec.gamma_max);
        case TaskKind::VCatch:
            return synth_v_catch(spec.alpha1, spec.alpha2, spec.targets.at(0), spec.targets.at(1),
                                 spec.gamma_max);
        case TaskKind::LambdaConvert:
            return synth_lambda_convert(spec.targets.at(0), spec.targets.at(1), spec.gamma_max);
    }
    throw StructuralError("synthesize_for: bad task");
}

}  // namespace detail

/// Synthesize the schedule for a task, build the standing system (cascading a
/// photon source for catch/convert tasks), run the propagator, extract the
/// emission, and score the run.
inline SimulationReport simulate_task(const TaskSpec& spec) {
    ControlSchedule schedule = detail::synthesize_for(spec);
    SimulationReport rep{spec.task, spec.grid, schedule};

    switch (spec.task) {
        case TaskKind::TwoLevelGenerate: {
            SLHComponent atom = build_component(AtomKind::TwoLevel, schedule);
            PropagatorTrajectory traj = propagate(atom);
            EmissionResult em = emit_single(traj, atom);
            const ArrayXcd out = em.amplitude(0, detail::label_index(atom, "g"));
            rep.fidelities["channel1"] = shape_fidelity(out, spec.grid, spec.targets.at(0));
            rep.probabilities["channel1"] = em.channel_probability[0];
            rep.probabilities["vacuum"] = em.vacuum_probability;
            rep.leakage["unemitted"] = em.vacuum_probability;
            rep.conservation_max_residual = conservation_audit(traj, em, atom).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
        case TaskKind::TwoLevelCatch: {
            SLHComponent atom = build_component(AtomKind::TwoLevel, schedule);
            atom.initial_state = VectorXcd::Unit(2, 0);  // catching starts from |g>
            SLHComponent src = make_photon_source(spec.targets.at(0), spec.gamma_max);
            SLHComponent joint = series_product(src, atom, 1);
            PropagatorTrajectory traj = propagate(joint);
            EmissionResult em = emit_single(traj, joint);
            const double success = traj.populations(detail::label_index(joint, "gA,e"),
                                                    spec.grid.size() - 1);
            rep.fidelities["atom"] = success;
            rep.probabilities["caught"] = success;
            rep.leakage["channel1"] = em.channel_probability[0];
            rep.conservation_max_residual = conservation_audit(traj, em, joint).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
        case TaskKind::LambdaGenerate: {
            SLHComponent atom = build_component(AtomKind::Lambda, schedule);
            PropagatorTrajectory traj = propagate(atom);
            EmissionResult em = emit_single(traj, atom);
            const ArrayXcd out1 = em.amplitude(0, detail::label_index(atom, "g"));
            const ArrayXcd out2 = em.amplitude(1, detail::label_index(atom, "e"));
            rep.fidelities["channel1"] = shape_fidelity(out1, spec.grid, spec.targets.at(0));
            rep.fidelities["channel2"] = shape_fidelity(out2, spec.grid, spec.targets.at(1));
            rep.probabilities["channel1"] = em.channel_probability[0];
            rep.probabilities["channel2"] = em.channel_probability[1];
            rep.probabilities["vacuum"] = em.vacuum_probability;
            rep.leakage["unemitted"] = em.vacuum_probability;
            rep.conservation_max_residual = conservation_audit(traj, em, atom).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
        case TaskKind::XiPair: {
            SLHComponent atom = build_component(AtomKind::Xi, schedule);
            PropagatorTrajectory traj = propagate(atom);
            EmissionResult em = emit_single(traj, atom);
            TwoPhotonAmplitude pair = emit_pair(traj, atom);
            auto [marg1, marg2] = marginals(pair);
            const double p2 = pair.total_probability;
            ArrayXd err1 = (marg1 / p2 - spec.targets.at(0).values().abs2()).abs();
            ArrayXd err2 = (marg2 / p2 - spec.targets.at(1).values().abs2()).abs();
            rep.fidelities["marginal1"] = 1.0 - quadrature(err1, spec.grid);
            rep.fidelities["marginal2"] = 1.0 - quadrature(err2, spec.grid);
            rep.probabilities["pair"] = p2;
            rep.probabilities["vacuum"] = em.vacuum_probability;
            rep.probabilities["single"] = em.channel_probability[0];
            rep.leakage["incomplete"] = 1.0 - p2;
            rep.pair_crosscheck = pair.crosscheck_residual;
            rep.conservation_max_residual =
                conservation_audit(traj, em, atom, &pair).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
        case TaskKind::LambdaCatch: {
            SLHComponent atom = build_component(AtomKind::Lambda, schedule);
            atom.initial_state = VectorXcd::Unit(3, kG);
            SLHComponent src = make_photon_source(spec.targets.at(0), spec.gamma_max);
            SLHComponent joint = series_product(src, atom, 1);
            PropagatorTrajectory traj = propagate(joint);
            EmissionResult em = emit_single(traj, joint);
            const double success = traj.populations(detail::label_index(joint, "gA,f"),
                                                    spec.grid.size() - 1);
            rep.fidelities["atom"] = success;
            rep.probabilities["caught"] = success;
            rep.leakage["channel1"] = em.channel_probability[0];
            rep.leakage["channel2"] = em.channel_probability[1];
            rep.conservation_max_residual = conservation_audit(traj, em, joint).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
        case TaskKind::VCatch: {
            SLHComponent atom = build_component(AtomKind::Vee, schedule);
            SLHComponent src = make_distributed_photon_source(
                spec.alpha1, spec.alpha2, spec.targets.at(0), spec.targets.at(1), spec.gamma_max);
            SLHComponent joint = series_product_pairwise(src, atom);
            PropagatorTrajectory traj = propagate(joint);
            EmissionResult em = emit_single(traj, joint);
            const VectorXcd final_state = traj.states.col(spec.grid.size() - 1);
            const cplx amp_f = final_state[detail::label_index(joint, "gA,f")];
            const cplx amp_e = final_state[detail::label_index(joint, "gA,e")];
            const cplx overlap = std::conj(spec.alpha1) * amp_f + std::conj(spec.alpha2) * amp_e;
            rep.fidelities["atom"] = std::norm(overlap);
            rep.probabilities["population_f"] = std::norm(amp_f);
            rep.probabilities["population_e"] = std::norm(amp_e);
            rep.leakage["channel1"] = em.channel_probability[0];
            rep.leakage["channel2"] = em.channel_probability[1];
            rep.conservation_max_residual = conservation_audit(traj, em, joint).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
        case TaskKind::LambdaConvert: {
            SLHComponent atom = build_component(AtomKind::Lambda, schedule);
            atom.initial_state = VectorXcd::Unit(3, kG);
            SLHComponent src = make_photon_source(spec.targets.at(0), spec.gamma_max);
            SLHComponent joint = series_product(src, atom, 1);
            PropagatorTrajectory traj = propagate(joint);
            EmissionResult em = emit_single(traj, joint);
            const ArrayXcd out2 = em.amplitude(1, detail::label_index(joint, "gA,e"));
            rep.fidelities["channel2"] = shape_fidelity(out2, spec.grid, spec.targets.at(1));
            rep.probabilities["channel2"] = em.channel_probability[1];
            rep.probabilities["atom_f_residual"] =
                traj.populations(detail::label_index(joint, "gA,f"), spec.grid.size() - 1);
            rep.leakage["channel1"] = em.channel_probability[0];
            rep.conservation_max_residual = conservation_audit(traj, em, joint).max_residual;
            rep.convergence_error = traj.convergence_error;
            rep.convergence_warning = traj.convergence_warning;
            break;
        }
    }
    rep.pass = rep.meets(spec.thresholds);
    return rep;
}

}  // namespace flyq
