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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "flyq/cascade.hpp"

using namespace flyq;

namespace {

const double kGammaC = mhz_to_rad_per_us(15.0);
const double kOmega = mhz_to_rad_per_us(2.0);

ControlSchedule lambda_like_schedule(const TimeGrid& g) {
    ControlSchedule s(g, 2);
    for (Index i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        s.gamma[0][i] = 40.0 * std::exp(-2.0 * t * t);
        s.gamma[1][i] = 15.0 / (1.0 + std::exp(-t));
        s.epsilon[0][i] = 3.0 * std::cos(t);
    }
    return s;
}

}  // namespace

TEST_CASE("photon source runs the generation schedule", "[cascade]") {
    TimeGrid g(-0.15, 1.35, 2001);
    Envelope xi = make_envelope_exponential(kGammaC, g);
    SLHComponent src = make_photon_source(xi);
    REQUIRE(src.dim == 2);
    REQUIRE(src.channels() == 1);
    REQUIRE(std::abs(src.initial_state[1]) == 1.0);  // starts excited

    // constant coupling gamma_c on the support
    const Index i = static_cast<Index>(std::lround((0.05 - g.t_start()) / g.dt()));
    const MatrixXcd l = src.coupling_at(0, i);
    REQUIRE(std::norm(l(0, 1)) == Catch::Approx(kGammaC).epsilon(1e-10));

    // real shape: no detuning anywhere
    for (const auto& term : src.hamiltonian) {
        REQUIRE(term.coefficient.abs().maxCoeff() == 0.0);
    }
}

TEST_CASE("distributed source splits one photon across both channels", "[cascade]") {
    TimeGrid g(-0.75, 0.75, 1001);
    Envelope xi1 = make_envelope_gaussian(kOmega, 0.0, g);
    Envelope xi2 = make_envelope_gaussian(2.0 * kOmega, 0.1, g);
    const cplx a1(0.6, 0.0), a2(0.0, 0.8);
    SLHComponent src = make_distributed_photon_source(a1, a2, xi1, xi2);
    REQUIRE(src.dim == 3);
    REQUIRE(src.channels() == 2);
    REQUIRE(std::abs(src.initial_state[kF] - a1) < 1e-15);
    REQUIRE(std::abs(src.initial_state[kE] - a2) < 1e-15);
    REQUIRE_NOTHROW(src.validate());
}

TEST_CASE("series product dimensions and initial state", "[cascade]") {
    TimeGrid g(-0.25, 1.25, 1001);
    Envelope xi = make_envelope_exponential(kGammaC, g);
    SLHComponent src = make_photon_source(xi);
    SLHComponent atom = build_component(AtomKind::Lambda, lambda_like_schedule(g));
    atom.initial_state = VectorXcd::Unit(3, kG);  // catching starts from |g>

    SLHComponent c = series_product(src, atom, 1);
    REQUIRE(c.dim == 6);
    REQUIRE(c.channels() == 2);
    // |eA> (x) |g>
    REQUIRE(std::abs(c.initial_state[1 * 3 + kG] - 1.0) < 1e-15);
    REQUIRE_NOTHROW(c.validate());
}

TEST_CASE("decoupled source leaves the atom dynamics alone", "[cascade]") {
    TimeGrid g(0.0, 1.0, 501);
    ControlSchedule off(g, 1);  // gamma_A = 0, eps_A = 0
    SLHComponent src = build_component(AtomKind::TwoLevel, off);
    SLHComponent atom = build_component(AtomKind::Lambda, lambda_like_schedule(g));

    SLHComponent c = series_product(src, atom, 1);
    const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
    for (Index i = 0; i < g.size(); i += 100) {
        const MatrixXcd expect = Eigen::kroneckerProduct(i2, atom.generator_at(i)).eval();
        REQUIRE((c.generator_at(i) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("composed Hamiltonian stays Hermitian and contractive", "[cascade][property]") {
    TimeGrid g(-0.25, 1.25, 801);
    Envelope xi = make_envelope_exponential(kGammaC, g);
    SLHComponent src = make_photon_source(xi);
    SLHComponent atom = build_component(AtomKind::Lambda, lambda_like_schedule(g));
    atom.initial_state = VectorXcd::Unit(3, kG);
    SLHComponent c = series_product(src, atom, 1);

    for (Index i = 0; i < g.size(); i += 80) {
        const MatrixXcd h = c.hamiltonian_at(i);
        REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        const MatrixXcd gen = c.generator_at(i);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (gen + gen.adjoint()));
        REQUIRE(es.eigenvalues().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("composed generator is block-diagonal in the excitation grading", "[cascade][property]") {
    TimeGrid g(-0.25, 1.25, 401);
    Envelope xi = make_envelope_exponential(kGammaC, g);
    SLHComponent src = make_photon_source(xi);
    SLHComponent atom = build_component(AtomKind::Xi, lambda_like_schedule(g));
    SLHComponent c = series_product(src, atom, 1);

    for (Index i = 0; i < g.size(); i += 50) {
        const MatrixXcd gen = c.generator_at(i);
        for (Index r = 0; r < c.dim; ++r) {
            for (Index col = 0; col < c.dim; ++col) {
                if (c.excitation[r] != c.excitation[col]) {
                    REQUIRE(std::abs(gen(r, col)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("series product commutes with channel relabeling", "[cascade][property]") {
    TimeGrid g(-0.25, 1.25, 301);
    Envelope xi = make_envelope_exponential(kGammaC, g);
    SLHComponent src = make_photon_source(xi);
    SLHComponent atom = build_component(AtomKind::Lambda, lambda_like_schedule(g));
    atom.initial_state = VectorXcd::Unit(3, kG);

    // compose into channel 1, then swap the composed channels
    SLHComponent direct = series_product(src, atom, 1);
    std::swap(direct.couplings[0], direct.couplings[1]);

    // pre-relabel the atom's channels, then compose into channel 2
    SLHComponent relabeled = atom;
    std::swap(relabeled.couplings[0], relabeled.couplings[1]);
    SLHComponent swapped = series_product(src, relabeled, 2);

    for (Index i = 0; i < g.size(); i += 60) {
        REQUIRE((direct.generator_at(i) - swapped.generator_at(i)).cwiseAbs().maxCoeff() == 0.0);
        for (int ch = 0; ch < 2; ++ch) {
            REQUIRE((direct.coupling_at(ch, i) - swapped.coupling_at(ch, i))
                        .cwiseAbs()
                        .maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("series product input validation", "[cascade]") {
    TimeGrid g(0.0, 1.0, 101);
    ControlSchedule two(g, 2);
    SLHComponent not_a_source = build_component(AtomKind::Lambda, two);
    SLHComponent atom = build_component(AtomKind::Lambda, two);
    REQUIRE_THROWS_AS(series_product(not_a_source, atom, 1), StructuralError);

    ControlSchedule one(g, 1);
    SLHComponent src = build_component(AtomKind::TwoLevel, one);
    REQUIRE_THROWS_AS(series_product(src, atom, 3), StructuralError);
    REQUIRE_THROWS_AS(series_product(src, atom, 0), StructuralError);
}
