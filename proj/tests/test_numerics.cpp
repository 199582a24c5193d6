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
#include <random>

#include "flyq/grid.hpp"
#include "flyq/integrate.hpp"
#include "flyq/propagate.hpp"

using namespace flyq;

TEST_CASE("TimeGrid basics and reproducibility", "[grid]") {
    TimeGrid g(0.0, 1.5, 4001);
    REQUIRE(g.dt() == Catch::Approx(1.5 / 4000.0));
    REQUIRE(g.time(0) == 0.0);
    REQUIRE(g.time(4000) == Catch::Approx(1.5).margin(0.0));

    TimeGrid g2(0.0, 1.5, 4001);
    for (Index i : {Index(0), Index(1), Index(1234), Index(4000)}) {
        REQUIRE(g.time(i) == g2.time(i));  // bit-exact
    }

    REQUIRE_THROWS_AS(TimeGrid(1.0, 1.0, 11), StructuralError);
    REQUIRE_THROWS_AS(TimeGrid(0.0, 1.0, 2), StructuralError);

    TimeGrid r = g.refined();
    REQUIRE(r.size() == 8001);
    REQUIRE(r.time(2 * 100) == Catch::Approx(g.time(100)).margin(1e-15));
}

TEST_CASE("ComplexSeries validation", "[grid]") {
    TimeGrid g(0.0, 1.0, 11);
    ArrayXcd ok = ArrayXcd::Ones(11);
    REQUIRE_NOTHROW(ComplexSeries(g, ok));

    ArrayXcd wrong_len = ArrayXcd::Ones(10);
    REQUIRE_THROWS_AS(ComplexSeries(g, wrong_len), StructuralError);

    ArrayXcd bad = ok;
    bad[3] = cplx(std::nan(""), 0.0);
    REQUIRE_THROWS_AS(ComplexSeries(g, bad), NumericalError);
}

TEST_CASE("cumulative_integral: constant integrand", "[integrate]") {
    TimeGrid g(0.0, 1.0, 11);
    ArrayXd f = ArrayXd::Ones(11);
    ArrayXd c = cumulative_integral(f, g);
    REQUIRE(c[0] == 0.0);
    for (Index i = 0; i < 11; ++i) {
        REQUIRE(c[i] == Catch::Approx(0.1 * double(i)).margin(1e-15));
    }
}

TEST_CASE("cumulative_integral: constant rate gives linear ramp", "[integrate]") {
    const double gamma_c = mhz_to_rad_per_us(15.0);
    TimeGrid g(-0.25, 1.25, 2001);
    ArrayXd f = ArrayXd::Constant(2001, gamma_c);
    ArrayXd c = cumulative_integral(f, g);
    for (Index i : {Index(1), Index(500), Index(2000)}) {
        REQUIRE(c[i] == Catch::Approx(gamma_c * (g.time(i) - g.t_start())).epsilon(1e-13));
    }
}

TEST_CASE("cumulative_integral: exponential against closed-form antiderivative", "[integrate]") {
    // Oracle: integral of e^{-t} over [0,10] is 1 - e^{-10}.
    const double oracle = 1.0 - std::exp(-10.0);

    TimeGrid fine(0.0, 10.0, 40001);
    ArrayXd f(fine.size());
    for (Index i = 0; i < fine.size(); ++i) f[i] = std::exp(-fine.time(i));
    ArrayXd c = cumulative_integral(f, fine);
    REQUIRE(std::abs(c[fine.size() - 1] - oracle) < 1e-8);

    // Trapezoid error scales as (h^2/12) * [f'(b) - f'(a)]; at n = 4001 that
    // bound is ~5.2e-7 and the measured error must sit below it.
    TimeGrid coarse(0.0, 10.0, 4001);
    ArrayXd fc(coarse.size());
    for (Index i = 0; i < coarse.size(); ++i) fc[i] = std::exp(-coarse.time(i));
    ArrayXd cc = cumulative_integral(fc, coarse);
    const double err_coarse = std::abs(cc[coarse.size() - 1] - oracle);
    REQUIRE(err_coarse < 5.3e-7);
    REQUIRE(err_coarse > 1e-8);  // genuinely second order, not luck

    // monotone nondecreasing for nonnegative input
    for (Index i = 1; i < coarse.size(); ++i) REQUIRE(cc[i] >= cc[i - 1]);
}

TEST_CASE("quadrature: zero series and normalized gaussian", "[integrate]") {
    TimeGrid g(-0.5, 0.5, 1001);
    REQUIRE(quadrature(ArrayXd::Zero(1001).eval(), g) == 0.0);

    // |xi|^2 for the gaussian family with Omega = 2*pi*2 rad/us is the normal
    // density with sigma = 1/Omega; over +-6 sigma the mass is erf(6/sqrt(2)).
    const double omega = mhz_to_rad_per_us(2.0);
    const double sigma = 1.0 / omega;
    TimeGrid w(-6.0 * sigma, 6.0 * sigma, 4001);
    ArrayXd density(w.size());
    for (Index i = 0; i < w.size(); ++i) {
        const double z = omega * w.time(i);
        density[i] = omega / std::sqrt(2.0 * kPi) * std::exp(-0.5 * z * z);
    }
    REQUIRE(std::abs(quadrature(density, w) - 1.0) < 1e-6);
}

TEST_CASE("quadrature: exact for affine integrands", "[integrate][property]") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double a = coef(rng), b = coef(rng);
        const double t0 = coef(rng);
        const double t1 = t0 + std::abs(coef(rng)) + 0.1;
        TimeGrid g(t0, t1, 101 + 10 * trial);
        ArrayXd f(g.size());
        for (Index i = 0; i < g.size(); ++i) f[i] = a + b * g.time(i);
        const double exact = a * (t1 - t0) + 0.5 * b * (t1 * t1 - t0 * t0);
        REQUIRE(quadrature(f, g) == Catch::Approx(exact).margin(1e-12 * (1.0 + std::abs(exact))));
    }
}

TEST_CASE("cumulative final entry equals quadrature", "[integrate][property]") {
    std::mt19937 rng(777);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TimeGrid g(0.0, 2.0, 501);
    ArrayXd f(g.size());
    for (Index i = 0; i < g.size(); ++i) f[i] = gauss(rng);
    ArrayXd c = cumulative_integral(f, g);
    REQUIRE(std::abs(c[g.size() - 1] - quadrature(f, g)) < 1e-12);
}

TEST_CASE("tail_integral complements cumulative_integral", "[integrate]") {
    TimeGrid g(0.0, 1.0, 201);
    ArrayXd f(g.size());
    for (Index i = 0; i < g.size(); ++i) f[i] = std::exp(-3.0 * g.time(i));
    ArrayXd head = cumulative_integral(f, g);
    ArrayXd tail = tail_integral(f, g);
    const double total = quadrature(f, g);
    for (Index i = 0; i < g.size(); ++i) {
        REQUIRE(head[i] + tail[i] == Catch::Approx(total).margin(1e-14));
    }
}

TEST_CASE("integrate: structural errors", "[integrate]") {
    TimeGrid g(0.0, 1.0, 11);
    ArrayXd wrong = ArrayXd::Ones(10);
    REQUIRE_THROWS_AS(cumulative_integral(wrong, g), StructuralError);
    REQUIRE_THROWS_AS(quadrature(wrong, g), StructuralError);
    ArrayXd bad = ArrayXd::Ones(11);
    bad[5] = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(cumulative_integral(bad, g), NumericalError);
}

namespace {

GeneratorFn scalar_generator(const TimeGrid& grid, const std::function<cplx(double)>& f) {
    return [grid, f](Index i) {
        MatrixXcd g(1, 1);
        g(0, 0) = f(grid.time(i));
        return g;
    };
}

}  // namespace

TEST_CASE("propagate: zero generator is identity evolution", "[propagate]") {
    TimeGrid g(0.0, 1.0, 101);
    MatrixXcd init = MatrixXcd::Identity(3, 3);
    init(0, 1) = cplx(0.5, -0.25);
    auto traj = propagate_linear_ode([](Index) { return MatrixXcd::Zero(3, 3); }, init, g);
    REQUIRE(traj.size() == 101);
    for (const auto& v : traj) {
        REQUIRE((v - init).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("propagate: scalar exponential decay oracle", "[propagate]") {
    // Oracle: V(t) = exp(-gamma_c t / 2) for constant generator -gamma_c/2.
    const double gamma_c = mhz_to_rad_per_us(15.0);
    TimeGrid g(0.0, 0.5, 4001);
    auto gen = scalar_generator(g, [&](double) { return cplx(-0.5 * gamma_c, 0.0); });
    auto traj = propagate_linear_ode(gen, MatrixXcd::Identity(1, 1), g);
    for (Index i = 0; i < g.size(); i += 100) {
        const double exact = std::exp(-0.5 * gamma_c * g.time(i));
        const double got = traj[static_cast<size_t>(i)](0, 0).real();
        REQUIRE(std::abs(got - exact) <= 1e-8 * exact);
    }
}

TEST_CASE("propagate: pure phase generator preserves modulus", "[propagate]") {
    const double eps = mhz_to_rad_per_us(1.0);
    TimeGrid g(0.0, 1.0, 4001);
    auto gen = scalar_generator(g, [&](double) { return cplx(0.0, -eps); });
    auto traj = propagate_linear_ode(gen, MatrixXcd::Identity(1, 1), g);
    for (const auto& v : traj) {
        REQUIRE(std::abs(std::abs(v(0, 0)) - 1.0) < 1e-10);
    }
}

TEST_CASE("propagate: non-finite generator sample reports index", "[propagate]") {
    TimeGrid g(0.0, 1.0, 11);
    auto gen = [](Index i) {
        MatrixXcd m = MatrixXcd::Zero(1, 1);
        if (i == 7) m(0, 0) = std::numeric_limits<double>::quiet_NaN();
        return m;
    };
    try {
        propagate_linear_ode(gen, MatrixXcd::Identity(1, 1), g);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        REQUIRE(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("propagate: anti-Hermitian generator preserves column norms", "[propagate][property]") {
    TimeGrid g(0.0, 1.0, 4001);
    auto gen = [&](Index i) {
        const double t = g.time(i);
        MatrixXcd h(3, 3);
        h << 1.0, cplx(0.3, 0.2) * std::sin(5.0 * t), 0.0,
             cplx(0.3, -0.2) * std::sin(5.0 * t), -0.5, cplx(0.0, 0.4) * std::cos(3.0 * t),
             0.0, cplx(0.0, -0.4) * std::cos(3.0 * t), 0.25;
        return MatrixXcd(cplx(0.0, -1.0) * h);
    };
    auto traj = propagate_linear_ode(gen, MatrixXcd::Identity(3, 3), g);
    for (size_t k = 0; k < traj.size(); k += 200) {
        for (Index c = 0; c < 3; ++c) {
            REQUIRE(std::abs(traj[k].col(c).norm() - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("propagate: halving dt improves scalar error by >= 8x", "[propagate][property]") {
    const double gamma_c = mhz_to_rad_per_us(15.0);
    auto max_err = [&](Index n) {
        TimeGrid g(0.0, 0.2, n);
        auto gen = scalar_generator(g, [&](double) { return cplx(-0.5 * gamma_c, 0.0); });
        auto traj = propagate_linear_ode(gen, MatrixXcd::Identity(1, 1), g);
        double e = 0.0;
        for (Index i = 0; i < g.size(); ++i) {
            e = std::max(e, std::abs(traj[static_cast<size_t>(i)](0, 0).real() -
                                     std::exp(-0.5 * gamma_c * g.time(i))));
        }
        return e;
    };
    const double coarse = max_err(101);
    const double fine = max_err(201);
    REQUIRE(coarse / fine >= 8.0);
}

TEST_CASE("step_doubling_error: zero generator and scalar decay", "[propagate]") {
    TimeGrid g(0.0, 1.0, 4001);
    REQUIRE(step_doubling_error([](Index) { return MatrixXcd::Zero(2, 2); },
                                MatrixXcd::Identity(2, 2), g) == 0.0);

    const double gamma_c = mhz_to_rad_per_us(15.0);
    auto gen = scalar_generator(g, [&](double) { return cplx(-0.5 * gamma_c, 0.0); });
    const double fine_err = step_doubling_error(gen, MatrixXcd::Identity(1, 1), g);
    REQUIRE(fine_err < 1e-7);

    TimeGrid coarse(0.0, 1.0, 51);
    auto gen_c = scalar_generator(coarse, [&](double) { return cplx(-0.5 * gamma_c, 0.0); });
    const double coarse_err = step_doubling_error(gen_c, MatrixXcd::Identity(1, 1), coarse);
    REQUIRE(coarse_err > fine_err);
}
