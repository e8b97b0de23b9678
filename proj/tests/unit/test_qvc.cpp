// Copyright 2026 The qrobust Authors
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
#include "qrobust/data.hpp"
#include "qrobust/qvc.hpp"
#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace qrobust;

TEST_CASE("zero-layer model on |00>", "[qvc]") {
    const QvcModel m(2, 0, 2, 1);
    const std::vector<double> x{1, 0, 0, 0};
    const auto out = m.forward(x);
    CHECK(out.readouts == std::vector<double>{1.0, 1.0});
    CHECK(out.probs == std::vector<double>{0.5, 0.5});
    CHECK(m.predict(x) == 0);
    const std::vector<Sample> batch{{x, 1}};
    CHECK(std::abs(m.loss_and_grads(batch).loss - std::log(2.0)) < 1e-15);
}

TEST_CASE("all-zero angles act trivially on |0...0>", "[qvc]") {
    const auto m = QvcModel::with_parameters(3, 1, 2, std::vector<double>(9, 0.0));
    const std::vector<double> x{1, 0, 0, 0, 0, 0, 0, 0};
    CHECK(m.forward(x).readouts == QvcModel(3, 0, 2).forward(x).readouts);
}

TEST_CASE("random model outputs are bounded and normalized", "[qvc]") {
    const QvcModel m(4, 3, 4, 99);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(16);
        for (auto &v : x) {
            v = u(rng);
        }
        const auto out = m.forward(x);
        double total = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(out.readouts[k] >= -1.0);
            CHECK(out.readouts[k] <= 1.0);
            CHECK(out.probs[k] > 0.0);
            total += out.probs[k];
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("architecture accounting", "[qvc]") {
    const QvcModel qvc200(10, 200, 10);
    CHECK(qvc200.parameter_count() == 6000);
    CHECK(qvc200.gates_per_layer() == 39);
    CHECK(elementary_gate_count(qvc200.layer_circuit(0)) == 39);
    CHECK(QvcModel(12, 200, 2).parameter_count() == 7200);
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::size_t l = 0; l <= 5; ++l) {
            const QvcModel m(n, l, 1);
            CHECK(m.parameter_count() == l * n * 3);
            CHECK(elementary_gate_count(m.circuit()) == l * (3 * n + n - 1));
        }
    }
}

TEST_CASE("configuration and data errors", "[qvc]") {
    CHECK_THROWS_AS(QvcModel(4, 2, 5), ConfigurationError);
    const QvcModel m(2, 1, 2);
    const std::vector<double> x{1, 1, 0, 0};
    CHECK_THROWS_AS(m.loss_and_input_grad(x, 2), DataError);
    CHECK_THROWS_AS(m.forward(std::vector<double>{0, 0, 0, 0}), DegenerateInputError);
    CHECK_THROWS_AS(m.forward(std::vector<double>(5, 1.0)), CapacityError);
}

TEST_CASE("parameter gradient matches finite differences on a 3-qubit model", "[qvc]") {
    QvcModel m(3, 2, 3, 5);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.05, 1);
    std::vector<std::vector<double>> xs(4, std::vector<double>(8));
    std::vector<Sample> batch;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (auto &v : xs[i]) {
            v = u(rng);
        }
        batch.push_back({xs[i], i % 3});
    }
    const auto g = m.loss_and_grads(batch);
    for (std::size_t j = 0; j < m.parameter_count(); ++j) {
        const double saved = m.parameters()[j];
        const double fd = testing::central_difference(
            [&](double v) {
                m.parameters()[j] = v;
                return m.loss_and_grads(batch).loss;
            },
            saved);
        m.parameters()[j] = saved;
        CHECK(testing::close_rel(g.params[j], fd, 1e-5, 1e-9));
    }
}

TEST_CASE("input gradient matches finite differences through encode, circuit and softmax", "[qvc]") {
    const QvcModel m(4, 3, 4, 12);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.05, 1);
    std::vector<double> x(13);
    for (auto &v : x) {
        v = u(rng);
    }
    const auto g = m.loss_and_input_grad(x, 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fd = testing::central_difference(
            [&](double v) {
                auto xx = x;
                xx[i] = v;
                return cross_entropy(m.probabilities(xx), 2);
            },
            x[i]);
        CHECK(testing::close_rel(g.grad[i], fd, 1e-5, 1e-9));
    }
}

TEST_CASE("property: predictions invariant to brightness scaling", "[qvc][property]") {
    const QvcModel m(6, 4, 4, 31);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1), c(0.05, 20);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(64), y(64);
        const double k = c(rng);
        for (std::size_t i = 0; i < 64; ++i) {
            x[i] = u(rng);
            y[i] = k * x[i];
        }
        REQUIRE(m.predict(x) == m.predict(y));
    }
}

TEST_CASE("gradient descent decreases training loss on a toy set", "[qvc]") {
    const auto ds = synth_blobs(2, 10, 4, 4, 3);
    QvcModel m(4, 3, 2, 2);
    std::vector<Sample> batch;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        batch.push_back(ds.sample(i));
    }
    double prev = m.loss_and_grads(batch).loss;
    for (int step = 0; step < 10; ++step) {
        const auto g = m.loss_and_grads(batch);
        for (std::size_t j = 0; j < g.params.size(); ++j) {
            m.parameters()[j] -= 0.05 * g.params[j];
        }
        const double now = m.loss_and_grads(batch).loss;
        CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("seeded initialization is reproducible and in [0, 2pi)", "[qvc]") {
    const QvcModel a(5, 4, 3, 17), b(5, 4, 3, 17), c(5, 4, 3, 18);
    CHECK(std::ranges::equal(a.parameters(), b.parameters()));
    CHECK(!std::ranges::equal(a.parameters(), c.parameters()));
    for (double t : a.parameters()) {
        CHECK(t >= 0.0);
        CHECK(t < 2 * std::numbers::pi);
    }
}
