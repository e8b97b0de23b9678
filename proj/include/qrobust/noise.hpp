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
/**
 * @file
 * Noise channels applied after every circuit layer on every qubit:
 * Monte Carlo trajectories for any register size, and an exact
 * density-matrix evolution (n <= 5) used as the reference.
 */
#pragma once

#include "qrobust/encoding.hpp"
#include "qrobust/error.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/optim.hpp"
#include "qrobust/qvc.hpp"
#include "qrobust/data.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

enum class NoiseKind { Depolarizing, AmplitudeDamping, BitFlip, GlobalDepolarizing };

inline std::string noise_kind_name(NoiseKind k) {
    switch (k) {
    case NoiseKind::Depolarizing:
        return "depolarizing";
    case NoiseKind::AmplitudeDamping:
        return "amplitude_damping";
    case NoiseKind::BitFlip:
        return "bit_flip";
    case NoiseKind::GlobalDepolarizing:
        return "global_depolarizing";
    }
    return "unknown";
}

inline NoiseKind parse_noise_kind(const std::string &s) {
    for (auto k : {NoiseKind::Depolarizing, NoiseKind::AmplitudeDamping, NoiseKind::BitFlip,
                   NoiseKind::GlobalDepolarizing}) {
        if (noise_kind_name(k) == s) {
            return k;
        }
    }
    throw ConfigurationError("unknown noise kind '" + s + "'");
}

struct NoiseModel {
    NoiseKind kind = NoiseKind::Depolarizing;
    double strength = 0.0; ///< p for depolarizing / bit flip, gamma for damping

    void validate() const {
        if (!(strength >= 0.0 && strength <= 1.0)) {
            throw ConfigurationError("noise strength must lie in [0, 1]");
        }
    }
};

/// Row-major 2x2 matrix [m00, m01, m10, m11].
using Mat2 = std::array<complex_t, 4>;

/**
 * Per-qubit Kraus operators. Depolarizing uses the Pauli-twirl form
 * {1-3p/4, p/4, p/4, p/4}, i.e. replacement by I/2 with probability p.
 * The global channel has no single-qubit form and yields an empty list.
 */
inline std::vector<Mat2> kraus_operators(const NoiseModel &noise) {
    noise.validate();
    const double p = noise.strength;
    const complex_t i{0.0, 1.0};
    switch (noise.kind) {
    case NoiseKind::Depolarizing: {
        const double a = std::sqrt(1.0 - 3.0 * p / 4.0);
        const double b = std::sqrt(p / 4.0);
        return {Mat2{a, 0, 0, a}, Mat2{0, b, b, 0}, Mat2{0, -i * b, i * b, 0},
                Mat2{b, 0, 0, -b}};
    }
    case NoiseKind::AmplitudeDamping:
        return {Mat2{1, 0, 0, std::sqrt(1.0 - p)}, Mat2{0, std::sqrt(p), 0, 0}};
    case NoiseKind::BitFlip:
        return {Mat2{std::sqrt(1.0 - p), 0, 0, std::sqrt(1.0 - p)},
                Mat2{0, std::sqrt(p), std::sqrt(p), 0}};
    case NoiseKind::GlobalDepolarizing:
        return {};
    }
    return {};
}

/// max |sum_i K_i^dag K_i - I| over entries.
inline double kraus_completeness_error(std::span<const Mat2> ops) {
    std::array<complex_t, 4> acc{};
    for (const auto &k : ops) {
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                acc[r * 2 + c] += std::conj(k[0 * 2 + r]) * k[0 * 2 + c] +
                                  std::conj(k[1 * 2 + r]) * k[1 * 2 + c];
            }
        }
    }
    double err = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            err = std::max(err, std::abs(acc[r * 2 + c] - (r == c ? 1.0 : 0.0)));
        }
    }
    return err;
}

/**
 * @brief Applies one stochastic Kraus branch per qubit (Born-rule branch
 * probabilities) and renormalizes. Global depolarizing replaces the whole
 * register by a uniformly random basis state with probability p.
 */
template <class Rng>
void apply_channel_trajectory_inplace(StateVector &state, const NoiseModel &noise, Rng &rng) {
    noise.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto amps = state.amplitudes();
    if (noise.kind == NoiseKind::GlobalDepolarizing) {
        if (unit(rng) < noise.strength) {
            std::uniform_int_distribution<std::size_t> pick(0, amps.size() - 1);
            const std::size_t j = pick(rng);
            std::ranges::fill(amps, complex_t{0.0, 0.0});
            amps[j] = 1.0;
        }
        return;
    }
    const auto ops = kraus_operators(noise);
    for (std::size_t q = 0; q < state.num_qubits(); ++q) {
        const std::size_t stride = std::size_t{1} << q;
        const double u = unit(rng);
        double cumulative = 0.0;
        std::size_t chosen = ops.size() - 1;
        double chosen_p = 0.0;
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const Mat2 &m = ops[k];
            double p = 0.0;
            for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
                for (std::size_t off = 0; off < stride; ++off) {
                    const complex_t a0 = amps[base + off];
                    const complex_t a1 = amps[base + off + stride];
                    p += std::norm(m[0] * a0 + m[1] * a1) + std::norm(m[2] * a0 + m[3] * a1);
                }
            }
            cumulative += p;
            if (p > 0.0) {
                chosen = k;
                chosen_p = p;
            }
            if (u < cumulative && p > 0.0) {
                break;
            }
        }
        const Mat2 &m = ops[chosen];
        const double scale = 1.0 / std::sqrt(chosen_p);
        kernels::apply_single(amps, q, m[0] * scale, m[1] * scale, m[2] * scale, m[3] * scale);
    }
}

template <class Rng>
StateVector apply_channel_trajectory(StateVector state, const NoiseModel &noise, Rng &rng) {
    apply_channel_trajectory_inplace(state, noise, rng);
    return state;
}

/// Exact mixed-state register for small n.
class DensityMatrix {
  public:
    static constexpr std::size_t kMaxQubits = 5;

    explicit DensityMatrix(const StateVector &psi)
        : num_qubits_(psi.num_qubits()), dim_(psi.size()) {
        if (num_qubits_ > kMaxQubits) {
            throw CapacityError("density matrix limited to " + std::to_string(kMaxQubits) +
                                " qubits, got " + std::to_string(num_qubits_));
        }
        rho_.resize(dim_ * dim_);
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                rho_[r * dim_ + c] = psi[r] * std::conj(psi[c]);
            }
        }
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] complex_t at(std::size_t r, std::size_t c) const { return rho_[r * dim_ + c]; }

    /// rho -> U rho U^dag.
    void apply_gate(const Gate &g) {
        validate_gate(g, num_qubits_);
        apply_left([&](std::span<complex_t> v) {
            StateVector tmp(std::vector<complex_t>(v.begin(), v.end()));
            apply_gate_inplace(tmp, g);
            std::ranges::copy(tmp.amplitudes(), v.begin());
        });
    }

    /// rho -> sum_i K_i rho K_i^dag on one qubit.
    void apply_kraus(std::span<const Mat2> ops, std::size_t qubit) {
        std::vector<complex_t> acc(rho_.size());
        const auto original = rho_;
        for (const auto &k : ops) {
            rho_ = original;
            apply_left([&](std::span<complex_t> v) {
                kernels::apply_single(v, qubit, k[0], k[1], k[2], k[3]);
            });
            for (std::size_t i = 0; i < acc.size(); ++i) {
                acc[i] += rho_[i];
            }
        }
        rho_ = std::move(acc);
    }

    /// rho -> (1 - p) rho + p I / d.
    void depolarize_global(double p) {
        for (auto &v : rho_) {
            v *= 1.0 - p;
        }
        for (std::size_t i = 0; i < dim_; ++i) {
            rho_[i * dim_ + i] += p / static_cast<double>(dim_);
        }
    }

    void apply_noise(const NoiseModel &noise) {
        noise.validate();
        if (noise.kind == NoiseKind::GlobalDepolarizing) {
            depolarize_global(noise.strength);
            return;
        }
        const auto ops = kraus_operators(noise);
        for (std::size_t q = 0; q < num_qubits_; ++q) {
            apply_kraus(ops, q);
        }
    }

    [[nodiscard]] double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            t += rho_[i * dim_ + i].real();
        }
        return t;
    }

    [[nodiscard]] double expectation_z(std::size_t qubit) const {
        if (qubit >= num_qubits_) {
            throw ConfigurationError("expectation_z: qubit out of range");
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double p = rho_[i * dim_ + i].real();
            acc += (i >> qubit & 1U) ? -p : p;
        }
        return acc;
    }

  private:
    /// rho -> A rho A^dag, where `op` applies A in place to a vector.
    template <class Op>
    void apply_left(Op &&op) {
        std::vector<complex_t> col(dim_);
        for (std::size_t c = 0; c < dim_; ++c) {
            for (std::size_t r = 0; r < dim_; ++r) {
                col[r] = rho_[r * dim_ + c];
            }
            op(std::span<complex_t>(col));
            for (std::size_t r = 0; r < dim_; ++r) {
                rho_[r * dim_ + c] = col[r];
            }
        }
        // (A M) A^dag = (A (A M)^dag)^dag
        std::vector<complex_t> row(dim_);
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                row[c] = std::conj(rho_[r * dim_ + c]);
            }
            op(std::span<complex_t>(row));
            for (std::size_t c = 0; c < dim_; ++c) {
                rho_[r * dim_ + c] = std::conj(row[c]);
            }
        }
    }

    std::size_t num_qubits_;
    std::size_t dim_;
    std::vector<complex_t> rho_;
};

using LayeredCircuit = std::vector<Circuit>;

/// Exact <Z_k> for every qubit with `noise` after each layer.
inline std::vector<double> density_matrix_reference(const LayeredCircuit &layers,
                                                    const NoiseModel &noise,
                                                    const StateVector &input) {
    DensityMatrix rho(input);
    for (const auto &layer : layers) {
        for (const auto &g : layer) {
            rho.apply_gate(g);
        }
        rho.apply_noise(noise);
    }
    std::vector<double> out(rho.num_qubits());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = rho.expectation_z(k);
    }
    return out;
}

struct TrajectoryEstimate {
    std::vector<double> mean;   ///< per-qubit mean <Z_k>
    std::vector<double> stddev; ///< per-qubit sample standard deviation
    std::size_t trajectories = 0;
};

/// Final state of one noisy run; stream (seed, a, b) keeps runs independent.
inline StateVector run_trajectory(const LayeredCircuit &layers, const NoiseModel &noise,
                                  StateVector state, std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b) {
    std::seed_seq seq{seed, a, b};
    std::mt19937_64 rng(seq);
    for (const auto &layer : layers) {
        apply_circuit_inplace(state, layer);
        apply_channel_trajectory_inplace(state, noise, rng);
    }
    return state;
}

inline TrajectoryEstimate trajectory_expectations(const LayeredCircuit &layers,
                                                  const NoiseModel &noise,
                                                  const StateVector &input,
                                                  std::size_t trajectories, std::uint64_t seed) {
    if (trajectories == 0) {
        throw ConfigurationError("need at least one trajectory");
    }
    const std::size_t n = input.num_qubits();
    auto runs = parallel_map(trajectories, [&](std::size_t t) {
        return expectations_z(run_trajectory(layers, noise, input, seed, 0, t), n);
    });
    TrajectoryEstimate est;
    est.trajectories = trajectories;
    est.mean.assign(n, 0.0);
    est.stddev.assign(n, 0.0);
    for (const auto &r : runs) {
        for (std::size_t k = 0; k < n; ++k) {
            est.mean[k] += r[k];
        }
    }
    for (auto &m : est.mean) {
        m /= static_cast<double>(trajectories);
    }
    if (trajectories > 1) {
        for (const auto &r : runs) {
            for (std::size_t k = 0; k < n; ++k) {
                est.stddev[k] += (r[k] - est.mean[k]) * (r[k] - est.mean[k]);
            }
        }
        for (auto &s : est.stddev) {
            s = std::sqrt(s / static_cast<double>(trajectories - 1));
        }
    }
    return est;
}

struct NoiseAccuracyRow {
    NoiseKind kind;
    double strength;
    std::size_t trajectories;
    double accuracy;
    double ci_low;
    double ci_high;
};

/// 95% Wilson score interval for k successes in n trials.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) {
        return {0.0, 1.0};
    }
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Noisy prediction: argmax of trajectory-averaged readouts.
inline std::size_t predict_noisy(const QvcModel &model, std::span<const double> x,
                                 const NoiseModel &noise, std::size_t trajectories,
                                 std::uint64_t seed, std::uint64_t stream) {
    const auto layers = model.layered_circuit();
    const StateVector input = model.encode_input(x);
    std::vector<double> mean(model.num_classes(), 0.0);
    for (std::size_t t = 0; t < trajectories; ++t) {
        const auto out = run_trajectory(layers, noise, input, seed, stream, t);
        for (std::size_t k = 0; k < mean.size(); ++k) {
            mean[k] += expectation_z(out, k);
        }
    }
    return argmax(mean);
}

/// Accuracy per (kind, strength) cell of `grid`.
inline std::vector<NoiseAccuracyRow> noisy_accuracy_sweep(const QvcModel &model,
                                                          const Dataset &slice,
                                                          std::span<const NoiseModel> grid,
                                                          std::size_t trajectories,
                                                          std::uint64_t seed) {
    if (slice.empty()) {
        throw DataError("noise sweep over an empty dataset");
    }
    if (trajectories == 0) {
        throw ConfigurationError("need at least one trajectory");
    }
    std::vector<NoiseAccuracyRow> rows;
    for (const auto &noise : grid) {
        noise.validate();
        const auto hits = parallel_map(slice.size(), [&](std::size_t i) {
            return predict_noisy(model, slice.image(i), noise, trajectories, seed, i) ==
                           slice.labels[i]
                       ? 1
                       : 0;
        });
        std::size_t k = 0;
        for (int h : hits) {
            k += static_cast<std::size_t>(h);
        }
        const auto [lo, hi] = wilson_interval(k, slice.size());
        rows.push_back({noise.kind, noise.strength, trajectories,
                        static_cast<double>(k) / static_cast<double>(slice.size()), lo, hi});
    }
    return rows;
}

} // namespace qrobust
