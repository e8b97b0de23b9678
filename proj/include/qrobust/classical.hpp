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
 * Small classical classifiers with explicit forward/backward passes:
 * [conv3x3(same) -> ReLU -> maxpool2x2]* -> [dense -> ReLU]* -> dense.
 * With no conv stages the network is a plain MLP.
 */
#pragma once

#include "qrobust/error.hpp"
#include "qrobust/model.hpp"
#include "qrobust/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

struct ClassicalSpec {
    std::size_t width = 8;
    std::size_t height = 8;
    std::vector<std::size_t> conv_channels; ///< feature maps per conv stage
    std::vector<std::size_t> dense_hidden;  ///< hidden dense widths
    std::size_t num_classes = 10;

    [[nodiscard]] std::size_t input_size() const noexcept { return width * height; }

    friend bool operator==(const ClassicalSpec &, const ClassicalSpec &) = default;
};

/// Reduced version of the 3-stage ConvNet used as the primary classical model.
inline ClassicalSpec convnet_spec(std::size_t width, std::size_t height,
                                  std::size_t num_classes) {
    return {width, height, {8, 16, 32}, {32}, num_classes};
}

inline ClassicalSpec mlp_spec(std::size_t width, std::size_t height, std::size_t num_classes) {
    return {width, height, {}, {64}, num_classes};
}

class ClassicalModel {
  public:
    enum class Init { He, Zero };

    explicit ClassicalModel(ClassicalSpec spec, std::uint64_t seed = 0, Init init = Init::He)
        : spec_(std::move(spec)), seed_(seed) {
        plan();
        params_.assign(total_params_, 0.0);
        if (init == Init::He) {
            std::mt19937_64 rng(seed);
            for (const auto &c : convs_) {
                std::normal_distribution<double> d(0.0, std::sqrt(2.0 / (9.0 * c.in_ch)));
                for (std::size_t i = 0; i < c.out_ch * c.in_ch * 9; ++i) {
                    params_[c.w_off + i] = d(rng);
                }
            }
            for (const auto &l : denses_) {
                std::normal_distribution<double> d(0.0, std::sqrt(2.0 / l.in));
                for (std::size_t i = 0; i < l.out * l.in; ++i) {
                    params_[l.w_off + i] = d(rng);
                }
            }
        }
    }

    static ClassicalModel with_parameters(ClassicalSpec spec, std::vector<double> params,
                                          std::uint64_t seed = 0) {
        ClassicalModel m(std::move(spec), seed, Init::Zero);
        if (params.size() != m.params_.size()) {
            throw ConfigurationError("classical parameter block has " +
                                     std::to_string(params.size()) + " entries, expected " +
                                     std::to_string(m.params_.size()));
        }
        m.params_ = std::move(params);
        return m;
    }

    [[nodiscard]] const ClassicalSpec &spec() const noexcept { return spec_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::size_t num_classes() const noexcept { return spec_.num_classes; }
    [[nodiscard]] std::size_t input_size() const noexcept { return spec_.input_size(); }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return params_.size(); }
    [[nodiscard]] std::span<double> parameters() noexcept { return params_; }
    [[nodiscard]] std::span<const double> parameters() const noexcept { return params_; }

    /// Weight of dense layer `layer` (0-based over all dense layers) at [out][in].
    double &dense_weight(std::size_t layer, std::size_t out, std::size_t in) {
        const auto &l = denses_.at(layer);
        return params_[l.w_off + out * l.in + in];
    }
    double &dense_bias(std::size_t layer, std::size_t out) {
        return params_[denses_.at(layer).b_off + out];
    }

    [[nodiscard]] std::vector<double> logits(std::span<const double> x) const {
        Trace t;
        run_forward(x, t);
        return t.dense_out.back();
    }

    [[nodiscard]] std::vector<double> probabilities(std::span<const double> x) const {
        return softmax(logits(x));
    }

    [[nodiscard]] std::size_t predict(std::span<const double> x) const {
        return argmax(logits(x));
    }

    struct ExampleGrads {
        double loss = 0.0;
        std::vector<double> params;
        std::vector<double> input;
    };

    /// Cross-entropy plus gradients with respect to every weight and pixel.
    [[nodiscard]] ExampleGrads backward(std::span<const double> x, std::size_t label,
                                        bool want_params = true) const {
        check_label(label);
        Trace t;
        run_forward(x, t);
        const auto probs = softmax(t.dense_out.back());
        ExampleGrads g;
        g.loss = cross_entropy(probs, label);
        if (want_params) {
            g.params.assign(params_.size(), 0.0);
        }
        std::vector<double> grad = softmax_cross_entropy_grad(probs, label);

        for (std::size_t li = denses_.size(); li-- > 0;) {
            const auto &l = denses_[li];
            const auto &in = t.dense_in[li];
            if (li + 1 < denses_.size()) {
                // ReLU on this layer's output
                for (std::size_t o = 0; o < l.out; ++o) {
                    if (t.dense_pre[li][o] <= 0.0) {
                        grad[o] = 0.0;
                    }
                }
            }
            if (want_params) {
                for (std::size_t o = 0; o < l.out; ++o) {
                    g.params[l.b_off + o] += grad[o];
                    for (std::size_t i = 0; i < l.in; ++i) {
                        g.params[l.w_off + o * l.in + i] += grad[o] * in[i];
                    }
                }
            }
            std::vector<double> prev(l.in, 0.0);
            for (std::size_t o = 0; o < l.out; ++o) {
                const double go = grad[o];
                if (go == 0.0) {
                    continue;
                }
                const double *w = &params_[l.w_off + o * l.in];
                for (std::size_t i = 0; i < l.in; ++i) {
                    prev[i] += w[i] * go;
                }
            }
            grad = std::move(prev);
        }

        for (std::size_t ci = convs_.size(); ci-- > 0;) {
            const auto &c = convs_[ci];
            // unpool: route to argmax positions only
            std::vector<double> dact(c.out_ch * c.h * c.w, 0.0);
            const auto &arg = t.pool_arg[ci];
            for (std::size_t k = 0; k < grad.size(); ++k) {
                dact[arg[k]] += grad[k];
            }
            const auto &pre = t.conv_pre[ci];
            for (std::size_t k = 0; k < dact.size(); ++k) {
                if (pre[k] <= 0.0) {
                    dact[k] = 0.0;
                }
            }
            const auto &in = t.conv_in[ci];
            std::vector<double> din(c.in_ch * c.h * c.w, 0.0);
            for (std::size_t o = 0; o < c.out_ch; ++o) {
                for (std::size_t y = 0; y < c.h; ++y) {
                    for (std::size_t xx = 0; xx < c.w; ++xx) {
                        const double d = dact[(o * c.h + y) * c.w + xx];
                        if (d == 0.0) {
                            continue;
                        }
                        if (want_params) {
                            g.params[c.b_off + o] += d;
                        }
                        for (std::size_t i = 0; i < c.in_ch; ++i) {
                            for (int ky = 0; ky < 3; ++ky) {
                                const long sy = static_cast<long>(y) + ky - 1;
                                if (sy < 0 || sy >= static_cast<long>(c.h)) {
                                    continue;
                                }
                                for (int kx = 0; kx < 3; ++kx) {
                                    const long sx = static_cast<long>(xx) + kx - 1;
                                    if (sx < 0 || sx >= static_cast<long>(c.w)) {
                                        continue;
                                    }
                                    const std::size_t widx =
                                        c.w_off + ((o * c.in_ch + i) * 3 + ky) * 3 + kx;
                                    const std::size_t iidx =
                                        (i * c.h + static_cast<std::size_t>(sy)) * c.w +
                                        static_cast<std::size_t>(sx);
                                    if (want_params) {
                                        g.params[widx] += d * in[iidx];
                                    }
                                    din[iidx] += d * params_[widx];
                                }
                            }
                        }
                    }
                }
            }
            grad = std::move(din);
        }
        g.input = std::move(grad);
        return g;
    }

    [[nodiscard]] InputGradient loss_and_input_grad(std::span<const double> x,
                                                    std::size_t label) const {
        auto g = backward(x, label, false);
        return {g.loss, std::move(g.input)};
    }

    [[nodiscard]] BatchGradient batch_loss_and_grads(std::span<const Sample> batch) const {
        if (batch.empty()) {
            throw DataError("empty batch");
        }
        auto per = parallel_map(batch.size(), [&](std::size_t i) {
            return backward(batch[i].x, batch[i].label, true);
        });
        BatchGradient out;
        out.params.assign(params_.size(), 0.0);
        for (const auto &p : per) {
            out.loss += p.loss;
            for (std::size_t j = 0; j < p.params.size(); ++j) {
                out.params[j] += p.params[j];
            }
        }
        const double inv = 1.0 / static_cast<double>(batch.size());
        out.loss *= inv;
        for (auto &v : out.params) {
            v *= inv;
        }
        return out;
    }

  private:
    struct ConvStage {
        std::size_t in_ch, out_ch, h, w; // h, w before pooling
        std::size_t w_off, b_off;
    };
    struct DenseStage {
        std::size_t in, out;
        std::size_t w_off, b_off;
    };
    struct Trace {
        std::vector<std::vector<double>> conv_in, conv_pre;
        std::vector<std::vector<std::size_t>> pool_arg;
        std::vector<std::vector<double>> dense_in, dense_pre, dense_out;
    };

    void plan() {
        if (spec_.width == 0 || spec_.height == 0 || spec_.num_classes == 0) {
            throw ConfigurationError("classical model needs positive input size and classes");
        }
        std::size_t ch = 1, h = spec_.height, w = spec_.width, off = 0;
        for (std::size_t out_ch : spec_.conv_channels) {
            if (out_ch == 0) {
                throw ConfigurationError("conv stage with zero feature maps");
            }
            if (h < 2 || w < 2) {
                throw ConfigurationError("too many conv/pool stages for a " +
                                         std::to_string(spec_.width) + "x" +
                                         std::to_string(spec_.height) + " input");
            }
            convs_.push_back({ch, out_ch, h, w, off, off + out_ch * ch * 9});
            off += out_ch * ch * 9 + out_ch;
            ch = out_ch;
            h /= 2;
            w /= 2;
        }
        std::size_t in = ch * h * w;
        auto widths = spec_.dense_hidden;
        widths.push_back(spec_.num_classes);
        for (std::size_t out : widths) {
            if (out == 0) {
                throw ConfigurationError("dense layer with zero width");
            }
            denses_.push_back({in, out, off, off + out * in});
            off += out * in + out;
            in = out;
        }
        total_params_ = off;
    }

    void check_label(std::size_t label) const {
        if (label >= spec_.num_classes) {
            throw DataError("label " + std::to_string(label) + " out of range for " +
                            std::to_string(spec_.num_classes) + " classes");
        }
    }

    void run_forward(std::span<const double> x, Trace &t) const {
        if (x.size() != spec_.input_size()) {
            throw ConfigurationError("input has " + std::to_string(x.size()) +
                                     " pixels, model expects " +
                                     std::to_string(spec_.input_size()));
        }
        std::vector<double> act(x.begin(), x.end());
        for (const auto &c : convs_) {
            std::vector<double> pre(c.out_ch * c.h * c.w);
            for (std::size_t o = 0; o < c.out_ch; ++o) {
                for (std::size_t y = 0; y < c.h; ++y) {
                    for (std::size_t xx = 0; xx < c.w; ++xx) {
                        double acc = params_[c.b_off + o];
                        for (std::size_t i = 0; i < c.in_ch; ++i) {
                            for (int ky = 0; ky < 3; ++ky) {
                                const long sy = static_cast<long>(y) + ky - 1;
                                if (sy < 0 || sy >= static_cast<long>(c.h)) {
                                    continue;
                                }
                                for (int kx = 0; kx < 3; ++kx) {
                                    const long sx = static_cast<long>(xx) + kx - 1;
                                    if (sx < 0 || sx >= static_cast<long>(c.w)) {
                                        continue;
                                    }
                                    acc += params_[c.w_off + ((o * c.in_ch + i) * 3 + ky) * 3 +
                                                   kx] *
                                           act[(i * c.h + static_cast<std::size_t>(sy)) * c.w +
                                               static_cast<std::size_t>(sx)];
                                }
                            }
                        }
                        pre[(o * c.h + y) * c.w + xx] = acc;
                    }
                }
            }
            const std::size_t ph = c.h / 2, pw = c.w / 2;
            std::vector<double> pooled(c.out_ch * ph * pw);
            std::vector<std::size_t> arg(pooled.size());
            for (std::size_t o = 0; o < c.out_ch; ++o) {
                for (std::size_t y = 0; y < ph; ++y) {
                    for (std::size_t xx = 0; xx < pw; ++xx) {
                        std::size_t best = (o * c.h + 2 * y) * c.w + 2 * xx;
                        for (std::size_t dy = 0; dy < 2; ++dy) {
                            for (std::size_t dx = 0; dx < 2; ++dx) {
                                const std::size_t k = (o * c.h + 2 * y + dy) * c.w + 2 * xx + dx;
                                if (pre[k] > pre[best]) {
                                    best = k;
                                }
                            }
                        }
                        const std::size_t p = (o * ph + y) * pw + xx;
                        pooled[p] = std::max(pre[best], 0.0);
                        arg[p] = best;
                    }
                }
            }
            t.conv_in.push_back(std::move(act));
            t.conv_pre.push_back(std::move(pre));
            t.pool_arg.push_back(std::move(arg));
            act = std::move(pooled);
        }
        for (std::size_t li = 0; li < denses_.size(); ++li) {
            const auto &l = denses_[li];
            std::vector<double> pre(l.out);
            for (std::size_t o = 0; o < l.out; ++o) {
                double acc = params_[l.b_off + o];
                const double *w = &params_[l.w_off + o * l.in];
                for (std::size_t i = 0; i < l.in; ++i) {
                    acc += w[i] * act[i];
                }
                pre[o] = acc;
            }
            std::vector<double> out = pre;
            if (li + 1 < denses_.size()) {
                for (auto &v : out) {
                    v = std::max(v, 0.0);
                }
            }
            t.dense_in.push_back(std::move(act));
            t.dense_pre.push_back(std::move(pre));
            act = out;
            t.dense_out.push_back(std::move(out));
        }
    }

    ClassicalSpec spec_;
    std::uint64_t seed_;
    std::vector<ConvStage> convs_;
    std::vector<DenseStage> denses_;
    std::size_t total_params_ = 0;
    std::vector<double> params_;
};

} // namespace qrobust
