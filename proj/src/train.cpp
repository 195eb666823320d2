/*
 * Copyright (c) 2026, The SPFT Authors.  All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "spft/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <sstream>

namespace spft {

namespace {

Matrix relu(const Matrix& z) {
    Matrix a = z;
    for (double& v : a.values()) v = v > 0.0 ? v : 0.0;
    return a;
}

void mask_relu(Matrix& grad, const Matrix& pre) {
    auto g = grad.values();
    auto z = pre.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(z[i] > 0.0)) g[i] = 0.0;
    }
}

struct ForwardCache {
    Matrix z1;
    Matrix a1;
    Matrix weight;  // W_hidden + ΔW
    Matrix z2;
    Matrix a2;
    Matrix logits;
};

ForwardCache forward(const ToyModel& model, const Matrix& x) {
    Matrix z1 = matmul(x, model.w_in);
    Matrix a1 = relu(z1);
    Matrix weight = model.w_hidden + delta_w(model.adapter);
    Matrix z2 = matmul(a1, weight);
    Matrix a2 = relu(z2);
    Matrix logits = matmul(a2, model.w_out);
    return {std::move(z1), std::move(a1), std::move(weight), std::move(z2), std::move(a2),
            std::move(logits)};
}

// Mean cross-entropy and accuracy; if probs is non-null it receives softmax(logits).
Metrics softmax_metrics(const Matrix& logits, const std::vector<std::uint8_t>& labels,
                        Matrix* probs) {
    const std::size_t n = logits.rows();
    double loss = 0.0;
    std::size_t correct = 0;
    const auto predicted = argmax_rows(logits);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = logits.row(i);
        const double peak = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double v : row) sum += std::exp(v - peak);
        const double log_z = peak + std::log(sum);
        loss += log_z - row[labels[i]];
        if (predicted[i] == labels[i]) ++correct;
        if (probs != nullptr) {
            auto p = probs->row(i);
            for (std::size_t k = 0; k < row.size(); ++k) p[k] = std::exp(row[k] - log_z);
        }
    }
    return {loss / static_cast<double>(n), static_cast<double>(correct) / static_cast<double>(n)};
}

std::vector<std::span<double>> parameter_views(ToyModel& model) {
    std::vector<std::span<double>> views{model.w_in.values(), model.w_out.values()};
    std::visit(
        [&](auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, LoraAdapter>) {
                views.push_back(a.a.values());
                views.push_back(a.b.values());
            } else {
                views.push_back(std::span<double>(a.coeffs));
            }
        },
        model.adapter);
    return views;
}

std::vector<std::span<double>> gradient_views(ModelGrads& g) {
    std::vector<std::span<double>> views{g.w_in.values(), g.w_out.values()};
    if (g.adapter.a) {
        views.push_back(g.adapter.a->values());
        views.push_back(g.adapter.b->values());
    } else {
        views.push_back(std::span<double>(g.adapter.coeffs));
    }
    return views;
}

}  // namespace

SyntheticDataset gen_synthetic(std::uint64_t seed, std::size_t samples_per_class, double radius,
                               double noise_sigma) {
    if (samples_per_class == 0) throw Error("gen_synthetic: samples_per_class must be >= 1");
    if (noise_sigma < 0.0) throw Error("gen_synthetic: noise_sigma must be >= 0");
    Matrix centers(kNumClasses, 2);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(kNumClasses);
        centers(k, 0) = radius * std::cos(angle);
        centers(k, 1) = radius * std::sin(angle);
    }
    const std::size_t n = samples_per_class * kNumClasses;
    Matrix points(n, 2);
    std::vector<std::uint8_t> labels(n);
    Rng rng(seed);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        for (std::size_t s = 0; s < samples_per_class; ++s) {
            const std::size_t i = k * samples_per_class + s;
            const double nx = rng.normal();
            const double ny = rng.normal();
            points(i, 0) = centers(k, 0) + noise_sigma * nx;
            points(i, 1) = centers(k, 1) + noise_sigma * ny;
            labels[i] = static_cast<std::uint8_t>(k);
        }
    }
    return {std::move(points), std::move(labels), std::move(centers), noise_sigma, seed};
}

ToyModel make_toy_model(const AdapterConfig& config, std::uint64_t seed,
                        const ToyModelOptions& options) {
    const std::size_t h = options.hidden;
    Rng in_rng = Rng::stream(seed, 0);
    Rng out_rng = Rng::stream(seed, 1);
    Rng adapter_rng = Rng::stream(seed, 2);
    Rng base_rng = Rng::stream(seed, 3);

    // He-style scaling for the ReLU layers.
    Matrix w_in = randn_matrix(in_rng, 2, h);
    w_in *= std::sqrt(2.0 / 2.0);
    Matrix w_out = randn_matrix(out_rng, h, kNumClasses);
    w_out *= std::sqrt(2.0 / static_cast<double>(h));
    Matrix base(h, h);
    if (options.base_scale != 0.0) {
        base = randn_matrix(base_rng, h, h);
        base *= options.base_scale;
    }
    Adapter adapter = make_adapter(config, h, h, adapter_rng);
    return {std::move(w_in), std::move(base), std::move(w_out), std::move(adapter)};
}

std::vector<std::size_t> argmax_rows(const Matrix& m) {
    std::vector<std::size_t> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

Metrics evaluate(const ToyModel& model, const SyntheticDataset& data) {
    const ForwardCache f = forward(model, data.points);
    return softmax_metrics(f.logits, data.labels, nullptr);
}

std::pair<Metrics, ModelGrads> loss_and_grad(const ToyModel& model, const SyntheticDataset& data) {
    const ForwardCache f = forward(model, data.points);
    Matrix dlogits(f.logits.rows(), f.logits.cols());
    const Metrics metrics = softmax_metrics(f.logits, data.labels, &dlogits);
    const double inv_n = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        dlogits(i, data.labels[i]) -= 1.0;
    }
    dlogits *= inv_n;

    Matrix grad_out = matmul_tn(f.a2, dlogits);
    Matrix dz2 = matmul_nt(dlogits, model.w_out);
    mask_relu(dz2, f.z2);
    const Matrix grad_weight = matmul_tn(f.a1, dz2);
    AdapterGrad grad_adapter = adapter_grad_from_delta(model.adapter, grad_weight);
    Matrix dz1 = matmul_nt(dz2, f.weight);
    mask_relu(dz1, f.z1);
    Matrix grad_in = matmul_tn(data.points, dz1);
    return {metrics, ModelGrads{std::move(grad_in), std::move(grad_out), std::move(grad_adapter)}};
}

Optimizer parse_optimizer(const std::string& s) {
    if (s == "adam") return Optimizer::kAdam;
    if (s == "sgd") return Optimizer::kSgd;
    throw Error("unknown optimizer '" + s + "' (expected adam or sgd)");
}

std::string to_string(Optimizer o) { return o == Optimizer::kAdam ? "adam" : "sgd"; }

TrainingDiverged::TrainingDiverged(std::size_t epoch, double loss)
    : Error("training diverged at epoch " + std::to_string(epoch) + " (loss " +
            std::to_string(loss) + ")"),
      epoch_(epoch) {}

std::string TrainLog::to_csv() const {
    std::string out = "epoch,loss,accuracy\n";
    char buf[96];
    for (const auto& e : epochs) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e.epoch, e.loss, e.accuracy);
        out += buf;
    }
    return out;
}

TrainLog train(ToyModel& model, const SyntheticDataset& data, const TrainOptions& options) {
    if (options.epochs == 0) throw Error("train: epochs must be >= 1");
    if (!(options.lr > 0.0)) throw Error("train: learning rate must be > 0");
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t base_hash = content_hash(model.w_hidden);

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;
    for (const auto& v : parameter_views(model)) {
        first.emplace_back(v.size(), 0.0);
        second.emplace_back(v.size(), 0.0);
    }

    TrainLog log;
    log.epochs.reserve(options.epochs);
    for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
        auto [metrics, grads] = loss_and_grad(model, data);
        if (!std::isfinite(metrics.loss)) throw TrainingDiverged(epoch, metrics.loss);
        if (epoch == 1) {
            log.initial = metrics;
        } else {
            log.epochs.push_back({epoch - 1, metrics.loss, metrics.accuracy});
        }

        auto params = parameter_views(model);
        auto gviews = gradient_views(grads);
        const double t = static_cast<double>(epoch);
        const double correction1 = 1.0 - std::pow(kBeta1, t);
        const double correction2 = 1.0 - std::pow(kBeta2, t);
        for (std::size_t p = 0; p < params.size(); ++p) {
            auto w = params[p];
            auto g = gviews[p];
            if (options.optimizer == Optimizer::kSgd) {
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= options.lr * g[i];
                continue;
            }
            auto& m = first[p];
            auto& v = second[p];
            for (std::size_t i = 0; i < w.size(); ++i) {
                m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
                v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
                const double m_hat = m[i] / correction1;
                const double v_hat = v[i] / correction2;
                w[i] -= options.lr * m_hat / (std::sqrt(v_hat) + kEps);
            }
        }
    }
    const Metrics last = evaluate(model, data);
    if (!std::isfinite(last.loss)) throw TrainingDiverged(options.epochs, last.loss);
    log.epochs.push_back({options.epochs, last.loss, last.accuracy});

    if (content_hash(model.w_hidden) != base_hash) {
        throw Error("train: frozen base weight was modified");
    }
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log;
}

std::string dataset_to_csv(const SyntheticDataset& data) {
    std::string out = "x,y,label\n";
    char buf[96];
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%u\n", data.points(i, 0), data.points(i, 1),
                      static_cast<unsigned>(data.labels[i]));
        out += buf;
    }
    return out;
}

}  // namespace spft
