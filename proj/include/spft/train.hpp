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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spft/adapter.hpp"
#include "spft/linalg.hpp"

namespace spft {

inline constexpr std::size_t kNumClasses = 8;

/// Eight Gaussian clusters whose centers sit evenly on a circle.
struct SyntheticDataset {
    Matrix points;                    // N x 2
    std::vector<std::uint8_t> labels;  // class-major: all of class 0, then class 1, ...
    Matrix class_centers;             // 8 x 2
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return labels.size(); }
};

SyntheticDataset gen_synthetic(std::uint64_t seed, std::size_t samples_per_class, double radius,
                               double noise_sigma);

/// logits = relu(relu(x·W_in)·(W_hidden + ΔW))·W_out. W_hidden is frozen; only
/// W_in, W_out and the adapter parameters are trained. No bias terms.
struct ToyModel {
    Matrix w_in;      // 2 x hidden
    Matrix w_hidden;  // hidden x hidden, frozen base
    Matrix w_out;     // hidden x 8
    Adapter adapter;
};

struct ToyModelOptions {
    std::size_t hidden = 64;
    /// Std of the frozen base. 0 leaves the hidden layer entirely to the adapter.
    double base_scale = 0.0;
};

/// Init streams: W_in from Rng::stream(seed, 0), W_out stream 1, adapter stream 2,
/// frozen base stream 3. Entries and bases come from config.seed.
ToyModel make_toy_model(const AdapterConfig& config, std::uint64_t seed,
                        const ToyModelOptions& options = {});

struct ModelGrads {
    Matrix w_in;
    Matrix w_out;
    AdapterGrad adapter;
};

struct Metrics {
    double loss;
    double accuracy;
};

/// Mean softmax cross-entropy and argmax accuracy (ties go to the lowest class).
Metrics evaluate(const ToyModel& model, const SyntheticDataset& data);

/// Full-batch loss, accuracy and gradients of every trainable tensor.
std::pair<Metrics, ModelGrads> loss_and_grad(const ToyModel& model, const SyntheticDataset& data);

/// Index of the largest entry per row; ties resolve to the lowest index.
std::vector<std::size_t> argmax_rows(const Matrix& m);

enum class Optimizer { kSgd, kAdam };
Optimizer parse_optimizer(const std::string& s);
std::string to_string(Optimizer o);

struct TrainOptions {
    std::size_t epochs = 2000;
    double lr = 1e-2;
    Optimizer optimizer = Optimizer::kAdam;
};

struct EpochRecord {
    std::size_t epoch;  // 1-based; metrics after that epoch's update
    double loss;
    double accuracy;
};

struct TrainLog {
    Metrics initial{};
    std::vector<EpochRecord> epochs;
    double wall_seconds = 0.0;

    const EpochRecord& last() const { return epochs.back(); }
    /// CSV "epoch,loss,accuracy" with 17 significant digits.
    std::string to_csv() const;
};

class TrainingDiverged : public Error {
public:
    TrainingDiverged(std::size_t epoch, double loss);
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

/// Full-batch training. Throws TrainingDiverged on a non-finite loss.
TrainLog train(ToyModel& model, const SyntheticDataset& data, const TrainOptions& options);

std::string dataset_to_csv(const SyntheticDataset& data);

}  // namespace spft
