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
#include "spft/train.hpp"

namespace spft {

// Synthetic task geometry.
inline constexpr std::size_t kSamplesPerClass = 100;
inline constexpr double kClusterRadius = 4.0;
inline constexpr double kClusterSigma = 0.4;

inline const std::vector<double> kDefaultLrSweep = {1e-3, 3e-3, 1e-2, 3e-2};

/// One training run. The run seed drives the dataset and model init; entry
/// and basis generation use config.seed.
struct RunSpec {
    AdapterConfig config;
    TrainOptions train;
    std::uint64_t seed = 2024;
    ToyModelOptions model;
};

struct RunResult {
    RunSpec spec;
    TrainLog log;
    bool diverged = false;
    std::string error;
    std::size_t first_perfect_epoch = 0;  // 0 if accuracy 1.0 was never reached

    double final_accuracy() const;
    double final_loss() const;  // +inf when diverged
};

SyntheticDataset default_dataset(std::uint64_t seed);
RunResult run_synthetic(const RunSpec& spec);

/// Worker count from SPFT_THREADS, else the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs every RunSpec; results keep input order and do not depend on threads.
std::vector<RunResult> run_all(const std::vector<RunSpec>& specs, std::size_t threads);

/// FourierFT n=128, alpha 300 (same count as LoRA r=1 on 64x64).
AdapterConfig fourier_arm(std::size_t n = 128, double alpha = 300.0);
/// LoRA with balanced Gaussian factors and alpha 1.
AdapterConfig lora_arm(std::size_t r = 1);
/// General-basis arm whose ΔW has the same per-coefficient scale as the
/// Fourier arm for the given hidden width.
AdapterConfig basis_arm(BasisKind kind, std::size_t n = 128, double fourier_alpha = 300.0,
                        std::size_t hidden = 64);
double matched_alpha(BasisKind kind, double fourier_alpha, std::size_t d1, std::size_t d2);

struct LrOutcome {
    double lr;
    std::vector<RunResult> runs;  // one per seed
    double mean_accuracy;
    double mean_loss;
};

struct LrSweep {
    std::string label;
    std::vector<LrOutcome> outcomes;
    std::size_t best = 0;

    const LrOutcome& best_outcome() const { return outcomes[best]; }
};

/// Trains config on every (lr, seed) pair and picks the lr with the highest mean
/// final accuracy, breaking ties by lower mean final loss, then smaller lr.
/// config.seed is set to each run seed.
LrSweep sweep_lr(const std::string& label, const AdapterConfig& config,
                 const std::vector<std::uint64_t>& seeds, const std::vector<double>& lrs,
                 std::size_t epochs, std::size_t threads);

/// Several labelled sweeps executed as one batch of runs.
std::vector<LrSweep> sweep_many(const std::vector<std::pair<std::string, AdapterConfig>>& arms,
                                const std::vector<std::uint64_t>& seeds,
                                const std::vector<double>& lrs, std::size_t epochs,
                                std::size_t threads);

std::vector<std::uint64_t> consecutive_seeds(std::uint64_t first, std::size_t count);

/// "label,lr,seed,final_accuracy,final_loss,first_perfect_epoch,diverged"
std::string runs_csv(const std::vector<LrSweep>& sweeps);
/// "label,best_lr,mean_accuracy,mean_loss,min_accuracy,max_accuracy"
std::string summary_csv(const std::vector<LrSweep>& sweeps);

struct BiasPoint {
    BiasSpec bias;
    std::vector<RunResult> runs;  // one per seed
    double mean_accuracy;
    double mean_loss;
};

/// FourierFT arm trained once per (bias, seed) at a fixed lr.
std::vector<BiasPoint> sweep_bias(const std::vector<BiasSpec>& biases, const AdapterConfig& base,
                                  const std::vector<std::uint64_t>& seeds, double lr,
                                  std::size_t epochs, std::size_t threads);

/// "bias,center_frequency,bandwidth,mean_accuracy,mean_loss"
std::string bias_csv(const std::vector<BiasPoint>& points);

}  // namespace spft
