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

#include "spft/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

namespace spft {

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

}  // namespace

double RunResult::final_accuracy() const {
    if (diverged || log.epochs.empty()) return 0.0;
    return log.last().accuracy;
}

double RunResult::final_loss() const {
    if (diverged || log.epochs.empty()) return std::numeric_limits<double>::infinity();
    return log.last().loss;
}

SyntheticDataset default_dataset(std::uint64_t seed) {
    return gen_synthetic(seed, kSamplesPerClass, kClusterRadius, kClusterSigma);
}

RunResult run_synthetic(const RunSpec& spec) {
    RunResult result;
    result.spec = spec;
    const SyntheticDataset data = default_dataset(spec.seed);
    ToyModel model = make_toy_model(spec.config, spec.seed, spec.model);
    try {
        result.log = train(model, data, spec.train);
    } catch (const TrainingDiverged& e) {
        result.diverged = true;
        result.error = e.what();
        return result;
    }
    for (const auto& e : result.log.epochs) {
        if (e.accuracy == 1.0) {
            result.first_perfect_epoch = e.epoch;
            break;
        }
    }
    return result;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("SPFT_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
        throw Error(std::string("SPFT_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::vector<RunResult> run_all(const std::vector<RunSpec>& specs, std::size_t threads) {
    std::vector<RunResult> results(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) results[i] = run_synthetic(specs[i]);
    };
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, specs.size()));
    if (threads == 1) {
        worker();
        return results;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

AdapterConfig fourier_arm(std::size_t n, double alpha) {
    AdapterConfig c;
    c.method = Method::kFourier;
    c.n_or_r = n;
    c.alpha = alpha;
    return c;
}

AdapterConfig lora_arm(std::size_t r) {
    AdapterConfig c;
    c.method = Method::kLora;
    c.n_or_r = r;
    c.alpha = 1.0;
    c.lora_init = LoraInit::kBalanced;
    return c;
}

double matched_alpha(BasisKind kind, double fourier_alpha, std::size_t d1, std::size_t d2) {
    const double cells = static_cast<double>(d1) * static_cast<double>(d2);
    switch (kind) {
        case BasisKind::kFourier:
            return fourier_alpha;
        case BasisKind::kOrthogonal:
            // A Fourier atom has Frobenius norm 1/sqrt(2·d1·d2); an orthonormal one has 1.
            return fourier_alpha / std::sqrt(2.0 * cells);
        case BasisKind::kRandom:
            // Gaussian columns have norm about sqrt(d).
            return fourier_alpha / (std::sqrt(2.0) * cells);
    }
    throw Error("matched_alpha: unknown basis kind");
}

AdapterConfig basis_arm(BasisKind kind, std::size_t n, double fourier_alpha, std::size_t hidden) {
    AdapterConfig c;
    c.method = Method::kGeneralBasis;
    c.basis = kind;
    c.n_or_r = n;
    c.alpha = matched_alpha(kind, fourier_alpha, hidden, hidden);
    return c;
}

std::vector<std::uint64_t> consecutive_seeds(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
    return seeds;
}

std::vector<LrSweep> sweep_many(const std::vector<std::pair<std::string, AdapterConfig>>& arms,
                                const std::vector<std::uint64_t>& seeds,
                                const std::vector<double>& lrs, std::size_t epochs,
                                std::size_t threads) {
    if (seeds.empty() || lrs.empty()) throw Error("sweep: need at least one seed and one lr");
    std::vector<RunSpec> specs;
    for (const auto& [label, config] : arms) {
        for (double lr : lrs) {
            for (std::uint64_t seed : seeds) {
                RunSpec s;
                s.config = config;
                s.config.seed = seed;
                s.seed = seed;
                s.train.epochs = epochs;
                s.train.lr = lr;
                specs.push_back(s);
            }
        }
    }
    std::vector<RunResult> results = run_all(specs, threads);

    std::vector<LrSweep> sweeps;
    std::size_t k = 0;
    for (const auto& [label, config] : arms) {
        LrSweep sweep;
        sweep.label = label;
        for (double lr : lrs) {
            LrOutcome o{lr, {}, 0.0, 0.0};
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                o.mean_accuracy += results[k].final_accuracy();
                o.mean_loss += results[k].final_loss();
                o.runs.push_back(std::move(results[k++]));
            }
            o.mean_accuracy /= static_cast<double>(seeds.size());
            o.mean_loss /= static_cast<double>(seeds.size());
            sweep.outcomes.push_back(std::move(o));
        }
        for (std::size_t i = 1; i < sweep.outcomes.size(); ++i) {
            const auto& cand = sweep.outcomes[i];
            const auto& best = sweep.outcomes[sweep.best];
            const bool better =
                cand.mean_accuracy > best.mean_accuracy ||
                (cand.mean_accuracy == best.mean_accuracy && cand.mean_loss < best.mean_loss) ||
                (cand.mean_accuracy == best.mean_accuracy && cand.mean_loss == best.mean_loss &&
                 cand.lr < best.lr);
            if (better) sweep.best = i;
        }
        sweeps.push_back(std::move(sweep));
    }
    return sweeps;
}

LrSweep sweep_lr(const std::string& label, const AdapterConfig& config,
                 const std::vector<std::uint64_t>& seeds, const std::vector<double>& lrs,
                 std::size_t epochs, std::size_t threads) {
    return std::move(sweep_many({{label, config}}, seeds, lrs, epochs, threads).front());
}

std::string runs_csv(const std::vector<LrSweep>& sweeps) {
    std::string out = "label,lr,seed,final_accuracy,final_loss,first_perfect_epoch,diverged\n";
    for (const auto& sweep : sweeps) {
        for (const auto& o : sweep.outcomes) {
            for (const auto& r : o.runs) {
                out += sweep.label + "," + fmt("%.17g", o.lr) + "," + std::to_string(r.spec.seed) +
                       "," + fmt("%.17g", r.final_accuracy()) + "," + fmt("%.17g", r.final_loss()) +
                       "," + std::to_string(r.first_perfect_epoch) + "," +
                       (r.diverged ? "1" : "0") + "\n";
            }
        }
    }
    return out;
}

std::string summary_csv(const std::vector<LrSweep>& sweeps) {
    std::string out = "label,best_lr,mean_accuracy,mean_loss,min_accuracy,max_accuracy\n";
    for (const auto& sweep : sweeps) {
        const auto& o = sweep.best_outcome();
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& r : o.runs) {
            lo = std::min(lo, r.final_accuracy());
            hi = std::max(hi, r.final_accuracy());
        }
        out += sweep.label + "," + fmt("%.17g", o.lr) + "," + fmt("%.17g", o.mean_accuracy) + "," +
               fmt("%.17g", o.mean_loss) + "," + fmt("%.17g", lo) + "," + fmt("%.17g", hi) + "\n";
    }
    return out;
}

std::vector<BiasPoint> sweep_bias(const std::vector<BiasSpec>& biases, const AdapterConfig& base,
                                  const std::vector<std::uint64_t>& seeds, double lr,
                                  std::size_t epochs, std::size_t threads) {
    if (seeds.empty()) throw Error("sweep_bias: need at least one seed");
    std::vector<RunSpec> specs;
    for (const auto& bias : biases) {
        for (std::uint64_t seed : seeds) {
            RunSpec s;
            s.config = base;
            s.config.bias = bias;
            s.config.seed = seed;
            s.seed = seed;
            s.train.epochs = epochs;
            s.train.lr = lr;
            specs.push_back(s);
        }
    }
    std::vector<RunResult> results = run_all(specs, threads);
    std::vector<BiasPoint> points;
    std::size_t k = 0;
    for (const auto& bias : biases) {
        BiasPoint p{bias, {}, 0.0, 0.0};
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            p.mean_accuracy += results[k].final_accuracy();
            p.mean_loss += results[k].final_loss();
            p.runs.push_back(std::move(results[k++]));
        }
        p.mean_accuracy /= static_cast<double>(seeds.size());
        p.mean_loss /= static_cast<double>(seeds.size());
        points.push_back(std::move(p));
    }
    return points;
}

std::string bias_csv(const std::vector<BiasPoint>& points) {
    std::string out = "bias,center_frequency,bandwidth,mean_accuracy,mean_loss\n";
    for (const auto& p : points) {
        const bool biased = p.bias.is_biased();
        out += p.bias.label() + "," + (biased ? fmt("%.17g", p.bias.center_frequency) : "") + "," +
               (biased ? fmt("%.17g", p.bias.bandwidth) : "") + "," + fmt("%.17g", p.mean_accuracy) +
               "," + fmt("%.17g", p.mean_loss) + "\n";
    }
    return out;
}

}  // namespace spft
