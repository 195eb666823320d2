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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spft/experiments.hpp"
#include "spft/train.hpp"

namespace {

using spft::Matrix;

spft::SyntheticDataset first_rows(const spft::SyntheticDataset& d, std::size_t n) {
    spft::SyntheticDataset out = d;
    out.points = Matrix(n, 2);
    out.labels.resize(n);
    // Interleave classes so a short prefix still covers several labels.
    const std::size_t per_class = d.size() / spft::kNumClasses;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = (i % spft::kNumClasses) * per_class + i / spft::kNumClasses;
        out.points(i, 0) = d.points(src, 0);
        out.points(i, 1) = d.points(src, 1);
        out.labels[i] = d.labels[src];
    }
    return out;
}

spft::AdapterConfig arm(int which) {
    switch (which) {
        case 0: return spft::fourier_arm(128);
        case 1: return spft::lora_arm(1);
        case 2: return spft::basis_arm(spft::BasisKind::kRandom, 128);
        default: return spft::basis_arm(spft::BasisKind::kOrthogonal, 128);
    }
}

TEST(Synthetic, NoiselessPointsSitOnCenters) {
    const auto d = spft::gen_synthetic(1, 5, 4.0, 0.0);
    ASSERT_EQ(d.size(), 40u);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t k = d.labels[i];
        EXPECT_EQ(d.points(i, 0), d.class_centers(k, 0));
        EXPECT_EQ(d.points(i, 1), d.class_centers(k, 1));
    }
    for (std::size_t k = 0; k < spft::kNumClasses; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / 8.0;
        EXPECT_NEAR(d.class_centers(k, 0), 4.0 * std::cos(angle), 1e-15);
        EXPECT_NEAR(std::hypot(d.class_centers(k, 0), d.class_centers(k, 1)), 4.0, 1e-14);
    }
}

TEST(Synthetic, DeterministicAndValid) {
    const auto a = spft::gen_synthetic(9, 100, 4.0, 0.4);
    const auto b = spft::gen_synthetic(9, 100, 4.0, 0.4);
    EXPECT_EQ(a.points, b.points);
    EXPECT_EQ(a.labels, b.labels);
    for (auto l : a.labels) EXPECT_LT(l, 8);
    EXPECT_NE(a.points, spft::gen_synthetic(10, 100, 4.0, 0.4).points);
    EXPECT_THROW(spft::gen_synthetic(1, 0, 4.0, 0.4), spft::Error);
}

TEST(Synthetic, NearestCenterClassifierIsNearlyPerfect) {
    std::size_t correct = 0, total = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto d = spft::gen_synthetic(s, 100, 4.0, 0.4);
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::size_t best = 0;
            double best_d = 1e300;
            for (std::size_t k = 0; k < 8; ++k) {
                const double dx = d.points(i, 0) - d.class_centers(k, 0);
                const double dy = d.points(i, 1) - d.class_centers(k, 1);
                if (dx * dx + dy * dy < best_d) {
                    best_d = dx * dx + dy * dy;
                    best = k;
                }
            }
            correct += best == d.labels[i];
            ++total;
        }
    }
    EXPECT_GE(static_cast<double>(correct) / total, 0.999);
}

TEST(Evaluate, MatchesIndependentForwardPass) {
    const auto data = first_rows(spft::gen_synthetic(3, 3, 4.0, 0.4), 20);
    const auto model = spft::make_toy_model(spft::fourier_arm(128), 3);
    const Matrix dw = spft::delta_w(model.adapter);
    double loss = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<double> a1(64), a2(64), logits(8);
        for (std::size_t h = 0; h < 64; ++h) {
            const double z = data.points(i, 0) * model.w_in(0, h) + data.points(i, 1) * model.w_in(1, h);
            a1[h] = std::max(0.0, z);
        }
        for (std::size_t q = 0; q < 64; ++q) {
            double z = 0;
            for (std::size_t p = 0; p < 64; ++p) z += a1[p] * (model.w_hidden(p, q) + dw(p, q));
            a2[q] = std::max(0.0, z);
        }
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t q = 0; q < 64; ++q) logits[k] += a2[q] * model.w_out(q, k);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < 8; ++k)
            if (logits[k] > logits[arg]) arg = k;
        correct += arg == data.labels[i];
        const double peak = logits[arg];
        double z = 0;
        for (double v : logits) z += std::exp(v - peak);
        loss += peak + std::log(z) - logits[data.labels[i]];
    }
    const auto m = spft::evaluate(model, data);
    EXPECT_NEAR(m.loss, loss / 20.0, 1e-9 * std::max(1.0, loss / 20.0));
    EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(correct) / 20.0);
}

TEST(Evaluate, ArgmaxTiesGoLow) {
    Matrix m(3, 4, std::vector<double>{1, 3, 3, 0, 5, 5, 5, 5, -1, -2, -3, -0.5});
    EXPECT_EQ(spft::argmax_rows(m), (std::vector<std::size_t>{1, 0, 3}));
}

TEST(Evaluate, UntrainedModelsSitNearChance) {
    for (int which = 0; which < 2; ++which) {
        double acc = 0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            acc += spft::evaluate(spft::make_toy_model(arm(which), s), spft::default_dataset(s)).accuracy;
        }
        EXPECT_NEAR(acc / 10.0, 0.125, 0.1) << which;
    }
}

class ModelGradients : public ::testing::TestWithParam<int> {};

TEST_P(ModelGradients, MatchFiniteDifferences) {
    const auto data = first_rows(spft::gen_synthetic(5, 2, 4.0, 0.4), 10);
    spft::ToyModelOptions opts;
    opts.base_scale = 0.1;
    auto model = spft::make_toy_model(arm(GetParam()), 5, opts);
    const auto [metrics, grads] = spft::loss_and_grad(model, data);
    auto loss = [&] { return spft::evaluate(model, data).loss; };

    auto check = [&](std::span<double> param, std::span<const double> analytic, const char* what) {
        std::vector<double> p(param.begin(), param.end());
        auto f = [&] {
            std::copy(p.begin(), p.end(), param.begin());
            return loss();
        };
        const auto fd = oracle::central_diff(p, f, 1e-4);
        std::copy(p.begin(), p.end(), param.begin());
        EXPECT_LT(oracle::max_rel_err({analytic.begin(), analytic.end()}, fd, 1e-6), 1e-4) << what;
    };
    check(model.w_in.values(), grads.w_in.values(), "w_in");
    check(model.w_out.values(), grads.w_out.values(), "w_out");
    std::visit(
        [&](auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, spft::LoraAdapter>) {
                check(a.a.values(), grads.adapter.a->values(), "lora A");
                check(a.b.values(), grads.adapter.b->values(), "lora B");
            } else {
                check(std::span<double>(a.coeffs), grads.adapter.coeffs, "coeffs");
            }
        },
        model.adapter);
}

INSTANTIATE_TEST_SUITE_P(Arms, ModelGradients, ::testing::Values(0, 1, 2, 3));

TEST(Train, FrozenBaseUntouchedAndDeterministic) {
    spft::ToyModelOptions opts;
    opts.base_scale = 0.2;
    const auto data = spft::default_dataset(4);
    auto m1 = spft::make_toy_model(spft::fourier_arm(128), 4, opts);
    auto m2 = spft::make_toy_model(spft::fourier_arm(128), 4, opts);
    const auto base_hash = spft::content_hash(m1.w_hidden);
    spft::TrainOptions to;
    to.epochs = 40;
    const auto l1 = spft::train(m1, data, to);
    const auto l2 = spft::train(m2, data, to);
    EXPECT_EQ(spft::content_hash(m1.w_hidden), base_hash);
    EXPECT_EQ(l1.to_csv(), l2.to_csv());
    ASSERT_EQ(l1.epochs.size(), 40u);
    for (std::size_t i = 0; i < l1.epochs.size(); ++i) EXPECT_EQ(l1.epochs[i].epoch, i + 1);
    EXPECT_LT(l1.last().loss, l1.initial.loss);
}

TEST(Train, OneEpochAndCsv) {
    auto m = spft::make_toy_model(spft::lora_arm(1), 1);
    spft::TrainOptions to;
    to.epochs = 1;
    const auto log = spft::train(m, spft::default_dataset(1), to);
    ASSERT_EQ(log.epochs.size(), 1u);
    const std::string csv = log.to_csv();
    EXPECT_EQ(csv.rfind("epoch,loss,accuracy\n1,", 0), 0u);
    EXPECT_THROW(spft::train(m, spft::default_dataset(1), spft::TrainOptions{0, 1e-2, spft::Optimizer::kAdam}),
                 spft::Error);
}

TEST(Train, SgdAlsoLearns) {
    auto m = spft::make_toy_model(spft::fourier_arm(128), 2);
    spft::TrainOptions to{100, 1e-4, spft::Optimizer::kSgd};
    const auto log = spft::train(m, spft::default_dataset(2), to);
    EXPECT_LT(log.last().loss, log.initial.loss);
}

TEST(Train, ZeroCapacityAdapterRuns) {
    auto m = spft::make_toy_model(spft::fourier_arm(0), 1);
    EXPECT_EQ(spft::trainable_count(m.adapter), 0u);
    spft::TrainOptions to;
    to.epochs = 20;
    const auto log = spft::train(m, spft::default_dataset(1), to);
    EXPECT_GE(log.last().accuracy, 0.0);
    EXPECT_LE(log.last().accuracy, 1.0);
}

TEST(Train, DivergenceIsReported) {
    auto m = spft::make_toy_model(spft::fourier_arm(128), 1);
    spft::TrainOptions to{50, 1e6, spft::Optimizer::kSgd};
    try {
        spft::train(m, spft::default_dataset(1), to);
        FAIL() << "expected divergence";
    } catch (const spft::TrainingDiverged& e) {
        EXPECT_GE(e.epoch(), 1u);
        EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    }
}

TEST(Train, OptimizerNames) {
    EXPECT_EQ(spft::parse_optimizer("adam"), spft::Optimizer::kAdam);
    EXPECT_EQ(spft::parse_optimizer("sgd"), spft::Optimizer::kSgd);
    EXPECT_THROW(spft::parse_optimizer("lbfgs"), spft::Error);
}

TEST(Dataset, CsvLayout) {
    const auto d = spft::gen_synthetic(1, 1, 4.0, 0.0);
    const std::string csv = spft::dataset_to_csv(d);
    EXPECT_EQ(csv.rfind("x,y,label\n4,0,0\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

}  // namespace
