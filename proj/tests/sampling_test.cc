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
#include <set>

#include "spft/sampling.hpp"

namespace {

using spft::BiasSpec;

std::set<std::pair<std::uint32_t, std::uint32_t>> as_set(const spft::EntryMatrix& e) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> s;
    for (std::size_t i = 0; i < e.size(); ++i) s.insert({e.rows[i], e.cols[i]});
    return s;
}

TEST(Uniform, DistinctInRangeDeterministic) {
    const auto e = spft::sample_uniform(2024, 64, 48, 1000);
    EXPECT_EQ(e.size(), 1000u);
    EXPECT_EQ(as_set(e).size(), 1000u);
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_LT(e.rows[i], 64u);
        EXPECT_LT(e.cols[i], 48u);
    }
    EXPECT_EQ(e, spft::sample_uniform(2024, 64, 48, 1000));
    EXPECT_NE(e, spft::sample_uniform(2025, 64, 48, 1000));
}

TEST(Uniform, PrefixProperty) {
    // A shorter draw is a prefix of a longer one with the same seed.
    const auto a = spft::sample_uniform(9, 30, 30, 50);
    const auto b = spft::sample_uniform(9, 30, 30, 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.rows[i], b.rows[i]);
        EXPECT_EQ(a.cols[i], b.cols[i]);
    }
}

TEST(Uniform, EdgeCases) {
    EXPECT_EQ(spft::sample_uniform(1, 5, 5, 0).size(), 0u);
    EXPECT_EQ(as_set(spft::sample_uniform(1, 5, 7, 35)).size(), 35u);
    EXPECT_THROW(spft::sample_uniform(1, 5, 5, 26), spft::Error);
    EXPECT_THROW(spft::sample_uniform(1, 0, 5, 0), spft::Error);
    const auto one = spft::sample_uniform(1, 1, 1, 1);
    EXPECT_EQ(one.rows[0], 0u);
    EXPECT_EQ(one.cols[0], 0u);
}

TEST(Uniform, LargeGridPath) {
    const auto e = spft::sample_uniform(3, 4096, 2048, 2000);
    EXPECT_EQ(as_set(e).size(), 2000u);
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_LT(e.rows[i], 4096u);
        EXPECT_LT(e.cols[i], 2048u);
    }
}

TEST(Uniform, MarginalsAreFlat) {
    // Each of the 12 cells should be picked with probability n/12 = 1/4.
    std::vector<int> counts(12);
    constexpr int kTrials = 24000;
    for (int s = 0; s < kTrials; ++s) {
        const auto e = spft::sample_uniform(s, 3, 4, 3);
        for (std::size_t i = 0; i < e.size(); ++i) ++counts[e.rows[i] * 4 + e.cols[i]];
    }
    const double expected = kTrials * 3.0 / 12.0;
    double chi2 = 0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 31.3);  // 11 dof, p ~ 0.001
}

TEST(Bandpass, WeightProfile) {
    EXPECT_EQ(spft::bandpass_weight(100.0, 100.0, 200.0), 1.0);
    EXPECT_EQ(spft::bandpass_weight(0.0, 0.0, 5.0), 1.0);
    EXPECT_EQ(spft::bandpass_weight(0.0, 3.0, 5.0), 0.0);
    // f_c = 0 is a low-pass Gaussian exp(-(D/W)²).
    for (double d : {0.5, 1.0, 7.0, 30.0}) {
        EXPECT_NEAR(spft::bandpass_weight(d, 0.0, 10.0), std::exp(-(d / 10.0) * (d / 10.0)), 1e-15);
    }
    // Far from the band the log weight stays finite even where exp underflows.
    const double lw = spft::bandpass_log_weight(500.0, 1.0, 1.0);
    EXPECT_TRUE(std::isfinite(lw));
    EXPECT_LT(lw, -1e5);
    EXPECT_EQ(spft::bandpass_weight(500.0, 1.0, 1.0), 0.0);
}

TEST(Bandpass, CenterDistance) {
    EXPECT_DOUBLE_EQ(spft::center_distance(0, 0, 1, 1), 0.0);
    EXPECT_DOUBLE_EQ(spft::center_distance(0, 0, 2, 2), std::sqrt(0.5));
    EXPECT_DOUBLE_EQ(spft::center_distance(383, 483, 767, 767), 100.0);
}

TEST(Bandpass, ExactBandCellsOnOddGrid) {
    // On 767x767 the center is a cell, so cells at D = 100 exist.
    const auto p = spft::bandpass_probability(767, 767, BiasSpec::bandpass(100, 200));
    EXPECT_EQ(p(383, 483), 1.0);
    EXPECT_EQ(p(483, 383), 1.0);
    EXPECT_EQ(p(383 + 60, 383 + 80), 1.0);
    const auto lp = spft::bandpass_probability(767, 767, BiasSpec::bandpass(0, 200));
    EXPECT_EQ(lp(383, 383), 1.0);
}

TEST(Bandpass, ProbabilityRejectsBadSpecs) {
    EXPECT_THROW(spft::bandpass_probability(4, 4, BiasSpec::none()), spft::Error);
    EXPECT_THROW(spft::bandpass_probability(4, 4, BiasSpec::bandpass(1, 0)), spft::Error);
    EXPECT_THROW(spft::bandpass_probability(4, 4, BiasSpec::bandpass(-1, 1)), spft::Error);
}

TEST(Biased, DistinctDeterministicAndConcentrated) {
    const BiasSpec bias = BiasSpec::bandpass(20, 4);
    const auto e = spft::sample_biased(7, 64, 64, 300, bias);
    EXPECT_EQ(as_set(e).size(), 300u);
    EXPECT_EQ(e, spft::sample_biased(7, 64, 64, 300, bias));
    double mean_gap = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        mean_gap += std::abs(spft::center_distance(e.rows[i], e.cols[i], 64, 64) - 20.0);
    }
    EXPECT_LT(mean_gap / 300.0, 4.0);
}

TEST(Biased, SingleDrawFrequenciesFollowWeights) {
    // With n = 1 the exponential-key sampler picks cell i with probability w_i / Σw.
    const BiasSpec bias = BiasSpec::bandpass(1.0, 1.5);
    const auto p = spft::bandpass_probability(4, 4, bias);
    double total = 0;
    for (double v : p.values()) total += v;
    std::vector<int> counts(16);
    constexpr int kTrials = 40000;
    for (int s = 0; s < kTrials; ++s) {
        const auto e = spft::sample_biased(s, 4, 4, 1, bias);
        ++counts[e.rows[0] * 4 + e.cols[0]];
    }
    double chi2 = 0;
    for (int i = 0; i < 16; ++i) {
        const double expected = kTrials * p.values()[i] / total;
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    EXPECT_LT(chi2, 37.7);  // 15 dof, p ~ 0.001
}

TEST(Biased, ZeroWeightCellsComeLast) {
    // 3x3 with f_c > 0: only the center has weight exactly 0.
    const auto e = spft::sample_biased(5, 3, 3, 9, BiasSpec::bandpass(1.0, 1.0));
    EXPECT_EQ(e.rows.back(), 1u);
    EXPECT_EQ(e.cols.back(), 1u);
    EXPECT_THROW(spft::sample_biased(5, 1, 1, 1, BiasSpec::bandpass(1.0, 1.0)), spft::Error);
}

TEST(Entries, DispatchOnMode) {
    EXPECT_EQ(spft::sample_entries(3, 16, 16, 10, BiasSpec::none()),
              spft::sample_uniform(3, 16, 16, 10));
    EXPECT_EQ(spft::sample_entries(3, 16, 16, 10, BiasSpec::bandpass(4, 2)),
              spft::sample_biased(3, 16, 16, 10, BiasSpec::bandpass(4, 2)));
    EXPECT_EQ(BiasSpec::none().label(), "none");
    EXPECT_EQ(BiasSpec::bandpass(16, 8).label(), "16");
}

}  // namespace
