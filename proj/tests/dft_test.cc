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

#include "oracles.hpp"
#include "spft/dft.hpp"
#include "spft/sampling.hpp"

namespace {

using spft::Complex;
using spft::Matrix;

std::vector<Complex> random_signal(spft::Rng& rng, std::size_t n) {
    std::vector<Complex> x(n);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    return x;
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

class Plan1DLengths : public ::testing::TestWithParam<std::size_t> {};

TEST_P(Plan1DLengths, MatchesNaiveDft) {
    const std::size_t n = GetParam();
    spft::Rng rng(n);
    const auto x = random_signal(rng, n);
    spft::Plan1D plan(n);
    EXPECT_EQ(plan.strategy() == spft::Plan1D::Strategy::kBluestein, spft::needs_bluestein(n));

    auto fwd = x;
    plan.forward(fwd);
    const double tol = 1e-12 * std::sqrt(static_cast<double>(n)) * 8;
    EXPECT_LT(max_diff(fwd, oracle::naive_dft(x, -1)), tol);

    auto inv = x;
    plan.inverse(inv);
    EXPECT_LT(max_diff(inv, oracle::naive_dft(x, +1)), tol);
}

std::vector<std::size_t> plan_lengths() {
    std::vector<std::size_t> v;
    for (std::size_t n = 1; n <= 70; ++n) v.push_back(n);
    for (std::size_t n : {96u, 97u, 127u, 128u, 211u, 256u, 360u, 768u, 1000u, 1021u, 1024u}) v.push_back(n);
    return v;
}

INSTANTIATE_TEST_SUITE_P(Lengths, Plan1DLengths, ::testing::ValuesIn(plan_lengths()));

TEST(Plan1D, StrategySelection) {
    EXPECT_FALSE(spft::needs_bluestein(1));
    EXPECT_FALSE(spft::needs_bluestein(31));
    EXPECT_FALSE(spft::needs_bluestein(768));
    EXPECT_TRUE(spft::needs_bluestein(37));
    EXPECT_TRUE(spft::needs_bluestein(2 * 37));
    EXPECT_THROW(spft::Plan1D(0), spft::Error);
}

TEST(Fft2, RoundTrip) {
    spft::Rng rng(1);
    for (auto [d1, d2] : {std::pair{1, 1}, {3, 5}, {8, 8}, {37, 12}}) {
        const auto x = random_signal(rng, d1 * d2);
        const auto back = spft::ifft2(spft::fft2(x, d1, d2), d1, d2);
        EXPECT_LT(max_diff(back, x), 1e-12);
    }
}

TEST(Ifft2Real, MatchesOracleSmallShapes) {
    spft::Rng rng(2);
    for (std::size_t d1 = 1; d1 <= 16; d1 += 3) {
        for (std::size_t d2 = 1; d2 <= 16; d2 += 2) {
            Matrix f = spft::randn_matrix(rng, d1, d2);
            const Matrix want = oracle::idft2_real(f);
            EXPECT_LT(spft::max_abs_diff(spft::ifft2_real(f), want), 1e-12) << d1 << "x" << d2;
            EXPECT_LT(spft::max_abs_diff(spft::brute_force_idft2(f), want), 1e-12);
        }
    }
}

TEST(Ifft2Real, SingleDcCoefficientIsConstant) {
    // One coefficient at the origin spreads evenly, scaled by 1/(d1·d2).
    Matrix f(6, 10);
    f(0, 0) = 3.0;
    const Matrix s = spft::ifft2_real(f);
    for (double v : s.values()) EXPECT_NEAR(v, 3.0 / 60.0, 1e-15);
}

TEST(Ifft2Real, SignConvention) {
    // F at (1, 0) on a 4x1 grid gives cos(2πp/4)/4 for either sign, so use the
    // complex transform to pin e^{+i}.
    std::vector<Complex> g(4);
    g[1] = 1.0;
    const auto s = spft::ifft2(g, 4, 1);
    EXPECT_NEAR(s[1].real(), 0.0, 1e-15);
    EXPECT_NEAR(s[1].imag(), 0.25, 1e-15);
}

TEST(BruteForce, RefusesHugeGrids) {
    EXPECT_THROW(spft::brute_force_idft2(Matrix(1001, 1000)), spft::Error);
}

TEST(SparsePath, MatchesDenseAndOracle) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        spft::Rng rng(seed);
        const std::size_t d1 = 1 + rng.below(40);
        const std::size_t d2 = 1 + rng.below(40);
        const std::size_t n = 1 + rng.below(std::min<std::size_t>(d1 * d2, 30));
        const auto e = spft::sample_uniform(seed, d1, d2, n);
        const auto c = spft::randn_vector(rng, n);
        const Matrix sparse = spft::sparse_idft_real(e, c, d1, d2);
        const Matrix dense = spft::ifft2_real(spft::to_dense(e, c, d1, d2));
        EXPECT_LT(spft::max_abs_diff(sparse, dense), 1e-12);
        EXPECT_LT(spft::max_abs_diff(sparse, oracle::sparse_idft_real(e, c)), 1e-12);
        EXPECT_LT(spft::max_abs_diff(spft::idft_real(e, c, d1, d2), dense), 1e-12);
    }
}

TEST(Adjoint, InnerProductIdentityAndPathsAgree) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        spft::Rng rng(100 + seed);
        const std::size_t d1 = 1 + rng.below(33);
        const std::size_t d2 = 1 + rng.below(33);
        const std::size_t n = 1 + rng.below(d1 * d2);
        const auto e = spft::sample_uniform(seed, d1, d2, n);
        const auto c = spft::randn_vector(rng, n);
        const Matrix g = spft::randn_matrix(rng, d1, d2);
        const double lhs = spft::inner(spft::idft_real(e, c, d1, d2), g);
        const auto sparse_adj = spft::sparse_idft_adjoint(e, g);
        const auto dense_adj = spft::dense_idft_adjoint(e, g);
        const double rhs = spft::inner(c, sparse_adj);
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
        EXPECT_LT(oracle::max_rel_err(sparse_adj, dense_adj, 1e-9), 1e-9);
    }
}

TEST(Dispatch, Crossover) {
    EXPECT_TRUE(spft::prefer_sparse_path(1, 64, 64));
    EXPECT_FALSE(spft::prefer_sparse_path(4096, 64, 64));
    EXPECT_TRUE(spft::prefer_sparse_path(0, 1, 1));
}

TEST(Entries, ValidationNamesOffender) {
    spft::EntryMatrix e{4, 4, 0, {0, 9}, {1, 1}};
    try {
        spft::validate_entries(e, 4, 4);
        FAIL();
    } catch (const spft::Error& err) {
        EXPECT_NE(std::string(err.what()).find('9'), std::string::npos);
    }
    spft::EntryMatrix bad{4, 4, 0, {0}, {1, 2}};
    EXPECT_THROW(spft::validate_entries(bad, 4, 4), spft::Error);
    EXPECT_THROW(spft::sparse_idft_real(e, std::vector<double>{1.0, 2.0}, 4, 4), spft::Error);
}

}  // namespace
