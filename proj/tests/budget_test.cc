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

#include "spft/budget.hpp"

namespace {

using spft::BudgetMethod;

std::uint64_t params(const std::string& preset, BudgetMethod m) {
    return spft::budget(spft::find_preset(preset), m).trainable_params;
}

TEST(Budget, Formulas) {
    EXPECT_EQ(params("roberta-base", BudgetMethod::fourier(1000)), 24000u);
    EXPECT_EQ(params("roberta-base", BudgetMethod::lora(8)), 294912u);
    EXPECT_EQ(params("llama2-7b", BudgetMethod::lora(64)), 33554432u);
    EXPECT_EQ(params("llama2-7b", BudgetMethod::fourier(1000)), 64000u);
    EXPECT_EQ(params("vit-base", BudgetMethod::fourier(3000)), 72000u);
    EXPECT_EQ(params("vit-large", BudgetMethod::lora(16)), 1572864u);
    const auto one = spft::budget(1, 1, BudgetMethod::fourier(1));
    EXPECT_EQ(one.trainable_params, 1u);
    EXPECT_EQ(one.bytes, 4u);
}

TEST(Budget, BytesAreFourPerParamAndEntriesCounted) {
    const auto r = spft::budget(spft::find_preset("gpt2-large"), BudgetMethod::fourier(500));
    EXPECT_EQ(r.bytes, 4 * r.trainable_params);
    EXPECT_EQ(r.params_with_entries, 500u * (2 + 72));
    const auto l = spft::budget(spft::find_preset("gpt2-large"), BudgetMethod::lora(4));
    EXPECT_EQ(l.params_with_entries, l.trainable_params);
    EXPECT_EQ(l.trainable_params, 2u * 1280 * 72 * 4);
}

TEST(Budget, Presets) {
    EXPECT_EQ(spft::model_presets().size(), 8u);
    const auto& p = spft::find_preset("llama2-13b");
    EXPECT_EQ(p.width, 5120u);
    EXPECT_EQ(p.layers, 80u);
    EXPECT_THROW(spft::find_preset("bert"), spft::Error);
    EXPECT_THROW(spft::budget(0, 1, BudgetMethod::lora(1)), spft::Error);
}

TEST(Budget, PublishedParamCountsMatchExceptFlaggedRows) {
    int flagged = 0;
    for (const auto& row : spft::published_rows()) {
        const auto c = spft::check_row(row);
        if (row.note) {
            ++flagged;
            continue;
        }
        EXPECT_TRUE(c.params_match) << row.preset << " " << spft::to_string(row.method.method) << " "
                                    << row.method.n_or_r << ": computed " << c.report.trainable_params
                                    << ", printed " << row.printed_text;
    }
    EXPECT_EQ(flagged, 3);
}

TEST(Budget, FlaggedRowsReallyDisagree) {
    for (const auto& row : spft::published_rows()) {
        if (!row.note || row.preset == "roberta-base") continue;
        EXPECT_FALSE(spft::check_row(row).params_match) << row.printed_text;
    }
}

TEST(Budget, FormatBytes) {
    EXPECT_EQ(spft::format_bytes(4), "4 B");
    EXPECT_EQ(spft::format_bytes(96000), "93.75 KiB");
    EXPECT_EQ(spft::format_bytes(6291456), "6.00 MiB");
}

}  // namespace
