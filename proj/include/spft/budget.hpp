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
#include <optional>
#include <string>
#include <vector>

#include "spft/adapter.hpp"

namespace spft {

/// Model width d (= d1 = d2) and number of adapted layers L_t (query and value
/// projections of every block).
struct ModelPreset {
    std::string name;
    std::string display;
    std::size_t width;
    std::size_t layers;
};

const std::vector<ModelPreset>& model_presets();
/// Throws spft::Error listing the known presets.
const ModelPreset& find_preset(const std::string& name);

struct BudgetMethod {
    Method method;
    std::size_t n_or_r;

    static BudgetMethod lora(std::size_t r) { return {Method::kLora, r}; }
    static BudgetMethod fourier(std::size_t n) { return {Method::kFourier, n}; }
};

inline constexpr std::size_t kBytesPerParam = 4;

struct BudgetReport {
    std::string model;
    Method method;
    std::size_t n_or_r;
    std::size_t width;
    std::size_t layers;
    /// 2·d·L_t·r for LoRA, n·L_t for FourierFT.
    std::uint64_t trainable_params;
    std::uint64_t bytes;  // 4 bytes per parameter
    /// Spectral methods additionally counting 2n stored entry coordinates.
    std::uint64_t params_with_entries;
};

BudgetReport budget(const ModelPreset& model, BudgetMethod method);
BudgetReport budget(std::size_t width, std::size_t layers, BudgetMethod method);

/// A printed row of the published parameter/storage table, kept verbatim so the
/// calculator can report where its arithmetic and the printed figures disagree.
struct PublishedRow {
    std::string preset;
    BudgetMethod method;
    double printed_params;    // absolute count, e.g. 295K -> 295000
    double param_unit;        // value of one unit in the last printed digit
    double printed_bytes;     // absolute bytes with KB = 1024, MB = 1024^2
    std::string printed_text;  // "295K / 1.13MB"
    std::optional<std::string> note;  // known inconsistency in the printed row
};

const std::vector<PublishedRow>& published_rows();

struct RowCheck {
    const PublishedRow* row;
    BudgetReport report;
    bool params_match;       // |computed - printed| < one unit of the last printed digit
    double bytes_rel_error;  // |computed - printed| / printed
};

RowCheck check_row(const PublishedRow& row);

/// Human-readable byte size with binary units (B, KiB, MiB, GiB).
std::string format_bytes(std::uint64_t bytes);

}  // namespace spft
