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

#include "spft/entries.hpp"
#include "spft/linalg.hpp"

namespace spft {

/// Frequency bias for entry selection. With kNone, f_c and bandwidth are ignored.
struct BiasSpec {
    enum class Mode : std::uint8_t { kNone = 0, kBandpass = 1 };

    Mode mode = Mode::kNone;
    double center_frequency = 0.0;  // f_c, in cells from the grid center
    double bandwidth = 1.0;

    static BiasSpec none() { return {}; }
    static BiasSpec bandpass(double center_frequency, double bandwidth) {
        return {Mode::kBandpass, center_frequency, bandwidth};
    }

    bool is_biased() const { return mode == Mode::kBandpass; }
    std::string label() const;

    friend bool operator==(const BiasSpec&, const BiasSpec&) = default;
};

/// First n cells of a seeded Fisher-Yates permutation of the d1·d2 grid,
/// decoded row-major as (idx / d2, idx % d2).
EntryMatrix sample_uniform(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n);

/// Distance of cell (u, v) from the continuous grid center ((d1-1)/2, (d2-1)/2).
double center_distance(std::size_t u, std::size_t v, std::size_t d1, std::size_t d2);

/// Gaussian band-pass profile exp(-((D² - f_c²) / (D·W))²) at distance D.
/// At D = 0 the limit is used: 1 when f_c = 0, otherwise 0.
double bandpass_weight(double distance, double center_frequency, double bandwidth);

/// log of bandpass_weight; -inf where the weight is zero. Never underflows.
double bandpass_log_weight(double distance, double center_frequency, double bandwidth);

/// Unnormalized sampling probability per cell. Requires a band-pass bias.
Matrix bandpass_probability(std::size_t d1, std::size_t d2, const BiasSpec& bias);

/// n distinct cells drawn without replacement with probability proportional to
/// the band-pass profile, using exponential keys E_i / w_i (smallest first).
/// Zero-weight cells are only taken once every positive-weight cell is used.
EntryMatrix sample_biased(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n,
                          const BiasSpec& bias);

/// Dispatches on bias.mode.
EntryMatrix sample_entries(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n,
                           const BiasSpec& bias);

}  // namespace spft
