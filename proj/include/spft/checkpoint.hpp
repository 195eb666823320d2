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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spft/adapter.hpp"
#include "spft/budget.hpp"

namespace spft {

// Adapter checkpoint layout, all integers little-endian, reals IEEE-754 binary32:
//
//   offset  size  field
//   0       4     magic "SPFT"
//   4       2     version (1)
//   6       1     method (1 fourier, 2 lora, 3 general-basis)
//   7       4     alpha
//   11      8     seed
//   19      4     n (spectral) or r (lora)
//   23      4     layer count
//   27      1     bias mode (0 none, 1 band-pass)
//   28      4     f_c
//   32      4     bandwidth
//   36      ...   layer records
//
// Layer record: u16 name length, UTF-8 name, u32 d1, u32 d2, payload.
//   fourier:       n coefficients
//   lora:          A (r x d2, row-major), then B (d1 x r, row-major)
//   general-basis: u8 basis kind, then n coefficients
//
// Spectral entries and frozen bases are not stored; load regenerates them from
// (seed, d1, d2, n, bias).

inline constexpr char kCheckpointMagic[4] = {'S', 'P', 'F', 'T'};
inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 36;

struct LayerRecord {
    std::string name;
    Adapter adapter;
};

struct CheckpointContents {
    AdapterConfig config;
    std::vector<LayerRecord> layers;
};

class CheckpointError : public Error {
public:
    enum class Code {
        kBadMagic,
        kUnsupportedVersion,
        kTruncated,
        kTrailingBytes,
        kBadMethod,
        kBadDimensions,
        kInconsistentLayers,
        kIo,
    };

    CheckpointError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

std::vector<std::uint8_t> encode_checkpoint(const AdapterConfig& config,
                                            std::span<const LayerRecord> layers);
CheckpointContents decode_checkpoint(std::span<const std::uint8_t> bytes);

/// Writes through a temporary file and a rename. Returns the byte count.
std::uint64_t save_checkpoint(const std::filesystem::path& path, const AdapterConfig& config,
                              std::span<const LayerRecord> layers);
CheckpointContents load_checkpoint(const std::filesystem::path& path);

/// Bytes taken by trainable values alone (coefficients or LoRA factors).
std::uint64_t coefficient_payload_bytes(std::span<const LayerRecord> layers);

/// Ratio of trainable-value payload bytes, a over b.
double size_ratio(const BudgetReport& a, const BudgetReport& b);

// Raw weight file: u64 rows, u64 cols (little-endian), then rows·cols binary32
// values in row-major order.
inline constexpr std::size_t kRawHeaderBytes = 16;
void write_raw_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_raw_matrix(const std::filesystem::path& path);

/// Atomic write of an arbitrary byte buffer (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace spft
