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
#include <vector>

namespace spft {

/// The n fixed spectral coordinates (j_l, k_l) on a d1 x d2 frequency grid.
/// Entries are shared by every layer of that shape and regenerated from seed.
struct EntryMatrix {
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> rows;
    std::vector<std::uint32_t> cols;

    std::size_t size() const { return rows.size(); }

    friend bool operator==(const EntryMatrix&, const EntryMatrix&) = default;
};

/// Throws spft::Error naming the first coordinate outside [0,d1)x[0,d2), or a
/// rows/cols length mismatch.
void validate_entries(const EntryMatrix& entries, std::size_t d1, std::size_t d2);

}  // namespace spft
