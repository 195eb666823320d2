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

#include "spft/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace spft {

namespace {

void check_request(std::size_t d1, std::size_t d2, std::size_t n, const char* who) {
    if (d1 == 0 || d2 == 0) throw Error(std::string(who) + ": grid dimensions must be >= 1");
    if (n > d1 * d2) {
        throw Error(std::string(who) + ": n = " + std::to_string(n) + " exceeds the " +
                    std::to_string(d1) + "x" + std::to_string(d2) + " grid (" +
                    std::to_string(d1 * d2) + " cells)");
    }
}

void check_bias(const BiasSpec& bias) {
    if (!(bias.bandwidth > 0.0)) {
        throw Error("band-pass bias: bandwidth must be > 0, got " + std::to_string(bias.bandwidth));
    }
    if (!(bias.center_frequency >= 0.0)) {
        throw Error("band-pass bias: center frequency must be >= 0, got " +
                    std::to_string(bias.center_frequency));
    }
}

EntryMatrix make_entries(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n) {
    EntryMatrix e;
    e.d1 = d1;
    e.d2 = d2;
    e.seed = seed;
    e.rows.reserve(n);
    e.cols.reserve(n);
    return e;
}

// Grids up to this many cells use a dense index array; larger ones track only
// the displaced slots. Both produce the same permutation prefix.
constexpr std::size_t kDenseShuffleLimit = std::size_t{1} << 22;

}  // namespace

std::string BiasSpec::label() const {
    if (!is_biased()) return "none";
    std::ostringstream os;
    os << center_frequency;
    return os.str();
}

EntryMatrix sample_uniform(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n) {
    check_request(d1, d2, n, "sample_uniform");
    const std::size_t cells = d1 * d2;
    Rng rng(seed);
    EntryMatrix e = make_entries(seed, d1, d2, n);

    auto emit = [&](std::size_t idx) {
        e.rows.push_back(static_cast<std::uint32_t>(idx / d2));
        e.cols.push_back(static_cast<std::uint32_t>(idx % d2));
    };

    if (cells <= kDenseShuffleLimit) {
        std::vector<std::uint32_t> perm(cells);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + rng.below(cells - i);
            std::swap(perm[i], perm[j]);
            emit(perm[i]);
        }
    } else {
        std::unordered_map<std::size_t, std::size_t> displaced;
        auto at = [&](std::size_t k) {
            auto it = displaced.find(k);
            return it == displaced.end() ? k : it->second;
        };
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + rng.below(cells - i);
            const std::size_t vi = at(i);
            const std::size_t vj = at(j);
            displaced[j] = vi;
            displaced[i] = vj;
            emit(vj);
        }
    }
    return e;
}

double center_distance(std::size_t u, std::size_t v, std::size_t d1, std::size_t d2) {
    const double du = static_cast<double>(u) - 0.5 * static_cast<double>(d1 - 1);
    const double dv = static_cast<double>(v) - 0.5 * static_cast<double>(d2 - 1);
    return std::sqrt(du * du + dv * dv);
}

double bandpass_log_weight(double distance, double center_frequency, double bandwidth) {
    if (distance == 0.0) {
        return center_frequency == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double z = (distance * distance - center_frequency * center_frequency) /
                     (distance * bandwidth);
    return -z * z;
}

double bandpass_weight(double distance, double center_frequency, double bandwidth) {
    return std::exp(bandpass_log_weight(distance, center_frequency, bandwidth));
}

Matrix bandpass_probability(std::size_t d1, std::size_t d2, const BiasSpec& bias) {
    if (!bias.is_biased()) throw Error("bandpass_probability: bias mode must be bandpass");
    check_bias(bias);
    Matrix p(d1, d2);
    for (std::size_t u = 0; u < d1; ++u) {
        for (std::size_t v = 0; v < d2; ++v) {
            p(u, v) = bandpass_weight(center_distance(u, v, d1, d2), bias.center_frequency,
                                      bias.bandwidth);
        }
    }
    return p;
}

EntryMatrix sample_biased(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n,
                          const BiasSpec& bias) {
    check_request(d1, d2, n, "sample_biased");
    if (!bias.is_biased()) throw Error("sample_biased: bias mode must be bandpass");
    check_bias(bias);

    const std::size_t cells = d1 * d2;
    Rng rng(seed);
    std::vector<double> keys(cells);
    bool any_positive = false;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < cells; ++idx) {
        const double log_w = bandpass_log_weight(center_distance(idx / d2, idx % d2, d1, d2),
                                                 bias.center_frequency, bias.bandwidth);
        // One draw per cell, regardless of weight, so the stream layout is fixed.
        const double exp_draw = -std::log(rng.uniform_open0());
        if (log_w == -kInf) {
            keys[idx] = kInf;
            continue;
        }
        any_positive = true;
        keys[idx] = (exp_draw > 0.0 ? std::log(exp_draw) : -kInf) - log_w;
    }
    if (!any_positive) {
        throw Error("sample_biased: every cell has zero probability under " + bias.label());
    }

    std::vector<std::uint32_t> order(cells);
    std::iota(order.begin(), order.end(), 0u);
    auto less = [&](std::uint32_t a, std::uint32_t b) {
        return keys[a] < keys[b] || (keys[a] == keys[b] && a < b);
    };
    if (n < cells) {
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                         less);
    }
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), less);

    EntryMatrix e = make_entries(seed, d1, d2, n);
    for (std::size_t i = 0; i < n; ++i) {
        e.rows.push_back(static_cast<std::uint32_t>(order[i] / d2));
        e.cols.push_back(static_cast<std::uint32_t>(order[i] % d2));
    }
    return e;
}

EntryMatrix sample_entries(std::uint64_t seed, std::size_t d1, std::size_t d2, std::size_t n,
                           const BiasSpec& bias) {
    return bias.is_biased() ? sample_biased(seed, d1, d2, n, bias)
                            : sample_uniform(seed, d1, d2, n);
}

}  // namespace spft
