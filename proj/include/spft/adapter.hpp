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
#include <variant>
#include <vector>

#include "spft/entries.hpp"
#include "spft/linalg.hpp"
#include "spft/sampling.hpp"

namespace spft {

using CoefficientVector = std::vector<double>;

enum class Method : std::uint8_t { kFourier = 1, kLora = 2, kGeneralBasis = 3 };
enum class BasisKind : std::uint8_t { kFourier = 0, kRandom = 1, kOrthogonal = 2 };

std::string to_string(Method m);
std::string to_string(BasisKind k);
Method parse_method(const std::string& s);
BasisKind parse_basis(const std::string& s);

enum class CoeffInit { kGaussian, kZero };
/// kZeroB: A Gaussian, B zero, so the adapter starts as a no-op.
/// kBalanced: both factors Gaussian with std (2/(d1·r))^{1/4}, giving ΔW entries
/// of variance 2/d1. Used when there is no pre-trained weight to preserve.
enum class LoraInit { kZeroB, kBalanced };

/// Shared configuration of every adapted layer. n_or_r is n for the spectral
/// methods and r for LoRA. Entries and frozen bases are derived from seed.
struct AdapterConfig {
    Method method = Method::kFourier;
    std::size_t n_or_r = 1000;
    double alpha = 300.0;
    std::uint64_t seed = 2024;
    BiasSpec bias;
    BasisKind basis = BasisKind::kFourier;
    CoeffInit coeff_init = CoeffInit::kGaussian;
    LoraInit lora_init = LoraInit::kZeroB;

    friend bool operator==(const AdapterConfig&, const AdapterConfig&) = default;
};

/// ΔW = α · Re(IDFT2(ToDense(E, c))).
struct FourierAdapter {
    EntryMatrix entries;
    CoefficientVector coeffs;
    double alpha = 300.0;
    std::size_t d1 = 0;
    std::size_t d2 = 0;

    void validate() const;
};

/// ΔW = alpha · B·A, B: d1 x r, A: r x d2.
struct LoraAdapter {
    Matrix a;
    Matrix b;
    double alpha = 1.0;

    std::size_t rank() const { return a.rows(); }
    std::size_t d1() const { return b.rows(); }
    std::size_t d2() const { return a.cols(); }
    void validate() const;
};

/// ΔW = α · B1·F·B2 with F the densified sparse coefficients. The Fourier kind
/// keeps no explicit bases and reduces to FourierAdapter.
struct GeneralBasisAdapter {
    BasisKind kind = BasisKind::kFourier;
    std::optional<Matrix> b1;  // d1 x d1
    std::optional<Matrix> b2;  // d2 x d2
    EntryMatrix entries;
    CoefficientVector coeffs;
    double alpha = 300.0;
    std::size_t d1 = 0;
    std::size_t d2 = 0;

    void validate() const;
};

using Adapter = std::variant<FourierAdapter, LoraAdapter, GeneralBasisAdapter>;

/// Gradients of the adapter's trainable state. Spectral methods fill coeffs;
/// LoRA fills a and b.
struct AdapterGrad {
    CoefficientVector coeffs;
    std::optional<Matrix> a;
    std::optional<Matrix> b;
};

/// Seeded frozen bases for a general-basis adapter. Stream layout: basis 1 from
/// Rng::stream(seed, kBasisStream), basis 2 from Rng::stream(seed, kBasisStream + 1).
inline constexpr std::uint64_t kBasisStream = 0x4241534953ULL;
std::pair<Matrix, Matrix> make_basis(BasisKind kind, std::uint64_t seed, std::size_t d1,
                                     std::size_t d2);

/// Builds one layer's adapter for a (d1 x d2) weight. Entries and bases come from
/// config.seed so every layer of the same shape shares them; init_rng draws the
/// layer's own trainable initialization.
Adapter make_adapter(const AdapterConfig& config, std::size_t d1, std::size_t d2, Rng& init_rng);

Matrix fourier_delta_w(const FourierAdapter& ad);
Matrix fourier_forward(const FourierAdapter& ad, const Matrix& w0, const Matrix& x);
CoefficientVector fourier_grad_coeffs(const FourierAdapter& ad, const Matrix& w0, const Matrix& x,
                                      const Matrix& upstream_h);
Matrix lora_delta_w(const LoraAdapter& ad);
Matrix general_basis_delta_w(const GeneralBasisAdapter& ad);

Matrix delta_w(const Adapter& ad);
std::size_t trainable_count(const Adapter& ad);
std::pair<std::size_t, std::size_t> adapter_shape(const Adapter& ad);

/// h = x·W0 + x·ΔW for batch-major x (batch x d1) and W0 (d1 x d2).
Matrix adapter_forward(const Adapter& ad, const Matrix& w0, const Matrix& x);

/// Chain rule from dL/dΔW to the adapter's trainable state.
AdapterGrad adapter_grad_from_delta(const Adapter& ad, const Matrix& grad_delta_w);

/// W0 + ΔW. Applying it twice adds ΔW twice.
Matrix merge(const Adapter& ad, const Matrix& w0);

}  // namespace spft
