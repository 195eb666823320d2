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

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spft/entries.hpp"
#include "spft/linalg.hpp"

namespace spft {

using Complex = std::complex<double>;

/// Precomputed 1D transform of a fixed length. Smooth lengths use a mixed-radix
/// decimation-in-time recursion; lengths with a prime factor above
/// kMaxDirectRadix go through Bluestein's chirp-z with a power-of-two inner plan.
/// Both directions are unnormalized: forward uses e^{-i...}, inverse e^{+i...}.
class Plan1D {
public:
    static constexpr std::size_t kMaxDirectRadix = 32;
    enum class Strategy { kMixedRadix, kBluestein };

    explicit Plan1D(std::size_t length);

    std::size_t length() const { return length_; }
    Strategy strategy() const { return strategy_; }

    void forward(std::span<Complex> data) const;
    void inverse(std::span<Complex> data) const;

private:
    void mixed_radix(std::span<Complex> data) const;
    void recurse(Complex* out, const Complex* in, std::size_t fstride, std::size_t level) const;
    void bluestein(std::span<Complex> data) const;

    std::size_t length_;
    Strategy strategy_;
    std::vector<std::size_t> factors_;
    std::vector<Complex> twiddles_;  // e^{-2πi t/length}

    // Bluestein state.
    std::vector<Complex> chirp_;      // e^{-iπ k²/length}
    std::vector<Complex> kernel_fft_;  // forward transform of the conjugate chirp, padded
    std::shared_ptr<const Plan1D> inner_;  // padded power-of-two plan
};

/// Returns true iff length has a prime factor above Plan1D::kMaxDirectRadix.
bool needs_bluestein(std::size_t length);

/// Normalized complex 2D inverse transform of a row-major d1 x d2 grid:
/// S_{p,q} = 1/(d1·d2) Σ F_{j,k} e^{+i2π(pj/d1 + qk/d2)}.
std::vector<Complex> ifft2(std::span<const Complex> grid, std::size_t d1, std::size_t d2);
/// Unnormalized complex 2D forward transform (e^{-i...}).
std::vector<Complex> fft2(std::span<const Complex> grid, std::size_t d1, std::size_t d2);

/// Re(ifft2(F)) for a real spectral matrix F.
Matrix ifft2_real(const Matrix& f);

/// Literal double-sum evaluation of the normalized inverse transform (real part).
/// Test oracle; refuses grids with more than 10^6 cells.
Matrix brute_force_idft2(const Matrix& f);

/// ToDense: scatter coefficients into a zero d1 x d2 spectral matrix.
Matrix to_dense(const EntryMatrix& entries, std::span<const double> coeffs, std::size_t d1,
                std::size_t d2);

/// 1/(d1·d2) Σ_l c_l cos(2π(p·j_l/d1 + q·k_l/d2)), evaluated entry by entry.
Matrix sparse_idft_real(const EntryMatrix& entries, std::span<const double> coeffs,
                        std::size_t d1, std::size_t d2);

/// Adjoint of sparse_idft_real: g_l = 1/(d1·d2) Σ_{p,q} G_{p,q} cos(2π(p·j_l/d1 + q·k_l/d2)).
std::vector<double> sparse_idft_adjoint(const EntryMatrix& entries, const Matrix& upstream);

/// Same map as sparse_idft_adjoint, computed through one dense forward FFT.
std::vector<double> dense_idft_adjoint(const EntryMatrix& entries, const Matrix& upstream);

/// Crossover heuristic between the O(n·d1·d2) entry loop and the dense FFT:
/// sparse iff n < 4·(log2 d1 + log2 d2)·max(d1,d2)/min(d1,d2).
bool prefer_sparse_path(std::size_t n, std::size_t d1, std::size_t d2);

/// Dispatching versions used by the adapters. Both paths agree to ~1e-12.
Matrix idft_real(const EntryMatrix& entries, std::span<const double> coeffs, std::size_t d1,
                 std::size_t d2);
std::vector<double> idft_adjoint(const EntryMatrix& entries, const Matrix& upstream);

}  // namespace spft
