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

#include "spft/dft.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace spft {

namespace {

std::vector<std::size_t> factorize(std::size_t n) {
    std::vector<std::size_t> f;
    while (n % 4 == 0) {
        f.push_back(4);
        n /= 4;
    }
    while (n % 2 == 0) {
        f.push_back(2);
        n /= 2;
    }
    for (std::size_t p = 3; p * p <= n; p += 2) {
        while (n % p == 0) {
            f.push_back(p);
            n /= p;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

std::size_t largest_prime_factor(std::size_t n) {
    std::size_t largest = 1;
    for (std::size_t p : factorize(n)) {
        if (p == 4) p = 2;
        largest = std::max(largest, p);
    }
    return largest;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// Precomputed cos(2π t/period) for t in [0, period).
std::vector<double> cosine_table(std::size_t period) {
    std::vector<double> table(period);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(period);
    for (std::size_t t = 0; t < period; ++t) table[t] = std::cos(step * static_cast<double>(t));
    return table;
}

void transform_rows_then_cols(std::vector<Complex>& grid, std::size_t d1, std::size_t d2,
                              bool inverse) {
    const Plan1D row_plan(d2);
    for (std::size_t r = 0; r < d1; ++r) {
        std::span<Complex> row(grid.data() + r * d2, d2);
        inverse ? row_plan.inverse(row) : row_plan.forward(row);
    }
    const Plan1D col_plan(d1);
    std::vector<Complex> column(d1);
    for (std::size_t c = 0; c < d2; ++c) {
        for (std::size_t r = 0; r < d1; ++r) column[r] = grid[r * d2 + c];
        inverse ? col_plan.inverse(column) : col_plan.forward(column);
        for (std::size_t r = 0; r < d1; ++r) grid[r * d2 + c] = column[r];
    }
}

}  // namespace

void validate_entries(const EntryMatrix& entries, std::size_t d1, std::size_t d2) {
    if (entries.rows.size() != entries.cols.size()) {
        throw Error("entries: rows/cols length mismatch (" + std::to_string(entries.rows.size()) +
                    " vs " + std::to_string(entries.cols.size()) + ")");
    }
    for (std::size_t l = 0; l < entries.size(); ++l) {
        if (entries.rows[l] >= d1 || entries.cols[l] >= d2) {
            throw Error("entries: index " + std::to_string(l) + " = (" +
                        std::to_string(entries.rows[l]) + "," + std::to_string(entries.cols[l]) +
                        ") outside " + std::to_string(d1) + "x" + std::to_string(d2));
        }
    }
}

bool needs_bluestein(std::size_t length) {
    return largest_prime_factor(length) > Plan1D::kMaxDirectRadix;
}

Plan1D::Plan1D(std::size_t length) : length_(length) {
    if (length == 0) throw Error("Plan1D: length must be positive");
    twiddles_.resize(length);
    for (std::size_t t = 0; t < length; ++t) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(t) /
                             static_cast<double>(length);
        twiddles_[t] = {std::cos(angle), std::sin(angle)};
    }
    if (!needs_bluestein(length)) {
        strategy_ = Strategy::kMixedRadix;
        factors_ = factorize(length);
        if (factors_.empty()) factors_.push_back(1);
        return;
    }

    strategy_ = Strategy::kBluestein;
    const std::size_t padded = next_pow2(2 * length - 1);
    inner_ = std::make_shared<const Plan1D>(padded);
    chirp_.resize(length);
    const std::size_t two_n = 2 * length;
    for (std::size_t k = 0; k < length; ++k) {
        // k² mod 2N keeps the chirp phase exact for large k.
        const std::size_t k2 = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(k) * k) % two_n);
        const double angle = -std::numbers::pi * static_cast<double>(k2) /
                             static_cast<double>(length);
        chirp_[k] = {std::cos(angle), std::sin(angle)};
    }
    kernel_fft_.assign(padded, Complex{});
    kernel_fft_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < length; ++k) {
        kernel_fft_[k] = std::conj(chirp_[k]);
        kernel_fft_[padded - k] = std::conj(chirp_[k]);
    }
    inner_->forward(kernel_fft_);
}

void Plan1D::forward(std::span<Complex> data) const {
    if (data.size() != length_) {
        throw Error("Plan1D: buffer length " + std::to_string(data.size()) + " != plan length " +
                    std::to_string(length_));
    }
    if (length_ == 1) return;
    if (strategy_ == Strategy::kMixedRadix) {
        mixed_radix(data);
    } else {
        bluestein(data);
    }
}

void Plan1D::inverse(std::span<Complex> data) const {
    for (auto& v : data) v = std::conj(v);
    forward(data);
    for (auto& v : data) v = std::conj(v);
}

void Plan1D::mixed_radix(std::span<Complex> data) const {
    std::vector<Complex> input(data.begin(), data.end());
    recurse(data.data(), input.data(), 1, 0);
}

void Plan1D::recurse(Complex* out, const Complex* in, std::size_t fstride,
                     std::size_t level) const {
    const std::size_t p = factors_[level];
    const std::size_t n_level = length_ / fstride;
    const std::size_t m = n_level / p;

    if (m == 1) {
        for (std::size_t q = 0; q < p; ++q) out[q] = in[q * fstride];
    } else {
        for (std::size_t q = 0; q < p; ++q) {
            recurse(out + q * m, in + q * fstride, fstride * p, level + 1);
        }
    }

    if (p == 2) {
        for (std::size_t u = 0; u < m; ++u) {
            const Complex t = out[u + m] * twiddles_[u * fstride];
            out[u + m] = out[u] - t;
            out[u] += t;
        }
        return;
    }
    if (p == 4) {
        for (std::size_t u = 0; u < m; ++u) {
            const Complex a0 = out[u];
            const Complex a1 = out[u + m] * twiddles_[u * fstride];
            const Complex a2 = out[u + 2 * m] * twiddles_[2 * u * fstride];
            const Complex a3 = out[u + 3 * m] * twiddles_[3 * u * fstride];
            const Complex s02 = a0 + a2;
            const Complex d02 = a0 - a2;
            const Complex s13 = a1 + a3;
            const Complex d13 = a1 - a3;
            // -i·d13 for the forward direction.
            const Complex rot(d13.imag(), -d13.real());
            out[u] = s02 + s13;
            out[u + m] = d02 + rot;
            out[u + 2 * m] = s02 - s13;
            out[u + 3 * m] = d02 - rot;
        }
        return;
    }

    std::array<Complex, kMaxDirectRadix> scratch{};
    for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t q = 0; q < p; ++q) scratch[q] = out[u + q * m];
        for (std::size_t q1 = 0; q1 < p; ++q1) {
            const std::size_t k = u + q1 * m;
            Complex sum = scratch[0];
            for (std::size_t q2 = 1; q2 < p; ++q2) {
                sum += scratch[q2] * twiddles_[((q2 * k) % n_level) * fstride];
            }
            out[k] = sum;
        }
    }
}

void Plan1D::bluestein(std::span<Complex> data) const {
    const std::size_t padded = inner_->length();
    std::vector<Complex> work(padded, Complex{});
    for (std::size_t k = 0; k < length_; ++k) work[k] = data[k] * chirp_[k];
    inner_->forward(work);
    for (std::size_t k = 0; k < padded; ++k) work[k] *= kernel_fft_[k];
    inner_->inverse(work);
    const double scale = 1.0 / static_cast<double>(padded);
    for (std::size_t k = 0; k < length_; ++k) data[k] = work[k] * scale * chirp_[k];
}

std::vector<Complex> ifft2(std::span<const Complex> grid, std::size_t d1, std::size_t d2) {
    if (grid.size() != d1 * d2 || d1 == 0 || d2 == 0) {
        throw Error("ifft2: grid of " + std::to_string(grid.size()) + " values is not " +
                    std::to_string(d1) + "x" + std::to_string(d2));
    }
    std::vector<Complex> out(grid.begin(), grid.end());
    transform_rows_then_cols(out, d1, d2, /*inverse=*/true);
    const double scale = 1.0 / static_cast<double>(d1 * d2);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<Complex> fft2(std::span<const Complex> grid, std::size_t d1, std::size_t d2) {
    if (grid.size() != d1 * d2 || d1 == 0 || d2 == 0) {
        throw Error("fft2: grid of " + std::to_string(grid.size()) + " values is not " +
                    std::to_string(d1) + "x" + std::to_string(d2));
    }
    std::vector<Complex> out(grid.begin(), grid.end());
    transform_rows_then_cols(out, d1, d2, /*inverse=*/false);
    return out;
}

Matrix ifft2_real(const Matrix& f) {
    std::vector<Complex> grid(f.values().begin(), f.values().end());
    const auto s = ifft2(grid, f.rows(), f.cols());
    Matrix out(f.rows(), f.cols());
    auto ov = out.values();
    for (std::size_t i = 0; i < s.size(); ++i) ov[i] = s[i].real();
    return out;
}

Matrix brute_force_idft2(const Matrix& f) {
    const std::size_t d1 = f.rows();
    const std::size_t d2 = f.cols();
    if (d1 * d2 > 1'000'000) {
        throw Error("brute_force_idft2: " + f.shape_string() + " exceeds the 10^6-cell guard");
    }
    Matrix out(d1, d2);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t p = 0; p < d1; ++p) {
        for (std::size_t q = 0; q < d2; ++q) {
            double sum = 0.0;
            for (std::size_t j = 0; j < d1; ++j) {
                const double row_phase = static_cast<double>((p * j) % d1) / static_cast<double>(d1);
                for (std::size_t k = 0; k < d2; ++k) {
                    const double v = f(j, k);
                    if (v == 0.0) continue;
                    const double col_phase =
                        static_cast<double>((q * k) % d2) / static_cast<double>(d2);
                    sum += v * std::cos(two_pi * (row_phase + col_phase));
                }
            }
            out(p, q) = sum / static_cast<double>(d1 * d2);
        }
    }
    return out;
}

Matrix to_dense(const EntryMatrix& entries, std::span<const double> coeffs, std::size_t d1,
                std::size_t d2) {
    validate_entries(entries, d1, d2);
    if (coeffs.size() != entries.size()) {
        throw Error("to_dense: " + std::to_string(coeffs.size()) + " coefficients for " +
                    std::to_string(entries.size()) + " entries");
    }
    Matrix f(d1, d2);
    for (std::size_t l = 0; l < entries.size(); ++l) f(entries.rows[l], entries.cols[l]) = coeffs[l];
    return f;
}

Matrix sparse_idft_real(const EntryMatrix& entries, std::span<const double> coeffs,
                        std::size_t d1, std::size_t d2) {
    validate_entries(entries, d1, d2);
    if (coeffs.size() != entries.size()) {
        throw Error("sparse_idft_real: " + std::to_string(coeffs.size()) +
                    " coefficients for " + std::to_string(entries.size()) + " entries");
    }
    Matrix out(d1, d2);
    if (entries.size() == 0) return out;

    // Phase of cell (p,q) for entry (j,k) is (p·j·d2 + q·k·d1) / (d1·d2) turns.
    const std::size_t period = d1 * d2;
    const auto table = cosine_table(period);
    const double scale = 1.0 / static_cast<double>(period);
    for (std::size_t l = 0; l < entries.size(); ++l) {
        const double c = coeffs[l] * scale;
        if (c == 0.0) continue;
        const std::size_t row_step = (static_cast<std::size_t>(entries.rows[l]) * d2) % period;
        const std::size_t col_step = (static_cast<std::size_t>(entries.cols[l]) * d1) % period;
        std::size_t row_phase = 0;
        for (std::size_t p = 0; p < d1; ++p) {
            double* o = out.row(p).data();
            std::size_t t = row_phase;
            for (std::size_t q = 0; q < d2; ++q) {
                o[q] += c * table[t];
                t += col_step;
                if (t >= period) t -= period;
            }
            row_phase += row_step;
            if (row_phase >= period) row_phase -= period;
        }
    }
    return out;
}

std::vector<double> sparse_idft_adjoint(const EntryMatrix& entries, const Matrix& upstream) {
    const std::size_t d1 = upstream.rows();
    const std::size_t d2 = upstream.cols();
    if (entries.d1 != 0 && (entries.d1 != d1 || entries.d2 != d2)) {
        throw Error("sparse_idft_adjoint: upstream " + upstream.shape_string() +
                    " does not match entry grid " + std::to_string(entries.d1) + "x" +
                    std::to_string(entries.d2));
    }
    validate_entries(entries, d1, d2);
    std::vector<double> grad(entries.size(), 0.0);
    if (entries.size() == 0) return grad;

    const std::size_t period = d1 * d2;
    const auto table = cosine_table(period);
    for (std::size_t l = 0; l < entries.size(); ++l) {
        const std::size_t row_step = (static_cast<std::size_t>(entries.rows[l]) * d2) % period;
        const std::size_t col_step = (static_cast<std::size_t>(entries.cols[l]) * d1) % period;
        std::size_t row_phase = 0;
        double sum = 0.0;
        for (std::size_t p = 0; p < d1; ++p) {
            const double* g = upstream.row(p).data();
            std::size_t t = row_phase;
            for (std::size_t q = 0; q < d2; ++q) {
                sum += g[q] * table[t];
                t += col_step;
                if (t >= period) t -= period;
            }
            row_phase += row_step;
            if (row_phase >= period) row_phase -= period;
        }
        grad[l] = sum / static_cast<double>(period);
    }
    return grad;
}

std::vector<double> dense_idft_adjoint(const EntryMatrix& entries, const Matrix& upstream) {
    const std::size_t d1 = upstream.rows();
    const std::size_t d2 = upstream.cols();
    if (entries.d1 != 0 && (entries.d1 != d1 || entries.d2 != d2)) {
        throw Error("dense_idft_adjoint: upstream " + upstream.shape_string() +
                    " does not match entry grid " + std::to_string(entries.d1) + "x" +
                    std::to_string(entries.d2));
    }
    validate_entries(entries, d1, d2);
    std::vector<Complex> grid(upstream.values().begin(), upstream.values().end());
    const auto spectrum = fft2(grid, d1, d2);
    std::vector<double> grad(entries.size());
    const double scale = 1.0 / static_cast<double>(d1 * d2);
    for (std::size_t l = 0; l < entries.size(); ++l) {
        grad[l] = spectrum[entries.rows[l] * d2 + entries.cols[l]].real() * scale;
    }
    return grad;
}

bool prefer_sparse_path(std::size_t n, std::size_t d1, std::size_t d2) {
    const double lo = static_cast<double>(std::min(d1, d2));
    const double hi = static_cast<double>(std::max(d1, d2));
    const double bound = 4.0 * (std::log2(static_cast<double>(d1)) +
                                std::log2(static_cast<double>(d2))) * hi / lo;
    return n == 0 || static_cast<double>(n) < bound;
}

Matrix idft_real(const EntryMatrix& entries, std::span<const double> coeffs, std::size_t d1,
                 std::size_t d2) {
    if (prefer_sparse_path(entries.size(), d1, d2)) {
        return sparse_idft_real(entries, coeffs, d1, d2);
    }
    return ifft2_real(to_dense(entries, coeffs, d1, d2));
}

std::vector<double> idft_adjoint(const EntryMatrix& entries, const Matrix& upstream) {
    if (prefer_sparse_path(entries.size(), upstream.rows(), upstream.cols())) {
        return sparse_idft_adjoint(entries, upstream);
    }
    return dense_idft_adjoint(entries, upstream);
}

}  // namespace spft
