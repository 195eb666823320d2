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

#include "spft/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace spft {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                    b.shape_string());
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) {
        throw Error("Matrix: dimensions must be >= 1, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
    }
    data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw Error("Matrix: dimensions must be >= 1, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
    }
    if (data_.size() != rows * cols) {
        throw Error("Matrix: data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix m) { return m *= s; }

namespace {

// o_r[j] += x_r · b[j] for four rows. The avx2 clone uses no FMA, so both
// clones round identically.
__attribute__((target_clones("avx2", "default"))) void axpy4(
    double* __restrict o0, double* __restrict o1, double* __restrict o2, double* __restrict o3,
    const double* __restrict b, double x0, double x1, double x2, double x3, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        const double bj = b[j];
        o0[j] += x0 * bj;
        o1[j] += x1 * bj;
        o2[j] += x2 * bj;
        o3[j] += x3 * bj;
    }
}

// out[r] += Σ_k coef(r, k) · src[k], four output rows at a time. The
// per-element summation order is k ascending regardless of blocking.
template <typename Coef>
void accumulate_rows(Matrix& out, const Matrix& src, std::size_t depth, Coef coef) {
    const std::size_t rows = out.rows();
    const std::size_t n = out.cols();
    std::size_t i = 0;
    for (; i + 4 <= rows; i += 4) {
        double* o0 = out.row(i).data();
        for (std::size_t k = 0; k < depth; ++k) {
            axpy4(o0, o0 + n, o0 + 2 * n, o0 + 3 * n, src.row(k).data(), coef(i, k),
                  coef(i + 1, k), coef(i + 2, k), coef(i + 3, k), n);
        }
    }
    for (; i < rows; ++i) {
        double* o = out.row(i).data();
        for (std::size_t k = 0; k < depth; ++k) {
            const double x = coef(i, k);
            const double* br = src.row(k).data();
            for (std::size_t j = 0; j < n; ++j) o[j] += x * br[j];
        }
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw Error("matmul: inner dimensions differ, " + a.shape_string() + " x " +
                    b.shape_string());
    }
    Matrix out(a.rows(), b.cols());
    accumulate_rows(out, b, a.cols(), [&a](std::size_t i, std::size_t k) { return a(i, k); });
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw Error("matmul_tn: row counts differ, " + a.shape_string() + "^T x " +
                    b.shape_string());
    }
    Matrix out(a.cols(), b.cols());
    accumulate_rows(out, b, a.rows(), [&a](std::size_t i, std::size_t k) { return a(k, i); });
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw Error("matmul_nt: column counts differ, " + a.shape_string() + " x " +
                    b.shape_string() + "^T");
    }
    return matmul(a, transpose(b));
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

double frobenius_norm(const Matrix& m) { return std::sqrt(inner(m, m)); }

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.values()) best = std::max(best, std::abs(v));
    return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double best = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) best = std::max(best, std::abs(av[i] - bv[i]));
    return best;
}

double inner(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "inner");
    return inner(a.values(), b.values());
}

double inner(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("inner: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::uint64_t content_hash(const Matrix& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : m.values()) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(seed ^ (index * kStreamMix)));
}

std::uint64_t Rng::next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * kGamma);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw Error("Rng::below: bound must be positive");
    // Rejection on the top of the range keeps the result exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

double Rng::normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix randn_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

std::vector<double> randn_vector(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

Matrix orthogonalize(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw Error("orthogonalize: matrix must be square, got " + m.shape_string());
    }
    const std::size_t n = m.rows();
    // Columns as contiguous vectors.
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) q[j][i] = m(i, j);

    for (std::size_t j = 0; j < n; ++j) {
        auto& v = q[j];
        const double original = std::sqrt(inner(v, v));
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                const double proj = inner(q[k], v);
                for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q[k][i];
            }
        }
        const double pivot = std::sqrt(inner(v, v));
        if (!(pivot > 1e-12 * std::max(original, 1.0))) {
            throw Error("orthogonalize: rank deficient at column " + std::to_string(j) +
                        " (pivot " + std::to_string(pivot) + ")");
        }
        for (double& x : v) x /= pivot;
    }

    Matrix out(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out(i, j) = q[j][i];
    return out;
}

}  // namespace spft
