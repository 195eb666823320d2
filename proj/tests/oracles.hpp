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

// Slow, obviously-correct reference computations used as test oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "spft/entries.hpp"
#include "spft/linalg.hpp"

namespace oracle {

inline spft::Matrix naive_matmul(const spft::Matrix& a, const spft::Matrix& b) {
    spft::Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
            out(i, j) = static_cast<double>(s);
        }
    return out;
}

// Re of the normalized 2D inverse DFT, summed directly in long double with
// the phase reduced to an exact rational turn before calling cos.
inline spft::Matrix idft2_real(const spft::Matrix& f) {
    const std::size_t d1 = f.rows();
    const std::size_t d2 = f.cols();
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    spft::Matrix out(d1, d2);
    for (std::size_t p = 0; p < d1; ++p)
        for (std::size_t q = 0; q < d2; ++q) {
            long double s = 0;
            for (std::size_t j = 0; j < d1; ++j)
                for (std::size_t k = 0; k < d2; ++k) {
                    if (f(j, k) == 0.0) continue;
                    const long double turn =
                        static_cast<long double>((p * j) % d1) / d1 +
                        static_cast<long double>((q * k) % d2) / d2;
                    s += f(j, k) * std::cos(two_pi * turn);
                }
            out(p, q) = static_cast<double>(s / (static_cast<long double>(d1) * d2));
        }
    return out;
}

// Re(IDFT) of a sparse spectrum evaluated one cosine at a time.
inline spft::Matrix sparse_idft_real(const spft::EntryMatrix& e, const std::vector<double>& c) {
    spft::Matrix f(e.d1, e.d2);
    for (std::size_t i = 0; i < e.size(); ++i) f(e.rows[i], e.cols[i]) += c[i];
    return idft2_real(f);
}

inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x,
                                                   int sign) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::size_t k = 0; k < n; ++k) {
        long double re = 0;
        long double im = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const long double a = sign * two_pi * static_cast<long double>((j * k) % n) / n;
            re += x[j].real() * std::cos(a) - x[j].imag() * std::sin(a);
            im += x[j].real() * std::sin(a) + x[j].imag() * std::cos(a);
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

// Central differences of a scalar function over a parameter vector.
inline std::vector<double> central_diff(std::vector<double>& params,
                                        const std::function<double()>& f, double rel_step = 1e-5) {
    std::vector<double> g(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        const double h = rel_step * std::max(1.0, std::abs(saved));
        params[i] = saved + h;
        const double up = f();
        params[i] = saved - h;
        const double down = f();
        params[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor), floor guarding near-zero entries.
inline double max_rel_err(const std::vector<double>& a, const std::vector<double>& b,
                          double floor = 1e-7) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::max({std::abs(a[i]), std::abs(b[i]), floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / d);
    }
    return worst;
}

// Singular values of m by power iteration on mᵀm with deflation.
// All singular values, descending, by one-sided Jacobi in long double.
inline std::vector<double> singular_values(const spft::Matrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<long double>> c(cols, std::vector<long double>(rows));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) c[j][i] = m(i, j);
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                long double a = 0, b = 0, g = 0;
                for (std::size_t i = 0; i < rows; ++i) {
                    a += c[p][i] * c[p][i];
                    b += c[q][i] * c[q][i];
                    g += c[p][i] * c[q][i];
                }
                if (std::abs(g) <= 1e-30L * std::sqrt(a * b) || g == 0) continue;
                rotated = true;
                const long double zeta = (b - a) / (2 * g);
                const long double t = (zeta >= 0 ? 1 : -1) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
                const long double cs = 1 / std::sqrt(1 + t * t), sn = cs * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const long double x = c[p][i], y = c[q][i];
                    c[p][i] = cs * x - sn * y;
                    c[q][i] = sn * x + cs * y;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> out;
    for (const auto& col : c) {
        long double s = 0;
        for (long double v : col) s += v * v;
        out.push_back(static_cast<double>(std::sqrt(s)));
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

}  // namespace oracle
