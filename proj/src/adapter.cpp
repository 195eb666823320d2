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

#include "spft/adapter.hpp"

#include <cmath>

#include "spft/dft.hpp"

namespace spft {

namespace {

void check_coeffs(const EntryMatrix& entries, const CoefficientVector& coeffs, std::size_t d1,
                  std::size_t d2, const char* who) {
    if (d1 == 0 || d2 == 0) throw Error(std::string(who) + ": shape must be at least 1x1");
    if (entries.d1 != d1 || entries.d2 != d2) {
        throw Error(std::string(who) + ": entry grid " + std::to_string(entries.d1) + "x" +
                    std::to_string(entries.d2) + " does not match weight " + std::to_string(d1) +
                    "x" + std::to_string(d2));
    }
    validate_entries(entries, d1, d2);
    if (coeffs.size() != entries.size()) {
        throw Error(std::string(who) + ": " + std::to_string(coeffs.size()) +
                    " coefficients for " + std::to_string(entries.size()) + " entries");
    }
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!std::isfinite(coeffs[i])) {
            throw Error(std::string(who) + ": coefficient " + std::to_string(i) + " is not finite");
        }
    }
}

void check_base(const Matrix& w0, std::size_t d1, std::size_t d2, const char* who) {
    if (w0.rows() != d1 || w0.cols() != d2) {
        throw Error(std::string(who) + ": base weight " + w0.shape_string() +
                    " does not match adapter (" + std::to_string(d1) + "x" + std::to_string(d2) +
                    ")");
    }
}

// Σ_l c_l · B1[:, j_l] ⊗ B2[k_l, :]
Matrix sparse_sandwich(const Matrix& b1, const EntryMatrix& entries,
                       const CoefficientVector& coeffs, const Matrix& b2) {
    Matrix out(b1.rows(), b2.cols());
    for (std::size_t l = 0; l < entries.size(); ++l) {
        const std::size_t j = entries.rows[l];
        const auto b2_row = b2.row(entries.cols[l]);
        for (std::size_t p = 0; p < b1.rows(); ++p) {
            const double s = coeffs[l] * b1(p, j);
            if (s == 0.0) continue;
            double* o = out.row(p).data();
            for (std::size_t q = 0; q < b2_row.size(); ++q) o[q] += s * b2_row[q];
        }
    }
    return out;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::kFourier: return "fourier";
        case Method::kLora: return "lora";
        case Method::kGeneralBasis: return "general-basis";
    }
    return "unknown";
}

std::string to_string(BasisKind k) {
    switch (k) {
        case BasisKind::kFourier: return "fourier";
        case BasisKind::kRandom: return "random";
        case BasisKind::kOrthogonal: return "orthogonal";
    }
    return "unknown";
}

Method parse_method(const std::string& s) {
    if (s == "fourier") return Method::kFourier;
    if (s == "lora") return Method::kLora;
    if (s == "general-basis" || s == "general") return Method::kGeneralBasis;
    throw Error("unknown method '" + s + "' (expected fourier, lora or general-basis)");
}

BasisKind parse_basis(const std::string& s) {
    if (s == "fourier") return BasisKind::kFourier;
    if (s == "random") return BasisKind::kRandom;
    if (s == "orthogonal") return BasisKind::kOrthogonal;
    throw Error("unknown basis '" + s + "' (expected fourier, random or orthogonal)");
}

void FourierAdapter::validate() const { check_coeffs(entries, coeffs, d1, d2, "FourierAdapter"); }

void LoraAdapter::validate() const {
    if (a.rows() != b.cols()) {
        throw Error("LoraAdapter: A " + a.shape_string() + " and B " + b.shape_string() +
                    " disagree on rank");
    }
}

void GeneralBasisAdapter::validate() const {
    check_coeffs(entries, coeffs, d1, d2, "GeneralBasisAdapter");
    if (kind == BasisKind::kFourier) {
        if (b1 || b2) throw Error("GeneralBasisAdapter: fourier kind stores no explicit bases");
        return;
    }
    if (!b1 || !b2) throw Error("GeneralBasisAdapter: " + to_string(kind) + " kind needs bases");
    if (b1->rows() != d1 || b1->cols() != d1 || b2->rows() != d2 || b2->cols() != d2) {
        throw Error("GeneralBasisAdapter: bases " + b1->shape_string() + ", " +
                    b2->shape_string() + " do not match " + std::to_string(d1) + "x" +
                    std::to_string(d2));
    }
}

std::pair<Matrix, Matrix> make_basis(BasisKind kind, std::uint64_t seed, std::size_t d1,
                                     std::size_t d2) {
    if (kind == BasisKind::kFourier) throw Error("make_basis: the Fourier basis is implicit");
    Rng r1 = Rng::stream(seed, kBasisStream);
    Rng r2 = Rng::stream(seed, kBasisStream + 1);
    Matrix b1 = randn_matrix(r1, d1, d1);
    Matrix b2 = randn_matrix(r2, d2, d2);
    if (kind == BasisKind::kOrthogonal) {
        return {orthogonalize(b1), orthogonalize(b2)};
    }
    return {std::move(b1), std::move(b2)};
}

Adapter make_adapter(const AdapterConfig& config, std::size_t d1, std::size_t d2, Rng& init_rng) {
    if (config.method == Method::kLora) {
        const std::size_t r = config.n_or_r;
        if (r == 0) throw Error("make_adapter: LoRA rank must be >= 1");
        if (config.lora_init == LoraInit::kZeroB) {
            Matrix a = randn_matrix(init_rng, r, d2);
            a *= 1.0 / std::sqrt(static_cast<double>(r));
            return LoraAdapter{std::move(a), Matrix(d1, r), config.alpha};
        }
        const double scale = std::pow(2.0 / static_cast<double>(d1 * r), 0.25);
        Matrix a = randn_matrix(init_rng, r, d2);
        Matrix b = randn_matrix(init_rng, d1, r);
        a *= scale;
        b *= scale;
        return LoraAdapter{std::move(a), std::move(b), config.alpha};
    }

    EntryMatrix entries = sample_entries(config.seed, d1, d2, config.n_or_r, config.bias);
    CoefficientVector coeffs(entries.size(), 0.0);
    if (config.coeff_init == CoeffInit::kGaussian) coeffs = randn_vector(init_rng, entries.size());

    if (config.method == Method::kFourier) {
        return FourierAdapter{std::move(entries), std::move(coeffs), config.alpha, d1, d2};
    }
    GeneralBasisAdapter ad;
    ad.kind = config.basis;
    ad.entries = std::move(entries);
    ad.coeffs = std::move(coeffs);
    ad.alpha = config.alpha;
    ad.d1 = d1;
    ad.d2 = d2;
    if (config.basis != BasisKind::kFourier) {
        auto [b1, b2] = make_basis(config.basis, config.seed, d1, d2);
        ad.b1 = std::move(b1);
        ad.b2 = std::move(b2);
    }
    return ad;
}

Matrix fourier_delta_w(const FourierAdapter& ad) {
    ad.validate();
    Matrix dw = idft_real(ad.entries, ad.coeffs, ad.d1, ad.d2);
    dw *= ad.alpha;
    return dw;
}

Matrix fourier_forward(const FourierAdapter& ad, const Matrix& w0, const Matrix& x) {
    return adapter_forward(Adapter{ad}, w0, x);
}

CoefficientVector fourier_grad_coeffs(const FourierAdapter& ad, const Matrix& w0, const Matrix& x,
                                      const Matrix& upstream_h) {
    ad.validate();
    check_base(w0, ad.d1, ad.d2, "fourier_grad_coeffs");
    if (x.cols() != ad.d1) {
        throw Error("fourier_grad_coeffs: input " + x.shape_string() + " does not feed a " +
                    std::to_string(ad.d1) + "-wide layer");
    }
    if (upstream_h.rows() != x.rows() || upstream_h.cols() != ad.d2) {
        throw Error("fourier_grad_coeffs: upstream " + upstream_h.shape_string() +
                    " does not match output (" + std::to_string(x.rows()) + "x" +
                    std::to_string(ad.d2) + ")");
    }
    auto g = idft_adjoint(ad.entries, matmul_tn(x, upstream_h));
    for (double& v : g) v *= ad.alpha;
    return g;
}

Matrix lora_delta_w(const LoraAdapter& ad) {
    ad.validate();
    Matrix dw = matmul(ad.b, ad.a);
    dw *= ad.alpha;
    return dw;
}

Matrix general_basis_delta_w(const GeneralBasisAdapter& ad) {
    ad.validate();
    if (ad.kind == BasisKind::kFourier) {
        return fourier_delta_w(FourierAdapter{ad.entries, ad.coeffs, ad.alpha, ad.d1, ad.d2});
    }
    Matrix dw = sparse_sandwich(*ad.b1, ad.entries, ad.coeffs, *ad.b2);
    dw *= ad.alpha;
    return dw;
}

Matrix delta_w(const Adapter& ad) {
    return std::visit(
        [](const auto& a) -> Matrix {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FourierAdapter>) return fourier_delta_w(a);
            else if constexpr (std::is_same_v<T, LoraAdapter>) return lora_delta_w(a);
            else return general_basis_delta_w(a);
        },
        ad);
}

std::size_t trainable_count(const Adapter& ad) {
    return std::visit(
        [](const auto& a) -> std::size_t {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, LoraAdapter>) return a.a.size() + a.b.size();
            else return a.coeffs.size();
        },
        ad);
}

std::pair<std::size_t, std::size_t> adapter_shape(const Adapter& ad) {
    return std::visit(
        [](const auto& a) -> std::pair<std::size_t, std::size_t> {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, LoraAdapter>) return {a.d1(), a.d2()};
            else return {a.d1, a.d2};
        },
        ad);
}

Matrix adapter_forward(const Adapter& ad, const Matrix& w0, const Matrix& x) {
    const auto [d1, d2] = adapter_shape(ad);
    check_base(w0, d1, d2, "adapter_forward");
    if (x.cols() != d1) {
        throw Error("adapter_forward: input " + x.shape_string() + " does not feed weight " +
                    w0.shape_string());
    }
    Matrix h = matmul(x, w0);
    h += matmul(x, delta_w(ad));
    return h;
}

AdapterGrad adapter_grad_from_delta(const Adapter& ad, const Matrix& grad_delta_w) {
    const auto [d1, d2] = adapter_shape(ad);
    check_base(grad_delta_w, d1, d2, "adapter_grad_from_delta");
    AdapterGrad g;
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FourierAdapter>) {
                g.coeffs = idft_adjoint(a.entries, grad_delta_w);
                for (double& v : g.coeffs) v *= a.alpha;
            } else if constexpr (std::is_same_v<T, LoraAdapter>) {
                Matrix ga = matmul_tn(a.b, grad_delta_w);  // Bᵀ·G
                Matrix gb = matmul_nt(grad_delta_w, a.a);  // G·Aᵀ
                ga *= a.alpha;
                gb *= a.alpha;
                g.a = std::move(ga);
                g.b = std::move(gb);
            } else {
                if (a.kind == BasisKind::kFourier) {
                    g.coeffs = idft_adjoint(a.entries, grad_delta_w);
                    for (double& v : g.coeffs) v *= a.alpha;
                    return;
                }
                // dL/dF = α·B1ᵀ·G·B2ᵀ, read off at the entries.
                const Matrix gf = matmul_nt(matmul_tn(*a.b1, grad_delta_w), *a.b2);
                g.coeffs.resize(a.entries.size());
                for (std::size_t l = 0; l < a.entries.size(); ++l) {
                    g.coeffs[l] = a.alpha * gf(a.entries.rows[l], a.entries.cols[l]);
                }
            }
        },
        ad);
    return g;
}

Matrix merge(const Adapter& ad, const Matrix& w0) {
    const auto [d1, d2] = adapter_shape(ad);
    check_base(w0, d1, d2, "merge");
    return w0 + delta_w(ad);
}

}  // namespace spft
