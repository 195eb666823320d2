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

#include "spft/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <unistd.h>

#include "spft/sampling.hpp"

namespace spft {

namespace {

using Code = CheckpointError::Code;

class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1, "u8")); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2, "u16")); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4, "u32")); }
    std::uint64_t u64() { return get(8, "u64"); }
    double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
    std::string str(std::size_t n) {
        need(n, "name");
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::size_t position() const { return pos_; }

    void need(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw CheckpointError(Code::kTruncated,
                                  "checkpoint truncated: need " + std::to_string(n) +
                                      " bytes for " + what + " at offset " +
                                      std::to_string(pos_) + ", have " +
                                      std::to_string(remaining()));
        }
    }

private:
    std::uint64_t get(int n, const char* what) {
        need(static_cast<std::size_t>(n), what);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

[[noreturn]] void inconsistent(const std::string& layer, const std::string& what) {
    throw CheckpointError(Code::kInconsistentLayers, "layer '" + layer + "': " + what);
}

void write_coeffs(Writer& w, const CoefficientVector& c) {
    for (double v : c) w.f32(v);
}

CoefficientVector read_coeffs(Reader& r, std::size_t n) {
    r.need(4 * n, "coefficients");
    CoefficientVector c(n);
    for (double& v : c) v = r.f32();
    return c;
}

Matrix read_matrix(Reader& r, std::size_t rows, std::size_t cols, const char* what) {
    r.need(4 * rows * cols, what);
    Matrix m(rows, cols);
    for (double& v : m.values()) v = r.f32();
    return m;
}

// Entry regeneration, shared across layers of equal shape.
class EntryCache {
public:
    explicit EntryCache(const AdapterConfig& config) : config_(config) {}
    const EntryMatrix& get(std::size_t d1, std::size_t d2) {
        auto key = std::make_pair(d1, d2);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, sample_entries(config_.seed, d1, d2, config_.n_or_r,
                                                    config_.bias))
                     .first;
        }
        return it->second;
    }

private:
    const AdapterConfig& config_;
    std::map<std::pair<std::size_t, std::size_t>, EntryMatrix> cache_;
};

void check_spectral_layer(const std::string& name, const EntryMatrix& entries, double alpha,
                          std::size_t d1, std::size_t d2, const AdapterConfig& config,
                          EntryCache& cache) {
    if (entries.size() != config.n_or_r) {
        inconsistent(name, "n = " + std::to_string(entries.size()) + ", config n = " +
                               std::to_string(config.n_or_r));
    }
    if (static_cast<float>(alpha) != static_cast<float>(config.alpha)) {
        inconsistent(name, "alpha differs from the shared alpha");
    }
    if (entries.seed != config.seed || entries != cache.get(d1, d2)) {
        inconsistent(name, "entries are not the ones generated by the shared seed and bias");
    }
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const AdapterConfig& config,
                                            std::span<const LayerRecord> layers) {
    if (config.n_or_r > 0xFFFFFFFFULL || layers.size() > 0xFFFFFFFFULL) {
        throw CheckpointError(Code::kBadDimensions, "checkpoint: n/r or layer count exceeds u32");
    }
    Writer w;
    w.raw(kCheckpointMagic, 4);
    w.u16(kCheckpointVersion);
    w.u8(static_cast<std::uint8_t>(config.method));
    w.f32(config.alpha);
    w.u64(config.seed);
    w.u32(static_cast<std::uint32_t>(config.n_or_r));
    w.u32(static_cast<std::uint32_t>(layers.size()));
    w.u8(static_cast<std::uint8_t>(config.bias.mode));
    w.f32(config.bias.is_biased() ? config.bias.center_frequency : 0.0);
    w.f32(config.bias.is_biased() ? config.bias.bandwidth : 0.0);

    EntryCache cache(config);
    for (const auto& layer : layers) {
        if (layer.name.size() > 0xFFFF) inconsistent(layer.name.substr(0, 32), "name too long");
        const auto [d1, d2] = adapter_shape(layer.adapter);
        if (d1 > 0xFFFFFFFFULL || d2 > 0xFFFFFFFFULL) {
            throw CheckpointError(Code::kBadDimensions, "layer '" + layer.name + "': dims exceed u32");
        }
        w.u16(static_cast<std::uint16_t>(layer.name.size()));
        w.raw(layer.name.data(), layer.name.size());
        w.u32(static_cast<std::uint32_t>(d1));
        w.u32(static_cast<std::uint32_t>(d2));

        std::visit(
            [&](const auto& ad) {
                using T = std::decay_t<decltype(ad)>;
                if constexpr (std::is_same_v<T, FourierAdapter>) {
                    if (config.method != Method::kFourier) inconsistent(layer.name, "not a fourier layer");
                    ad.validate();
                    check_spectral_layer(layer.name, ad.entries, ad.alpha, d1, d2, config, cache);
                    write_coeffs(w, ad.coeffs);
                } else if constexpr (std::is_same_v<T, LoraAdapter>) {
                    if (config.method != Method::kLora) inconsistent(layer.name, "not a lora layer");
                    ad.validate();
                    if (ad.rank() != config.n_or_r) {
                        inconsistent(layer.name, "rank " + std::to_string(ad.rank()) +
                                                     " != config r " +
                                                     std::to_string(config.n_or_r));
                    }
                    if (static_cast<float>(ad.alpha) != static_cast<float>(config.alpha)) {
                        inconsistent(layer.name, "alpha differs from the shared alpha");
                    }
                    for (double v : ad.a.values()) w.f32(v);
                    for (double v : ad.b.values()) w.f32(v);
                } else {
                    if (config.method != Method::kGeneralBasis) {
                        inconsistent(layer.name, "not a general-basis layer");
                    }
                    ad.validate();
                    if (ad.kind != config.basis) inconsistent(layer.name, "basis kind differs");
                    check_spectral_layer(layer.name, ad.entries, ad.alpha, d1, d2, config, cache);
                    w.u8(static_cast<std::uint8_t>(ad.kind));
                    write_coeffs(w, ad.coeffs);
                }
            },
            layer.adapter);
    }
    return w.take();
}

CheckpointContents decode_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
        throw CheckpointError(Code::kBadMagic, "checkpoint: bad magic");
    }
    Reader r(bytes.subspan(4));
    const std::uint16_t version = r.u16();
    if (version != kCheckpointVersion) {
        throw CheckpointError(Code::kUnsupportedVersion,
                              "checkpoint: unsupported version " + std::to_string(version));
    }
    CheckpointContents out;
    AdapterConfig& config = out.config;
    const std::uint8_t method = r.u8();
    if (method < 1 || method > 3) {
        throw CheckpointError(Code::kBadMethod, "checkpoint: unknown method byte " +
                                                    std::to_string(method));
    }
    config.method = static_cast<Method>(method);
    config.alpha = r.f32();
    config.seed = r.u64();
    config.n_or_r = r.u32();
    const std::uint32_t layer_count = r.u32();
    const std::uint8_t bias_mode = r.u8();
    const double fc = r.f32();
    const double bandwidth = r.f32();
    if (bias_mode > 1) {
        throw CheckpointError(Code::kBadMethod, "checkpoint: unknown bias mode " +
                                                    std::to_string(bias_mode));
    }
    config.bias = bias_mode == 1 ? BiasSpec::bandpass(fc, bandwidth) : BiasSpec::none();
    if (config.method == Method::kLora && config.n_or_r == 0) {
        throw CheckpointError(Code::kBadDimensions, "checkpoint: LoRA rank 0");
    }

    EntryCache cache(config);
    bool basis_seen = false;
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        LayerRecord layer;
        const std::uint16_t name_len = r.u16();
        layer.name = r.str(name_len);
        const std::size_t d1 = r.u32();
        const std::size_t d2 = r.u32();
        // 2^31 cells keeps every index computation inside 64 bits.
        if (d1 == 0 || d2 == 0 || d1 * d2 > (std::size_t{1} << 31)) {
            throw CheckpointError(Code::kBadDimensions, "layer '" + layer.name + "': dims " +
                                                            std::to_string(d1) + "x" +
                                                            std::to_string(d2) + " out of range");
        }
        if (config.method != Method::kLora && config.n_or_r > d1 * d2) {
            throw CheckpointError(Code::kBadDimensions,
                                  "layer '" + layer.name + "': n exceeds its " +
                                      std::to_string(d1) + "x" + std::to_string(d2) + " grid");
        }
        switch (config.method) {
            case Method::kFourier: {
                CoefficientVector c = read_coeffs(r, config.n_or_r);
                layer.adapter = FourierAdapter{cache.get(d1, d2), std::move(c), config.alpha, d1, d2};
                break;
            }
            case Method::kLora: {
                Matrix a = read_matrix(r, config.n_or_r, d2, "lora A");
                Matrix b = read_matrix(r, d1, config.n_or_r, "lora B");
                layer.adapter = LoraAdapter{std::move(a), std::move(b), config.alpha};
                break;
            }
            case Method::kGeneralBasis: {
                const std::uint8_t kind = r.u8();
                if (kind > 2) {
                    throw CheckpointError(Code::kBadMethod, "layer '" + layer.name +
                                                                "': unknown basis kind " +
                                                                std::to_string(kind));
                }
                const auto basis = static_cast<BasisKind>(kind);
                if (basis_seen && basis != config.basis) {
                    throw CheckpointError(Code::kInconsistentLayers,
                                          "layer '" + layer.name + "': basis kind differs");
                }
                basis_seen = true;
                config.basis = basis;
                GeneralBasisAdapter ad;
                ad.kind = basis;
                ad.entries = cache.get(d1, d2);
                ad.coeffs = read_coeffs(r, config.n_or_r);
                ad.alpha = config.alpha;
                ad.d1 = d1;
                ad.d2 = d2;
                if (basis != BasisKind::kFourier) {
                    auto [b1, b2] = make_basis(basis, config.seed, d1, d2);
                    ad.b1 = std::move(b1);
                    ad.b2 = std::move(b2);
                }
                layer.adapter = std::move(ad);
                break;
            }
        }
        out.layers.push_back(std::move(layer));
    }
    if (r.remaining() != 0) {
        throw CheckpointError(Code::kTrailingBytes, "checkpoint: " + std::to_string(r.remaining()) +
                                                        " trailing bytes after the last layer");
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError(Code::kIo, "cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw CheckpointError(Code::kIo, "write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw CheckpointError(Code::kIo, "cannot move checkpoint into " + path.string());
    }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError(Code::kIo, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint64_t save_checkpoint(const std::filesystem::path& path, const AdapterConfig& config,
                              std::span<const LayerRecord> layers) {
    const auto bytes = encode_checkpoint(config, layers);
    write_file_atomic(path, bytes);
    return bytes.size();
}

CheckpointContents load_checkpoint(const std::filesystem::path& path) {
    return decode_checkpoint(read_file(path));
}

std::uint64_t coefficient_payload_bytes(std::span<const LayerRecord> layers) {
    std::uint64_t total = 0;
    for (const auto& layer : layers) total += 4 * trainable_count(layer.adapter);
    return total;
}

double size_ratio(const BudgetReport& a, const BudgetReport& b) {
    if (b.bytes == 0) throw Error("size_ratio: denominator has no payload");
    return static_cast<double>(a.bytes) / static_cast<double>(b.bytes);
}

void write_raw_matrix(const std::filesystem::path& path, const Matrix& m) {
    Writer w;
    w.u64(m.rows());
    w.u64(m.cols());
    for (double v : m.values()) w.f32(v);
    write_file_atomic(path, w.take());
}

Matrix read_raw_matrix(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    Reader r(bytes);
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (rows == 0 || cols == 0 || rows > (1u << 24) || cols > (1u << 24)) {
        throw CheckpointError(Code::kBadDimensions, path.string() + ": dims " +
                                                        std::to_string(rows) + "x" +
                                                        std::to_string(cols) + " out of range");
    }
    Matrix m = read_matrix(r, rows, cols, "weights");
    if (r.remaining() != 0) {
        throw CheckpointError(Code::kTrailingBytes, path.string() + ": trailing bytes");
    }
    return m;
}

}  // namespace spft
