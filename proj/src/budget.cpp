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

#include "spft/budget.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace spft {

namespace {

struct Printed {
    double value;
    double unit;
};

// "295K" -> {295000, 1000}; "4.8K" -> {4800, 100}; "1.13MB" -> {1.13 * 2^20, ...}.
Printed parse_printed(std::string_view text, double k, double m) {
    std::size_t pos = 0;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '.')) {
        ++pos;
    }
    const std::string number(text.substr(0, pos));
    const auto dot = number.find('.');
    const int decimals = dot == std::string::npos ? 0 : static_cast<int>(number.size() - dot - 1);
    double scale = 1.0;
    if (pos < text.size() && text[pos] == 'K') scale = k;
    if (pos < text.size() && text[pos] == 'M') scale = m;
    return {std::stod(number) * scale, std::pow(10.0, -decimals) * scale};
}

PublishedRow row(std::string preset, BudgetMethod method, std::string_view params,
                 std::string_view bytes, std::optional<std::string> note = std::nullopt) {
    const Printed p = parse_printed(params, 1e3, 1e6);
    const Printed b = parse_printed(bytes, 1024.0, 1024.0 * 1024.0);
    return {std::move(preset), method, p.value, p.unit, b.value,
            std::string(params) + " / " + std::string(bytes), std::move(note)};
}

}  // namespace

const std::vector<ModelPreset>& model_presets() {
    static const std::vector<ModelPreset> presets = {
        {"roberta-base", "RoBERTa Base", 768, 24},
        {"roberta-large", "RoBERTa Large", 1024, 48},
        {"gpt2-medium", "GPT-2 Medium", 1024, 48},
        {"gpt2-large", "GPT-2 Large", 1280, 72},
        {"llama2-7b", "LLaMA-2 7B", 4096, 64},
        {"llama2-13b", "LLaMA-2 13B", 5120, 80},
        {"vit-base", "ViT Base", 768, 24},
        {"vit-large", "ViT Large", 1024, 48},
    };
    return presets;
}

const ModelPreset& find_preset(const std::string& name) {
    for (const auto& p : model_presets()) {
        if (p.name == name) return p;
    }
    std::string known;
    for (const auto& p : model_presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw Error("unknown preset '" + name + "' (known: " + known + ")");
}

BudgetReport budget(std::size_t width, std::size_t layers, BudgetMethod method) {
    if (width == 0 || layers == 0) throw Error("budget: width and layer count must be >= 1");
    BudgetReport r{"custom", method.method, method.n_or_r, width, layers, 0, 0, 0};
    const std::uint64_t d = width;
    const std::uint64_t lt = layers;
    const std::uint64_t k = method.n_or_r;
    if (method.method == Method::kLora) {
        r.trainable_params = 2 * d * lt * k;
        r.params_with_entries = r.trainable_params;
    } else {
        r.trainable_params = k * lt;
        r.params_with_entries = k * (2 + lt);
    }
    r.bytes = kBytesPerParam * r.trainable_params;
    return r;
}

BudgetReport budget(const ModelPreset& model, BudgetMethod method) {
    BudgetReport r = budget(model.width, model.layers, method);
    r.model = model.name;
    return r;
}

const std::vector<PublishedRow>& published_rows() {
    using M = BudgetMethod;
    static const std::vector<PublishedRow> rows = {
        row("roberta-base", M::lora(4), "147K", "574KB"),
        row("roberta-base", M::fourier(200), "4.8K", "18.8KB"),
        row("roberta-base", M::lora(8), "295K", "1.13MB"),
        row("roberta-base", M::fourier(1000), "24K", "94KB",
            "printed as n=200; 24K only follows from n=1000 (200 x 24 = 4,800), read as n=1000"),
        row("roberta-large", M::lora(4), "393K", "1.5MB"),
        row("roberta-large", M::fourier(200), "9.6K", "36.5KB"),
        row("roberta-large", M::lora(8), "786K", "3MB"),
        row("roberta-large", M::fourier(1000), "48K", "183KB"),
        row("gpt2-medium", M::lora(4), "350K", "1.34MB",
            "printed 350K, but 2 x 1024 x 48 x 4 = 393,216"),
        row("gpt2-medium", M::fourier(500), "24K", "94KB"),
        row("gpt2-medium", M::lora(8), "786K", "3MB"),
        row("gpt2-medium", M::fourier(1000), "48K", "188KB"),
        row("gpt2-large", M::lora(4), "737K", "2.81MB"),
        row("gpt2-large", M::fourier(500), "36K", "141KB"),
        row("gpt2-large", M::lora(8), "1.47M", "5.74MB"),
        row("gpt2-large", M::fourier(1000), "72K", "282KB"),
        row("llama2-7b", M::lora(16), "8.39M", "32.8MB"),
        row("llama2-7b", M::fourier(1000), "64K", "250KB"),
        row("llama2-7b", M::lora(64), "33.5M", "131.1MB"),
        row("llama2-7b", M::fourier(2000), "128K", "500KB"),
        row("llama2-13b", M::lora(16), "13.1M", "51.2MB"),
        row("llama2-13b", M::fourier(1000), "80K", "312KB"),
        row("llama2-13b", M::lora(64), "52.4M", "204.8MB"),
        row("llama2-13b", M::fourier(2000), "160K", "625KB"),
        row("vit-base", M::lora(8), "295K", "1.13MB"),
        row("vit-base", M::fourier(3000), "72K", "281KB"),
        row("vit-base", M::lora(16), "590K", "2.25MB"),
        row("vit-base", M::fourier(10000), "239K", "934KB",
            "printed 239K, but 10,000 x 24 = 240,000; the printed bytes follow the 239K figure"),
        row("vit-large", M::lora(8), "786K", "2.93MB"),
        row("vit-large", M::fourier(3000), "144K", "563KB"),
        row("vit-large", M::lora(16), "1.57M", "6MB"),
        row("vit-large", M::fourier(10000), "480K", "1.83MB"),
    };
    return rows;
}

RowCheck check_row(const PublishedRow& r) {
    RowCheck c{&r, budget(find_preset(r.preset), r.method), false, 0.0};
    const double computed = static_cast<double>(c.report.trainable_params);
    c.params_match = std::abs(computed - r.printed_params) < r.param_unit;
    c.bytes_rel_error = std::abs(static_cast<double>(c.report.bytes) - r.printed_bytes) /
                        r.printed_bytes;
    return c;
}

std::string format_bytes(std::uint64_t bytes) {
    static constexpr const char* kUnits[] = {"B", "KiB", "MiB", "GiB"};
    double v = static_cast<double>(bytes);
    int u = 0;
    while (v >= 1024.0 && u < 3) {
        v /= 1024.0;
        ++u;
    }
    char buf[64];
    if (u == 0) {
        std::snprintf(buf, sizeof buf, "%llu B", static_cast<unsigned long long>(bytes));
    } else {
        std::snprintf(buf, sizeof buf, "%.2f %s", v, kUnits[u]);
    }
    return buf;
}

}  // namespace spft
