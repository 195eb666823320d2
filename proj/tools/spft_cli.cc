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

// spft: budgets, synthetic training runs, ablations and checkpoint utilities.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spft/adapter.hpp"
#include "spft/budget.hpp"
#include "spft/checkpoint.hpp"
#include "spft/dft.hpp"
#include "spft/experiments.hpp"
#include "spft/sampling.hpp"
#include "spft/train.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

constexpr std::uint64_t kDefaultSeed = 2024;
constexpr double kDefaultAlpha = 300.0;

struct UsageError : spft::Error {
    using Error::Error;
};

std::pair<std::size_t, std::size_t> parse_shape(const std::string& s) {
    const auto x = s.find('x');
    std::size_t used1 = 0;
    std::size_t used2 = 0;
    try {
        if (x == std::string::npos) throw std::invalid_argument("");
        const std::string a = s.substr(0, x);
        const std::string b = s.substr(x + 1);
        const unsigned long d1 = std::stoul(a, &used1);
        const unsigned long d2 = std::stoul(b, &used2);
        if (used1 != a.size() || used2 != b.size() || d1 == 0 || d2 == 0) {
            throw std::invalid_argument("");
        }
        return {d1, d2};
    } catch (const std::logic_error&) {
        throw UsageError("--shape must look like 64x64 with positive sides, got '" + s + "'");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    spft::write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                            text.size()));
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw spft::Error("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// The sidecar is the only output allowed to carry a timestamp.
void write_sidecar(const fs::path& out, ordered_json config) {
    config["created_utc"] = utc_now();
    write_text(out / "config.json", config.dump(2) + "\n");
}

spft::BiasSpec bias_from(std::optional<double> fc, double bandwidth) {
    if (!fc) return spft::BiasSpec::none();
    return spft::BiasSpec::bandpass(*fc, bandwidth);
}

ordered_json bias_json(const spft::BiasSpec& b) {
    ordered_json j;
    j["mode"] = b.is_biased() ? "bandpass" : "none";
    if (b.is_biased()) {
        j["center_frequency"] = b.center_frequency;
        j["bandwidth"] = b.bandwidth;
    }
    return j;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- budget

struct BudgetArgs {
    std::string preset;
    std::optional<std::size_t> width;
    std::optional<std::size_t> layers;
    std::vector<std::size_t> fourier_n;
    std::vector<std::size_t> lora_r;
    bool csv = false;
    bool table = false;
};

std::string param_word(std::uint64_t n) { return n == 1 ? "param" : "params"; }

int run_table_check(bool csv) {
    if (csv) std::cout << "preset,method,n_or_r,computed_params,printed,params_match,bytes_rel_error,note\n";
    for (const auto& row : spft::published_rows()) {
        const spft::RowCheck c = spft::check_row(row);
        const std::string method = spft::to_string(row.method.method);
        if (csv) {
            std::cout << row.preset << "," << method << "," << row.method.n_or_r << ","
                      << c.report.trainable_params << ",\"" << row.printed_text << "\","
                      << (c.params_match ? 1 : 0) << "," << fmt_g(c.bytes_rel_error) << ",\""
                      << row.note.value_or("") << "\"\n";
            continue;
        }
        std::printf("%-14s %-8s %5zu  %10llu params %-12s printed %-18s bytes err %6.2f%%%s\n",
                    row.preset.c_str(), method.c_str(), row.method.n_or_r,
                    static_cast<unsigned long long>(c.report.trainable_params),
                    spft::format_bytes(c.report.bytes).c_str(), row.printed_text.c_str(),
                    100.0 * c.bytes_rel_error, c.params_match ? "" : "  [params differ]");
        if (row.note) std::printf("    note: %s\n", row.note->c_str());
    }
    return kExitOk;
}

int cmd_budget(const BudgetArgs& a) {
    if (a.table) return run_table_check(a.csv);
    if (a.width.has_value() != a.layers.has_value()) {
        throw UsageError("--d and --layers must be given together");
    }
    if (a.width && !a.preset.empty()) throw UsageError("use either --preset or --d/--layers");

    std::vector<spft::BudgetMethod> methods;
    for (auto n : a.fourier_n) methods.push_back(spft::BudgetMethod::fourier(n));
    for (auto r : a.lora_r) methods.push_back(spft::BudgetMethod::lora(r));
    if (methods.empty()) methods.push_back(spft::BudgetMethod::fourier(1000));

    std::vector<spft::BudgetReport> reports;
    if (a.width) {
        if (*a.width == 0 || *a.layers == 0) throw UsageError("--d and --layers must be >= 1");
        for (const auto& m : methods) reports.push_back(spft::budget(*a.width, *a.layers, m));
    } else if (!a.preset.empty()) {
        const spft::ModelPreset* preset = nullptr;
        try {
            preset = &spft::find_preset(a.preset);
        } catch (const spft::Error& e) {
            throw UsageError(e.what());
        }
        for (const auto& m : methods) reports.push_back(spft::budget(*preset, m));
    } else {
        for (const auto& p : spft::model_presets())
            for (const auto& m : methods) reports.push_back(spft::budget(p, m));
    }

    if (a.csv) {
        std::cout << "model,method,n_or_r,width,layers,trainable_params,bytes,params_with_entries\n";
        for (const auto& r : reports) {
            std::cout << r.model << "," << spft::to_string(r.method) << "," << r.n_or_r << ","
                      << r.width << "," << r.layers << "," << r.trainable_params << "," << r.bytes
                      << "," << r.params_with_entries << "\n";
        }
        return kExitOk;
    }
    for (const auto& r : reports) {
        std::cout << r.model << " " << spft::to_string(r.method)
                  << (r.method == spft::Method::kLora ? " r=" : " n=") << r.n_or_r << ": "
                  << r.trainable_params << " " << param_word(r.trainable_params) << ", "
                  << spft::format_bytes(r.bytes) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------- train-synthetic

struct TrainArgs {
    std::string method = "fourier";
    std::string basis = "fourier";
    std::size_t n = 128;
    std::size_t r = 1;
    std::optional<double> alpha;
    std::size_t epochs = 2000;
    double lr = 1e-2;
    std::string optimizer = "adam";
    std::uint64_t seed = kDefaultSeed;
    bool zero_init = false;
    std::optional<double> fc;
    double bandwidth = 8.0;
    std::string out = "spft_out";
};

int cmd_train(const TrainArgs& a) {
    spft::AdapterConfig config;
    try {
        config.method = spft::parse_method(a.method);
        config.basis = spft::parse_basis(a.basis);
        spft::parse_optimizer(a.optimizer);
    } catch (const spft::Error& e) {
        throw UsageError(e.what());
    }
    if (a.epochs == 0) throw UsageError("--epochs must be >= 1");
    if (!(a.lr > 0.0)) throw UsageError("--lr must be > 0");
    switch (config.method) {
        case spft::Method::kFourier:
            config = spft::fourier_arm(a.n, a.alpha.value_or(kDefaultAlpha));
            break;
        case spft::Method::kLora:
            if (a.r == 0) throw UsageError("--r must be >= 1");
            config = spft::lora_arm(a.r);
            if (a.alpha) config.alpha = *a.alpha;
            break;
        case spft::Method::kGeneralBasis: {
            const spft::BasisKind kind = config.basis;
            config = spft::basis_arm(kind, a.n);
            if (a.alpha) config.alpha = *a.alpha;
            break;
        }
    }
    config.seed = a.seed;
    config.bias = bias_from(a.fc, a.bandwidth);
    if (a.zero_init) config.coeff_init = spft::CoeffInit::kZero;

    spft::RunSpec spec;
    spec.config = config;
    spec.seed = a.seed;
    spec.train.epochs = a.epochs;
    spec.train.lr = a.lr;
    spec.train.optimizer = spft::parse_optimizer(a.optimizer);

    const fs::path out = prepare_out(a.out);
    const spft::SyntheticDataset data = spft::default_dataset(a.seed);
    spft::ToyModel model = spft::make_toy_model(config, a.seed);
    const std::size_t params = spft::trainable_count(model.adapter);

    ordered_json sidecar;
    sidecar["command"] = "train-synthetic";
    sidecar["seed"] = a.seed;
    sidecar["method"] = spft::to_string(config.method);
    if (config.method == spft::Method::kGeneralBasis) sidecar["basis"] = spft::to_string(config.basis);
    sidecar["n_or_r"] = config.n_or_r;
    sidecar["alpha"] = config.alpha;
    sidecar["bias"] = bias_json(config.bias);
    sidecar["coeff_init"] = a.zero_init ? "zero" : "gaussian";
    sidecar["lr"] = a.lr;
    sidecar["epochs"] = a.epochs;
    sidecar["optimizer"] = a.optimizer;
    sidecar["adapter_params"] = params;
    sidecar["dataset"] = {{"samples_per_class", spft::kSamplesPerClass},
                          {"radius", spft::kClusterRadius},
                          {"noise_sigma", spft::kClusterSigma}};
    sidecar["out"] = a.out;

    write_text(out / "dataset.csv", spft::dataset_to_csv(data));
    spft::TrainLog log;
    try {
        log = spft::train(model, data, spec.train);
    } catch (const spft::TrainingDiverged& e) {
        sidecar["status"] = "diverged";
        sidecar["diverged_epoch"] = e.epoch();
        write_sidecar(out, sidecar);
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    write_text(out / "log.csv", log.to_csv());
    const std::vector<spft::LayerRecord> layers{{"hidden", model.adapter}};
    spft::save_checkpoint(out / "adapter.spft", config, layers);
    spft::write_raw_matrix(out / "hidden_base.bin", model.w_hidden);

    sidecar["status"] = "ok";
    sidecar["initial"] = {{"loss", log.initial.loss}, {"accuracy", log.initial.accuracy}};
    sidecar["final"] = {{"loss", log.last().loss}, {"accuracy", log.last().accuracy}};
    sidecar["wall_seconds"] = log.wall_seconds;
    write_sidecar(out, sidecar);

    std::printf("%s %s=%zu params=%zu epochs=%zu lr=%g: final loss %.6g accuracy %.4f\n",
                spft::to_string(config.method).c_str(),
                config.method == spft::Method::kLora ? "r" : "n", config.n_or_r, params, a.epochs,
                a.lr, log.last().loss, log.last().accuracy);
    return kExitOk;
}

// ------------------------------------------------------------- ablate-basis

struct AblateArgs {
    std::optional<std::size_t> n;
    std::size_t seeds = 5;
    std::uint64_t seed = kDefaultSeed;
    std::size_t epochs = 2000;
    std::vector<double> lrs = spft::kDefaultLrSweep;
    double alpha = kDefaultAlpha;
    std::string out = "spft_ablation";
};

int cmd_ablate(const AblateArgs& a) {
    if (!a.n) throw UsageError("ablate-basis requires --n");
    if (a.seeds == 0 || a.epochs == 0 || a.lrs.empty()) {
        throw UsageError("--seeds, --epochs and --lr must be non-empty/positive");
    }
    const std::size_t hidden = spft::ToyModelOptions{}.hidden;
    if (*a.n > hidden * hidden) {
        throw UsageError("--n must be <= " + std::to_string(hidden * hidden));
    }
    const fs::path out = prepare_out(a.out);
    std::vector<std::pair<std::string, spft::AdapterConfig>> arms;
    for (auto kind : {spft::BasisKind::kFourier, spft::BasisKind::kOrthogonal, spft::BasisKind::kRandom}) {
        arms.emplace_back(spft::to_string(kind), spft::basis_arm(kind, *a.n, a.alpha, hidden));
    }
    const auto seeds = spft::consecutive_seeds(a.seed, a.seeds);
    const auto sweeps = spft::sweep_many(arms, seeds, a.lrs, a.epochs, spft::worker_count());
    write_text(out / "ablation.csv", spft::summary_csv(sweeps));
    write_text(out / "runs.csv", spft::runs_csv(sweeps));

    ordered_json sidecar;
    sidecar["command"] = "ablate-basis";
    sidecar["seed"] = a.seed;
    sidecar["seeds"] = seeds;
    sidecar["n"] = *a.n;
    sidecar["epochs"] = a.epochs;
    sidecar["lr_sweep"] = a.lrs;
    ordered_json alphas;
    for (const auto& [label, c] : arms) alphas[label] = c.alpha;
    sidecar["alpha"] = alphas;
    sidecar["out"] = a.out;
    write_sidecar(out, sidecar);

    for (const auto& s : sweeps) {
        const auto& o = s.best_outcome();
        std::printf("%-10s best lr %-6g mean accuracy %.4f mean loss %.6g\n", s.label.c_str(), o.lr,
                    o.mean_accuracy, o.mean_loss);
    }
    return kExitOk;
}

// --------------------------------------------------------------- sweep-bias

struct BiasArgs {
    std::vector<double> fcs = {0, 8, 16, 24};
    double bandwidth = 8.0;
    std::size_t n = 128;
    double alpha = kDefaultAlpha;
    double lr = 1e-2;
    std::size_t epochs = 2000;
    std::size_t seeds = 1;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "spft_bias";
};

int cmd_sweep_bias(const BiasArgs& a) {
    if (a.seeds == 0 || a.epochs == 0) throw UsageError("--seeds and --epochs must be >= 1");
    if (!(a.bandwidth > 0.0)) throw UsageError("--bandwidth must be > 0");
    if (!(a.lr > 0.0)) throw UsageError("--lr must be > 0");
    for (double fc : a.fcs)
        if (fc < 0.0) throw UsageError("--fc values must be >= 0");
    const fs::path out = prepare_out(a.out);
    std::vector<spft::BiasSpec> biases{spft::BiasSpec::none()};
    for (double fc : a.fcs) biases.push_back(spft::BiasSpec::bandpass(fc, a.bandwidth));
    const auto seeds = spft::consecutive_seeds(a.seed, a.seeds);
    const auto points = spft::sweep_bias(biases, spft::fourier_arm(a.n, a.alpha), seeds, a.lr,
                                         a.epochs, spft::worker_count());
    write_text(out / "bias.csv", spft::bias_csv(points));

    ordered_json sidecar;
    sidecar["command"] = "sweep-bias";
    sidecar["seed"] = a.seed;
    sidecar["seeds"] = seeds;
    sidecar["method"] = "fourier";
    sidecar["n"] = a.n;
    sidecar["alpha"] = a.alpha;
    sidecar["center_frequencies"] = a.fcs;
    sidecar["bandwidth"] = a.bandwidth;
    sidecar["lr"] = a.lr;
    sidecar["epochs"] = a.epochs;
    sidecar["out"] = a.out;
    write_sidecar(out, sidecar);

    for (const auto& p : points) {
        std::printf("%-6s mean accuracy %.4f mean loss %.6g\n", p.bias.label().c_str(),
                    p.mean_accuracy, p.mean_loss);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

struct GradArgs {
    std::string shape = "16x12";
    std::size_t n = 20;
    std::size_t batch = 5;
    std::size_t instances = 5;
    double alpha = kDefaultAlpha;
    std::uint64_t seed = kDefaultSeed;
    bool wrong_sign = false;
};

constexpr double kGradTolerance = 1e-4;

int cmd_gradcheck(const GradArgs& a) {
    const auto [d1, d2] = parse_shape(a.shape);
    if (a.n == 0 || a.n > d1 * d2) {
        throw UsageError("--n must be in [1, " + std::to_string(d1 * d2) + "]");
    }
    if (a.batch == 0 || a.instances == 0) throw UsageError("--batch and --instances must be >= 1");

    double worst = 0.0;
    for (std::size_t inst = 0; inst < a.instances; ++inst) {
        spft::Rng rng = spft::Rng::stream(a.seed, inst);
        spft::FourierAdapter ad{spft::sample_uniform(a.seed + inst, d1, d2, a.n),
                                spft::randn_vector(rng, a.n), a.alpha, d1, d2};
        const spft::Matrix w0 = spft::randn_matrix(rng, d1, d2);
        const spft::Matrix x = spft::randn_matrix(rng, a.batch, d1);
        const spft::Matrix up = spft::randn_matrix(rng, a.batch, d2);

        auto objective = [&](const spft::FourierAdapter& p) {
            return spft::inner(spft::fourier_forward(p, w0, x), up);
        };
        spft::CoefficientVector analytic = spft::fourier_grad_coeffs(ad, w0, x, up);
        if (a.wrong_sign) {
            for (double& g : analytic) g = -g;
        }
        std::vector<double> numeric(a.n);
        double scale = 0.0;
        for (std::size_t i = 0; i < a.n; ++i) {
            const double h = 1e-3 * std::max(1.0, std::abs(ad.coeffs[i]));
            spft::FourierAdapter plus = ad;
            spft::FourierAdapter minus = ad;
            plus.coeffs[i] += h;
            minus.coeffs[i] -= h;
            numeric[i] = (objective(plus) - objective(minus)) / (2.0 * h);
            scale = std::max(scale, std::abs(numeric[i]));
        }
        for (std::size_t i = 0; i < a.n; ++i) {
            const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-8 * scale, 1e-300});
            worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
        }
    }
    const bool ok = worst <= kGradTolerance;
    std::printf("gradcheck %zux%zu n=%zu instances=%zu: max rel err %.3e (%s)\n", d1, d2, a.n,
                a.instances, worst, ok ? "ok" : "FAILED");
    return ok ? kExitOk : kExitFailure;
}

// ----------------------------------------------------------- sample-entries

struct SampleArgs {
    std::string shape = "64x64";
    std::size_t n = 128;
    std::optional<double> fc;
    double bandwidth = 8.0;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "spft_entries";
};

int cmd_sample(const SampleArgs& a) {
    const auto [d1, d2] = parse_shape(a.shape);
    if (a.n > d1 * d2) throw UsageError("--n exceeds the " + a.shape + " grid");
    if (a.fc && (*a.fc < 0.0 || !(a.bandwidth > 0.0))) {
        throw UsageError("--fc must be >= 0 and --bandwidth > 0");
    }
    const spft::BiasSpec bias = bias_from(a.fc, a.bandwidth);
    const fs::path out = prepare_out(a.out);
    const spft::EntryMatrix e = spft::sample_entries(a.seed, d1, d2, a.n, bias);

    std::string csv = "j,k\n";
    for (std::size_t i = 0; i < e.size(); ++i) {
        csv += std::to_string(e.rows[i]) + "," + std::to_string(e.cols[i]) + "\n";
    }
    write_text(out / "entries.csv", csv);

    // P5 grayscale, max-normalized; a uniform sampler maps to a flat image.
    std::string pgm = "P5\n" + std::to_string(d2) + " " + std::to_string(d1) + "\n255\n";
    const std::size_t header = pgm.size();
    pgm.resize(header + d1 * d2, static_cast<char>(255));
    if (bias.is_biased()) {
        const spft::Matrix p = spft::bandpass_probability(d1, d2, bias);
        const double peak = spft::max_abs(p);
        for (std::size_t i = 0; i < d1 * d2; ++i) {
            const double v = peak > 0.0 ? p.values()[i] / peak : 0.0;
            pgm[header + i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
        }
    }
    write_text(out / "probmap.pgm", pgm);

    ordered_json sidecar;
    sidecar["command"] = "sample-entries";
    sidecar["seed"] = a.seed;
    sidecar["shape"] = {d1, d2};
    sidecar["n"] = a.n;
    sidecar["bias"] = bias_json(bias);
    sidecar["out"] = a.out;
    write_sidecar(out, sidecar);
    std::printf("%zu entries on %zux%zu (%s)\n", e.size(), d1, d2, bias.label().c_str());
    return kExitOk;
}

// -------------------------------------------------------------------- merge

struct MergeArgs {
    std::string checkpoint;
    std::string base;
    std::string layer;
    std::string out;
};

int cmd_merge(const MergeArgs& a) {
    const spft::CheckpointContents ck = spft::load_checkpoint(a.checkpoint);
    if (ck.layers.empty()) throw spft::Error("checkpoint has no layers");
    const spft::LayerRecord* layer = &ck.layers.front();
    if (!a.layer.empty()) {
        const auto it = std::find_if(ck.layers.begin(), ck.layers.end(),
                                     [&](const auto& l) { return l.name == a.layer; });
        if (it == ck.layers.end()) throw spft::Error("no layer named '" + a.layer + "' in checkpoint");
        layer = &*it;
    }
    const spft::Matrix w0 = spft::read_raw_matrix(a.base);
    const auto [d1, d2] = spft::adapter_shape(layer->adapter);
    if (w0.rows() != d1 || w0.cols() != d2) {
        throw spft::Error("base " + w0.shape_string() + " does not match layer '" + layer->name +
                          "' (" + std::to_string(d1) + "x" + std::to_string(d2) + ")");
    }
    spft::write_raw_matrix(a.out, spft::merge(layer->adapter, w0));
    std::printf("merged layer '%s' (%zux%zu) into %s\n", layer->name.c_str(), d1, d2,
                a.out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spft: sparse spectral fine-tuning toolkit"};
    app.require_subcommand(1);

    BudgetArgs budget;
    auto* budget_cmd = app.add_subcommand("budget", "trainable parameters and storage per method");
    budget_cmd->add_option("--preset", budget.preset, "model preset");
    budget_cmd->add_option("--d", budget.width, "hidden width (with --layers)");
    budget_cmd->add_option("--layers", budget.layers, "adapted layer count L_t (with --d)");
    budget_cmd->add_option("--fourier-n", budget.fourier_n, "spectral coefficients per layer");
    budget_cmd->add_option("--lora-r", budget.lora_r, "LoRA rank");
    budget_cmd->add_flag("--csv", budget.csv, "CSV output");
    budget_cmd->add_flag("--table", budget.table, "compare against the published table");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train-synthetic", "8-class synthetic expressiveness run");
    train_cmd->add_option("--method", tr.method, "fourier | lora | general-basis")->capture_default_str();
    train_cmd->add_option("--basis", tr.basis, "fourier | random | orthogonal (general-basis)");
    train_cmd->add_option("--n", tr.n, "spectral coefficients")->capture_default_str();
    train_cmd->add_option("--r", tr.r, "LoRA rank")->capture_default_str();
    train_cmd->add_option("--alpha", tr.alpha, "scaling (fourier 300, lora 1, basis matched)");
    train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
    train_cmd->add_option("--lr", tr.lr)->capture_default_str();
    train_cmd->add_option("--optimizer", tr.optimizer, "adam | sgd")->capture_default_str();
    train_cmd->add_option("--seed", tr.seed)->capture_default_str();
    train_cmd->add_flag("--zero-init", tr.zero_init, "start spectral coefficients at zero");
    train_cmd->add_option("--fc", tr.fc, "band-pass center frequency");
    train_cmd->add_option("--bandwidth", tr.bandwidth)->capture_default_str();
    train_cmd->add_option("--out", tr.out, "output directory")->capture_default_str();

    AblateArgs ab;
    auto* ablate_cmd = app.add_subcommand("ablate-basis", "fourier vs orthogonal vs random basis");
    ablate_cmd->add_option("--n", ab.n, "coefficients per basis (required)");
    ablate_cmd->add_option("--seeds", ab.seeds, "number of seeds")->capture_default_str();
    ablate_cmd->add_option("--seed", ab.seed, "first seed")->capture_default_str();
    ablate_cmd->add_option("--epochs", ab.epochs)->capture_default_str();
    ablate_cmd->add_option("--lr", ab.lrs, "learning rates to sweep");
    ablate_cmd->add_option("--alpha", ab.alpha, "Fourier alpha; others matched")->capture_default_str();
    ablate_cmd->add_option("--out", ab.out)->capture_default_str();

    BiasArgs bi;
    auto* bias_cmd = app.add_subcommand("sweep-bias", "band-pass entry bias sweep");
    bias_cmd->add_option("--fc", bi.fcs, "center frequencies (no-bias run is always added)");
    bias_cmd->add_option("--bandwidth", bi.bandwidth)->capture_default_str();
    bias_cmd->add_option("--n", bi.n)->capture_default_str();
    bias_cmd->add_option("--alpha", bi.alpha)->capture_default_str();
    bias_cmd->add_option("--lr", bi.lr)->capture_default_str();
    bias_cmd->add_option("--epochs", bi.epochs)->capture_default_str();
    bias_cmd->add_option("--seeds", bi.seeds)->capture_default_str();
    bias_cmd->add_option("--seed", bi.seed)->capture_default_str();
    bias_cmd->add_option("--out", bi.out)->capture_default_str();

    GradArgs gr;
    auto* grad_cmd = app.add_subcommand("gradcheck", "coefficient gradient vs finite differences");
    grad_cmd->add_option("--shape", gr.shape)->capture_default_str();
    grad_cmd->add_option("--n", gr.n)->capture_default_str();
    grad_cmd->add_option("--batch", gr.batch)->capture_default_str();
    grad_cmd->add_option("--instances", gr.instances)->capture_default_str();
    grad_cmd->add_option("--alpha", gr.alpha)->capture_default_str();
    grad_cmd->add_option("--seed", gr.seed)->capture_default_str();
    grad_cmd->add_flag("--inject-wrong-sign", gr.wrong_sign)->group("");

    SampleArgs sa;
    auto* sample_cmd = app.add_subcommand("sample-entries", "draw spectral entries");
    sample_cmd->add_option("--shape", sa.shape)->capture_default_str();
    sample_cmd->add_option("--n", sa.n)->capture_default_str();
    sample_cmd->add_option("--fc", sa.fc, "band-pass center frequency");
    sample_cmd->add_option("--bandwidth", sa.bandwidth)->capture_default_str();
    sample_cmd->add_option("--seed", sa.seed)->capture_default_str();
    sample_cmd->add_option("--out", sa.out)->capture_default_str();

    MergeArgs me;
    auto* merge_cmd = app.add_subcommand("merge", "W0 + ΔW for one checkpoint layer");
    merge_cmd->add_option("--checkpoint", me.checkpoint)->required();
    merge_cmd->add_option("--base", me.base, "raw base weight file")->required();
    merge_cmd->add_option("--layer", me.layer, "layer name (default: first)");
    merge_cmd->add_option("--out", me.out, "raw merged weight file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*budget_cmd) return cmd_budget(budget);
        if (*train_cmd) return cmd_train(tr);
        if (*ablate_cmd) return cmd_ablate(ab);
        if (*bias_cmd) return cmd_sweep_bias(bi);
        if (*grad_cmd) return cmd_gradcheck(gr);
        if (*sample_cmd) return cmd_sample(sa);
        if (*merge_cmd) return cmd_merge(me);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
