// Copyright 2026 The qrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Subcommand implementations behind the qrobust command-line tool.
 *
 * Every command resolves the config, writes its CSV tables into the output
 * directory and finishes with manifest.json. Outputs depend only on the
 * resolved config, so reruns are byte-identical.
 */
#pragma once

#include "qrobust/harness/adv_training.hpp"
#include "qrobust/harness/config.hpp"
#include "qrobust/harness/detection.hpp"
#include "qrobust/harness/export.hpp"
#include "qrobust/harness/models.hpp"
#include "qrobust/harness/report.hpp"
#include "qrobust/harness/transfer.hpp"
#include "qrobust/noise.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qrobust::harness {

/// Flag overrides applied on top of the config file.
struct CommandOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> epsilon_grid; ///< comma-separated
    std::vector<std::string> models;         ///< from a comma-separated --model
    std::optional<std::string> dataset;      ///< synthetic | *.qrds | IMAGES,LABELS
};

inline const std::vector<std::string> &command_names() {
    static const std::vector<std::string> names{"train",       "advtrain", "attack", "transfer",
                                                "noise-sweep", "detect",   "export"};
    return names;
}

inline std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                      : comma - start);
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline void apply_dataset_flag(DatasetSpec &d, const std::string &value) {
    if (value == "synthetic") {
        d.source = "synthetic";
        return;
    }
    if (io::ends_with(value, ".qrds") || io::ends_with(value, ".qrds.gz")) {
        d.source = "cache";
        d.cache = std::filesystem::absolute(value).lexically_normal().string();
        return;
    }
    const auto parts = split_list(value);
    if (parts.size() != 2) {
        throw UsageError("--dataset expects 'synthetic', a .qrds cache or IMAGES,LABELS");
    }
    d.source = "idx";
    d.images = std::filesystem::absolute(parts[0]).lexically_normal().string();
    d.labels = std::filesystem::absolute(parts[1]).lexically_normal().string();
}

/// Loads the config file and applies flag overrides, then resolves seeds.
inline ExperimentConfig resolve_config(const CommandOptions &opt) {
    ExperimentConfig c = load_config(opt.config_path);
    if (opt.seed) {
        c.seeds.base = *opt.seed;
    }
    if (opt.out) {
        c.out_dir = *opt.out;
    }
    if (opt.epsilon_grid) {
        c.attack.epsilon_grid = parse_number_list(*opt.epsilon_grid);
    }
    if (opt.dataset) {
        apply_dataset_flag(c.dataset, *opt.dataset);
    }
    validate_config(c);
    resolve_seeds(c);
    return c;
}

struct CommandContext {
    const ExperimentConfig &config;
    std::filesystem::path out;
    RunManifest manifest;
    ExperimentData data;

    CommandContext(const std::string &command, const ExperimentConfig &c)
        : config(c), out(c.out_dir), manifest(command, c), data(prepare_data(c)) {
        std::filesystem::create_directories(out);
    }

    void table(const std::string &name, const CsvTable &t) {
        t.write(out / name);
        manifest.add_output(name);
    }

    NamedModel model(const std::string &id) {
        auto m = obtain_model(config.model(id), config, data);
        manifest.note("origin:" + id, m.origin);
        return m;
    }

    std::vector<NamedModel> models(const std::vector<std::string> &ids) {
        std::vector<NamedModel> out_models;
        for (const auto &id : ids) {
            out_models.push_back(model(id));
        }
        return out_models;
    }
};

inline std::vector<std::string> all_model_ids(const ExperimentConfig &c) {
    std::vector<std::string> ids;
    for (const auto &m : c.models) {
        ids.push_back(m.id);
    }
    if (ids.empty()) {
        throw ConfigurationError("config declares no models");
    }
    return ids;
}

inline std::vector<std::string> selected_or_all(const CommandOptions &opt,
                                                const ExperimentConfig &c) {
    for (const auto &id : opt.models) {
        (void)c.model(id);
    }
    return opt.models.empty() ? all_model_ids(c) : opt.models;
}

/// First non-empty candidate, or the first model of the wanted kind.
inline std::string pick_model(const ExperimentConfig &c, std::initializer_list<std::string> candidates,
                              std::optional<bool> want_quantum) {
    for (const auto &s : candidates) {
        if (!s.empty()) {
            (void)c.model(s);
            return s;
        }
    }
    for (const auto &m : c.models) {
        if (!want_quantum || m.quantum() == *want_quantum) {
            return m.id;
        }
    }
    throw ConfigurationError("config has no suitable model for this command");
}

inline std::string first_or_empty(const std::vector<std::string> &v, std::size_t i = 0) {
    return i < v.size() ? v[i] : std::string();
}

inline CsvTable history_table() {
    return CsvTable({"model_id", "epoch", "loss", "train_accuracy", "test_accuracy", "seed",
                     "config_hash"});
}

inline void add_history(CsvTable &t, const NamedModel &m, std::uint64_t seed,
                        const std::string &hash) {
    for (const auto &e : m.history.epochs) {
        t.row({m.id, num(e.epoch), num(e.loss), num(e.train_accuracy), num(e.test_accuracy),
               num(seed), hash});
    }
}

inline void cmd_train(const CommandOptions &opt, const ExperimentConfig &c) {
    CommandContext ctx("train", c);
    auto history = history_table();
    CsvTable summary({"model_id", "family", "parameters", "train_accuracy", "test_accuracy",
                      "seed", "config_hash"});
    std::filesystem::create_directories(ctx.out / "models");
    for (const auto &id : selected_or_all(opt, c)) {
        const auto m = ctx.model(id);
        const std::uint64_t seed = c.seeds.model_init.at(id);
        add_history(history, m, c.seeds.model_train.at(id), ctx.manifest.hash());
        const auto params = visit_model(m, [](const auto &x) { return x.parameters().size(); });
        summary.row({id, c.model(id).family, num(params), num(accuracy(m, ctx.data.train)),
                     num(accuracy(m, ctx.data.test)), num(seed), ctx.manifest.hash()});
        const auto ckpt = std::filesystem::path("models") / (id + ".ckpt");
        std::visit([&](const auto &x) { save_checkpoint(x, (ctx.out / ckpt).string()); }, m.model);
        ctx.manifest.add_output(ckpt);
    }
    ctx.table("train_history.csv", history);
    ctx.table("train_summary.csv", summary);
    ctx.manifest.write(ctx.out);
}

inline void cmd_attack(const CommandOptions &opt, const ExperimentConfig &c) {
    CommandContext ctx("attack", c);
    CsvTable t({"epsilon", "target_id", "accuracy", "n_examples", "seed", "config_hash"});
    for (const auto &id : selected_or_all(opt, c)) {
        const auto m = ctx.model(id);
        for (double eps : c.attack.epsilon_grid) {
            const auto seed = attack_seed(c.seeds.attack, id, eps);
            const auto config = c.attack.at(eps, seed);
            if (auto w = config.warning()) {
                ctx.manifest.note("warning:" + id + ":" + format_number(eps), *w);
            }
            const auto set = generate_attack_set(m, ctx.data.eval, config);
            const auto dir = attack_set_dir("attacks", id, eps);
            save_attack_set(set, ctx.out / dir);
            ctx.manifest.add_output(dir / "manifest.json");
            ctx.manifest.add_output(dir / "examples.bin");
            t.row({num(eps), id, num(set.summary.accuracy), num(set.summary.n_examples),
                   num(seed), ctx.manifest.hash()});
        }
    }
    ctx.table("attack.csv", t);
    ctx.manifest.write(ctx.out);
}

inline std::vector<TransferReport> cmd_transfer(const CommandOptions &opt,
                                                const ExperimentConfig &c) {
    CommandContext ctx("transfer", c);
    const auto all = ctx.models(all_model_ids(c));
    std::vector<TransferReport> reports;
    for (const auto &src : selected_or_all(opt, c)) {
        const auto &source = *std::find_if(all.begin(), all.end(),
                                           [&](const NamedModel &m) { return m.id == src; });
        reports.push_back(run_transfer(source, all, ctx.data.eval, c.attack, c.seeds.attack,
                                       ctx.out / "attacks"));
        for (double eps : c.attack.epsilon_grid) {
            const auto dir = attack_set_dir("attacks", src, eps);
            ctx.manifest.add_output(dir / "manifest.json");
            ctx.manifest.add_output(dir / "examples.bin");
        }
        ctx.table("transfer_" + src + ".csv", transfer_table(reports.back(), ctx.manifest.hash()));
    }
    const auto asym = asymmetry_table(reports, all, ctx.manifest.hash());
    if (!asym.rows().empty()) {
        ctx.table("asymmetry.csv", asym);
    }
    ctx.manifest.write(ctx.out);
    return reports;
}

inline void cmd_advtrain(const CommandOptions &opt, const ExperimentConfig &c) {
    CommandContext ctx("advtrain", c);
    const auto &spec = c.model(pick_model(c, {first_or_empty(opt.models), c.advtrain.model}, false));
    const std::string transfer_src =
        opt.models.size() > 1 ? opt.models[1] : c.advtrain.transfer_source;
    std::optional<NamedModel> source;
    if (!transfer_src.empty()) {
        source = ctx.model(transfer_src);
    }
    auto history = history_table();
    CsvTable white({"epsilon", "target_id", "accuracy", "n_examples", "seed", "config_hash"});
    CsvTable transfer({"epsilon", "target_id", "accuracy", "n_examples", "seed", "config_hash"});
    for (double eps_train : c.advtrain.epsilons) {
        const auto variant =
            run_adv_training(spec, c, ctx.data, {eps_train, c.advtrain.steps, c.advtrain.mix});
        add_history(history, variant, c.seeds.model_train.at(spec.id), ctx.manifest.hash());
        for (double eps : c.attack.epsilon_grid) {
            const auto seed = attack_seed(c.seeds.attack, variant.id, eps);
            const auto set = generate_attack_set(variant, ctx.data.eval, c.attack.at(eps, seed));
            white.row({num(eps), variant.id, num(set.summary.accuracy),
                       num(set.summary.n_examples), num(seed), ctx.manifest.hash()});
            if (source) {
                const auto tseed = attack_seed(c.seeds.attack, source->id, eps);
                const auto tset =
                    generate_attack_set(*source, ctx.data.eval, c.attack.at(eps, tseed));
                const double acc =
                    visit_model(variant, [&](const auto &m) { return replay_accuracy(m, tset); });
                transfer.row({num(eps), variant.id, num(acc), num(tset.summary.n_examples),
                              num(tseed), ctx.manifest.hash()});
            }
        }
    }
    ctx.table("advtrain_history.csv", history);
    ctx.table("advtrain_whitebox.csv", white);
    if (source) {
        ctx.manifest.note("transfer_source", source->id);
        ctx.table("advtrain_transfer.csv", transfer);
    }
    ctx.manifest.write(ctx.out);
}

inline void cmd_noise_sweep(const CommandOptions &opt, const ExperimentConfig &c) {
    CommandContext ctx("noise-sweep", c);
    const auto id = pick_model(c, {first_or_empty(opt.models), c.noise.model}, true);
    const auto m = ctx.model(id);
    const auto *qvc = std::get_if<QvcModel>(&m.model);
    if (qvc == nullptr) {
        throw ConfigurationError("noise-sweep needs a qvc model, '" + id + "' is classical");
    }
    std::vector<NoiseModel> grid;
    for (auto kind : c.noise.kinds) {
        for (double s : c.noise.strengths) {
            grid.push_back({kind, s});
        }
    }
    const auto rows = noisy_accuracy_sweep(*qvc, ctx.data.eval, grid, c.noise.trajectories,
                                           c.seeds.noise);
    CsvTable t({"noise_kind", "strength", "trajectories", "accuracy", "ci_low", "ci_high"});
    for (const auto &r : rows) {
        t.row({noise_kind_name(r.kind), num(r.strength), num(r.trajectories), num(r.accuracy),
               num(r.ci_low), num(r.ci_high)});
    }
    ctx.manifest.note("model", id);
    ctx.manifest.note("n_examples", ctx.data.eval.size());
    ctx.table("noise.csv", t);
    ctx.manifest.write(ctx.out);
}

inline DetectionReport cmd_detect(const CommandOptions &opt, const ExperimentConfig &c) {
    CommandContext ctx("detect", c);
    const auto cid = pick_model(c, {first_or_empty(opt.models, 0), c.detect.classical}, false);
    const auto qid = pick_model(c, {first_or_empty(opt.models, 1), c.detect.quantum}, true);
    const auto sid = c.detect.attack_source.empty() ? cid : c.detect.attack_source;
    const auto classical = ctx.model(cid);
    const auto quantum = ctx.model(qid);
    const auto source = sid == cid ? classical : (sid == qid ? quantum : ctx.model(sid));
    const auto clean = sample_subset(ctx.data.rest, c.detect.pool_size, c.seeds.detect);
    const auto attacked =
        build_attacked_pool(source, clean, c.detect.kinds, c.detect.epsilons, c.seeds.detect);
    const auto report = run_detection(classical, quantum, clean, attacked);
    ctx.manifest.note("attack_source", sid);
    ctx.table("detection.csv", detection_table(report, c.seeds.detect, ctx.manifest.hash()));
    ctx.manifest.write(ctx.out);
    return report;
}

inline void cmd_export(const CommandOptions &opt, const ExperimentConfig &c) {
    CommandContext ctx("export", c);
    const auto id = pick_model(c, {first_or_empty(opt.models), c.export_.model}, std::nullopt);
    const auto m = ctx.model(id);
    const double eps = c.export_.epsilon;
    const auto seed = attack_seed(c.seeds.attack, id, eps);
    const auto set = generate_attack_set(m, ctx.data.eval, c.attack.at(eps, seed));
    const auto dir = std::filesystem::path("export") / (id + "_eps_" + format_number(eps));
    const auto index = export_perturbations(set, ctx.out / dir, c.export_.count);
    for (const auto &r : index.rows()) {
        for (std::size_t k = 5; k < 8; ++k) {
            ctx.manifest.add_output(dir / r[k]);
        }
    }
    ctx.table((dir / "index.csv").string(), index);
    ctx.manifest.write(ctx.out);
}

/// Dispatches one subcommand; throws on failure.
inline void run_command(const std::string &command, const CommandOptions &opt) {
    const ExperimentConfig c = resolve_config(opt);
    if (command == "train") {
        cmd_train(opt, c);
    } else if (command == "advtrain") {
        cmd_advtrain(opt, c);
    } else if (command == "attack") {
        cmd_attack(opt, c);
    } else if (command == "transfer") {
        cmd_transfer(opt, c);
    } else if (command == "noise-sweep") {
        cmd_noise_sweep(opt, c);
    } else if (command == "detect") {
        cmd_detect(opt, c);
    } else if (command == "export") {
        cmd_export(opt, c);
    } else {
        throw UsageError("unknown command '" + command + "'");
    }
}

} // namespace qrobust::harness
