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
#include "qrobust/harness/commands.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace qrobust;
using namespace qrobust::harness;
namespace fs = std::filesystem;

namespace {

const fs::path kSmoke = fs::path(QROBUST_DATA_DIR).parent_path() / "configs" / "smoke.json";

fs::path scratch(const std::string &name) {
    auto dir = fs::temp_directory_path() / ("qrobust_test_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

struct CliResult {
    int code;
    std::string err;
};

CliResult cli(const std::string &args, const fs::path &dir) {
    const auto err = dir / "stderr.txt";
    const std::string cmd =
        std::string(QROBUST_CLI_PATH) + " " + args + " 2> " + err.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

ExperimentConfig smoke_config() {
    CommandOptions opt;
    opt.config_path = kSmoke.string();
    return resolve_config(opt);
}

} // namespace

TEST_CASE("config parsing, overrides and hashing", "[harness]") {
    const auto c = smoke_config();
    CHECK(c.models.size() == 2);
    CHECK(c.attack.epsilon_grid == std::vector<double>{0, 0.1, 0.2});
    CHECK(c.seeds.model_init.count("qvc") == 1);
    CHECK(config_hash(c) == config_hash(smoke_config()));

    CommandOptions opt;
    opt.config_path = kSmoke.string();
    opt.out = "/somewhere/else";
    CHECK(config_hash(resolve_config(opt)) == config_hash(c)); // output dir is not hashed
    opt.seed = 8;
    const auto reseeded = resolve_config(opt);
    CHECK(config_hash(reseeded) != config_hash(c));
    CHECK(reseeded.seeds.split != c.seeds.split);

    opt.epsilon_grid = "0,0.3,0.2";
    CHECK_THROWS_AS(resolve_config(opt), ConfigurationError);
    opt.epsilon_grid = "0,zero";
    CHECK_THROWS_AS(resolve_config(opt), UsageError);

    CHECK_THROWS_AS(parse_config(nlohmann::json{{"bogus", 1}}, "."), UsageError);
    CHECK_THROWS_AS(parse_config(nlohmann::json{{"attack", {{"steps", "many"}}}}, "."), UsageError);

    auto explicit_seed = parse_config(nlohmann::json{{"seeds", {{"split", 5}}}}, ".");
    resolve_seeds(explicit_seed);
    CHECK(explicit_seed.seeds.split == 5);
}

TEST_CASE("number formatting round-trips", "[harness]") {
    for (double v : {0.0, 0.1, 1.0 / 3.0, 0.968, 1e-12}) {
        CHECK(parse_number(format_number(v)) == v);
    }
    CHECK(format_number(0.05) == "0.05");
    CHECK(parse_number_list("0,0.05,0.1") == std::vector<double>{0, 0.05, 0.1});
}

TEST_CASE("transfer report: clean column, replay and table shape", "[harness]") {
    const auto c = smoke_config();
    const auto data = prepare_data(c);
    const std::vector<NamedModel> models{obtain_model(c.model("mlp"), c, data),
                                         obtain_model(c.model("qvc"), c, data)};
    const auto dir = scratch("transfer");
    const auto r = run_transfer(models[0], models, data.eval, c.attack, 3, dir);
    REQUIRE(r.accuracy.size() == 2);
    for (std::size_t t = 0; t < 2; ++t) {
        CHECK(r.accuracy[t][0] == r.clean[t]);
    }
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
        CHECK(r.accuracy[0][e] == r.recorded[e]);
        const auto loaded = load_attack_set(attack_set_dir(dir, "mlp", r.epsilons[e]));
        CHECK(visit_model(models[0], [&](const auto &m) { return replay_accuracy(m, loaded); }) ==
              r.recorded[e]);
    }
    for (std::size_t e = 1; e < r.epsilons.size(); ++e) {
        CHECK(r.accuracy[0][e] <= r.accuracy[0][e - 1]);
    }
    const auto table = transfer_table(r, "h");
    CHECK(table.rows().size() == 2 * (1 + 3));
    CHECK(table.str().rfind("epsilon,target_id,accuracy,n_examples,seed,config_hash\n", 0) == 0);

    const auto r2 = run_transfer(models[1], models, data.eval, c.attack, 3);
    const auto asym = asymmetry_table({r, r2}, models, "h");
    CHECK(asym.rows().size() == 3);
}

TEST_CASE("adversarial training with zero budget equals standard training", "[harness]") {
    const auto c = smoke_config();
    const auto data = prepare_data(c);
    const auto standard = obtain_model(c.model("mlp"), c, data);
    const auto adv0 = run_adv_training(c.model("mlp"), c, data, {0.0, 3, 0.5});
    CHECK(adv0.history == standard.history);
    CHECK(std::ranges::equal(std::get<ClassicalModel>(adv0.model).parameters(),
                             std::get<ClassicalModel>(standard.model).parameters()));
    const auto adv = run_adv_training(c.model("mlp"), c, data, {0.2, 3, 0.5});
    CHECK_FALSE(adv.history == standard.history);
    CHECK(adv.id == "mlp^0.2");
}

TEST_CASE("detection bookkeeping", "[harness]") {
    const auto c = smoke_config();
    const auto data = prepare_data(c);
    const auto mlp = obtain_model(c.model("mlp"), c, data);
    const auto qvc = obtain_model(c.model("qvc"), c, data);
    const auto attacked = build_attacked_pool(mlp, data.rest, {AttackKind::FGSM, AttackKind::PGD},
                                              {0.1, 0.3}, 4);
    CHECK(attacked.size() == data.rest.size());
    CHECK(attacked == build_attacked_pool(mlp, data.rest, {AttackKind::FGSM, AttackKind::PGD},
                                          {0.1, 0.3}, 4));

    const auto same = run_detection(mlp, mlp, data.rest, attacked);
    CHECK(same.true_positives == 0);
    CHECK(same.false_positives == 0);

    const auto r = run_detection(mlp, qvc, data.rest, attacked);
    CHECK(r.true_positives + r.false_negatives == attacked.size());
    CHECK(r.false_positives + r.true_negatives == data.rest.size());

    NamedModel binary{"bin", QvcModel(4, 1, 2, 1), {}, ""};
    CHECK_THROWS_AS(run_detection(mlp, binary, data.rest, attacked), ConfigurationError);
}

TEST_CASE("perturbation export", "[harness]") {
    const auto c = smoke_config();
    const auto data = prepare_data(c);
    const auto mlp = obtain_model(c.model("mlp"), c, data);
    const auto dir = scratch("export");

    SECTION("zero budget renders mid-gray deltas") {
        const auto set = generate_attack_set(mlp, data.eval, AttackConfig::pgd(0.0));
        const auto index = export_perturbations(set, dir, 3);
        CHECK(index.rows().size() == 3);
        const auto delta = read_pgm(dir / "ex0_delta.pgm");
        for (auto p : delta.pixels) {
            CHECK(p == 128);
        }
        const auto orig = read_pgm(dir / "ex0_original.pgm");
        CHECK(orig.width == 4);
        for (std::size_t i = 0; i < orig.pixels.size(); ++i) {
            CHECK(std::abs(orig.pixels[i] / 255.0 - set.examples[0].original[i]) <= 0.5 / 255.0);
        }
    }
    SECTION("max |delta| maps to the display extremes") {
        const auto set = generate_attack_set(mlp, data.eval, AttackConfig::fgsm(0.1));
        export_perturbations(set, dir, 1);
        const auto delta = read_pgm(dir / "ex0_delta.pgm");
        const auto [lo, hi] = std::minmax_element(delta.pixels.begin(), delta.pixels.end());
        CHECK((*lo == 0 || *hi == 255));
        const auto pert = read_pgm(dir / "ex0_perturbed.pgm");
        for (std::size_t i = 0; i < pert.pixels.size(); ++i) {
            CHECK(std::abs(pert.pixels[i] / 255.0 - set.examples[0].perturbed[i]) <= 0.5 / 255.0);
        }
    }
    SECTION("empty set") {
        CHECK_THROWS_AS(export_perturbations(AttackSet{}, dir, 1), DataError);
    }
    io::write_file_bytes((dir / "bad.pgm").string(), std::vector<std::uint8_t>{'P', '2'});
    CHECK_THROWS_AS(read_pgm(dir / "bad.pgm"), FormatError);
}

TEST_CASE("CLI error categories", "[harness][cli]") {
    const auto dir = scratch("cli_errors");
    const std::string cfg = "--config " + kSmoke.string() + " --out " + (dir / "o").string();

    auto r = cli("train " + cfg + " --bogus-flag", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("category=usage") != std::string::npos);

    CHECK(cli("frobnicate " + cfg, dir).code == 2);

    std::ofstream(dir / "broken.json") << "{ \"seed\": ";
    r = cli("train --config " + (dir / "broken.json").string(), dir);
    CHECK(r.code == 2);

    std::ofstream(dir / "missing_ckpt.json")
        << R"({"dataset": {"source": "synthetic", "classes": [0, 1], "width": 4, "height": 4,
              "synth_per_class": 10, "n_train": 10, "n_test": 5, "eval_size": 5},
              "models": [{"id": "m", "family": "mlp", "checkpoint": "nowhere.ckpt"}]})";
    r = cli("attack --config " + (dir / "missing_ckpt.json").string() + " --out " +
                (dir / "o").string(),
            dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("category=configuration") != std::string::npos);

    r = cli("transfer " + cfg + " --epsilon-grid 0.2,0.1", dir);
    CHECK(r.code == 3);

    r = cli("train " + cfg + " --dataset /no/such/images,/no/such/labels", dir);
    CHECK(r.code == 10);
    CHECK(r.err.find("category=io") != std::string::npos);

    r = cli("noise-sweep " + cfg + " --model mlp", dir);
    CHECK(r.code == 3);
}

TEST_CASE("CLI subcommands write CSV and manifest deterministically", "[harness][cli]") {
    const auto dir = scratch("cli_runs");
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"train", {"train_history.csv", "train_summary.csv", "models/mlp.ckpt"}},
        {"attack", {"attack.csv", "attacks/qvc/eps_0.1/examples.bin"}},
        {"transfer", {"transfer_mlp.csv", "transfer_qvc.csv", "asymmetry.csv"}},
        {"advtrain", {"advtrain_history.csv", "advtrain_whitebox.csv", "advtrain_transfer.csv"}},
        {"noise-sweep", {"noise.csv"}},
        {"detect", {"detection.csv"}},
        {"export", {"export/mlp_eps_0.1/index.csv", "export/mlp_eps_0.1/ex1_delta.pgm"}},
    };
    for (const auto &[cmd, files] : runs) {
        INFO(cmd);
        for (const char *run : {"a", "b"}) {
            const auto out = dir / (cmd + run);
            const auto r =
                cli(cmd + " --config " + kSmoke.string() + " --out " + out.string(), dir);
            REQUIRE(r.code == 0);
            CHECK(fs::exists(out / "manifest.json"));
        }
        for (const auto &f : files) {
            INFO(f);
            REQUIRE(fs::exists(dir / (cmd + "a") / f));
            CHECK(slurp(dir / (cmd + "a") / f) == slurp(dir / (cmd + "b") / f));
        }
        CHECK(slurp(dir / (cmd + "a") / "manifest.json") ==
              slurp(dir / (cmd + "b") / "manifest.json"));
    }

    const auto noise = slurp(dir / "noise-sweepa" / "noise.csv");
    CHECK(noise.rfind("noise_kind,strength,trajectories,accuracy,ci_low,ci_high\n", 0) == 0);
    const auto transfer = slurp(dir / "transfera" / "transfer_mlp.csv");
    CHECK(std::count(transfer.begin(), transfer.end(), '\n') == 1 + 2 * (1 + 3));
    const auto manifest = nlohmann::json::parse(slurp(dir / "transfera" / "manifest.json"));
    CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
    CHECK(manifest.at("seeds").contains("attack"));

    // a trained checkpoint can be fed back through the config
    std::ofstream(dir / "from_ckpt.json")
        << nlohmann::json{{"dataset", {{"source", "synthetic"}, {"classes", {0, 1, 2}},
                                       {"width", 4}, {"height", 4}, {"synth_per_class", 30},
                                       {"n_train", 45}, {"n_test", 30}, {"eval_size", 20}}},
                          {"seed", 7},
                          {"models", {{{"id", "mlp"}, {"family", "mlp"},
                                       {"checkpoint", (dir / "traina/models/mlp.ckpt").string()}}}}}
               .dump();
    CHECK(cli("attack --config " + (dir / "from_ckpt.json").string() + " --out " +
                  (dir / "ckpt").string(),
              dir)
              .code == 0);
}
