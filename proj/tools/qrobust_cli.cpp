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
// qrobust command-line tool.
//
//   qrobust <train|advtrain|attack|transfer|noise-sweep|detect|export>
//           --config FILE [--seed N] [--out DIR] [--epsilon-grid LIST]
//           [--model IDS] [--dataset SPEC]
//
// Failures print one line to stderr:
//   error: category=<category> message="<text>"
// and exit with the category's code (see exit_code below).

#include "qrobust/harness/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

using qrobust::ErrorCategory;

int exit_code(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Configuration:
        return 3;
    case ErrorCategory::Data:
        return 4;
    case ErrorCategory::Format:
        return 5;
    case ErrorCategory::Capability:
        return 6;
    case ErrorCategory::Capacity:
        return 7;
    case ErrorCategory::DegenerateInput:
        return 8;
    case ErrorCategory::Training:
        return 9;
    case ErrorCategory::Io:
        return 10;
    }
    return 1;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch == '\n' ? ' ' : ch;
    }
    return out;
}

int report(const std::string &category, const std::string &message, int code) {
    std::cerr << "error: category=" << category << " message=\"" << escape(message) << "\"\n";
    return code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qrobust: quantum/classical adversarial-robustness experiments"};
    app.require_subcommand(1, 1);

    qrobust::harness::CommandOptions opt;
    std::uint64_t seed = 0;
    std::string out, grid, models, dataset;
    for (const auto &name : qrobust::harness::command_names()) {
        auto *sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "base seed override");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--epsilon-grid", grid, "comma-separated attack budgets");
        sub->add_option("--model", models, "comma-separated model ids");
        sub->add_option("--dataset", dataset, "synthetic | FILE.qrds | IMAGES,LABELS");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return report("usage", e.what(), 2);
    }

    const auto *sub = app.get_subcommands().front();
    auto given = [&](const char *flag) { return sub->count(flag) > 0; };
    if (given("--seed")) {
        opt.seed = seed;
    }
    if (given("--out")) {
        opt.out = out;
    }
    if (given("--epsilon-grid")) {
        opt.epsilon_grid = grid;
    }
    if (given("--model")) {
        opt.models = qrobust::harness::split_list(models);
    }
    if (given("--dataset")) {
        opt.dataset = dataset;
    }

    try {
        qrobust::harness::run_command(sub->get_name(), opt);
    } catch (const qrobust::harness::UsageError &e) {
        return report("usage", e.what(), 2);
    } catch (const qrobust::Error &e) {
        return report(std::string(qrobust::category_name(e.category())), e.what(),
                      exit_code(e.category()));
    } catch (const std::exception &e) {
        return report("internal", e.what(), 1);
    }
    return 0;
}
