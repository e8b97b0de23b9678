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
 * CSV tables and the run manifest.
 */
#pragma once

#include "qrobust/error.hpp"
#include "qrobust/harness/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qrobust::harness {

/// Minimal CSV table; cells are written verbatim (no field contains separators).
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable &row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) {
            throw ConfigurationError("CSV row has " + std::to_string(cells.size()) +
                                     " cells, header has " + std::to_string(header_.size()));
        }
        rows_.push_back(std::move(cells));
        return *this;
    }

    [[nodiscard]] const std::vector<std::vector<std::string>> &rows() const { return rows_; }

    [[nodiscard]] std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out += i ? "," : "";
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto &r : rows_) {
            line(r);
        }
        return out;
    }

    void write(const std::filesystem::path &path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << str();
        if (!f) {
            throw IoError("cannot write '" + path.string() + "'");
        }
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string num(double v) { return format_number(v); }
inline std::string num(std::size_t v) { return std::to_string(v); }

/// Collects the files a subcommand wrote and emits manifest.json last.
class RunManifest {
  public:
    RunManifest(std::string command, const ExperimentConfig &config)
        : command_(std::move(command)), config_(config), hash_(config_hash(config)) {}

    [[nodiscard]] const std::string &hash() const { return hash_; }

    void add_output(const std::filesystem::path &relative) {
        outputs_.push_back(relative.generic_string());
    }
    void note(const std::string &key, nlohmann::json value) { notes_[key] = std::move(value); }

    void write(const std::filesystem::path &out_dir) const {
        nlohmann::json j;
        j["format"] = "qrobust-run";
        j["version"] = 1;
        j["command"] = command_;
        j["config_hash"] = hash_;
        j["config"] = canonical_json(config_);
        j["seeds"] = seeds_json(config_.seeds);
        auto sorted = outputs_;
        std::sort(sorted.begin(), sorted.end());
        j["outputs"] = sorted;
        j["notes"] = notes_;
        std::ofstream f(out_dir / "manifest.json", std::ios::trunc);
        f << j.dump(2) << '\n';
        if (!f) {
            throw IoError("cannot write manifest in '" + out_dir.string() + "'");
        }
    }

  private:
    std::string command_;
    const ExperimentConfig &config_;
    std::string hash_;
    std::vector<std::string> outputs_;
    nlohmann::json notes_ = nlohmann::json::object();
};

} // namespace qrobust::harness
