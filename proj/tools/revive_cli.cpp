// Copyright 2026 The Revive Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "revive/config.hpp"
#include "revive/error.hpp"
#include "revive/pipeline.hpp"
#include "revive/syndata.hpp"

namespace {

using namespace revive;

int fail(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"revive: knowledge-augmented visual question answering pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the top-level seed");
    app.add_option("--config", config_path, "Pipeline config (JSON)");
    app.add_option("--set", overrides, "Override a config key, e.g. --set retrieval.M=18")->take_all();

    auto* ingest = app.add_subcommand("ingest", "Load KB, tags and region artifacts; build the store");
    auto* retrieve = app.add_subcommand("retrieve", "Retrieve tags, explicit entries and oracle candidates");
    auto* train = app.add_subcommand("train", "Train one model per ensemble seed");
    auto* predict = app.add_subcommand("predict", "Write predictions.jsonl");
    auto* evaluate = app.add_subcommand("eval", "Score predictions; write report.json and report.csv");
    auto* sweep = app.add_subcommand("sweep", "Run ingest..eval over a parameter grid");
    std::vector<std::string> grid;
    sweep->add_option("--grid", grid, "Axis key=v1,v2,... (repeatable)")->required()->take_all();
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
    syndata::SynConfig syn;
    std::string synth_dir;
    synth->add_option("dir", synth_dir, "Output directory")->required();
    synth->add_option("--samples", syn.samples);
    synth->add_option("--kb-size", syn.kb_size);
    synth->add_option("--tag-size", syn.tag_size);
    synth->add_option("--dim", syn.dim);
    synth->add_option("--explicit-share", syn.explicit_share);
    synth->add_option("--implicit-share", syn.implicit_share);
    synth->add_option("--visual-share", syn.visual_share);
    synth->add_option("--regions", syn.regions_per_image);
    synth->add_option("--objects", syn.object_count);
    synth->add_option("--answers", syn.answer_pool);
    synth->add_option("--eval-fraction", syn.eval_fraction);
    synth->add_option("--cache-tags", syn.cache_tag_counts, "P values to record oracle transcripts for");
    synth->add_option("--cache-candidates", syn.cache_candidate_counts, "U values to record oracle transcripts for");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("invalid_argument", e.what());
    }

    try {
        if (*synth) {
            if (*seed_opt) syn.seed = seed;
            syndata::write_dataset(syndata::generate(syn), synth_dir);
            return 0;
        }
        if (*seed_opt) overrides.push_back("seed=" + std::to_string(seed));
        const auto config = pipeline::load_config(config_path, overrides);
        if (*ingest) pipeline::cmd_ingest(config);
        if (*retrieve) pipeline::cmd_retrieve(config);
        if (*train) pipeline::cmd_train(config);
        if (*predict) pipeline::cmd_predict(config);
        if (*evaluate) std::cout << pipeline::cmd_eval(config).summary_json().dump() << '\n';
        if (*sweep) {
            std::vector<std::pair<std::string, std::vector<std::string>>> axes;
            for (const auto& g : grid) axes.push_back(pipeline::parse_grid_axis(g));
            for (const auto& row : pipeline::cmd_sweep(config, axes)) {
                nlohmann::json j;
                for (const auto& [k, v] : row.setting) j[k] = v;
                j["accuracy"] = row.accuracy_percent;
                std::cout << j.dump() << '\n';
            }
        }
    } catch (const Error& e) {
        return fail(error_kind_name(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
