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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "revive/fusion_model.hpp"
#include "revive/oracle.hpp"
#include "revive/trainer.hpp"
#include "revive/vecindex.hpp"

// Pipeline configuration: one JSON tree with documented keys, loaded over
// the built-in defaults and then patched by "a.b=value" overrides.
//
//   paths.{kb, kb_embeddings, tags, tag_embeddings, regions, samples, cache, output}
//   retrieval.{U, K, M, P, aggregation ("global_max" | "per_query"), categories}
//   model.*       (ModelConfig; vocab_size and region_dim are set from data)
//   optimizer.*   (lr, warmup, steps, batch, beta1, beta2, eps, weight_decay,
//                  grad_clip, sum_loss)
//   seed, ensemble_seeds, vocab_max, decode_max_len, threads,
//   train_split, predict_split ("all" selects every sample),
//   eval.mode ("simple" | "averaged"), oracle.{endpoint, token_env, params}
namespace revive::pipeline {

struct Paths {
    std::string kb;
    std::string kb_embeddings;
    std::string tags;
    std::string tag_embeddings;
    std::string regions;
    std::string samples;
    std::string cache;
    std::string output = "out";
};

struct RetrievalConfig {
    std::size_t candidates = 5;   // U
    std::size_t knowledge = 40;   // K
    std::size_t regions = 36;     // M, cap on regions fed to the visual encoder
    std::size_t tags = 30;        // P
    vecindex::Aggregation aggregation = vecindex::Aggregation::kGlobalMax;
    std::vector<std::string> categories;
};

struct PipelineConfig {
    Paths paths;
    RetrievalConfig retrieval;
    fusion::ModelConfig model;
    fusion::OptimizerConfig optimizer;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> ensemble_seeds;  // empty: a single model trained with `seed`
    std::size_t vocab_max = 8192;
    std::size_t decode_max_len = 8;
    std::size_t threads = 1;
    std::string train_split = "train";
    std::string predict_split = "eval";
    std::string eval_mode = "simple";
    oracle::LiveOracleConfig oracle;

    PipelineConfig();

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
    void validate() const;

    // Seeds of the models to train and ensemble.
    std::vector<std::uint64_t> model_seeds() const;
    // 16 hex digits of FNV-1a over the canonical JSON dump.
    std::string hash() const;
};

// Defaults, then the file (if non-empty), then each "key.path=value".
// Values parse as JSON when possible and as plain strings otherwise.
PipelineConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& tree, const std::string& assignment);

} // namespace revive::pipeline
