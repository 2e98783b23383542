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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "revive/config.hpp"
#include "revive/eval.hpp"
#include "revive/fusion_model.hpp"
#include "revive/kb.hpp"
#include "revive/oracle.hpp"
#include "revive/regions.hpp"
#include "revive/tokenizer.hpp"
#include "revive/trainer.hpp"
#include "revive/vecindex.hpp"

// End-to-end stages. Each cmd_* reads its inputs from files under
// paths.output (or the configured input paths) and writes its outputs there,
// each with a "<file>.manifest.json" sidecar.
//
//   ingest    store/{kb.jsonl, kb.rvem, tags.txt, tags.rvem, store.json}
//   retrieve  retrieval.jsonl
//   train     vocab.txt, models/model_seed<s>.rvck, models/loss_seed<s>.csv
//   predict   predictions.jsonl
//   eval      report.json, report.csv
//   sweep     sweep/<setting>/..., sweep.csv
namespace revive::pipeline {

inline constexpr const char* kVersion = "1.0.0";

// Category-filtered KB and tag vocabulary with exact indexes, plus the
// region artifacts keyed by image id.
struct Store {
    std::vector<kb::KnowledgeEntry> kb;
    std::vector<kb::TagEntry> tags;
    std::optional<vecindex::Index> kb_index;   // absent when the KB is empty
    std::optional<vecindex::Index> tag_index;  // absent when there are no tags
    std::map<std::string, regions::RegionArtifact> artifacts;
    regions::RegionManifest manifest;
    std::vector<std::string> warnings;

    const regions::RegionArtifact& artifact(const std::string& image_id) const;
};

Store make_store(std::vector<kb::KnowledgeEntry> kb, std::vector<kb::TagEntry> tags,
                 std::vector<regions::RegionArtifact> artifacts, const std::vector<std::string>& categories);

struct ExplicitHit {
    std::string entity;
    std::string description;
    std::string category;
    double score = 0;
};

struct SampleRetrieval {
    std::string sample_id;
    std::string image_id;
    std::string prompt;  // context-aware prompt X
    std::vector<std::string> tags;
    std::vector<ExplicitHit> explicit_hits;
    std::vector<oracle::ImplicitCandidate> implicit;

    nlohmann::json to_json() const;
    static SampleRetrieval from_json(const nlohmann::json& j);
};

SampleRetrieval retrieve_sample(const Store& store, const eval::QASample& sample, oracle::Oracle& oracle,
                                const RetrievalConfig& config);

// Fans out over `threads` workers; the result is in sample order.
std::vector<SampleRetrieval> retrieve_all(const Store& store, const std::vector<eval::QASample>& samples,
                                          oracle::Oracle& oracle, const RetrievalConfig& config,
                                          std::size_t threads = 1);

// All text the model reads for one sample, in passage order.
std::vector<std::string> passage_texts(const SampleRetrieval& retrieval);

// Training label: the most frequent normalized ground-truth answer, ties to
// the earliest.
std::string training_answer(const eval::QASample& sample);

fusion::Vocabulary build_vocabulary(const std::vector<SampleRetrieval>& retrievals,
                                    const std::vector<eval::QASample>& samples, std::size_t max_size);

// Tokenized passages plus the first M regions (detector order) with
// normalized boxes.
fusion::FusionInput build_fusion_input(const SampleRetrieval& retrieval, const regions::RegionArtifact& artifact,
                                       const fusion::Vocabulary& vocab, std::size_t max_regions,
                                       std::size_t max_tokens);

std::vector<fusion::TrainingExample> training_examples(const Store& store, const std::vector<eval::QASample>& samples,
                                                       const std::vector<SampleRetrieval>& retrievals,
                                                       const fusion::Vocabulary& vocab, std::size_t max_regions,
                                                       std::size_t max_tokens);

// Answers for every sample; ensembles when more than one model is given.
std::vector<std::string> predict_answers(std::vector<fusion::FusionModel>& models,
                                         const std::vector<fusion::FusionInput>& inputs,
                                         const fusion::Vocabulary& vocab, std::size_t max_len,
                                         std::size_t threads = 1);

// Samples whose split matches ("all" matches everything).
std::vector<eval::QASample> select_split(const std::vector<eval::QASample>& samples, const std::string& split);

void write_manifest(const std::filesystem::path& output_file, const PipelineConfig& config,
                    const std::string& command);

void cmd_ingest(const PipelineConfig& config);
void cmd_retrieve(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
void cmd_predict(const PipelineConfig& config);
eval::Report cmd_eval(const PipelineConfig& config);

struct SweepRow {
    std::vector<std::pair<std::string, std::string>> setting;
    double accuracy_percent = 0;
};

// Runs ingest..eval for every combination of the grid (keys are override
// paths such as "retrieval.M") and writes sweep.csv.
std::vector<SweepRow> cmd_sweep(const PipelineConfig& config,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& grid);

// Parses "key=v1,v2,...".
std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text);

} // namespace revive::pipeline
