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

#include "revive/eval.hpp"
#include "revive/kb.hpp"
#include "revive/oracle.hpp"
#include "revive/regions.hpp"

// Synthetic knowledge-VQA task. Each sample's answer is planted in exactly
// one channel:
//   explicit  - a KB entry "{entity}: ... known for {answer}" whose
//               embedding is one of the image's region embeddings;
//   implicit  - the majority of the oracle's answer candidates;
//   visual    - the quadrant holding the image's single object region; the
//               text names the object but never its position.
namespace revive::syndata {

inline constexpr const char* kExplicitChannel = "explicit";
inline constexpr const char* kImplicitChannel = "implicit";
inline constexpr const char* kVisualChannel = "visual";

struct SynConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 64;
    std::size_t kb_size = 64;
    std::size_t tag_size = 48;
    std::size_t dim = 32;
    double explicit_share = 1.0 / 3.0;
    double implicit_share = 1.0 / 3.0;
    double visual_share = 1.0 / 3.0;
    std::size_t regions_per_image = 4;
    std::size_t object_count = 8;  // at most 12
    std::size_t answer_pool = 16;
    double eval_fraction = 0.25;
    int width = 640;
    int height = 480;
    // Oracle cache entries are produced for every (P, U) pair listed here so
    // the same data serves tag-count and candidate-count sweeps.
    std::vector<std::size_t> cache_tag_counts = {30};
    std::vector<std::size_t> cache_candidate_counts = {5};
};

struct SynDataset {
    std::vector<kb::KnowledgeEntry> kb;  // embeddings attached
    std::vector<kb::TagEntry> tags;      // embeddings attached
    std::vector<regions::RegionArtifact> artifacts;
    std::vector<eval::QASample> samples;
    std::vector<oracle::CacheRecord> cache;
};

SynDataset generate(const SynConfig& config);

// kb.jsonl, kb.rvem, tags.txt, tags.rvem, regions/, samples.jsonl,
// oracle_cache.jsonl
void write_dataset(const SynDataset& data, const std::filesystem::path& dir);

// Accuracy (%) of a solver that answers with the planted label.
double label_solver_accuracy(const SynDataset& data);

} // namespace revive::syndata
