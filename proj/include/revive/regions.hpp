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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "revive/kb.hpp"
#include "revive/vecindex.hpp"

namespace revive::regions {

inline constexpr std::size_t kDefaultTagCount = 30;        // P
inline constexpr std::size_t kDefaultKnowledgeCount = 40;  // K

struct ImageSize {
    int width = 0;
    int height = 0;
};

// Absolute pixel coordinates.
struct Box {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

// Fractions of image width/height.
struct NormalizedBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    std::array<double, 4> as_array() const { return {x1, y1, x2, y2}; }
};

struct RegionArtifact {
    std::string image_id;
    std::vector<Box> boxes;  // detector order
    ImageSize image_size;
    vecindex::EmbeddingMatrix region_embeddings;  // one row per box
    std::string caption;
    std::string embedding_file;  // relative to the artifact directory

    std::size_t region_count() const { return boxes.size(); }
};

struct RegionManifest {
    std::size_t images = 0;
    std::size_t total_regions = 0;
    std::size_t empty_artifacts = 0;
    // True when every region embedding has unit L2 norm (within 1e-3).
    bool embeddings_normalized = true;
    std::size_t embedding_dim = 0;
};

// Throws Error(kValidation) naming the image id on any invariant violation.
void validate(const RegionArtifact& artifact);

// Reads every *.json in `dir` (sorted by file name) plus its RVEM file.
std::vector<RegionArtifact> load_region_artifacts(const std::filesystem::path& dir,
                                                  RegionManifest* manifest = nullptr);

// Writes "<dir>/<image_id>.json" and the RVEM file named by embedding_file
// (defaulting to "<image_id>.rvem").
void write_region_artifact(const std::filesystem::path& dir, const RegionArtifact& artifact);

NormalizedBox normalize_box(const Box& box, ImageSize size);
Box denormalize_box(const NormalizedBox& box, ImageSize size);

struct TagHit {
    std::string tag;
    double score = 0;
    std::size_t query_index = 0;
};

struct KnowledgeHit {
    kb::KnowledgeEntry entry;
    double score = 0;
    std::size_t query_index = 0;
};

// Global top-p tags over all regions. An artifact with no regions yields no
// tags. `tags[r]` must correspond to row r of `tag_index`.
std::vector<TagHit> retrieve_tags(const RegionArtifact& artifact, const vecindex::Index& tag_index,
                                  const std::vector<kb::TagEntry>& tags, std::size_t p = kDefaultTagCount,
                                  vecindex::Aggregation aggregation = vecindex::Aggregation::kGlobalMax);

std::vector<KnowledgeHit> retrieve_explicit(const RegionArtifact& artifact, const vecindex::Index& kb_index,
                                            const std::vector<kb::KnowledgeEntry>& entries,
                                            std::size_t k = kDefaultKnowledgeCount,
                                            vecindex::Aggregation aggregation = vecindex::Aggregation::kGlobalMax);

// Deterministic unit-norm test embedding: FNV-1a of the text seeds a
// splitmix64 stream whose outputs map to uniform [-1, 1) components. Uses only
// integer arithmetic and one correctly rounded sqrt, so results match across
// platforms.
std::vector<float> stub_embed(std::string_view text, std::size_t dim);

std::uint64_t fnv1a64(std::string_view text);

} // namespace revive::regions
