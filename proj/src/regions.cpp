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

#include "revive/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "revive/error.hpp"
#include "revive/rvem.hpp"

namespace revive::regions {

namespace {

Error invalid(const std::string& image_id, const std::string& why) {
    return Error(ErrorKind::kValidation, "region artifact '" + image_id + "': " + why);
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

void validate(const RegionArtifact& a) {
    if (a.image_id.empty()) throw invalid(a.image_id, "empty image_id");
    if (a.caption.empty()) throw invalid(a.image_id, "empty caption");
    if (a.image_size.width <= 0 || a.image_size.height <= 0) throw invalid(a.image_id, "non-positive image size");
    if (a.boxes.size() != a.region_embeddings.rows()) {
        throw invalid(a.image_id, std::to_string(a.boxes.size()) + " boxes but " +
                                          std::to_string(a.region_embeddings.rows()) + " embedding rows");
    }
    for (std::size_t j = 0; j < a.boxes.size(); ++j) {
        const Box& b = a.boxes[j];
        const bool ok = 0 <= b.x1 && b.x1 < b.x2 && b.x2 <= a.image_size.width && 0 <= b.y1 && b.y1 < b.y2 &&
                        b.y2 <= a.image_size.height;
        if (!ok) throw invalid(a.image_id, "box " + std::to_string(j) + " is degenerate or outside the image");
    }
}

std::vector<RegionArtifact> load_region_artifacts(const std::filesystem::path& dir, RegionManifest* manifest) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::kMissingInput, "region artifact directory '" + dir.string() + "' not found");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<RegionArtifact> out;
    RegionManifest m;
    for (const auto& file : files) {
        std::ifstream in(file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, file.string() + ": " + e.what());
        }
        RegionArtifact a;
        try {
            a.image_id = j.at("image_id").get<std::string>();
            a.image_size = {j.at("width").get<int>(), j.at("height").get<int>()};
            a.caption = j.at("caption").get<std::string>();
            a.embedding_file = j.at("embedding_file").get<std::string>();
            for (const auto& b : j.at("boxes")) {
                if (b.size() != 4) throw invalid(a.image_id, "box must have 4 coordinates");
                a.boxes.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()});
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, file.string() + ": " + e.what());
        }
        const auto emb_path = dir / a.embedding_file;
        if (!std::filesystem::exists(emb_path)) {
            throw Error(ErrorKind::kMissingInput,
                        "region artifact '" + a.image_id + "': embedding file '" + emb_path.string() + "' missing");
        }
        a.region_embeddings = rvem::read(emb_path);
        validate(a);

        // an image without regions carries no width information
        if (m.embedding_dim == 0 && a.region_count() > 0) m.embedding_dim = a.region_embeddings.dim();
        if (a.region_count() > 0 && a.region_embeddings.dim() != m.embedding_dim) {
            throw invalid(a.image_id, "embedding dim " + std::to_string(a.region_embeddings.dim()) +
                                              " differs from " + std::to_string(m.embedding_dim));
        }
        for (std::size_t r = 0; r < a.region_embeddings.rows(); ++r) {
            const double norm = std::sqrt(vecindex::dot(a.region_embeddings.row(r), a.region_embeddings.row(r)));
            if (std::abs(norm - 1.0) > 1e-3) m.embeddings_normalized = false;
        }
        ++m.images;
        m.total_regions += a.region_count();
        if (a.region_count() == 0) ++m.empty_artifacts;
        out.push_back(std::move(a));
    }
    if (manifest != nullptr) *manifest = m;
    return out;
}

void write_region_artifact(const std::filesystem::path& dir, const RegionArtifact& artifact) {
    validate(artifact);
    std::filesystem::create_directories(dir);
    const std::string emb_name =
            artifact.embedding_file.empty() ? artifact.image_id + ".rvem" : artifact.embedding_file;
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : artifact.boxes) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
    nlohmann::json j = {{"image_id", artifact.image_id},
                        {"width", artifact.image_size.width},
                        {"height", artifact.image_size.height},
                        {"caption", artifact.caption},
                        {"boxes", boxes},
                        {"embedding_file", emb_name}};
    std::ofstream out(dir / (artifact.image_id + ".json"), std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write artifact for '" + artifact.image_id + "'");
    out << j.dump() << '\n';
    rvem::write(dir / emb_name, artifact.region_embeddings);
}

NormalizedBox normalize_box(const Box& box, ImageSize size) {
    if (size.width <= 0 || size.height <= 0) throw Error(ErrorKind::kInvalidArgument, "non-positive image size");
    if (!(box.x1 < box.x2) || !(box.y1 < box.y2)) {
        throw Error(ErrorKind::kInvalidArgument, "degenerate box (zero area)");
    }
    if (box.x1 < 0 || box.y1 < 0 || box.x2 > size.width || box.y2 > size.height) {
        throw Error(ErrorKind::kInvalidArgument, "box outside image bounds");
    }
    const double w = size.width;
    const double h = size.height;
    return {box.x1 / w, box.y1 / h, box.x2 / w, box.y2 / h};
}

Box denormalize_box(const NormalizedBox& box, ImageSize size) {
    const double w = size.width;
    const double h = size.height;
    return {box.x1 * w, box.y1 * h, box.x2 * w, box.y2 * h};
}

std::vector<TagHit> retrieve_tags(const RegionArtifact& artifact, const vecindex::Index& tag_index,
                                  const std::vector<kb::TagEntry>& tags, std::size_t p,
                                  vecindex::Aggregation aggregation) {
    if (tags.size() != tag_index.size()) {
        throw Error(ErrorKind::kDimensionMismatch, "tag list does not match tag index size");
    }
    if (p == 0) throw Error(ErrorKind::kInvalidArgument, "p must be >= 1");
    if (artifact.region_count() == 0) return {};
    std::vector<TagHit> out;
    for (auto& h : tag_index.multi_query_topk(artifact.region_embeddings, p, aggregation)) {
        out.push_back({tags[h.row].tag, h.score, h.query_index});
    }
    return out;
}

std::vector<KnowledgeHit> retrieve_explicit(const RegionArtifact& artifact, const vecindex::Index& kb_index,
                                            const std::vector<kb::KnowledgeEntry>& entries, std::size_t k,
                                            vecindex::Aggregation aggregation) {
    if (entries.size() != kb_index.size()) {
        throw Error(ErrorKind::kDimensionMismatch, "entry list does not match knowledge index size");
    }
    if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
    if (artifact.region_count() == 0) return {};
    std::vector<KnowledgeHit> out;
    for (auto& h : kb_index.multi_query_topk(artifact.region_embeddings, k, aggregation)) {
        out.push_back({entries[h.row], h.score, h.query_index});
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::vector<float> stub_embed(std::string_view text, std::size_t dim) {
    if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "stub_embed dim must be >= 1");
    std::uint64_t state = fnv1a64(text);
    std::vector<double> v(dim);
    double norm2 = 0.0;
    for (auto& x : v) {
        const std::uint64_t bits = splitmix64(state) >> 11;  // 53 bits
        x = static_cast<double>(bits) * 0x1.0p-52 - 1.0;
        norm2 += x * x;
    }
    if (norm2 == 0.0) {
        v[0] = 1.0;
        norm2 = 1.0;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<float> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] * inv);
    return out;
}

} // namespace revive::regions
