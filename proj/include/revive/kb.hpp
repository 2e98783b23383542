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

#include <filesystem>
#include <string>
#include <vector>

#include "revive/vecindex.hpp"

namespace revive::kb {

struct KnowledgeEntry {
    std::string entity;
    std::string description;
    std::string category;
    std::vector<float> embedding;  // empty until attach_embeddings
};

struct TagEntry {
    std::string tag;
    std::vector<float> embedding;
};

// Role, Point of interest, Tool, Vehicle, Animal, Clothing, Company, Sport.
const std::vector<std::string>& default_categories();

// Every well-formed entry of a KB JSONL file, in file order, unfiltered.
// Blank lines are skipped; a malformed line throws with its 1-based number.
std::vector<KnowledgeEntry> read_kb_file(const std::filesystem::path& path);

std::vector<KnowledgeEntry> filter_by_category(const std::vector<KnowledgeEntry>& entries,
                                               const std::vector<std::string>& categories);

// read_kb_file + filter_by_category. An empty result is reported through
// `warnings` (when given) rather than thrown.
std::vector<KnowledgeEntry> load_kb(const std::filesystem::path& path,
                                    const std::vector<std::string>& categories = default_categories(),
                                    std::vector<std::string>* warnings = nullptr);

// "{entity} is a {description}", the text embedded for retrieval.
std::string reformat_entry(const KnowledgeEntry& entry);

std::vector<KnowledgeEntry> attach_embeddings(std::vector<KnowledgeEntry> entries,
                                              const vecindex::EmbeddingMatrix& matrix);

// One tag per line, UTF-8; trailing '\r' stripped, blank lines skipped.
std::vector<TagEntry> load_tags(const std::filesystem::path& path);

std::vector<TagEntry> attach_embeddings(std::vector<TagEntry> tags, const vecindex::EmbeddingMatrix& matrix);

// Row r of the result is entry r's embedding; ids are row indices.
vecindex::EmbeddingMatrix embedding_matrix(const std::vector<KnowledgeEntry>& entries);
vecindex::EmbeddingMatrix embedding_matrix(const std::vector<TagEntry>& tags);

void write_kb_file(const std::filesystem::path& path, const std::vector<KnowledgeEntry>& entries);
void write_tags(const std::filesystem::path& path, const std::vector<TagEntry>& tags);

} // namespace revive::kb
