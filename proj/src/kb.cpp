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

#include "revive/kb.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "revive/error.hpp"

namespace revive::kb {

namespace {

template <typename Entry>
std::vector<Entry> attach(std::vector<Entry> items, const vecindex::EmbeddingMatrix& matrix, const char* what) {
    if (matrix.rows() != items.size()) {
        throw Error(ErrorKind::kDimensionMismatch, std::string(what) + ": " + std::to_string(items.size()) +
                                                           " entries but " + std::to_string(matrix.rows()) +
                                                           " embedding rows");
    }
    for (std::size_t r = 0; r < items.size(); ++r) {
        auto row = matrix.row(r);
        items[r].embedding.assign(row.begin(), row.end());
    }
    return items;
}

template <typename Entry>
vecindex::EmbeddingMatrix to_matrix(const std::vector<Entry>& items, const char* what) {
    if (items.empty()) throw Error(ErrorKind::kInvalidArgument, std::string(what) + ": no entries");
    const std::size_t dim = items.front().embedding.size();
    std::vector<float> flat;
    flat.reserve(items.size() * dim);
    for (std::size_t r = 0; r < items.size(); ++r) {
        if (items[r].embedding.size() != dim || dim == 0) {
            throw Error(ErrorKind::kDimensionMismatch,
                        std::string(what) + ": entry " + std::to_string(r) + " has no embedding of dim " +
                                std::to_string(dim));
        }
        flat.insert(flat.end(), items[r].embedding.begin(), items[r].embedding.end());
    }
    return vecindex::EmbeddingMatrix(dim, std::move(flat));
}

} // namespace

const std::vector<std::string>& default_categories() {
    static const std::vector<std::string> kCategories = {
            "Role", "Point of interest", "Tool", "Vehicle", "Animal", "Clothing", "Company", "Sport"};
    return kCategories;
}

std::vector<KnowledgeEntry> read_kb_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingInput, "knowledge base '" + path.string() + "' not found");
    std::vector<KnowledgeEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto fail = [&](const std::string& why) {
            return Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": " + why);
        };
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw fail(std::string("invalid JSON: ") + e.what());
        }
        KnowledgeEntry entry;
        try {
            entry.entity = j.at("entity").get<std::string>();
            entry.description = j.at("description").get<std::string>();
            entry.category = j.at("category").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw fail(std::string("missing or mistyped field: ") + e.what());
        }
        if (entry.entity.empty() || entry.description.empty()) throw fail("empty entity or description");
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<KnowledgeEntry> filter_by_category(const std::vector<KnowledgeEntry>& entries,
                                               const std::vector<std::string>& categories) {
    std::vector<KnowledgeEntry> out;
    for (const auto& e : entries) {
        if (std::find(categories.begin(), categories.end(), e.category) != categories.end()) out.push_back(e);
    }
    return out;
}

std::vector<KnowledgeEntry> load_kb(const std::filesystem::path& path, const std::vector<std::string>& categories,
                                    std::vector<std::string>* warnings) {
    auto entries = filter_by_category(read_kb_file(path), categories);
    if (entries.empty() && warnings != nullptr) {
        warnings->push_back("knowledge base '" + path.string() + "' has no entries in the selected categories");
    }
    return entries;
}

std::string reformat_entry(const KnowledgeEntry& entry) {
    return entry.entity + " is a " + entry.description;
}

std::vector<KnowledgeEntry> attach_embeddings(std::vector<KnowledgeEntry> entries,
                                              const vecindex::EmbeddingMatrix& matrix) {
    return attach(std::move(entries), matrix, "knowledge base");
}

std::vector<TagEntry> load_tags(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingInput, "tag vocabulary '" + path.string() + "' not found");
    std::vector<TagEntry> tags;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!seen.insert(line).second) {
            throw Error(ErrorKind::kValidation,
                        path.string() + ":" + std::to_string(line_no) + ": duplicate tag '" + line + "'");
        }
        tags.push_back(TagEntry{line, {}});
    }
    return tags;
}

std::vector<TagEntry> attach_embeddings(std::vector<TagEntry> tags, const vecindex::EmbeddingMatrix& matrix) {
    return attach(std::move(tags), matrix, "tag vocabulary");
}

vecindex::EmbeddingMatrix embedding_matrix(const std::vector<KnowledgeEntry>& entries) {
    return to_matrix(entries, "knowledge base");
}

vecindex::EmbeddingMatrix embedding_matrix(const std::vector<TagEntry>& tags) {
    return to_matrix(tags, "tag vocabulary");
}

void write_kb_file(const std::filesystem::path& path, const std::vector<KnowledgeEntry>& entries) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
    for (const auto& e : entries) {
        nlohmann::json j = {{"entity", e.entity}, {"description", e.description}, {"category", e.category}};
        out << j.dump() << '\n';
    }
}

void write_tags(const std::filesystem::path& path, const std::vector<TagEntry>& tags) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
    for (const auto& t : tags) out << t.tag << '\n';
}

} // namespace revive::kb
