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

#include "revive/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "revive/error.hpp"

namespace revive::fusion {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '\'' ||
           c == '_' || c >= 0x80;
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

Vocabulary::Vocabulary() {
    for (const char* w : {"<pad>", "<unk>", "<bos>", "<eos>"}) add(w);
}

void Vocabulary::add(std::string word) {
    if (index_.count(word) != 0) return;
    index_.emplace(word, static_cast<int>(words_.size()));
    words_.push_back(std::move(word));
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus, std::size_t max_size) {
    std::map<std::string, std::size_t> counts;
    for (const auto& text : corpus) {
        for (auto& w : split_words(text)) ++counts[w];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    for (auto& [word, count] : ranked) {
        if (max_size != 0 && v.size() >= max_size) break;
        v.add(word);
    }
    return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingInput, "vocabulary '" + path.string() + "' not found");
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) words.push_back(line);
    Vocabulary v;
    if (words.size() < kReservedIds) throw Error(ErrorKind::kParse, "vocabulary '" + path.string() + "' too short");
    for (int i = 0; i < kReservedIds; ++i) {
        if (words[static_cast<std::size_t>(i)] != v.words_[static_cast<std::size_t>(i)]) {
            throw Error(ErrorKind::kParse, "vocabulary '" + path.string() + "' has unexpected reserved tokens");
        }
    }
    for (std::size_t i = kReservedIds; i < words.size(); ++i) v.add(words[i]);
    return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write vocabulary '" + path.string() + "'");
    for (const auto& w : words_) out << w << '\n';
}

int Vocabulary::id(std::string_view word) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) return words_[kUnkId];
    return words_[static_cast<std::size_t>(id)];
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
            continue;
        }
        if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
        if (!is_space(c)) out.emplace_back(1, static_cast<char>(c));
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<int> tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_tokens) {
    std::vector<int> ids;
    for (const auto& w : split_words(text)) ids.push_back(vocab.id(w));
    if (max_tokens != 0 && ids.size() + 1 > max_tokens) ids.resize(max_tokens - 1);
    ids.push_back(kEosId);
    return ids;
}

std::string detokenize(std::span<const int> ids, const Vocabulary& vocab) {
    std::string out;
    for (int id : ids) {
        if (id == kEosId) break;
        if (id == kPadId || id == kBosId) continue;
        if (!out.empty()) out += ' ';
        out += vocab.word(id);
    }
    return out;
}

} // namespace revive::fusion
