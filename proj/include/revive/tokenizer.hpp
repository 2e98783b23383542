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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace revive::fusion {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kBosId = 2;
inline constexpr int kEosId = 3;
inline constexpr int kReservedIds = 4;

// Word-level vocabulary. Ids 0..3 are <pad>, <unk>, <bos>, <eos>; the rest
// are corpus words by descending frequency, ties in byte order.
class Vocabulary {
public:
    Vocabulary();

    static Vocabulary build(const std::vector<std::string>& corpus, std::size_t max_size = 0);
    static Vocabulary load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    int id(std::string_view word) const;
    const std::string& word(int id) const;
    std::size_t size() const { return words_.size(); }

private:
    void add(std::string word);

    std::vector<std::string> words_;
    std::unordered_map<std::string, int> index_;
};

// Lowercased words. ASCII letters, digits, '-', '\'', '_' and non-ASCII bytes
// form words; every other ASCII punctuation character is its own word.
std::vector<std::string> split_words(std::string_view text);

// Word ids followed by <eos>, truncated so the whole sequence has at most
// max_tokens ids (0 = unlimited). Always at least one id.
std::vector<int> tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_tokens);

// Space-joined words up to the first <eos>; <pad>/<bos> are skipped.
std::string detokenize(std::span<const int> ids, const Vocabulary& vocab);

} // namespace revive::fusion
