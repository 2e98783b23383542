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

#include "revive/oracle.hpp"

#include <fstream>
#include <mutex>

#include <json.hpp>

#include "revive/prompts.hpp"

namespace revive::oracle {

void MockOracle::set(const std::string& prompt, std::vector<std::string> completions) {
    table_[prompt] = std::move(completions);
}

std::vector<std::string> MockOracle::complete(const std::string& prompt, std::size_t n) {
    ++calls_;
    auto it = table_.find(prompt);
    if (it == table_.end()) {
        if (fallback_) return fallback_(prompt, n);
        throw OracleError("mock oracle has no completion for prompt '" + prompt + "'", 0);
    }
    std::vector<std::string> out(it->second.begin(), it->second.begin() + std::min(n, it->second.size()));
    return out;
}

std::vector<CacheRecord> read_cache_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingInput, "oracle cache '" + path.string() + "' not found");
    std::vector<CacheRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            records.push_back({j.at("prompt").get<std::string>(), j.at("n").get<std::size_t>(),
                               j.at("completions").get<std::vector<std::string>>()});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

namespace {

std::string record_line(const CacheRecord& r) {
    nlohmann::json j = {{"prompt", r.prompt}, {"n", r.n}, {"completions", r.completions}};
    return j.dump();
}

} // namespace

void write_cache_file(const std::filesystem::path& path, const std::vector<CacheRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write oracle cache '" + path.string() + "'");
    for (const auto& r : records) out << record_line(r) << '\n';
}

ReplayCache::ReplayCache(std::filesystem::path path, std::shared_ptr<Oracle> inner)
        : path_(std::move(path)), inner_(std::move(inner)) {
    if (std::filesystem::exists(path_)) {
        for (auto& r : read_cache_file(path_)) insert(std::move(r));
    } else if (!inner_) {
        throw Error(ErrorKind::kMissingInput,
                    "oracle cache '" + path_.string() + "' not found and no live oracle configured");
    }
}

std::unique_ptr<ReplayCache> ReplayCache::in_memory(std::vector<CacheRecord> records,
                                                    std::shared_ptr<Oracle> inner) {
    std::unique_ptr<ReplayCache> cache(new ReplayCache(std::move(inner)));
    for (auto& r : records) cache->insert(std::move(r));
    return cache;
}

void ReplayCache::insert(CacheRecord record) {
    records_[{std::move(record.prompt), record.n}] = std::move(record.completions);
}

std::size_t ReplayCache::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::vector<std::string> ReplayCache::complete(const std::string& prompt, std::size_t n) {
    {
        std::shared_lock lock(mutex_);
        auto it = records_.find({prompt, n});
        if (it != records_.end()) {
            ++hits_;
            return it->second;
        }
    }
    ++misses_;
    if (!inner_) {
        throw OracleError("oracle cache miss for (n=" + std::to_string(n) + ") prompt '" + prompt + "'", 0);
    }
    auto completions = inner_->complete(prompt, n);

    std::unique_lock lock(mutex_);
    auto [it, inserted] = records_.try_emplace({prompt, n}, completions);
    if (inserted && !path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw Error(ErrorKind::kIo, "cannot append to oracle cache '" + path_.string() + "'");
        out << record_line({prompt, n, completions}) << '\n';
    }
    return it->second;
}

std::vector<ImplicitCandidate> retrieve_implicit(Oracle& oracle, const std::string& prompt_x,
                                                 const std::string& question, std::size_t u) {
    if (u == 0) throw Error(ErrorKind::kInvalidArgument, "u must be >= 1");
    std::vector<std::string> answers;
    try {
        answers = oracle.complete(prompt_x, u);
    } catch (const OracleError& e) {
        throw OracleError(std::string("answer query failed: ") + e.what(), 0);
    } catch (const std::exception& e) {
        throw OracleError(std::string("answer query failed: ") + e.what(), 0);
    }
    if (answers.size() != u) {
        throw OracleError("oracle returned " + std::to_string(answers.size()) + " answers, expected " +
                                  std::to_string(u),
                          0);
    }

    std::vector<ImplicitCandidate> out;
    out.reserve(u);
    for (const auto& answer : answers) {
        if (answer.empty()) throw OracleError("oracle returned an empty answer candidate", out.size());
        std::vector<std::string> explanation;
        try {
            explanation = oracle.complete(prompts::build_explanation_prompt(question, answer), 1);
        } catch (const std::exception& e) {
            throw OracleError("explanation query " + std::to_string(out.size()) + " failed: " + e.what(),
                              out.size());
        }
        out.push_back({answer, explanation.empty() ? std::string() : explanation.front()});
    }
    return out;
}

} // namespace revive::oracle
