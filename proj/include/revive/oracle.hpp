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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "revive/error.hpp"

namespace revive::oracle {

inline constexpr std::size_t kDefaultCandidateCount = 5;  // U

struct ImplicitCandidate {
    std::string answer;
    std::string explanation;  // may be empty
};

// Text-completion boundary for the implicit-knowledge source. Implementations
// must return identical completions for identical (prompt, n) and state.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual std::vector<std::string> complete(const std::string& prompt, std::size_t n) = 0;
};

class OracleError : public Error {
public:
    OracleError(const std::string& message, std::size_t completed)
            : Error(ErrorKind::kOracle, message), completed_(completed) {}

    // Candidates fully retrieved before the failure.
    std::size_t completed() const { return completed_; }

private:
    std::size_t completed_;
};

// Fixed prompt -> completions table with an optional fallback rule.
class MockOracle : public Oracle {
public:
    using Rule = std::function<std::vector<std::string>(const std::string& prompt, std::size_t n)>;

    MockOracle() = default;
    explicit MockOracle(Rule fallback) : fallback_(std::move(fallback)) {}

    void set(const std::string& prompt, std::vector<std::string> completions);
    std::vector<std::string> complete(const std::string& prompt, std::size_t n) override;

    std::size_t calls() const { return calls_; }

private:
    std::map<std::string, std::vector<std::string>> table_;
    Rule fallback_;
    std::atomic<std::size_t> calls_{0};
};

struct CacheRecord {
    std::string prompt;
    std::size_t n = 0;
    std::vector<std::string> completions;
};

// Record/replay cache keyed by exact (prompt, n). Misses go to the inner
// oracle when present (and are appended to the backing file), otherwise
// throw. Reads take a shared lock; recording takes an exclusive one.
class ReplayCache : public Oracle {
public:
    explicit ReplayCache(std::filesystem::path path, std::shared_ptr<Oracle> inner = nullptr);

    static std::unique_ptr<ReplayCache> in_memory(std::vector<CacheRecord> records, std::shared_ptr<Oracle> inner = nullptr);

    std::vector<std::string> complete(const std::string& prompt, std::size_t n) override;

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    std::size_t size() const;

private:
    explicit ReplayCache(std::shared_ptr<Oracle> inner) : inner_(std::move(inner)) {}

    void insert(CacheRecord record);

    std::filesystem::path path_;
    std::shared_ptr<Oracle> inner_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<std::string, std::size_t>, std::vector<std::string>> records_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

std::vector<CacheRecord> read_cache_file(const std::filesystem::path& path);
void write_cache_file(const std::filesystem::path& path, const std::vector<CacheRecord>& records);

// Settings for a networked completion client. Only declared here; the client
// itself is supplied outside this library.
struct LiveOracleConfig {
    std::string endpoint;
    std::string token_env;
    std::string params_json = "{}";  // decoding parameters, passed through opaquely
};

// Asks for u answers to prompt_x in one call, then one explanation per
// answer. Output length is exactly u or an OracleError is thrown.
std::vector<ImplicitCandidate> retrieve_implicit(Oracle& oracle, const std::string& prompt_x,
                                                 const std::string& question,
                                                 std::size_t u = kDefaultCandidateCount);

} // namespace revive::oracle
