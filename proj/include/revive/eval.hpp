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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace revive::eval {

inline constexpr std::size_t kAnswersPerSample = 10;

struct QASample {
    std::string sample_id;
    std::string image_id;
    std::string question;
    std::vector<std::string> ground_truth;  // exactly 10
    std::optional<std::string> prediction;
    std::string split = "train";
    // Synthetic-data planting labels; empty for real data.
    std::string channel;
    std::string planted_answer;
};

enum class AccuracyMode {
    kSimple,    // min(matches / 3, 1)
    kAveraged,  // mean over the 10 leave-one-out subsets of min(matches / 3, 1)
};

// Lowercase, delete ASCII punctuation, drop standalone a/an/the, collapse
// whitespace, trim.
std::string normalize_answer(std::string_view text);

double soft_accuracy(std::string_view prediction, const std::vector<std::string>& ground_truth,
                     AccuracyMode mode = AccuracyMode::kSimple);

struct SampleScore {
    std::string sample_id;
    std::string prediction;  // normalized
    double accuracy = 0;
};

struct Report {
    double accuracy_percent = 0;
    std::size_t samples = 0;
    std::size_t missing_predictions = 0;
    std::vector<SampleScore> rows;  // sorted by sample_id

    nlohmann::json summary_json() const;
    void write_json(const std::filesystem::path& path) const;
    void write_csv(const std::filesystem::path& path) const;
};

// Samples without a prediction count as wrong and are tallied as missing.
Report score_dataset(const std::vector<QASample>& samples, AccuracyMode mode = AccuracyMode::kSimple);

std::vector<QASample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const std::vector<QASample>& samples);

// {"sample_id": ..., "answer": ...} per line.
std::map<std::string, std::string> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& rows);

} // namespace revive::eval
