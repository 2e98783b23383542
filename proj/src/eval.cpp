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

#include "revive/eval.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

#include "revive/error.hpp"

namespace revive::eval {

namespace {

bool is_ascii_punct(unsigned char c) {
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
}

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

double clipped(std::size_t matches) {
    return std::min(static_cast<double>(matches) / 3.0, 1.0);
}

} // namespace

std::string normalize_answer(std::string_view text) {
    std::string stripped;
    stripped.reserve(text.size());
    for (unsigned char c : text) {
        if (is_ascii_punct(c)) continue;
        stripped.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
    std::string out;
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        if (word != "a" && word != "an" && word != "the") {
            if (!out.empty()) out += ' ';
            out += word;
        }
        word.clear();
    };
    for (unsigned char c : stripped) {
        if (is_ascii_space(c)) {
            flush();
        } else {
            word.push_back(static_cast<char>(c));
        }
    }
    flush();
    return out;
}

double soft_accuracy(std::string_view prediction, const std::vector<std::string>& ground_truth, AccuracyMode mode) {
    if (ground_truth.size() != kAnswersPerSample) {
        throw Error(ErrorKind::kValidation, "soft accuracy needs exactly 10 ground-truth answers, got " +
                                                    std::to_string(ground_truth.size()));
    }
    const std::string p = normalize_answer(prediction);
    std::vector<bool> hit(ground_truth.size());
    std::size_t matches = 0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        hit[i] = normalize_answer(ground_truth[i]) == p;
        matches += hit[i] ? 1 : 0;
    }
    if (mode == AccuracyMode::kSimple) return clipped(matches);
    double total = 0.0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) total += clipped(matches - (hit[i] ? 1 : 0));
    return total / static_cast<double>(ground_truth.size());
}

Report score_dataset(const std::vector<QASample>& samples, AccuracyMode mode) {
    Report r;
    r.samples = samples.size();
    double total = 0.0;
    for (const auto& s : samples) {
        SampleScore row;
        row.sample_id = s.sample_id;
        if (s.prediction) {
            row.prediction = normalize_answer(*s.prediction);
            row.accuracy = soft_accuracy(*s.prediction, s.ground_truth, mode);
        } else {
            ++r.missing_predictions;
        }
        total += row.accuracy;
        r.rows.push_back(std::move(row));
    }
    std::sort(r.rows.begin(), r.rows.end(),
              [](const SampleScore& a, const SampleScore& b) { return a.sample_id < b.sample_id; });
    r.accuracy_percent = samples.empty() ? 0.0 : 100.0 * total / static_cast<double>(samples.size());
    return r;
}

nlohmann::json Report::summary_json() const {
    return {{"accuracy", accuracy_percent}, {"samples", samples}, {"missing_predictions", missing_predictions}};
}

void Report::write_json(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write report '" + path.string() + "'");
    out << summary_json().dump(2) << '\n';
}

void Report::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write report '" + path.string() + "'");
    out << "sample_id,prediction,accuracy\n" << std::setprecision(17);
    for (const auto& row : rows) {
        // prediction is normalized: no punctuation, so no quoting needed
        out << row.sample_id << ',' << row.prediction << ',' << row.accuracy << '\n';
    }
}

std::vector<QASample> read_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingInput, "samples file '" + path.string() + "' not found");
    std::vector<QASample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            QASample s;
            s.sample_id = j.at("sample_id").get<std::string>();
            s.image_id = j.at("image_id").get<std::string>();
            s.question = j.at("question").get<std::string>();
            s.ground_truth = j.at("answers").get<std::vector<std::string>>();
            s.split = j.value("split", std::string("train"));
            s.channel = j.value("channel", std::string());
            s.planted_answer = j.value("planted_answer", std::string());
            if (s.ground_truth.size() != kAnswersPerSample) {
                throw Error(ErrorKind::kValidation, "sample '" + s.sample_id + "' must have 10 answers");
            }
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_samples(const std::filesystem::path& path, const std::vector<QASample>& samples) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write samples '" + path.string() + "'");
    for (const auto& s : samples) {
        nlohmann::json j = {{"sample_id", s.sample_id}, {"image_id", s.image_id}, {"question", s.question},
                            {"answers", s.ground_truth}, {"split", s.split}};
        if (!s.channel.empty()) j["channel"] = s.channel;
        if (!s.planted_answer.empty()) j["planted_answer"] = s.planted_answer;
        out << j.dump() << '\n';
    }
}

std::map<std::string, std::string> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingInput, "predictions file '" + path.string() + "' not found");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            out[j.at("sample_id").get<std::string>()] = j.at("answer").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write predictions '" + path.string() + "'");
    for (const auto& [id, answer] : rows) {
        nlohmann::json j = {{"sample_id", id}, {"answer", answer}};
        out << j.dump() << '\n';
    }
}

} // namespace revive::eval
