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

#include <gtest/gtest.h>

#include <fstream>

#include "revive/error.hpp"
#include "revive/eval.hpp"
#include "toy_task.hpp"

namespace revive::eval {
namespace {

std::vector<std::string> answers(const std::string& hit, std::size_t count, const std::string& other = "cat") {
    std::vector<std::string> a(count, hit);
    a.resize(10, other);
    return a;
}

QASample sample(std::string id, std::vector<std::string> truth, std::optional<std::string> prediction) {
    QASample s;
    s.sample_id = std::move(id);
    s.image_id = "i";
    s.question = "q";
    s.ground_truth = std::move(truth);
    s.prediction = std::move(prediction);
    return s;
}

TEST(Eval, NormalizeFixtures) {
    EXPECT_EQ(normalize_answer("The Dogs!!"), "dogs");
    EXPECT_EQ(normalize_answer("an   apple  pie"), "apple pie");
    EXPECT_EQ(normalize_answer("  A  "), "");
    EXPECT_EQ(normalize_answer("theater"), "theater");
    EXPECT_EQ(normalize_answer("rock-n-roll"), "rocknroll");
}

TEST(Eval, SoftAccuracySimple) {
    EXPECT_EQ(soft_accuracy("dog", answers("dog", 5)), 1.0);
    EXPECT_EQ(soft_accuracy("dog", answers("dog", 1)), 1.0 / 3.0);
    EXPECT_EQ(soft_accuracy("dog", answers("dog", 2)), 2.0 / 3.0);
    EXPECT_EQ(soft_accuracy("dog", answers("dog", 0)), 0.0);
    EXPECT_EQ(soft_accuracy("The dog.", answers("dog", 3)), 1.0);
    EXPECT_THROW(soft_accuracy("dog", {"dog"}), Error);
}

TEST(Eval, SoftAccuracyAveraged) {
    // 3 matches: leaving out a match gives 2/3 (3 subsets), otherwise 1 (7 subsets)
    EXPECT_NEAR(soft_accuracy("dog", answers("dog", 3), AccuracyMode::kAveraged), (3 * 2.0 / 3.0 + 7) / 10, 1e-15);
    EXPECT_EQ(soft_accuracy("dog", answers("dog", 10), AccuracyMode::kAveraged), 1.0);
    EXPECT_EQ(soft_accuracy("dog", answers("dog", 0), AccuracyMode::kAveraged), 0.0);
}

TEST(Eval, ScoreDatasetOrderingAndMissing) {
    std::vector<QASample> samples(3);
    samples[0] = sample("b", answers("dog", 10), "dog");
    samples[1] = sample("a", answers("dog", 1), "dog");
    samples[2] = sample("c", answers("dog", 10), std::nullopt);
    const auto r = score_dataset(samples);
    EXPECT_EQ(r.missing_predictions, 1u);
    EXPECT_NEAR(r.accuracy_percent, 100.0 * (1.0 + 1.0 / 3.0) / 3.0, 1e-12);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].sample_id, "a");
    EXPECT_EQ(r.rows[2].sample_id, "c");
}

TEST(Eval, AllCorrectIsHundred) {
    std::vector<QASample> samples;
    for (int i = 0; i < 5; ++i) samples.push_back(sample("s" + std::to_string(i), answers("x", 4), "x"));
    EXPECT_EQ(score_dataset(samples).accuracy_percent, 100.0);
}

TEST(Eval, SamplesAndPredictionsRoundTrip) {
    const auto dir = testing::scratch_dir("eval_io");
    QASample s{"s1", "img1", "what?", answers("dog", 8), std::nullopt, "eval", "visual", "dog"};
    write_samples(dir / "samples.jsonl", {s});
    const auto back = read_samples(dir / "samples.jsonl");
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].ground_truth, s.ground_truth);
    EXPECT_EQ(back[0].split, "eval");
    EXPECT_EQ(back[0].channel, "visual");
    EXPECT_EQ(back[0].planted_answer, "dog");
    write_predictions(dir / "pred.jsonl", {{"s1", "dog"}, {"s0", "cat"}});
    const auto preds = read_predictions(dir / "pred.jsonl");
    EXPECT_EQ(preds.at("s0"), "cat");
    EXPECT_THROW(read_samples(dir / "none.jsonl"), Error);
    std::ofstream(dir / "short.jsonl") << R"({"sample_id":"x","image_id":"i","question":"q","answers":["a"]})" << '\n';
    EXPECT_THROW(read_samples(dir / "short.jsonl"), Error);
}

TEST(Eval, ReportFiles) {
    const auto dir = testing::scratch_dir("eval_report");
    std::vector<QASample> samples = {sample("s1", answers("dog", 1), "Dog")};
    const auto r = score_dataset(samples);
    r.write_json(dir / "r.json");
    r.write_csv(dir / "r.csv");
    std::ifstream in(dir / "r.csv");
    std::string all((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(all, "sample_id,prediction,accuracy\ns1,dog,0.33333333333333331\n");
}

} // namespace
} // namespace revive::eval
