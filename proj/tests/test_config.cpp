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

#include "revive/config.hpp"
#include "revive/error.hpp"
#include "toy_task.hpp"

namespace revive::pipeline {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::kInvalidArgument;
}

TEST(Config, Defaults) {
    const auto c = load_config("");
    EXPECT_EQ(c.retrieval.candidates, 5u);
    EXPECT_EQ(c.retrieval.knowledge, 40u);
    EXPECT_EQ(c.retrieval.regions, 36u);
    EXPECT_EQ(c.retrieval.tags, 30u);
    EXPECT_EQ(c.retrieval.aggregation, vecindex::Aggregation::kGlobalMax);
    EXPECT_EQ(c.model.max_regions, 36u);
    EXPECT_EQ(c.model.visual_encoder_layers, 9u);
    EXPECT_DOUBLE_EQ(c.optimizer.learning_rate, 8e-5);
    EXPECT_EQ(c.model_seeds(), std::vector<std::uint64_t>{0});
    EXPECT_EQ(c.eval_mode, "simple");
    EXPECT_EQ(c.paths.output, "out");
    EXPECT_FALSE(c.retrieval.categories.empty());
}

TEST(Config, OverridesParseJsonOrString) {
    const auto c = load_config("", {"retrieval.K=8", "paths.output=/tmp/x y", "ensemble_seeds=[1,2,3]",
                                    "optimizer.lr=0.001", "retrieval.aggregation=per_query"});
    EXPECT_EQ(c.retrieval.knowledge, 8u);
    EXPECT_EQ(c.paths.output, "/tmp/x y");
    EXPECT_EQ(c.model_seeds(), (std::vector<std::uint64_t>{1, 2, 3}));
    EXPECT_DOUBLE_EQ(c.optimizer.learning_rate, 1e-3);
    EXPECT_EQ(c.retrieval.aggregation, vecindex::Aggregation::kPerQuery);
}

TEST(Config, MaxRegionsFollowsM) {
    EXPECT_EQ(load_config("", {"retrieval.M=50"}).model.max_regions, 50u);
    EXPECT_EQ(load_config("", {"retrieval.M=5"}).model.max_regions, 5u);
    EXPECT_EQ(load_config("", {"retrieval.M=0"}).model.max_regions, 1u);
    EXPECT_EQ(load_config("", {"retrieval.M=5", "model.max_regions=20"}).model.max_regions, 20u);
}

TEST(Config, FileThenOverrides) {
    const auto dir = testing::scratch_dir("config_file");
    const auto file = dir / "c.json";
    std::ofstream(file) << R"({"retrieval": {"P": 7, "U": 2}, "seed": 11})";
    const auto c = load_config(file, {"retrieval.P=3"});
    EXPECT_EQ(c.retrieval.tags, 3u);
    EXPECT_EQ(c.retrieval.candidates, 2u);
    EXPECT_EQ(c.seed, 11u);
    EXPECT_EQ(c.retrieval.knowledge, 40u);
}

TEST(Config, JsonRoundTripAndHash) {
    const auto a = load_config("", {"retrieval.K=8", "seed=3"});
    const auto b = PipelineConfig::from_json(a.to_json());
    EXPECT_EQ(a.to_json(), b.to_json());
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    EXPECT_NE(a.hash(), load_config("", {"retrieval.K=9", "seed=3"}).hash());
}

TEST(Config, Errors) {
    EXPECT_EQ(kind_of([] { load_config("/nonexistent/revive.json"); }), ErrorKind::kMissingInput);
    EXPECT_EQ(kind_of([] { load_config("", {"retrieval.K"}); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([] { load_config("", {"=3"}); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([] { load_config("", {"retrieval..K=3"}); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([] { load_config("", {"retrieval.K=many"}); }), ErrorKind::kParse);
    EXPECT_EQ(kind_of([] { load_config("", {"retrieval.aggregation=mean"}); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([] { load_config("", {"eval.mode=strict"}); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([] { load_config("", {"threads=0"}); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([] { load_config("", {"retrieval.categories=[]"}); }), ErrorKind::kInvalidArgument);
    const auto dir = testing::scratch_dir("config_bad");
    std::ofstream(dir / "bad.json") << "{not json";
    EXPECT_EQ(kind_of([&] { load_config(dir / "bad.json"); }), ErrorKind::kParse);
}

} // namespace
} // namespace revive::pipeline
