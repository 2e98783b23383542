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

#include "revive/ensemble.hpp"
#include "revive/error.hpp"
#include "toy_task.hpp"

namespace revive::fusion {
namespace {

TEST(Ensemble, MajorityFixtures) {
    EXPECT_EQ(majority_vote({"a", "a", "b"}), "a");
    EXPECT_EQ(majority_vote({"b", "a", "a"}), "a");
    EXPECT_EQ(majority_vote({"a", "b", "c"}), "a");
    EXPECT_EQ(majority_vote({"c", "b", "b", "c"}), "c");
    EXPECT_EQ(majority_vote({"x"}), "x");
    EXPECT_THROW(majority_vote({}), Error);
}

TEST(Ensemble, SingleModelPredictEqualsDecode) {
    ModelConfig c;
    c.vocab_size = 12;
    c.model_dim = 8;
    c.heads = 2;
    c.ffn_dim = 8;
    c.visual_encoder_layers = 1;
    c.decoder_layers = 1;
    c.region_dim = 4;
    std::vector<std::string> words;
    for (int i = 0; i < 8; ++i) words.push_back("w" + std::to_string(i));
    std::string corpus;
    for (const auto& w : words) corpus += w + " ";
    const auto vocab = Vocabulary::build({corpus});
    std::vector<FusionModel> models = {FusionModel(c, 1)};
    std::mt19937_64 rng(2);
    const auto in = testing::random_fusion_input(rng, c, 1, 1, 1);
    const auto ids = decode(models[0], encode(models[0], in), 4);
    EXPECT_EQ(predict(models, in, vocab, 4), eval::normalize_answer(detokenize(ids, vocab)));
}

} // namespace
} // namespace revive::fusion
