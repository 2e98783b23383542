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

#include <algorithm>
#include <map>

#include "revive/error.hpp"
#include "revive/oracle.hpp"
#include "revive/prompts.hpp"
#include "revive/rvem.hpp"
#include "revive/syndata.hpp"
#include "toy_task.hpp"

namespace revive::syndata {
namespace {

SynConfig small(std::size_t samples = 32) {
    SynConfig c;
    c.samples = samples;
    return c;
}

TEST(Syndata, SeedDeterministic) {
    const auto a = generate(small());
    const auto b = generate(small());
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].question, b.samples[i].question);
        EXPECT_EQ(a.samples[i].ground_truth, b.samples[i].ground_truth);
        EXPECT_TRUE(std::ranges::equal(a.artifacts[i].region_embeddings.data(), b.artifacts[i].region_embeddings.data()));
    }
    auto other = small();
    other.seed = 1;
    const auto c = generate(other);
    bool differs = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) differs |= a.samples[i].question != c.samples[i].question;
    EXPECT_TRUE(differs);
}

TEST(Syndata, LabelSolverIsPerfect) {
    EXPECT_EQ(label_solver_accuracy(generate(small(64))), 100.0);
}

TEST(Syndata, GroundTruthRepeatsPlantedAnswer) {
    for (const auto& s : generate(small()).samples) {
        ASSERT_EQ(s.ground_truth.size(), 10u);
        EXPECT_GE(std::count(s.ground_truth.begin(), s.ground_truth.end(), s.planted_answer), 3);
        EXPECT_FALSE(s.channel.empty());
    }
}

TEST(Syndata, PlantedEntryIsRetrievedForExplicitSamples) {
    const auto data = generate(small());
    const auto store = pipeline::make_store(data.kb, data.tags, data.artifacts, kb::default_categories());
    std::size_t checked = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const auto& s = data.samples[i];
        if (s.channel != kExplicitChannel) continue;
        ++checked;
        const auto hits = regions::retrieve_explicit(data.artifacts[i], *store.kb_index, store.kb, 40);
        const std::string entity = s.question.substr(8, s.question.find(" known") - 8);
        ASSERT_FALSE(hits.empty());
        // self-match scores the squared norm, the argmax
        EXPECT_EQ(hits[0].entry.entity, entity) << s.question;
        EXPECT_NE(hits[0].entry.description.find(s.planted_answer), std::string::npos);
    }
    EXPECT_GT(checked, 5u);
}

TEST(Syndata, VisualAnswerIsTheObjectQuadrant) {
    const auto data = generate(small(48));
    std::size_t checked = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const auto& s = data.samples[i];
        if (s.channel != kVisualChannel) continue;
        const auto& art = data.artifacts[i];
        ASSERT_EQ(art.region_count(), 1u);
        const auto b = regions::normalize_box(art.boxes[0], art.image_size);
        const std::string vertical = b.y2 <= 0.5 ? "top" : (b.y1 >= 0.5 ? "bottom" : "?");
        const std::string horizontal = b.x2 <= 0.5 ? "left" : (b.x1 >= 0.5 ? "right" : "?");
        EXPECT_EQ(s.planted_answer, vertical + " " + horizontal);
        // the position never appears in the text the model reads
        EXPECT_EQ(s.question.find("left"), std::string::npos);
        EXPECT_EQ(s.question.find("right"), std::string::npos);
        EXPECT_EQ(art.caption.find("top"), std::string::npos);
        // the region is the named object
        const std::string object = s.question.substr(13, s.question.size() - 14);
        const auto want = regions::stub_embed("tag:" + object, art.region_embeddings.dim());
        EXPECT_TRUE(std::ranges::equal(art.region_embeddings.row(0), want)) << s.question;
        ++checked;
    }
    EXPECT_GT(checked, 5u);
}

TEST(Syndata, ImplicitCandidatesCarryMajority) {
    const auto data = generate(small());
    const auto store = pipeline::make_store(data.kb, data.tags, data.artifacts, kb::default_categories());
    auto cache = oracle::ReplayCache::in_memory(data.cache);
    pipeline::RetrievalConfig rc;
    rc.categories = kb::default_categories();
    std::size_t checked = 0;
    for (const auto& s : data.samples) {
        const auto r = pipeline::retrieve_sample(store, s, *cache, rc);
        ASSERT_EQ(r.implicit.size(), 5u);
        if (s.channel != kImplicitChannel) continue;
        std::size_t votes = 0;
        for (const auto& c : r.implicit) votes += c.answer == s.planted_answer ? 1 : 0;
        EXPECT_GE(votes, 3u);
        ++checked;
    }
    EXPECT_GT(checked, 5u);
    EXPECT_EQ(cache->misses(), 0u);
}

TEST(Syndata, CacheCoversEveryConfiguredPair) {
    auto cfg = small(12);
    cfg.cache_tag_counts = {0, 4, 30};
    cfg.cache_candidate_counts = {1, 5};
    const auto data = generate(cfg);
    const auto store = pipeline::make_store(data.kb, data.tags, data.artifacts, kb::default_categories());
    auto cache = oracle::ReplayCache::in_memory(data.cache);
    for (std::size_t p : cfg.cache_tag_counts) {
        for (std::size_t u : cfg.cache_candidate_counts) {
            pipeline::RetrievalConfig rc;
            rc.categories = kb::default_categories();
            rc.tags = p;
            rc.candidates = u;
            EXPECT_NO_THROW(pipeline::retrieve_all(store, data.samples, *cache, rc)) << p << "," << u;
        }
    }
}

TEST(Syndata, SplitAndChannels) {
    const auto data = generate(small(40));
    std::map<std::string, std::size_t> channels;
    std::size_t eval = 0;
    for (const auto& s : data.samples) {
        ++channels[s.channel];
        eval += s.split == "eval" ? 1 : 0;
    }
    EXPECT_EQ(eval, 10u);
    EXPECT_EQ(channels.size(), 3u);
    auto only_visual = small(20);
    only_visual.explicit_share = only_visual.implicit_share = 0;
    for (const auto& s : generate(only_visual).samples) EXPECT_EQ(s.channel, kVisualChannel);
}

TEST(Syndata, InfeasibleSizes) {
    auto c = small();
    c.samples = 0;
    EXPECT_THROW(generate(c), Error);
    c = small();
    c.answer_pool = 1;
    EXPECT_THROW(generate(c), Error);
    c = small();
    c.object_count = 13;
    EXPECT_THROW(generate(c), Error);
    c = small();
    c.tag_size = 4;
    try {
        generate(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
    }
}

TEST(Syndata, WrittenFilesLoadWithoutWarnings) {
    const auto dir = testing::scratch_dir("syndata_files");
    const auto data = generate(small(16));
    write_dataset(data, dir);
    std::vector<std::string> warnings;
    const auto entries = kb::load_kb(dir / "kb.jsonl", kb::default_categories(), &warnings);
    EXPECT_TRUE(warnings.empty());
    EXPECT_FALSE(entries.empty());
    const auto all = kb::attach_embeddings(kb::read_kb_file(dir / "kb.jsonl"), rvem::read(dir / "kb.rvem"));
    EXPECT_EQ(all.size(), data.kb.size());
    EXPECT_EQ(kb::attach_embeddings(kb::load_tags(dir / "tags.txt"), rvem::read(dir / "tags.rvem")).size(),
              data.tags.size());
    regions::RegionManifest m;
    EXPECT_EQ(regions::load_region_artifacts(dir / "regions", &m).size(), 16u);
    EXPECT_TRUE(m.embeddings_normalized);
    EXPECT_EQ(eval::read_samples(dir / "samples.jsonl").size(), 16u);
    EXPECT_EQ(oracle::read_cache_file(dir / "oracle_cache.jsonl").size(), data.cache.size());
}

} // namespace
} // namespace revive::syndata
