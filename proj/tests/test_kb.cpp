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
#include <random>

#include "revive/error.hpp"
#include "revive/kb.hpp"
#include "toy_task.hpp"

namespace revive::kb {
namespace {

const KnowledgeEntry kPegboard{"pegboard",
                               "board wall covering with regularly-spaced holes for insertion of pegs or hooks", "Tool",
                               {}};

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p);
    for (const auto& l : lines) out << l << '\n';
}

TEST(Kb, DefaultCategories) {
    EXPECT_EQ(default_categories(), (std::vector<std::string>{"Role", "Point of interest", "Tool", "Vehicle", "Animal",
                                                              "Clothing", "Company", "Sport"}));
}

TEST(Kb, PegboardAcceptedFoodExcluded) {
    const auto dir = testing::scratch_dir("kb_filter");
    write_kb_file(dir / "kb.jsonl", {kPegboard, {"pizza", "flat bread dish", "Food", {}}});
    const auto kept = load_kb(dir / "kb.jsonl");
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0].entity, "pegboard");
    EXPECT_EQ(kept[0].category, "Tool");
}

TEST(Kb, ReformatTemplate) {
    EXPECT_EQ(reformat_entry(kPegboard),
              "pegboard is a board wall covering with regularly-spaced holes for insertion of pegs or hooks");
    EXPECT_EQ(reformat_entry({"x", "y", "Tool", {}}), "x is a y");
}

TEST(Kb, ReformatContainsFields) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        std::string entity, description;
        for (std::size_t n = 1 + rng() % 12; n > 0; --n) entity += static_cast<char>(32 + rng() % 95);
        for (std::size_t n = 1 + rng() % 40; n > 0; --n) description += static_cast<char>(32 + rng() % 95);
        const auto s = reformat_entry({entity, description, "Tool", {}});
        EXPECT_EQ(s.rfind(entity, 0), 0u);
        EXPECT_NE(s.find(description), std::string::npos);
    }
}

TEST(Kb, FilterPreservesOrder) {
    const auto dir = testing::scratch_dir("kb_order");
    std::mt19937_64 rng(9);
    std::vector<KnowledgeEntry> all;
    for (int i = 0; i < 100; ++i) {
        const auto& cats = default_categories();
        all.push_back({"e" + std::to_string(i), "d" + std::to_string(i), cats[rng() % cats.size()], {}});
    }
    write_kb_file(dir / "kb.jsonl", all);
    const auto got = load_kb(dir / "kb.jsonl", {"Animal"});
    std::vector<std::string> want;
    for (const auto& e : all) {
        if (e.category == "Animal") want.push_back(e.entity);
    }
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].entity, want[i]);
}

TEST(Kb, EmptyAfterFilterWarns) {
    const auto dir = testing::scratch_dir("kb_empty");
    write_kb_file(dir / "kb.jsonl", {{"pizza", "dish", "Food", {}}});
    std::vector<std::string> warnings;
    EXPECT_TRUE(load_kb(dir / "kb.jsonl", default_categories(), &warnings).empty());
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(Kb, MalformedLineNamesLine) {
    const auto dir = testing::scratch_dir("kb_bad");
    write_lines(dir / "kb.jsonl", {R"({"entity":"a","description":"b","category":"Tool"})", "", "{not json"});
    try {
        read_kb_file(dir / "kb.jsonl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kParse);
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
    }
    write_lines(dir / "kb2.jsonl", {R"({"entity":"","description":"b","category":"Tool"})"});
    EXPECT_THROW(read_kb_file(dir / "kb2.jsonl"), Error);
    EXPECT_THROW(read_kb_file(dir / "nope.jsonl"), Error);
}

TEST(Kb, AttachEmbeddingsChecksCount) {
    std::vector<KnowledgeEntry> entries = {kPegboard, {"x", "y", "Tool", {}}};
    const auto attached = attach_embeddings(entries, vecindex::EmbeddingMatrix(2, {1, 0, 0, 1}));
    EXPECT_EQ(attached[1].embedding, (std::vector<float>{0, 1}));
    EXPECT_THROW(attach_embeddings(entries, vecindex::EmbeddingMatrix(2, {1, 0})), Error);
}

TEST(Kb, TagsStripCarriageReturnAndRejectDuplicates) {
    const auto dir = testing::scratch_dir("kb_tags");
    write_lines(dir / "tags.txt", {"dog\r", "", "frisbee"});
    const auto tags = load_tags(dir / "tags.txt");
    ASSERT_EQ(tags.size(), 2u);
    EXPECT_EQ(tags[0].tag, "dog");
    write_lines(dir / "dup.txt", {"dog", "dog"});
    EXPECT_THROW(load_tags(dir / "dup.txt"), Error);
}

} // namespace
} // namespace revive::kb
