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
#include <chrono>
#include <random>

#include "revive/error.hpp"
#include "revive/vecindex.hpp"

namespace revive::vecindex {
namespace {

EmbeddingMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    std::vector<float> data(rows * dim);
    for (auto& v : data) v = n(rng);
    return EmbeddingMatrix(dim, std::move(data));
}

// Exhaustive scan: every (query, item) pair, max over queries, full sort.
std::vector<std::pair<std::size_t, double>> brute_force(const EmbeddingMatrix& items, const EmbeddingMatrix& queries,
                                                        std::size_t k) {
    std::vector<std::pair<std::size_t, double>> all;
    for (std::size_t i = 0; i < items.rows(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < queries.rows(); ++q) {
            double s = 0.0;
            for (std::size_t d = 0; d < items.dim(); ++d) {
                s += static_cast<double>(items.row(i)[d]) * static_cast<double>(queries.row(q)[d]);
            }
            best = std::max(best, s);
        }
        all.emplace_back(i, best);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

TEST(EmbeddingMatrix, RejectsRaggedRows) {
    EXPECT_THROW(EmbeddingMatrix::from_rows({{1.0f, 2.0f}, {1.0f}}, {}), Error);
}

TEST(EmbeddingMatrix, RejectsNonFiniteAndDuplicateIds) {
    EXPECT_THROW(EmbeddingMatrix(2, {1.0f, std::nanf("")}), Error);
    EXPECT_THROW(EmbeddingMatrix(1, {1.0f, 2.0f}, {"a", "a"}), Error);
    EXPECT_THROW(EmbeddingMatrix(0, {}), Error);
}

TEST(EmbeddingMatrix, ImplicitIdsAreRowIndices) {
    EmbeddingMatrix m(2, {1, 0, 0, 1, 1, 1});
    ASSERT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.id(2), "2");
}

TEST(Index, IdentityBasis) {
    auto idx = Index::build(EmbeddingMatrix(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {"id1", "id2", "id3"}));
    EXPECT_EQ(idx.size(), 3u);
    const std::vector<float> q = {0, 1, 0};
    const auto hits = idx.topk(q, 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].item_id, "id2");
    EXPECT_EQ(hits[0].score, 1.0);
}

TEST(Index, ErrorsOnBadInput) {
    EXPECT_THROW(Index::build(EmbeddingMatrix(3, {})), Error);
    auto idx = Index::build(EmbeddingMatrix(2, {1, 0}));
    const std::vector<float> wrong = {1, 0, 0};
    EXPECT_THROW(idx.topk(wrong, 1), Error);
    const std::vector<float> q = {1, 0};
    EXPECT_THROW(idx.topk(q, 0), Error);
    EXPECT_THROW(idx.multi_query_topk(EmbeddingMatrix(2, {}), 1), Error);
    EXPECT_THROW(idx.multi_query_topk(EmbeddingMatrix(3, {1, 0, 0}), 1), Error);
}

TEST(Index, KLargerThanSizeReturnsAll) {
    auto idx = Index::build(EmbeddingMatrix(1, {3, 1, 2}));
    const std::vector<float> q = {1};
    const auto hits = idx.topk(q, 10);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].row, 0u);
    EXPECT_EQ(hits[2].row, 1u);
}

TEST(Index, TiesBreakByAscendingRow) {
    auto idx = Index::build(EmbeddingMatrix(1, {1, 2, 2, 1, 2}));
    const std::vector<float> q = {1};
    const auto hits = idx.topk(q, 5);
    std::vector<std::size_t> rows;
    for (const auto& h : hits) rows.push_back(h.row);
    EXPECT_EQ(rows, (std::vector<std::size_t>{1, 2, 4, 0, 3}));
}

TEST(Index, MatchesLinearScanSingleQuery) {
    std::mt19937_64 rng(7);
    auto items = random_matrix(rng, 1000, 64);
    auto query = random_matrix(rng, 1, 64);
    auto idx = Index::build(items);
    const auto hits = idx.topk(query.row(0), 10);
    const auto want = brute_force(items, query, 10);
    ASSERT_EQ(hits.size(), want.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].row, want[i].first);
        EXPECT_EQ(hits[i].score, want[i].second);
    }
}

TEST(Index, KnowledgeDefaultKReturnsForty) {
    std::mt19937_64 rng(3);
    auto idx = Index::build(random_matrix(rng, 200, 16));
    auto regions = random_matrix(rng, 36, 16);
    const auto hits = idx.multi_query_topk(regions, 40);
    EXPECT_EQ(hits.size(), 40u);
    std::set<std::size_t> rows;
    for (const auto& h : hits) rows.insert(h.row);
    EXPECT_EQ(rows.size(), 40u);
}

TEST(Index, MultiQueryExactMatches) {
    auto idx = Index::build(EmbeddingMatrix(2, {1, 0, 0, 1, 0.6f, 0.6f}));
    const auto hits = idx.multi_query_topk(EmbeddingMatrix(2, {0, 1, 1, 0}), 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].row, 0u);
    EXPECT_EQ(hits[0].score, 1.0);
    EXPECT_EQ(hits[0].query_index, 1u);
    EXPECT_EQ(hits[1].row, 1u);
    EXPECT_EQ(hits[1].score, 1.0);
    EXPECT_EQ(hits[1].query_index, 0u);
}

TEST(Index, MultiQueryMatchesExhaustiveOracle) {
    std::mt19937_64 rng(11);
    auto items = random_matrix(rng, 500, 24);
    auto queries = random_matrix(rng, 20, 24);
    auto idx = Index::build(items);
    const auto hits = idx.multi_query_topk(queries, 15);
    const auto want = brute_force(items, queries, 15);
    ASSERT_EQ(hits.size(), 15u);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].row, want[i].first);
        EXPECT_EQ(hits[i].score, want[i].second);
        // the recorded query attains the max
        EXPECT_EQ(dot(items.row(hits[i].row), queries.row(hits[i].query_index)), hits[i].score);
    }
}

TEST(Index, PrefixMonotonicity) {
    std::mt19937_64 rng(5);
    auto items = random_matrix(rng, 300, 8);
    auto queries = random_matrix(rng, 4, 8);
    auto idx = Index::build(items);
    const auto big = idx.multi_query_topk(queries, 30);
    for (std::size_t k = 1; k < 30; ++k) {
        const auto small = idx.multi_query_topk(queries, k);
        for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(small[i].row, big[i].row);
    }
}

TEST(Index, PerQueryModeConcatenatesQueryLists) {
    auto idx = Index::build(EmbeddingMatrix(1, {1, 2, 3}));
    const auto hits = idx.multi_query_topk(EmbeddingMatrix(1, {1, -1}), 2, Aggregation::kPerQuery);
    ASSERT_EQ(hits.size(), 4u);
    EXPECT_EQ(hits[0].row, 2u);
    EXPECT_EQ(hits[1].row, 1u);
    EXPECT_EQ(hits[2].row, 0u);
    EXPECT_EQ(hits[2].query_index, 1u);
    EXPECT_EQ(hits[3].row, 1u);
}

// Full-size tag index: 400k rows. The width is cut from 512 to 64 to keep
// the test within memory and time on small machines; construction does not
// depend on the width.
TEST(Index, FourHundredThousandRows) {
    const std::size_t n = 400000, dim = 64;
    std::vector<float> data(n * dim);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>((i * 2654435761u) % 1000) / 1000.0f;
    auto idx = Index::build(EmbeddingMatrix(dim, std::move(data)));
    EXPECT_EQ(idx.size(), 400000u);
    std::vector<float> q(dim, 1.0f);
    EXPECT_EQ(idx.topk(q, 30).size(), 30u);
}

} // namespace
} // namespace revive::vecindex
