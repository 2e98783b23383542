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
#include <span>
#include <string>
#include <vector>

namespace revive::vecindex {

// Dense row-major float32 matrix with one opaque id per row. An empty id list
// at construction means "use the row index as the id".
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t dim, std::vector<float> data, std::vector<std::string> ids = {});

    static EmbeddingMatrix from_rows(const std::vector<std::vector<float>>& rows,
                                     std::vector<std::string> ids = {});
    static EmbeddingMatrix from_rows(std::size_t dim, const std::vector<std::vector<float>>& rows,
                                     std::vector<std::string> ids = {});

    std::size_t dim() const { return dim_; }
    std::size_t rows() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    std::span<const float> row(std::size_t r) const {
        return {data_.data() + r * dim_, dim_};
    }
    std::span<const float> data() const { return data_; }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(std::size_t r) const { return ids_[r]; }

    // First `n` rows (or all rows when n >= rows()).
    EmbeddingMatrix head(std::size_t n) const;

private:
    std::size_t dim_ = 0;
    std::vector<float> data_;
    std::vector<std::string> ids_;
};

struct ScoredHit {
    std::string item_id;
    std::size_t row = 0;
    double score = 0.0;
    std::size_t query_index = 0;
};

enum class Aggregation {
    // Each item scored by its max over all queries; one global top-k.
    kGlobalMax,
    // Independent top-k per query, concatenated in query order.
    kPerQuery,
};

// Exact flat inner-product index. Immutable once built; all query methods are
// const and safe to call from many threads.
class Index {
public:
    static Index build(EmbeddingMatrix matrix);

    std::size_t size() const { return matrix_.rows(); }
    std::size_t dim() const { return matrix_.dim(); }
    const EmbeddingMatrix& matrix() const { return matrix_; }

    // Hits sorted by descending score, ties by ascending row.
    std::vector<ScoredHit> topk(std::span<const float> query, std::size_t k) const;

    std::vector<ScoredHit> multi_query_topk(const EmbeddingMatrix& queries, std::size_t k,
                                            Aggregation aggregation = Aggregation::kGlobalMax) const;

private:
    explicit Index(EmbeddingMatrix matrix) : matrix_(std::move(matrix)) {}

    void score_all(std::span<const float> query, std::vector<double>& out) const;
    std::vector<ScoredHit> select(const std::vector<double>& scores,
                                  const std::vector<std::size_t>& query_of, std::size_t k) const;

    EmbeddingMatrix matrix_;
};

// Inner product with double accumulation in index order.
double dot(std::span<const float> a, std::span<const float> b);

} // namespace revive::vecindex
