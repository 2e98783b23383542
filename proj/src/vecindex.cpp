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

#include "revive/vecindex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "revive/error.hpp"

namespace revive::vecindex {

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<float> data, std::vector<std::string> ids)
        : dim_(dim), data_(std::move(data)), ids_(std::move(ids)) {
    if (dim_ == 0) {
        throw Error(ErrorKind::kDimensionMismatch, "embedding dim must be positive");
    }
    if (data_.size() % dim_ != 0) {
        throw Error(ErrorKind::kDimensionMismatch,
                    "embedding data size " + std::to_string(data_.size()) + " is not a multiple of dim " +
                            std::to_string(dim_));
    }
    const std::size_t n = data_.size() / dim_;
    if (ids_.empty()) {
        ids_.reserve(n);
        for (std::size_t r = 0; r < n; ++r) ids_.push_back(std::to_string(r));
    } else if (ids_.size() != n) {
        throw Error(ErrorKind::kDimensionMismatch, "embedding id count " + std::to_string(ids_.size()) +
                                                           " != row count " + std::to_string(n));
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_) {
        if (!seen.insert(id).second) {
            throw Error(ErrorKind::kValidation, "duplicate embedding id '" + id + "'");
        }
    }
    for (float v : data_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::kValidation, "embedding contains a non-finite value");
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<float>>& rows,
                                           std::vector<std::string> ids) {
    if (rows.empty()) {
        throw Error(ErrorKind::kDimensionMismatch, "cannot infer dim from zero rows");
    }
    return from_rows(rows.front().size(), rows, std::move(ids));
}

EmbeddingMatrix EmbeddingMatrix::from_rows(std::size_t dim, const std::vector<std::vector<float>>& rows,
                                           std::vector<std::string> ids) {
    std::vector<float> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != dim) {
            throw Error(ErrorKind::kDimensionMismatch, "row " + std::to_string(r) + " has length " +
                                                               std::to_string(rows[r].size()) + ", expected " +
                                                               std::to_string(dim));
        }
        flat.insert(flat.end(), rows[r].begin(), rows[r].end());
    }
    if (ids.empty()) {
        for (std::size_t r = 0; r < rows.size(); ++r) ids.push_back(std::to_string(r));
    }
    return EmbeddingMatrix(dim, std::move(flat), std::move(ids));
}

EmbeddingMatrix EmbeddingMatrix::head(std::size_t n) const {
    n = std::min(n, rows());
    EmbeddingMatrix out;
    out.dim_ = dim_;
    out.data_.assign(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n * dim_));
    out.ids_.assign(ids_.begin(), ids_.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

double dot(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

Index Index::build(EmbeddingMatrix matrix) {
    if (matrix.empty()) {
        throw Error(ErrorKind::kInvalidArgument, "cannot build an index over zero rows");
    }
    return Index(std::move(matrix));
}

void Index::score_all(std::span<const float> query, std::vector<double>& out) const {
    const std::size_t n = size();
    out.resize(n);
    for (std::size_t r = 0; r < n; ++r) out[r] = dot(matrix_.row(r), query);
}

std::vector<ScoredHit> Index::select(const std::vector<double>& scores, const std::vector<std::size_t>& query_of,
                                     std::size_t k) const {
    k = std::min(k, scores.size());
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);

    std::vector<ScoredHit> hits;
    hits.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t r = order[i];
        hits.push_back(ScoredHit{matrix_.id(r), r, scores[r], query_of.empty() ? 0 : query_of[r]});
    }
    return hits;
}

std::vector<ScoredHit> Index::topk(std::span<const float> query, std::size_t k) const {
    if (query.size() != dim()) {
        throw Error(ErrorKind::kDimensionMismatch, "query dim " + std::to_string(query.size()) +
                                                           " != index dim " + std::to_string(dim()));
    }
    if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
    std::vector<double> scores;
    score_all(query, scores);
    return select(scores, {}, k);
}

std::vector<ScoredHit> Index::multi_query_topk(const EmbeddingMatrix& queries, std::size_t k,
                                               Aggregation aggregation) const {
    if (queries.dim() != dim()) {
        throw Error(ErrorKind::kDimensionMismatch, "query dim " + std::to_string(queries.dim()) +
                                                           " != index dim " + std::to_string(dim()));
    }
    if (queries.empty()) throw Error(ErrorKind::kInvalidArgument, "multi_query_topk needs at least one query");
    if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");

    if (aggregation == Aggregation::kPerQuery) {
        std::vector<ScoredHit> all;
        for (std::size_t q = 0; q < queries.rows(); ++q) {
            auto hits = topk(queries.row(q), k);
            for (auto& h : hits) h.query_index = q;
            all.insert(all.end(), std::make_move_iterator(hits.begin()), std::make_move_iterator(hits.end()));
        }
        return all;
    }

    const std::size_t n = size();
    std::vector<double> best(n);
    std::vector<std::size_t> argbest(n, 0);
    std::vector<double> scores;
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        score_all(queries.row(q), scores);
        for (std::size_t r = 0; r < n; ++r) {
            // strict > keeps the lowest query index on ties
            if (q == 0 || scores[r] > best[r]) {
                best[r] = scores[r];
                argbest[r] = q;
            }
        }
    }
    return select(best, argbest, k);
}

} // namespace revive::vecindex
