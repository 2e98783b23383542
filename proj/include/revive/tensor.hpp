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
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

// A small reverse-mode differentiation tape over dense row-major double
// matrices. Every op records its output value and a closure that pushes the
// output gradient back into its inputs. Sizes here are toy-scale; loops are
// plain and single-threaded so results are bit-reproducible.
namespace revive::nn {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;  // same shape as value; accumulated by Tape::backward
};

struct Var {
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t id = kNone;

    bool valid() const { return id != kNone; }
};

class Tape {
public:
    // A non-recording tape computes values only (inference).
    explicit Tape(bool record = true) : record_(record) {}

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Matrix value);
    Var parameter(Parameter& param);

    const Matrix& value(Var v) const { return nodes_[v.id].value; }
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
    bool recording() const { return record_; }

    // Seeds d(loss)=1 on a 1x1 output, runs all closures in reverse creation
    // order, then adds parameter-node gradients into Parameter::grad.
    void backward(Var loss);

    // --- used by op implementations ---
    using Backward = std::function<void(Tape&, std::size_t self)>;
    Var push(Matrix value, std::initializer_list<Var> inputs, Backward backward);
    Var push(Matrix value, const std::vector<Var>& inputs, Backward backward);
    // Differentiable node with no tape inputs (e.g. a table lookup that writes
    // its gradient directly into a Parameter).
    Var push_leaf(Matrix value, Backward backward);
    const Matrix& grad_of(std::size_t node) const { return nodes_[node].grad; }
    // Gradient buffer of an input, allocated (zeroed) on first use; nullptr
    // when the input does not require a gradient.
    Matrix* grad_sink(Var v);

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        Backward backward;
        Parameter* param = nullptr;
    };

    std::vector<Node> nodes_;
    std::unordered_map<Parameter*, std::size_t> param_nodes_;
    bool record_;
};

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
// Adds a 1 x cols row vector to every row.
Var add_row(Tape& t, Var x, Var row);
Var scale(Tape& t, Var x, double factor);
Var linear(Tape& t, Var x, Parameter& weight, Parameter* bias);
Var gelu(Tape& t, Var x);
Var layer_norm(Tape& t, Var x, Parameter& gain, Parameter& bias, double eps = 1e-5);
// Multi-head scaled dot-product attention on already-projected q/k/v.
// Causal masking requires q and k to have the same number of rows.
Var attention(Tape& t, Var q, Var k, Var v, std::size_t heads, bool causal);
Var concat_rows(Tape& t, const std::vector<Var>& parts);
// Rows a0, b0, a1, b1, ... for equally shaped a and b.
Var interleave_rows(Tape& t, Var a, Var b);
// Rows of `table` selected by ids; gradient scatters into table.grad.
Var embedding(Tape& t, Parameter& table, std::span<const int> ids);
Var dropout(Tape& t, Var x, double rate, std::mt19937_64& rng);
// Scalar cross-entropy of row-wise softmax(logits) against target ids,
// averaged over rows when `mean` is set, summed otherwise.
Var cross_entropy(Tape& t, Var logits, std::span<const int> targets, bool mean);

Matrix softmax_rows(const Matrix& logits);
Matrix sinusoidal_positions(std::size_t length, std::size_t dim);

} // namespace revive::nn
