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

#include "revive/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "revive/error.hpp"

namespace revive::nn {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kDimensionMismatch, what);
}

// c += a * b
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c) {
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* crow = c.data.data() + i * c.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
}

// c += a * b^T
void gemm_bt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(j, k);
            c(i, j) += acc;
        }
    }
}

// c += a^T * b
void gemm_at_acc(const Matrix& a, const Matrix& b, Matrix& c) {
    for (std::size_t k = 0; k < a.rows; ++k) {
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            double* crow = c.data.data() + i * c.cols;
            const double* brow = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
        }
    }
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

} // namespace

Var Tape::constant(Matrix value) {
    Node n;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::parameter(Parameter& param) {
    if (auto it = param_nodes_.find(&param); it != param_nodes_.end()) return Var{it->second};
    Node n;
    n.value = param.value;
    n.requires_grad = record_;
    n.param = &param;
    nodes_.push_back(std::move(n));
    param_nodes_.emplace(&param, nodes_.size() - 1);
    return Var{nodes_.size() - 1};
}

Var Tape::push(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
    return push(std::move(value), std::vector<Var>(inputs), std::move(backward));
}

Var Tape::push(Matrix value, const std::vector<Var>& inputs, Backward backward) {
    Node n;
    n.value = std::move(value);
    if (record_) {
        n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                      [&](Var v) { return v.valid() && nodes_[v.id].requires_grad; });
        if (n.requires_grad) n.backward = std::move(backward);
    }
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::push_leaf(Matrix value, Backward backward) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = record_;
    if (record_) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Matrix* Tape::grad_sink(Var v) {
    if (!v.valid()) return nullptr;
    Node& n = nodes_[v.id];
    if (!n.requires_grad) return nullptr;
    if (n.grad.size() != n.value.size()) n.grad = Matrix(n.value.rows, n.value.cols);
    return &n.grad;
}

void Tape::backward(Var loss) {
    if (!record_) throw Error(ErrorKind::kInvalidArgument, "backward on a non-recording tape");
    Node& root = nodes_[loss.id];
    require(root.value.rows == 1 && root.value.cols == 1, "backward needs a scalar output");
    if (!root.requires_grad) return;
    root.grad = Matrix(1, 1, 1.0);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.requires_grad || n.grad.size() == 0) continue;
        if (n.backward) n.backward(*this, i);
    }
    for (Node& n : nodes_) {
        if (n.param == nullptr || n.grad.size() == 0) continue;
        Matrix& g = n.param->grad;
        if (g.size() != n.grad.size()) g = Matrix(n.grad.rows, n.grad.cols);
        for (std::size_t j = 0; j < g.size(); ++j) g.data[j] += n.grad.data[j];
    }
}

Var matmul(Tape& t, Var a, Var b) {
    const Matrix& A = t.value(a);
    const Matrix& B = t.value(b);
    require(A.cols == B.rows, "matmul: inner dimensions differ");
    Matrix C(A.rows, B.cols);
    gemm_acc(A, B, C);
    return t.push(std::move(C), {a, b}, [a, b](Tape& tape, std::size_t self) {
        const Matrix& dC = tape.grad_of(self);
        if (Matrix* dA = tape.grad_sink(a)) gemm_bt_acc(dC, tape.value(b), *dA);
        if (Matrix* dB = tape.grad_sink(b)) gemm_at_acc(tape.value(a), dC, *dB);
    });
}

Var add(Tape& t, Var a, Var b) {
    const Matrix& A = t.value(a);
    const Matrix& B = t.value(b);
    require(A.same_shape(B), "add: shapes differ");
    Matrix C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C.data[i] += B.data[i];
    return t.push(std::move(C), {a, b}, [a, b](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        for (Var v : {a, b}) {
            if (Matrix* d = tape.grad_sink(v)) {
                for (std::size_t i = 0; i < g.size(); ++i) d->data[i] += g.data[i];
            }
        }
    });
}

Var add_row(Tape& t, Var x, Var row) {
    const Matrix& X = t.value(x);
    const Matrix& R = t.value(row);
    require(R.rows == 1 && R.cols == X.cols, "add_row: row vector shape");
    Matrix Y = X;
    for (std::size_t i = 0; i < Y.rows; ++i) {
        for (std::size_t j = 0; j < Y.cols; ++j) Y(i, j) += R(0, j);
    }
    return t.push(std::move(Y), {x, row}, [x, row](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        if (Matrix* dx = tape.grad_sink(x)) {
            for (std::size_t i = 0; i < g.size(); ++i) dx->data[i] += g.data[i];
        }
        if (Matrix* dr = tape.grad_sink(row)) {
            for (std::size_t i = 0; i < g.rows; ++i) {
                for (std::size_t j = 0; j < g.cols; ++j) (*dr)(0, j) += g(i, j);
            }
        }
    });
}

Var scale(Tape& t, Var x, double factor) {
    Matrix Y = t.value(x);
    for (double& v : Y.data) v *= factor;
    return t.push(std::move(Y), {x}, [x, factor](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        if (Matrix* dx = tape.grad_sink(x)) {
            for (std::size_t i = 0; i < g.size(); ++i) dx->data[i] += factor * g.data[i];
        }
    });
}

Var linear(Tape& t, Var x, Parameter& weight, Parameter* bias) {
    Var y = matmul(t, x, t.parameter(weight));
    if (bias != nullptr) y = add_row(t, y, t.parameter(*bias));
    return y;
}

Var gelu(Tape& t, Var x) {
    Matrix Y = t.value(x);
    for (double& v : Y.data) v = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
    return t.push(std::move(Y), {x}, [x](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        const Matrix& X = tape.value(x);
        if (Matrix* dx = tape.grad_sink(x)) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double v = X.data[i];
                const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
                const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
                dx->data[i] += g.data[i] * (cdf + v * pdf);
            }
        }
    });
}

Var layer_norm(Tape& t, Var x, Parameter& gain, Parameter& bias, double eps) {
    Var g = t.parameter(gain);
    Var b = t.parameter(bias);
    const Matrix& X = t.value(x);
    const Matrix& G = t.value(g);
    const Matrix& B = t.value(b);
    require(G.cols == X.cols && B.cols == X.cols, "layer_norm: parameter width");
    const std::size_t n = X.rows;
    const std::size_t d = X.cols;
    auto xhat = std::make_shared<Matrix>(n, d);
    auto inv_std = std::make_shared<std::vector<double>>(n);
    Matrix Y(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < d; ++j) mean += X(i, j);
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) var += (X(i, j) - mean) * (X(i, j) - mean);
        var /= static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        (*inv_std)[i] = is;
        for (std::size_t j = 0; j < d; ++j) {
            (*xhat)(i, j) = (X(i, j) - mean) * is;
            Y(i, j) = (*xhat)(i, j) * G(0, j) + B(0, j);
        }
    }
    return t.push(std::move(Y), {x, g, b}, [x, g, b, xhat, inv_std](Tape& tape, std::size_t self) {
        const Matrix& dy = tape.grad_of(self);
        const Matrix& G = tape.value(g);
        const std::size_t n = dy.rows;
        const std::size_t d = dy.cols;
        if (Matrix* dg = tape.grad_sink(g)) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < d; ++j) (*dg)(0, j) += dy(i, j) * (*xhat)(i, j);
            }
        }
        if (Matrix* db = tape.grad_sink(b)) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < d; ++j) (*db)(0, j) += dy(i, j);
            }
        }
        if (Matrix* dx = tape.grad_sink(x)) {
            std::vector<double> dxhat(d);
            for (std::size_t i = 0; i < n; ++i) {
                double mean_d = 0.0;
                double mean_dx = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    dxhat[j] = dy(i, j) * G(0, j);
                    mean_d += dxhat[j];
                    mean_dx += dxhat[j] * (*xhat)(i, j);
                }
                mean_d /= static_cast<double>(d);
                mean_dx /= static_cast<double>(d);
                for (std::size_t j = 0; j < d; ++j) {
                    (*dx)(i, j) += (*inv_std)[i] * (dxhat[j] - mean_d - (*xhat)(i, j) * mean_dx);
                }
            }
        }
    });
}

Var attention(Tape& t, Var q, Var k, Var v, std::size_t heads, bool causal) {
    const Matrix& Q = t.value(q);
    const Matrix& K = t.value(k);
    const Matrix& V = t.value(v);
    require(Q.cols == K.cols && K.cols == V.cols && K.rows == V.rows, "attention: q/k/v shapes");
    require(heads > 0 && Q.cols % heads == 0, "attention: width not divisible by heads");
    require(!causal || Q.rows == K.rows, "attention: causal mask needs square scores");
    require(K.rows > 0, "attention: empty memory");
    const std::size_t n = Q.rows;
    const std::size_t m = K.rows;
    const std::size_t dk = Q.cols / heads;
    const double sc = 1.0 / std::sqrt(static_cast<double>(dk));

    // probs[h][i*m + j]
    auto probs = std::make_shared<std::vector<double>>(heads * n * m, 0.0);
    Matrix O(n, Q.cols);
    for (std::size_t h = 0; h < heads; ++h) {
        const std::size_t c0 = h * dk;
        for (std::size_t i = 0; i < n; ++i) {
            double* p = probs->data() + (h * n + i) * m;
            const std::size_t limit = causal ? i + 1 : m;
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < limit; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < dk; ++c) s += Q(i, c0 + c) * K(j, c0 + c);
                p[j] = s * sc;
                mx = std::max(mx, p[j]);
            }
            double z = 0.0;
            for (std::size_t j = 0; j < limit; ++j) {
                p[j] = std::exp(p[j] - mx);
                z += p[j];
            }
            for (std::size_t j = 0; j < limit; ++j) {
                p[j] /= z;
                const double pj = p[j];
                for (std::size_t c = 0; c < dk; ++c) O(i, c0 + c) += pj * V(j, c0 + c);
            }
        }
    }
    return t.push(std::move(O), {q, k, v}, [q, k, v, heads, causal, probs, sc](Tape& tape, std::size_t self) {
        const Matrix& dO = tape.grad_of(self);
        const Matrix& Q = tape.value(q);
        const Matrix& K = tape.value(k);
        const Matrix& V = tape.value(v);
        Matrix* dQ = tape.grad_sink(q);
        Matrix* dK = tape.grad_sink(k);
        Matrix* dV = tape.grad_sink(v);
        const std::size_t n = Q.rows;
        const std::size_t m = K.rows;
        const std::size_t dk = Q.cols / heads;
        std::vector<double> dp(m);
        for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t c0 = h * dk;
            for (std::size_t i = 0; i < n; ++i) {
                const double* p = probs->data() + (h * n + i) * m;
                const std::size_t limit = causal ? i + 1 : m;
                double dot_pdp = 0.0;
                for (std::size_t j = 0; j < limit; ++j) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < dk; ++c) s += dO(i, c0 + c) * V(j, c0 + c);
                    dp[j] = s;
                    dot_pdp += p[j] * s;
                    if (dV != nullptr) {
                        for (std::size_t c = 0; c < dk; ++c) (*dV)(j, c0 + c) += p[j] * dO(i, c0 + c);
                    }
                }
                for (std::size_t j = 0; j < limit; ++j) {
                    const double ds = p[j] * (dp[j] - dot_pdp) * sc;
                    if (ds == 0.0) continue;
                    if (dQ != nullptr) {
                        for (std::size_t c = 0; c < dk; ++c) (*dQ)(i, c0 + c) += ds * K(j, c0 + c);
                    }
                    if (dK != nullptr) {
                        for (std::size_t c = 0; c < dk; ++c) (*dK)(j, c0 + c) += ds * Q(i, c0 + c);
                    }
                }
            }
        }
    });
}

Var concat_rows(Tape& t, const std::vector<Var>& parts) {
    require(!parts.empty(), "concat_rows: no inputs");
    const std::size_t cols = t.value(parts.front()).cols;
    std::size_t rows = 0;
    for (Var p : parts) {
        require(t.value(p).cols == cols, "concat_rows: column counts differ");
        rows += t.value(p).rows;
    }
    Matrix Y(rows, cols);
    std::size_t offset = 0;
    for (Var p : parts) {
        const Matrix& P = t.value(p);
        std::copy(P.data.begin(), P.data.end(), Y.data.begin() + static_cast<std::ptrdiff_t>(offset * cols));
        offset += P.rows;
    }
    return t.push(std::move(Y), parts, [parts](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        std::size_t offset = 0;
        for (Var p : parts) {
            const std::size_t r = tape.value(p).rows;
            if (Matrix* d = tape.grad_sink(p)) {
                for (std::size_t i = 0; i < r * g.cols; ++i) d->data[i] += g.data[offset * g.cols + i];
            }
            offset += r;
        }
    });
}

Var interleave_rows(Tape& t, Var a, Var b) {
    const Matrix& A = t.value(a);
    const Matrix& B = t.value(b);
    require(A.same_shape(B), "interleave_rows: shapes differ");
    Matrix Y(2 * A.rows, A.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        std::copy(A.row(i).begin(), A.row(i).end(), Y.row(2 * i).begin());
        std::copy(B.row(i).begin(), B.row(i).end(), Y.row(2 * i + 1).begin());
    }
    return t.push(std::move(Y), {a, b}, [a, b](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        const std::size_t n = g.rows / 2;
        if (Matrix* da = tape.grad_sink(a)) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < g.cols; ++j) (*da)(i, j) += g(2 * i, j);
            }
        }
        if (Matrix* db = tape.grad_sink(b)) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < g.cols; ++j) (*db)(i, j) += g(2 * i + 1, j);
            }
        }
    });
}

Var embedding(Tape& t, Parameter& table, std::span<const int> ids) {
    const std::size_t d = table.value.cols;
    Matrix Y(ids.size(), d);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int id = ids[i];
        require(id >= 0 && static_cast<std::size_t>(id) < table.value.rows, "embedding: id out of range");
        auto src = table.value.row(static_cast<std::size_t>(id));
        std::copy(src.begin(), src.end(), Y.row(i).begin());
    }
    // The table is not a tape node: gradients scatter straight into
    // Parameter::grad instead of materializing a dense V x D gradient.
    std::vector<int> rows(ids.begin(), ids.end());
    Parameter* p = &table;
    return t.push_leaf(std::move(Y), [rows = std::move(rows), p](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        if (p->grad.size() != p->value.size()) p->grad = Matrix(p->value.rows, p->value.cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto dst = p->grad.row(static_cast<std::size_t>(rows[i]));
            for (std::size_t j = 0; j < g.cols; ++j) dst[j] += g(i, j);
        }
    });
}

Var dropout(Tape& t, Var x, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return x;
    require(rate < 1.0, "dropout: rate must be < 1");
    const Matrix& X = t.value(x);
    auto mask = std::make_shared<std::vector<double>>(X.size());
    const double keep = 1.0 / (1.0 - rate);
    Matrix Y = X;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        (*mask)[i] = u < rate ? 0.0 : keep;
        Y.data[i] *= (*mask)[i];
    }
    return t.push(std::move(Y), {x}, [x, mask](Tape& tape, std::size_t self) {
        const Matrix& g = tape.grad_of(self);
        if (Matrix* dx = tape.grad_sink(x)) {
            for (std::size_t i = 0; i < g.size(); ++i) dx->data[i] += g.data[i] * (*mask)[i];
        }
    });
}

Var cross_entropy(Tape& t, Var logits, std::span<const int> targets, bool mean) {
    const Matrix& Z = t.value(logits);
    require(Z.rows == targets.size() && Z.rows > 0, "cross_entropy: one target per row");
    auto probs = std::make_shared<Matrix>(softmax_rows(Z));
    double total = 0.0;
    for (std::size_t i = 0; i < Z.rows; ++i) {
        const int y = targets[i];
        require(y >= 0 && static_cast<std::size_t>(y) < Z.cols, "cross_entropy: target out of range");
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < Z.cols; ++j) mx = std::max(mx, Z(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < Z.cols; ++j) z += std::exp(Z(i, j) - mx);
        total += (mx + std::log(z)) - Z(i, static_cast<std::size_t>(y));
    }
    const double norm = mean ? 1.0 / static_cast<double>(Z.rows) : 1.0;
    Matrix out(1, 1, total * norm);
    std::vector<int> ys(targets.begin(), targets.end());
    return t.push(std::move(out), {logits}, [logits, probs, ys = std::move(ys), norm](Tape& tape, std::size_t self) {
        const double g = tape.grad_of(self)(0, 0) * norm;
        if (Matrix* dz = tape.grad_sink(logits)) {
            for (std::size_t i = 0; i < probs->rows; ++i) {
                for (std::size_t j = 0; j < probs->cols; ++j) (*dz)(i, j) += g * (*probs)(i, j);
                (*dz)(i, static_cast<std::size_t>(ys[i])) -= g;
            }
        }
    });
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix P(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < logits.cols; ++j) mx = std::max(mx, logits(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) {
            P(i, j) = std::exp(logits(i, j) - mx);
            z += P(i, j);
        }
        for (std::size_t j = 0; j < logits.cols; ++j) P(i, j) /= z;
    }
    return P;
}

Matrix sinusoidal_positions(std::size_t length, std::size_t dim) {
    Matrix pe(length, dim);
    for (std::size_t pos = 0; pos < length; ++pos) {
        for (std::size_t i = 0; i < dim; i += 2) {
            const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
            pe(pos, i) = std::sin(static_cast<double>(pos) * freq);
            if (i + 1 < dim) pe(pos, i + 1) = std::cos(static_cast<double>(pos) * freq);
        }
    }
    return pe;
}

} // namespace revive::nn
