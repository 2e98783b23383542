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

#include "revive/fusion_model.hpp"

#include <algorithm>
#include <cmath>

#include "revive/error.hpp"

namespace revive::fusion {

namespace {

// Box-Muller over raw mt19937_64 output: reproducible everywhere, unlike
// std::normal_distribution.
double gaussian(std::mt19937_64& rng) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

nn::Matrix positions(std::size_t n, std::size_t dim) {
    return nn::sinusoidal_positions(n, dim);
}

} // namespace

void ModelConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw Error(ErrorKind::kInvalidArgument, std::string("model config: ") + name + " must be >= 1");
    };
    positive(vocab_size, "vocab_size");
    positive(model_dim, "model_dim");
    positive(heads, "heads");
    positive(encoder_layers, "encoder_layers");
    positive(visual_encoder_layers, "visual_encoder_layers");
    positive(decoder_layers, "decoder_layers");
    positive(ffn_dim, "ffn_dim");
    positive(max_passage_tokens, "max_passage_tokens");
    positive(max_regions, "max_regions");
    positive(region_dim, "region_dim");
    if (model_dim % heads != 0) {
        throw Error(ErrorKind::kInvalidArgument, "model config: model_dim must be divisible by heads");
    }
    if (vocab_size <= static_cast<std::size_t>(4)) {
        throw Error(ErrorKind::kInvalidArgument, "model config: vocab_size must exceed the reserved ids");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw Error(ErrorKind::kInvalidArgument, "model config: dropout must be in [0, 1)");
    }
}

nlohmann::json ModelConfig::to_json() const {
    return {{"vocab_size", vocab_size},
            {"model_dim", model_dim},
            {"heads", heads},
            {"encoder_layers", encoder_layers},
            {"visual_encoder_layers", visual_encoder_layers},
            {"decoder_layers", decoder_layers},
            {"ffn_dim", ffn_dim},
            {"max_passage_tokens", max_passage_tokens},
            {"max_regions", max_regions},
            {"region_dim", region_dim},
            {"dropout", dropout}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.model_dim = j.value("model_dim", c.model_dim);
    c.heads = j.value("heads", c.heads);
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.visual_encoder_layers = j.value("visual_encoder_layers", c.visual_encoder_layers);
    c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
    c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
    c.max_passage_tokens = j.value("max_passage_tokens", c.max_passage_tokens);
    c.max_regions = j.value("max_regions", c.max_regions);
    c.region_dim = j.value("region_dim", c.region_dim);
    c.dropout = j.value("dropout", c.dropout);
    return c;
}

std::size_t EncodedBundle::memory_rows() const {
    std::size_t n = visual.rows + question.rows;
    for (const auto& m : knowledge) n += m.rows;
    for (const auto& m : implicit) n += m.rows;
    return n;
}

nn::Matrix EncodedBundle::memory() const {
    const std::size_t d = question.cols;
    nn::Matrix out(memory_rows(), d);
    std::size_t offset = 0;
    auto append = [&](const nn::Matrix& m) {
        if (m.rows == 0) return;
        if (m.cols != d) throw Error(ErrorKind::kDimensionMismatch, "bundle encodings differ in width");
        std::copy(m.data.begin(), m.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(offset * d));
        offset += m.rows;
    };
    for (const auto& m : knowledge) append(m);
    for (const auto& m : implicit) append(m);
    append(visual);
    append(question);
    return out;
}

FusionModel::FusionModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
    config_.validate();
    const std::size_t d = config_.model_dim;
    token_embedding_ = add_param("token_embedding", config_.vocab_size, d);
    for (std::size_t l = 0; l < config_.encoder_layers; ++l) {
        encoder_.push_back(add_encoder_layer("encoder." + std::to_string(l)));
    }
    encoder_norm_ = add_norm("encoder.final_norm");
    fc1_w_ = add_param("visual.fc1.weight", config_.region_dim, d);
    fc1_b_ = add_param("visual.fc1.bias", 1, d);
    fc2_w_ = add_param("visual.fc2.weight", 4, d);
    fc2_b_ = add_param("visual.fc2.bias", 1, d);
    for (std::size_t l = 0; l < config_.visual_encoder_layers; ++l) {
        visual_.push_back(add_encoder_layer("visual." + std::to_string(l)));
    }
    visual_norm_ = add_norm("visual.final_norm");
    for (std::size_t l = 0; l < config_.decoder_layers; ++l) {
        const std::string p = "decoder." + std::to_string(l);
        DecoderLayer layer;
        layer.ln1 = add_norm(p + ".self_norm");
        layer.self_attn = add_attention(p + ".self_attn");
        layer.ln2 = add_norm(p + ".cross_norm");
        layer.cross_attn = add_attention(p + ".cross_attn");
        layer.ln3 = add_norm(p + ".ffn_norm");
        layer.ffn = add_ffn(p + ".ffn");
        decoder_.push_back(layer);
    }
    decoder_norm_ = add_norm("decoder.final_norm");
    out_w_ = add_param("output.weight", d, config_.vocab_size);
    out_b_ = add_param("output.bias", 1, config_.vocab_size);

    // Initialization: unit-variance token embeddings, Xavier-uniform weight
    // matrices, zero biases, unit norm gains. Parameters are visited in
    // creation order so the seed fully determines the result.
    std::mt19937_64 rng(seed);
    for (auto& p : params_) {
        const std::string& name = p.name;
        const bool is_gain = name.size() >= 5 && name.compare(name.size() - 5, 5, ".gain") == 0;
        const bool is_bias = name.size() >= 5 && name.compare(name.size() - 5, 5, ".bias") == 0;
        if (&p == &params_[token_embedding_]) {
            for (double& v : p.value.data) v = gaussian(rng);
        } else if (is_gain) {
            std::fill(p.value.data.begin(), p.value.data.end(), 1.0);
        } else if (is_bias) {
            std::fill(p.value.data.begin(), p.value.data.end(), 0.0);
        } else {
            const double limit = std::sqrt(6.0 / static_cast<double>(p.value.rows + p.value.cols));
            for (double& v : p.value.data) v = uniform(rng, -limit, limit);
        }
    }
}

std::size_t FusionModel::add_param(std::string name, std::size_t rows, std::size_t cols) {
    nn::Parameter p;
    p.name = std::move(name);
    p.value = nn::Matrix(rows, cols);
    p.grad = nn::Matrix(rows, cols);
    params_.push_back(std::move(p));
    return params_.size() - 1;
}

FusionModel::Norm FusionModel::add_norm(const std::string& prefix) {
    return {add_param(prefix + ".gain", 1, config_.model_dim), add_param(prefix + ".bias", 1, config_.model_dim)};
}

FusionModel::AttentionBlock FusionModel::add_attention(const std::string& prefix) {
    const std::size_t d = config_.model_dim;
    return {add_param(prefix + ".query", d, d), add_param(prefix + ".key", d, d), add_param(prefix + ".value", d, d),
            add_param(prefix + ".out", d, d)};
}

FusionModel::FeedForward FusionModel::add_ffn(const std::string& prefix) {
    const std::size_t d = config_.model_dim;
    const std::size_t f = config_.ffn_dim;
    return {add_param(prefix + ".in.weight", d, f), add_param(prefix + ".in.bias", 1, f),
            add_param(prefix + ".out.weight", f, d), add_param(prefix + ".out.bias", 1, d)};
}

FusionModel::EncoderLayer FusionModel::add_encoder_layer(const std::string& prefix) {
    EncoderLayer layer;
    layer.ln1 = add_norm(prefix + ".attn_norm");
    layer.attn = add_attention(prefix + ".attn");
    layer.ln2 = add_norm(prefix + ".ffn_norm");
    layer.ffn = add_ffn(prefix + ".ffn");
    return layer;
}

nn::Parameter& FusionModel::parameter(std::string_view name) {
    for (auto& p : params_) {
        if (p.name == name) return p;
    }
    throw Error(ErrorKind::kInvalidArgument, "no parameter named '" + std::string(name) + "'");
}

const nn::Parameter& FusionModel::parameter(std::string_view name) const {
    return const_cast<FusionModel*>(this)->parameter(name);
}

std::size_t FusionModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

void FusionModel::zero_grad() {
    for (auto& p : params_) std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
}

nn::Var FusionModel::norm(nn::Tape& t, nn::Var x, const Norm& n) {
    return nn::layer_norm(t, x, params_[n.gain], params_[n.bias]);
}

nn::Var FusionModel::attend(nn::Tape& t, nn::Var query_in, nn::Var memory_in, const AttentionBlock& a, bool causal) {
    nn::Var q = nn::linear(t, query_in, params_[a.wq], nullptr);
    nn::Var k = nn::linear(t, memory_in, params_[a.wk], nullptr);
    nn::Var v = nn::linear(t, memory_in, params_[a.wv], nullptr);
    nn::Var o = nn::attention(t, q, k, v, config_.heads, causal);
    return nn::linear(t, o, params_[a.wo], nullptr);
}

nn::Var FusionModel::feed_forward(nn::Tape& t, nn::Var x, const FeedForward& f, std::mt19937_64* rng) {
    nn::Var h = nn::gelu(t, nn::linear(t, x, params_[f.w1], &params_[f.b1]));
    h = drop(t, h, rng);
    return nn::linear(t, h, params_[f.w2], &params_[f.b2]);
}

nn::Var FusionModel::drop(nn::Tape& t, nn::Var x, std::mt19937_64* rng) {
    if (rng == nullptr || config_.dropout <= 0.0) return x;
    return nn::dropout(t, x, config_.dropout, *rng);
}

nn::Var FusionModel::add_positions(nn::Tape& t, nn::Var x) {
    const auto& v = t.value(x);
    return nn::add(t, x, t.constant(positions(v.rows, v.cols)));
}

nn::Var FusionModel::run_encoder_stack(nn::Tape& t, nn::Var x, const std::vector<EncoderLayer>& layers,
                                       const Norm& final_norm, std::mt19937_64* rng) {
    for (const auto& layer : layers) {
        nn::Var h = norm(t, x, layer.ln1);
        x = nn::add(t, x, drop(t, attend(t, h, h, layer.attn, false), rng));
        h = norm(t, x, layer.ln2);
        x = nn::add(t, x, drop(t, feed_forward(t, h, layer.ffn, rng), rng));
    }
    return norm(t, x, final_norm);
}

nn::Var FusionModel::encode_passage(nn::Tape& t, std::span<const int> tokens, std::mt19937_64* rng) {
    if (tokens.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot encode an empty passage");
    nn::Var x = nn::embedding(t, params_[token_embedding_], tokens);
    x = add_positions(t, x);  // positions restart at 0 for every passage
    return run_encoder_stack(t, drop(t, x, rng), encoder_, encoder_norm_, rng);
}

nn::Var FusionModel::encode_visual(nn::Tape& t, const std::vector<std::vector<double>>& features,
                                   const std::vector<regions::NormalizedBox>& boxes, std::mt19937_64* rng) {
    if (features.size() != boxes.size()) {
        throw Error(ErrorKind::kDimensionMismatch, "encode_visual: " + std::to_string(features.size()) +
                                                           " region features but " + std::to_string(boxes.size()) +
                                                           " boxes");
    }
    if (features.empty()) throw Error(ErrorKind::kInvalidArgument, "encode_visual: no regions");
    if (features.size() > config_.max_regions) {
        throw Error(ErrorKind::kInvalidArgument, "encode_visual: " + std::to_string(features.size()) +
                                                         " regions exceed max_regions " +
                                                         std::to_string(config_.max_regions));
    }
    const std::size_t m = features.size();
    nn::Matrix v(m, config_.region_dim);
    nn::Matrix b(m, 4);
    for (std::size_t j = 0; j < m; ++j) {
        if (features[j].size() != config_.region_dim) {
            throw Error(ErrorKind::kDimensionMismatch, "encode_visual: region feature width " +
                                                               std::to_string(features[j].size()) + " != " +
                                                               std::to_string(config_.region_dim));
        }
        std::copy(features[j].begin(), features[j].end(), v.row(j).begin());
        const auto coords = boxes[j].as_array();
        std::copy(coords.begin(), coords.end(), b.row(j).begin());
    }
    nn::Var fv = nn::linear(t, t.constant(std::move(v)), params_[fc1_w_], &params_[fc1_b_]);
    nn::Var fb = nn::linear(t, t.constant(std::move(b)), params_[fc2_w_], &params_[fc2_b_]);
    nn::Var x = add_positions(t, nn::interleave_rows(t, fv, fb));
    return run_encoder_stack(t, drop(t, x, rng), visual_, visual_norm_, rng);
}

nn::Var FusionModel::encode_memory(nn::Tape& t, const FusionInput& input, std::mt19937_64* rng) {
    std::vector<nn::Var> parts;
    for (const auto& p : input.explicit_passages) parts.push_back(encode_passage(t, p, rng));
    for (const auto& p : input.implicit_passages) parts.push_back(encode_passage(t, p, rng));
    if (!input.region_features.empty() || !input.boxes.empty()) {
        parts.push_back(encode_visual(t, input.region_features, input.boxes, rng));
    }
    parts.push_back(encode_passage(t, input.question, rng));
    return nn::concat_rows(t, parts);
}

nn::Var FusionModel::decoder_logits(nn::Tape& t, nn::Var memory, std::span<const int> decoder_inputs,
                                    std::mt19937_64* rng) {
    if (decoder_inputs.empty()) throw Error(ErrorKind::kInvalidArgument, "decoder needs at least one input token");
    nn::Var y = add_positions(t, nn::embedding(t, params_[token_embedding_], decoder_inputs));
    y = drop(t, y, rng);
    for (const auto& layer : decoder_) {
        nn::Var h = norm(t, y, layer.ln1);
        y = nn::add(t, y, drop(t, attend(t, h, h, layer.self_attn, true), rng));
        h = norm(t, y, layer.ln2);
        y = nn::add(t, y, drop(t, attend(t, h, memory, layer.cross_attn, false), rng));
        h = norm(t, y, layer.ln3);
        y = nn::add(t, y, drop(t, feed_forward(t, h, layer.ffn, rng), rng));
    }
    y = norm(t, y, decoder_norm_);
    return nn::linear(t, y, params_[out_w_], &params_[out_b_]);
}

nn::Var FusionModel::loss(nn::Tape& t, const FusionInput& input, std::span<const int> target, bool mean,
                          std::mt19937_64* rng) {
    if (target.empty()) throw Error(ErrorKind::kInvalidArgument, "empty target sequence");
    nn::Var memory = encode_memory(t, input, rng);
    const auto dec_in = shift_right(target);
    nn::Var logits = decoder_logits(t, memory, dec_in, rng);
    return nn::cross_entropy(t, logits, target, mean);
}

std::vector<int> shift_right(std::span<const int> target) {
    std::vector<int> in;
    in.reserve(target.size());
    in.push_back(kBosId);
    for (std::size_t i = 0; i + 1 < target.size(); ++i) in.push_back(target[i]);
    return in;
}

nn::Matrix encode_passage(FusionModel& model, std::span<const int> tokens) {
    nn::Tape t(false);
    return t.value(model.encode_passage(t, tokens, nullptr));
}

nn::Matrix encode_visual(FusionModel& model, const std::vector<std::vector<double>>& features,
                         const std::vector<regions::NormalizedBox>& boxes) {
    nn::Tape t(false);
    return t.value(model.encode_visual(t, features, boxes, nullptr));
}

nn::Matrix encode_question(FusionModel& model, std::span<const int> tokens) {
    return encode_passage(model, tokens);
}

EncodedBundle encode(FusionModel& model, const FusionInput& input) {
    EncodedBundle b;
    for (const auto& p : input.explicit_passages) b.knowledge.push_back(encode_passage(model, p));
    for (const auto& p : input.implicit_passages) b.implicit.push_back(encode_passage(model, p));
    if (!input.region_features.empty() || !input.boxes.empty()) {
        b.visual = encode_visual(model, input.region_features, input.boxes);
    } else {
        b.visual = nn::Matrix(0, model.config().model_dim);
    }
    b.question = encode_question(model, input.question);
    return b;
}

nn::Matrix decoder_logits(FusionModel& model, const EncodedBundle& bundle, std::span<const int> decoder_inputs) {
    nn::Tape t(false);
    nn::Var memory = t.constant(bundle.memory());
    return t.value(model.decoder_logits(t, memory, decoder_inputs, nullptr));
}

std::vector<int> decode(FusionModel& model, const EncodedBundle& bundle, std::size_t max_len) {
    const nn::Matrix memory = bundle.memory();
    if (memory.rows == 0) throw Error(ErrorKind::kInvalidArgument, "decode: empty bundle");
    std::vector<int> seq = {kBosId};
    std::vector<int> out;
    for (std::size_t step = 0; step < max_len; ++step) {
        nn::Tape t(false);
        const nn::Matrix& logits = t.value(model.decoder_logits(t, t.constant(memory), seq, nullptr));
        auto last = logits.row(logits.rows - 1);
        // max_element returns the first maximum: lowest id wins ties
        const int next = static_cast<int>(std::max_element(last.begin(), last.end()) - last.begin());
        if (next == kEosId) break;
        out.push_back(next);
        seq.push_back(next);
    }
    return out;
}

double loss(FusionModel& model, const EncodedBundle& bundle, std::span<const int> target, bool mean) {
    nn::Tape t(false);
    const auto dec_in = shift_right(target);
    nn::Var logits = model.decoder_logits(t, t.constant(bundle.memory()), dec_in, nullptr);
    return t.value(nn::cross_entropy(t, logits, target, mean))(0, 0);
}

double loss(FusionModel& model, const FusionInput& input, std::span<const int> target, bool mean) {
    nn::Tape t(false);
    return t.value(model.loss(t, input, target, mean, nullptr))(0, 0);
}

} // namespace revive::fusion
