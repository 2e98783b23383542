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
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "revive/regions.hpp"
#include "revive/tensor.hpp"
#include "revive/tokenizer.hpp"

// Fusion-in-decoder answer generator: a shared passage encoder, a visual
// encoder over interleaved region-feature / box tokens, and a greedy
// autoregressive decoder cross-attending to the concatenation of every
// encoding.
namespace revive::fusion {

inline constexpr std::size_t kDefaultMaxRegions = 36;
inline constexpr std::size_t kDefaultVisualLayers = 9;

struct ModelConfig {
    std::size_t vocab_size = 32;
    std::size_t model_dim = 32;
    std::size_t heads = 4;
    std::size_t encoder_layers = 1;
    std::size_t visual_encoder_layers = kDefaultVisualLayers;
    std::size_t decoder_layers = 2;
    std::size_t ffn_dim = 64;
    std::size_t max_passage_tokens = 32;
    std::size_t max_regions = kDefaultMaxRegions;
    std::size_t region_dim = 32;  // S, width of region embeddings
    double dropout = 0.0;

    void validate() const;
    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
};

// One sample, already tokenized. Region features are S-dim rows.
struct FusionInput {
    std::vector<std::vector<int>> explicit_passages;
    std::vector<std::vector<int>> implicit_passages;
    std::vector<std::vector<double>> region_features;
    std::vector<regions::NormalizedBox> boxes;
    std::vector<int> question;
};

struct EncodedBundle {
    std::vector<nn::Matrix> knowledge;  // one token sequence per explicit passage
    std::vector<nn::Matrix> implicit;   // one per implicit candidate
    nn::Matrix visual;                  // 2m x D, 0 rows when m == 0
    nn::Matrix question;

    std::size_t memory_rows() const;
    // knowledge..., implicit..., visual, question stacked by rows.
    nn::Matrix memory() const;
};

class FusionModel {
public:
    FusionModel(ModelConfig config, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }
    std::vector<nn::Parameter>& parameters() { return params_; }
    const std::vector<nn::Parameter>& parameters() const { return params_; }
    nn::Parameter& parameter(std::string_view name);
    const nn::Parameter& parameter(std::string_view name) const;
    std::size_t parameter_count() const;
    void zero_grad();

    // Graph builders. `rng` enables dropout (training); pass nullptr for a
    // deterministic forward.
    nn::Var encode_passage(nn::Tape& t, std::span<const int> tokens, std::mt19937_64* rng);
    nn::Var encode_visual(nn::Tape& t, const std::vector<std::vector<double>>& features,
                          const std::vector<regions::NormalizedBox>& boxes, std::mt19937_64* rng);
    // Concatenated memory for a full input.
    nn::Var encode_memory(nn::Tape& t, const FusionInput& input, std::mt19937_64* rng);
    // Logits (len x V) for decoder inputs given a memory node.
    nn::Var decoder_logits(nn::Tape& t, nn::Var memory, std::span<const int> decoder_inputs, std::mt19937_64* rng);
    // Teacher-forced cross-entropy over answer tokens (target ids end in <eos>).
    nn::Var loss(nn::Tape& t, const FusionInput& input, std::span<const int> target, bool mean,
                 std::mt19937_64* rng);

private:
    struct AttentionBlock {
        std::size_t wq, wk, wv, wo;
    };
    struct FeedForward {
        std::size_t w1, b1, w2, b2;
    };
    struct Norm {
        std::size_t gain, bias;
    };
    struct EncoderLayer {
        Norm ln1;
        AttentionBlock attn;
        Norm ln2;
        FeedForward ffn;
    };
    struct DecoderLayer {
        Norm ln1;
        AttentionBlock self_attn;
        Norm ln2;
        AttentionBlock cross_attn;
        Norm ln3;
        FeedForward ffn;
    };

    std::size_t add_param(std::string name, std::size_t rows, std::size_t cols);
    Norm add_norm(const std::string& prefix);
    AttentionBlock add_attention(const std::string& prefix);
    FeedForward add_ffn(const std::string& prefix);
    EncoderLayer add_encoder_layer(const std::string& prefix);

    nn::Var norm(nn::Tape& t, nn::Var x, const Norm& n);
    nn::Var attend(nn::Tape& t, nn::Var query_in, nn::Var memory_in, const AttentionBlock& a, bool causal);
    nn::Var feed_forward(nn::Tape& t, nn::Var x, const FeedForward& f, std::mt19937_64* rng);
    nn::Var run_encoder_stack(nn::Tape& t, nn::Var x, const std::vector<EncoderLayer>& layers, const Norm& final_norm,
                              std::mt19937_64* rng);
    nn::Var add_positions(nn::Tape& t, nn::Var x);
    nn::Var drop(nn::Tape& t, nn::Var x, std::mt19937_64* rng);

    ModelConfig config_;
    std::vector<nn::Parameter> params_;

    std::size_t token_embedding_ = 0;
    std::vector<EncoderLayer> encoder_;
    Norm encoder_norm_{};
    std::size_t fc1_w_ = 0, fc1_b_ = 0, fc2_w_ = 0, fc2_b_ = 0;
    std::vector<EncoderLayer> visual_;
    Norm visual_norm_{};
    std::vector<DecoderLayer> decoder_;
    Norm decoder_norm_{};
    std::size_t out_w_ = 0, out_b_ = 0;
};

// --- value-level API (deterministic forward, no dropout) ---

nn::Matrix encode_passage(FusionModel& model, std::span<const int> tokens);
nn::Matrix encode_visual(FusionModel& model, const std::vector<std::vector<double>>& features,
                         const std::vector<regions::NormalizedBox>& boxes);
nn::Matrix encode_question(FusionModel& model, std::span<const int> tokens);
EncodedBundle encode(FusionModel& model, const FusionInput& input);

// Logits for every position of `decoder_inputs` (which should start with <bos>).
nn::Matrix decoder_logits(FusionModel& model, const EncodedBundle& bundle, std::span<const int> decoder_inputs);

// Greedy decoding; ties in argmax go to the lowest token id. Returns the
// generated ids without <bos>/<eos>.
std::vector<int> decode(FusionModel& model, const EncodedBundle& bundle, std::size_t max_len);

// Mean (or summed) teacher-forced cross-entropy on a fixed bundle.
double loss(FusionModel& model, const EncodedBundle& bundle, std::span<const int> target, bool mean = true);
double loss(FusionModel& model, const FusionInput& input, std::span<const int> target, bool mean = true);

// <bos> followed by target[0..n-2]: the teacher-forcing decoder input.
std::vector<int> shift_right(std::span<const int> target);

} // namespace revive::fusion
