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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revive/fusion_model.hpp"

namespace revive::fusion {

struct OptimizerConfig {
    double learning_rate = 8e-5;
    std::size_t warmup_steps = 1000;
    std::size_t steps = 10000;
    std::size_t batch_size = 8;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
    double grad_clip = 1.0;  // global L2 norm; 0 disables
    bool sum_loss = false;   // sum over answer positions instead of mean

    void validate() const;
    nlohmann::json to_json() const;
    static OptimizerConfig from_json(const nlohmann::json& j);
};

struct TrainingExample {
    std::string id;
    FusionInput input;
    std::vector<int> target;  // answer ids ending in <eos>
};

struct TrainResult {
    std::vector<double> loss_curve;  // mean batch loss per step
};

// Linear warmup to the base rate over warmup_steps, then constant.
double scheduled_learning_rate(const OptimizerConfig& config, std::size_t step);

// AdamW with decoupled weight decay. Decay skips biases and norm gains.
class AdamW {
public:
    explicit AdamW(OptimizerConfig config) : config_(std::move(config)) {}

    void step(std::vector<nn::Parameter>& params, double learning_rate);
    std::size_t steps_taken() const { return t_; }

private:
    OptimizerConfig config_;
    std::vector<nn::Matrix> m_;
    std::vector<nn::Matrix> v_;
    std::size_t t_ = 0;
};

// Scales all gradients so their global L2 norm is at most max_norm; returns
// the norm before clipping.
double clip_gradients(std::vector<nn::Parameter>& params, double max_norm);

// Single-threaded, seed-deterministic training. Throws Error(kTraining) with
// the step and sample id on a non-finite loss. `on_step`, when set, is called
// after every update and may return false to stop early.
TrainResult train(FusionModel& model, const std::vector<TrainingExample>& data, const OptimizerConfig& config,
                  std::uint64_t seed,
                  const std::function<bool(std::size_t step, double loss)>& on_step = nullptr);

void write_loss_curve(const std::filesystem::path& path, const std::vector<double>& curve);

} // namespace revive::fusion
