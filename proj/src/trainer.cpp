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

#include "revive/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "revive/error.hpp"

namespace revive::fusion {

namespace {

bool decays(const std::string& name) {
    auto ends_with = [&](const char* suffix) {
        const std::string s(suffix);
        return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
    };
    return !ends_with(".bias") && !ends_with(".gain");
}

} // namespace

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::kInvalidArgument, "optimizer: learning_rate must be > 0");
    if (batch_size == 0) throw Error(ErrorKind::kInvalidArgument, "optimizer: batch_size must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
        throw Error(ErrorKind::kInvalidArgument, "optimizer: betas must be in [0, 1)");
    }
    if (weight_decay < 0.0 || grad_clip < 0.0) {
        throw Error(ErrorKind::kInvalidArgument, "optimizer: weight_decay and grad_clip must be >= 0");
    }
}

nlohmann::json OptimizerConfig::to_json() const {
    return {{"lr", learning_rate}, {"warmup", warmup_steps}, {"steps", steps},
            {"batch", batch_size},  {"beta1", beta1},         {"beta2", beta2},
            {"eps", epsilon},       {"weight_decay", weight_decay}, {"grad_clip", grad_clip},
            {"sum_loss", sum_loss}};
}

OptimizerConfig OptimizerConfig::from_json(const nlohmann::json& j) {
    OptimizerConfig c;
    c.learning_rate = j.value("lr", c.learning_rate);
    c.warmup_steps = j.value("warmup", c.warmup_steps);
    c.steps = j.value("steps", c.steps);
    c.batch_size = j.value("batch", c.batch_size);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("eps", c.epsilon);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.sum_loss = j.value("sum_loss", c.sum_loss);
    return c;
}

double scheduled_learning_rate(const OptimizerConfig& config, std::size_t step) {
    if (config.warmup_steps == 0 || step >= config.warmup_steps) return config.learning_rate;
    return config.learning_rate * static_cast<double>(step + 1) / static_cast<double>(config.warmup_steps);
}

void AdamW::step(std::vector<nn::Parameter>& params, double learning_rate) {
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.emplace_back(p.value.rows, p.value.cols);
            v_.emplace_back(p.value.rows, p.value.cols);
        }
    }
    ++t_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        if (p.grad.size() != p.value.size()) continue;
        const double decay = decays(p.name) ? learning_rate * config_.weight_decay : 0.0;
        auto& m = m_[i].data;
        auto& v = v_[i].data;
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            const double g = p.grad.data[j];
            m[j] = b1 * m[j] + (1.0 - b1) * g;
            v[j] = b2 * v[j] + (1.0 - b2) * g * g;
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            p.value.data[j] -= decay * p.value.data[j];
            p.value.data[j] -= learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
        }
    }
}

double clip_gradients(std::vector<nn::Parameter>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params) {
        for (double g : p.grad.data) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double f = max_norm / norm;
        for (auto& p : params) {
            for (double& g : p.grad.data) g *= f;
        }
    }
    return norm;
}

TrainResult train(FusionModel& model, const std::vector<TrainingExample>& data, const OptimizerConfig& config,
                  std::uint64_t seed, const std::function<bool(std::size_t, double)>& on_step) {
    config.validate();
    if (data.empty()) throw Error(ErrorKind::kInvalidArgument, "train: empty dataset");
    std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
    AdamW opt(config);
    TrainResult result;
    result.loss_curve.reserve(config.steps);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = order.size();

    for (std::size_t step = 0; step < config.steps; ++step) {
        model.zero_grad();
        double batch_loss = 0.0;
        for (std::size_t b = 0; b < config.batch_size; ++b) {
            if (cursor == order.size()) {
                for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
                cursor = 0;
            }
            const TrainingExample& ex = data[order[cursor++]];
            nn::Tape tape;
            nn::Var l = model.loss(tape, ex.input, ex.target, !config.sum_loss, &rng);
            const double value = tape.value(l)(0, 0);
            if (!std::isfinite(value)) {
                std::ostringstream msg;
                msg << "non-finite loss " << value << " at step " << step << " on sample '" << ex.id << "'";
                if (!result.loss_curve.empty()) msg << " (previous step loss " << result.loss_curve.back() << ")";
                throw Error(ErrorKind::kTraining, msg.str());
            }
            batch_loss += value;
            tape.backward(l);
        }
        const double inv = 1.0 / static_cast<double>(config.batch_size);
        for (auto& p : model.parameters()) {
            for (double& g : p.grad.data) g *= inv;
        }
        clip_gradients(model.parameters(), config.grad_clip);
        opt.step(model.parameters(), scheduled_learning_rate(config, step));
        result.loss_curve.push_back(batch_loss * inv);
        if (on_step && !on_step(step, result.loss_curve.back())) break;
    }
    return result;
}

void write_loss_curve(const std::filesystem::path& path, const std::vector<double>& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write loss curve '" + path.string() + "'");
    out << "step,loss\n" << std::setprecision(17);
    for (std::size_t i = 0; i < curve.size(); ++i) out << i << ',' << curve[i] << '\n';
}

} // namespace revive::fusion
