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

#include "toy_task.hpp"

#include <algorithm>
#include <cmath>

#include "revive/ensemble.hpp"
#include "revive/oracle.hpp"

namespace revive::testing {

ToyTask make_toy_task(const syndata::SynConfig& syn, const pipeline::RetrievalConfig& retrieval,
                      std::size_t max_tokens) {
    ToyTask t;
    t.data = syndata::generate(syn);
    t.store = pipeline::make_store(t.data.kb, t.data.tags, t.data.artifacts, retrieval.categories);
    auto cache = oracle::ReplayCache::in_memory(t.data.cache);
    t.retrievals = pipeline::retrieve_all(t.store, t.data.samples, *cache, retrieval);
    std::vector<pipeline::SampleRetrieval> train_retrievals;
    for (std::size_t i = 0; i < t.data.samples.size(); ++i) {
        const auto& s = t.data.samples[i];
        if (s.split == "train") {
            t.train_samples.push_back(s);
            train_retrievals.push_back(t.retrievals[i]);
        } else {
            t.eval_samples.push_back(s);
        }
    }
    t.vocab = pipeline::build_vocabulary(train_retrievals, t.train_samples, 0);
    t.train = pipeline::training_examples(t.store, t.train_samples, t.retrievals, t.vocab, retrieval.regions,
                                          max_tokens);
    t.eval = pipeline::training_examples(t.store, t.eval_samples, t.retrievals, t.vocab, retrieval.regions,
                                         max_tokens);
    return t;
}

fusion::ModelConfig toy_model_config(const ToyTask& task) {
    fusion::ModelConfig c;
    c.vocab_size = task.vocab.size();
    c.model_dim = 32;
    c.heads = 4;
    c.ffn_dim = 64;
    c.encoder_layers = 1;
    c.visual_encoder_layers = 2;
    c.decoder_layers = 2;
    c.max_passage_tokens = 64;
    c.region_dim = task.store.manifest.embedding_dim;
    return c;
}

double exact_match_percent(std::vector<fusion::FusionModel>& models, const std::vector<fusion::TrainingExample>& examples,
                           const fusion::Vocabulary& vocab) {
    if (examples.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& ex : examples) {
        const std::string want = fusion::detokenize(ex.target, vocab);
        if (fusion::predict(models, ex.input, vocab, 8) == eval::normalize_answer(want)) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(examples.size());
}

double soft_accuracy_percent(std::vector<fusion::FusionModel>& models, const std::vector<eval::QASample>& samples,
                             const std::vector<fusion::TrainingExample>& examples, const fusion::Vocabulary& vocab) {
    std::vector<eval::QASample> scored = samples;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        scored[i].prediction = fusion::predict(models, examples[i].input, vocab, 8);
    }
    return eval::score_dataset(scored).accuracy_percent;
}

fusion::FusionInput random_fusion_input(std::mt19937_64& rng, const fusion::ModelConfig& config,
                                        std::size_t explicit_count, std::size_t implicit_count,
                                        std::size_t region_count) {
    std::uniform_int_distribution<int> token(fusion::kReservedIds, static_cast<int>(config.vocab_size) - 1);
    std::uniform_int_distribution<std::size_t> length(2, 6);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 0.5);
    auto passage = [&] {
        std::vector<int> p(length(rng));
        for (auto& id : p) id = token(rng);
        p.back() = fusion::kEosId;
        return p;
    };
    fusion::FusionInput in;
    for (std::size_t i = 0; i < explicit_count; ++i) in.explicit_passages.push_back(passage());
    for (std::size_t i = 0; i < implicit_count; ++i) in.implicit_passages.push_back(passage());
    for (std::size_t j = 0; j < region_count; ++j) {
        std::vector<double> f(config.region_dim);
        for (auto& v : f) v = normal(rng);
        in.region_features.push_back(std::move(f));
        const double x1 = unit(rng), y1 = unit(rng);
        in.boxes.push_back({x1, y1, x1 + 0.1 + unit(rng), y1 + 0.1 + unit(rng)});
    }
    in.question = passage();
    return in;
}

GradientCheck fusion_gradient_check(fusion::FusionModel& model, const fusion::FusionInput& input,
                                    const std::vector<int>& target, std::size_t stride, double step, double floor) {
    model.zero_grad();
    {
        nn::Tape t;
        t.backward(model.loss(t, input, target, true, nullptr));
    }
    GradientCheck out;
    std::size_t counter = 0;
    for (auto& p : model.parameters()) {
        for (std::size_t i = 0; i < p.value.size(); ++i, ++counter) {
            if (counter % stride != 0) continue;
            const double keep = p.value.data[i];
            auto at = [&](double offset) {
                p.value.data[i] = keep + offset;
                return fusion::loss(model, input, target, true);
            };
            const double numeric =
                    (8.0 * (at(step) - at(-step)) - (at(2 * step) - at(-2 * step))) / (12.0 * step);
            p.value.data[i] = keep;
            const double analytic = p.grad.data[i];
            const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
            if (rel > out.max_relative_error) {
                out.max_relative_error = rel;
                out.worst_parameter = p.name + "[" + std::to_string(i) + "]";
            }
            ++out.entries_checked;
        }
    }
    return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("revive_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace revive::testing
