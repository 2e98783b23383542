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

#include "revive/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "revive/error.hpp"
#include "revive/kb.hpp"
#include "revive/regions.hpp"

namespace revive::pipeline {

namespace {

using nlohmann::json;

std::string aggregation_name(vecindex::Aggregation a) {
    return a == vecindex::Aggregation::kGlobalMax ? "global_max" : "per_query";
}

vecindex::Aggregation parse_aggregation(const std::string& s) {
    if (s == "global_max") return vecindex::Aggregation::kGlobalMax;
    if (s == "per_query") return vecindex::Aggregation::kPerQuery;
    throw Error(ErrorKind::kInvalidArgument, "config: retrieval.aggregation must be global_max or per_query, got '" +
                                                     s + "'");
}

template <typename T>
T get(const json& j, const char* key, const T& fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kParse, "config: bad value for " + where + key + ": " + e.what());
    }
}

} // namespace

PipelineConfig::PipelineConfig() {
    retrieval.categories = kb::default_categories();
    model.max_regions = retrieval.regions;
}

json PipelineConfig::to_json() const {
    json j;
    j["paths"] = {{"kb", paths.kb},
                  {"kb_embeddings", paths.kb_embeddings},
                  {"tags", paths.tags},
                  {"tag_embeddings", paths.tag_embeddings},
                  {"regions", paths.regions},
                  {"samples", paths.samples},
                  {"cache", paths.cache},
                  {"output", paths.output}};
    j["retrieval"] = {{"U", retrieval.candidates},
                      {"K", retrieval.knowledge},
                      {"M", retrieval.regions},
                      {"P", retrieval.tags},
                      {"aggregation", aggregation_name(retrieval.aggregation)},
                      {"categories", retrieval.categories}};
    j["model"] = model.to_json();
    j["optimizer"] = optimizer.to_json();
    j["seed"] = seed;
    j["ensemble_seeds"] = ensemble_seeds;
    j["vocab_max"] = vocab_max;
    j["decode_max_len"] = decode_max_len;
    j["threads"] = threads;
    j["train_split"] = train_split;
    j["predict_split"] = predict_split;
    j["eval"] = {{"mode", eval_mode}};
    j["oracle"] = {{"endpoint", oracle.endpoint}, {"token_env", oracle.token_env}, {"params", oracle.params_json}};
    return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::kParse, "config: top level must be an object");
    PipelineConfig c;
    if (j.contains("paths")) {
        const json& p = j.at("paths");
        c.paths.kb = get(p, "kb", c.paths.kb, "paths.");
        c.paths.kb_embeddings = get(p, "kb_embeddings", c.paths.kb_embeddings, "paths.");
        c.paths.tags = get(p, "tags", c.paths.tags, "paths.");
        c.paths.tag_embeddings = get(p, "tag_embeddings", c.paths.tag_embeddings, "paths.");
        c.paths.regions = get(p, "regions", c.paths.regions, "paths.");
        c.paths.samples = get(p, "samples", c.paths.samples, "paths.");
        c.paths.cache = get(p, "cache", c.paths.cache, "paths.");
        c.paths.output = get(p, "output", c.paths.output, "paths.");
    }
    if (j.contains("retrieval")) {
        const json& r = j.at("retrieval");
        c.retrieval.candidates = get(r, "U", c.retrieval.candidates, "retrieval.");
        c.retrieval.knowledge = get(r, "K", c.retrieval.knowledge, "retrieval.");
        c.retrieval.regions = get(r, "M", c.retrieval.regions, "retrieval.");
        c.retrieval.tags = get(r, "P", c.retrieval.tags, "retrieval.");
        c.retrieval.aggregation =
                parse_aggregation(get(r, "aggregation", aggregation_name(c.retrieval.aggregation), "retrieval."));
        c.retrieval.categories = get(r, "categories", c.retrieval.categories, "retrieval.");
    }
    json model = c.model.to_json();
    model["max_regions"] = std::max<std::size_t>(c.retrieval.regions, 1);
    if (j.contains("model")) model.merge_patch(j.at("model"));
    try {
        c.model = fusion::ModelConfig::from_json(model);
        if (j.contains("optimizer")) c.optimizer = fusion::OptimizerConfig::from_json(j.at("optimizer"));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kParse, std::string("config: ") + e.what());
    }
    // the visual encoder must accept every region the M cap lets through
    c.model.max_regions = std::max(c.model.max_regions, c.retrieval.regions);
    c.seed = get(j, "seed", c.seed, "");
    c.ensemble_seeds = get(j, "ensemble_seeds", c.ensemble_seeds, "");
    c.vocab_max = get(j, "vocab_max", c.vocab_max, "");
    c.decode_max_len = get(j, "decode_max_len", c.decode_max_len, "");
    c.threads = get(j, "threads", c.threads, "");
    c.train_split = get(j, "train_split", c.train_split, "");
    c.predict_split = get(j, "predict_split", c.predict_split, "");
    if (j.contains("eval")) c.eval_mode = get(j.at("eval"), "mode", c.eval_mode, "eval.");
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        c.oracle.endpoint = get(o, "endpoint", c.oracle.endpoint, "oracle.");
        c.oracle.token_env = get(o, "token_env", c.oracle.token_env, "oracle.");
        c.oracle.params_json = get(o, "params", c.oracle.params_json, "oracle.");
    }
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::kInvalidArgument, "config: " + m); };
    if (model.max_regions < retrieval.regions) bad("model.max_regions must be >= retrieval.M");
    if (retrieval.categories.empty()) bad("retrieval.categories is empty");
    if (threads == 0) bad("threads must be >= 1");
    if (decode_max_len == 0) bad("decode_max_len must be >= 1");
    if (eval_mode != "simple" && eval_mode != "averaged") bad("eval.mode must be simple or averaged");
    if (paths.output.empty()) bad("paths.output is empty");
    model.validate();
    optimizer.validate();
}

std::vector<std::uint64_t> PipelineConfig::model_seeds() const {
    return ensemble_seeds.empty() ? std::vector<std::uint64_t>{seed} : ensemble_seeds;
}

std::string PipelineConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(regions::fnv1a64(to_json().dump())));
    return buf;
}

void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::kInvalidArgument, "override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* node = &tree;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw Error(ErrorKind::kInvalidArgument, "override key '" + key + "' has an empty part");
        if (!node->is_object()) throw Error(ErrorKind::kInvalidArgument, "override key '" + key + "' is not a tree path");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

PipelineConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
    json tree = PipelineConfig().to_json();
    tree["model"].erase("max_regions");
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw Error(ErrorKind::kMissingInput, "config file not found: " + file.string());
        json patch;
        try {
            patch = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::kParse, "config file " + file.string() + ": " + e.what());
        }
        tree.merge_patch(patch);
    }
    for (const auto& o : overrides) apply_override(tree, o);
    return PipelineConfig::from_json(tree);
}

} // namespace revive::pipeline
