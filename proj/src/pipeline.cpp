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

#include "revive/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "revive/checkpoint.hpp"
#include "revive/ensemble.hpp"
#include "revive/error.hpp"
#include "revive/prompts.hpp"
#include "revive/rvem.hpp"

namespace revive::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers with contiguous
// chunks; rethrows the exception of the lowest failing index.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i, 0);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t end = std::min(n, (w + 1) * chunk);
            for (std::size_t i = w * chunk; i < end; ++i) {
                try {
                    fn(i, w);
                } catch (...) {
                    errors[i] = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

fs::path out_dir(const PipelineConfig& c) { return fs::path(c.paths.output); }
fs::path store_dir(const PipelineConfig& c) { return out_dir(c) / "store"; }

void require_file(const fs::path& path, const std::string& what, const std::string& hint) {
    if (!fs::exists(path)) {
        throw Error(ErrorKind::kMissingInput, "missing " + what + ": " + path.string() + (hint.empty() ? "" : " (" + hint + ")"));
    }
}

void require_path(const std::string& path, const std::string& key) {
    if (path.empty()) throw Error(ErrorKind::kMissingInput, "config key " + key + " is not set");
    require_file(path, key, "");
}

std::vector<float> stub_rows(const std::vector<std::string>& texts, std::size_t dim) {
    std::vector<float> data;
    data.reserve(texts.size() * dim);
    for (const auto& t : texts) {
        const auto v = regions::stub_embed(t, dim);
        data.insert(data.end(), v.begin(), v.end());
    }
    return data;
}

Store load_store(const PipelineConfig& config) {
    const fs::path dir = store_dir(config);
    require_file(dir / "store.json", "ingested store", "run `revive ingest` first");
    require_path(config.paths.regions, "paths.regions");
    auto kb = kb::attach_embeddings(kb::read_kb_file(dir / "kb.jsonl"), rvem::read(dir / "kb.rvem"));
    auto tags = kb::attach_embeddings(kb::load_tags(dir / "tags.txt"), rvem::read(dir / "tags.rvem"));
    return make_store(std::move(kb), std::move(tags), regions::load_region_artifacts(config.paths.regions),
                      config.retrieval.categories);
}

std::vector<SampleRetrieval> load_retrievals(const PipelineConfig& config) {
    const fs::path path = out_dir(config) / "retrieval.jsonl";
    require_file(path, "retrieval file", "run `revive retrieve` first");
    std::ifstream in(path);
    std::vector<SampleRetrieval> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(SampleRetrieval::from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<eval::QASample> load_samples(const PipelineConfig& config) {
    require_path(config.paths.samples, "paths.samples");
    return eval::read_samples(config.paths.samples);
}

std::map<std::string, const SampleRetrieval*> index_retrievals(const std::vector<SampleRetrieval>& retrievals) {
    std::map<std::string, const SampleRetrieval*> by_id;
    for (const auto& r : retrievals) by_id[r.sample_id] = &r;
    return by_id;
}

const SampleRetrieval& find_retrieval(const std::map<std::string, const SampleRetrieval*>& by_id,
                                      const std::string& sample_id) {
    const auto it = by_id.find(sample_id);
    if (it == by_id.end()) {
        throw Error(ErrorKind::kMissingInput, "no retrieval record for sample '" + sample_id +
                                                      "' (re-run `revive retrieve`)");
    }
    return *it->second;
}

fs::path model_path(const PipelineConfig& c, std::uint64_t seed) {
    return out_dir(c) / "models" / ("model_seed" + std::to_string(seed) + ".rvck");
}

fs::path loss_path(const PipelineConfig& c, std::uint64_t seed) {
    return out_dir(c) / "models" / ("loss_seed" + std::to_string(seed) + ".csv");
}

} // namespace

const regions::RegionArtifact& Store::artifact(const std::string& image_id) const {
    const auto it = artifacts.find(image_id);
    if (it == artifacts.end()) {
        throw Error(ErrorKind::kMissingInput, "no region artifact for image '" + image_id + "'");
    }
    return it->second;
}

Store make_store(std::vector<kb::KnowledgeEntry> entries, std::vector<kb::TagEntry> tags,
                 std::vector<regions::RegionArtifact> artifacts, const std::vector<std::string>& categories) {
    Store s;
    s.kb = kb::filter_by_category(entries, categories);
    if (s.kb.empty()) s.warnings.push_back("knowledge base is empty after category filtering");
    s.tags = std::move(tags);
    if (s.tags.empty()) s.warnings.push_back("tag vocabulary is empty");
    if (!s.kb.empty()) s.kb_index = vecindex::Index::build(kb::embedding_matrix(s.kb));
    if (!s.tags.empty()) s.tag_index = vecindex::Index::build(kb::embedding_matrix(s.tags));
    for (auto& a : artifacts) {
        ++s.manifest.images;
        s.manifest.total_regions += a.region_count();
        if (a.region_count() == 0) ++s.manifest.empty_artifacts;
        if (a.region_count() > 0) {
            const std::size_t d = a.region_embeddings.dim();
            if (s.manifest.embedding_dim != 0 && s.manifest.embedding_dim != d) {
                throw Error(ErrorKind::kDimensionMismatch, "region embedding width differs across images");
            }
            s.manifest.embedding_dim = d;
            for (std::size_t r = 0; r < a.region_count(); ++r) {
                const double n2 = vecindex::dot(a.region_embeddings.row(r), a.region_embeddings.row(r));
                if (std::abs(std::sqrt(n2) - 1.0) > 1e-3) s.manifest.embeddings_normalized = false;
            }
        }
        const std::string id = a.image_id;
        if (!s.artifacts.emplace(id, std::move(a)).second) {
            throw Error(ErrorKind::kValidation, "duplicate region artifact for image '" + id + "'");
        }
    }
    const std::size_t d = s.manifest.embedding_dim;
    if (d != 0 && s.kb_index && s.kb_index->dim() != d) {
        throw Error(ErrorKind::kDimensionMismatch, "KB embedding width " + std::to_string(s.kb_index->dim()) +
                                                           " differs from region width " + std::to_string(d));
    }
    if (d != 0 && s.tag_index && s.tag_index->dim() != d) {
        throw Error(ErrorKind::kDimensionMismatch, "tag embedding width " + std::to_string(s.tag_index->dim()) +
                                                           " differs from region width " + std::to_string(d));
    }
    return s;
}

json SampleRetrieval::to_json() const {
    json ex = json::array();
    for (const auto& h : explicit_hits) {
        ex.push_back({{"entity", h.entity}, {"description", h.description}, {"category", h.category}, {"score", h.score}});
    }
    json im = json::array();
    for (const auto& c : implicit) im.push_back({{"answer", c.answer}, {"explanation", c.explanation}});
    return {{"sample_id", sample_id}, {"image_id", image_id}, {"prompt", prompt},
            {"tags", tags},           {"explicit", ex},       {"implicit", im}};
}

SampleRetrieval SampleRetrieval::from_json(const json& j) {
    SampleRetrieval r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.image_id = j.at("image_id").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.tags = j.at("tags").get<std::vector<std::string>>();
    for (const auto& e : j.at("explicit")) {
        r.explicit_hits.push_back({e.at("entity").get<std::string>(), e.at("description").get<std::string>(),
                                   e.at("category").get<std::string>(), e.at("score").get<double>()});
    }
    for (const auto& c : j.at("implicit")) {
        r.implicit.push_back({c.at("answer").get<std::string>(), c.at("explanation").get<std::string>()});
    }
    return r;
}

SampleRetrieval retrieve_sample(const Store& store, const eval::QASample& sample, oracle::Oracle& oracle,
                                const RetrievalConfig& config) {
    const auto& art = store.artifact(sample.image_id);
    SampleRetrieval r;
    r.sample_id = sample.sample_id;
    r.image_id = sample.image_id;
    if (config.tags > 0 && store.tag_index && art.region_count() > 0) {
        for (const auto& h : regions::retrieve_tags(art, *store.tag_index, store.tags, config.tags, config.aggregation)) {
            r.tags.push_back(h.tag);
        }
    }
    r.prompt = prompts::build_context_prompt(art.caption, r.tags, sample.question);
    if (config.knowledge > 0 && store.kb_index && art.region_count() > 0) {
        for (const auto& h :
             regions::retrieve_explicit(art, *store.kb_index, store.kb, config.knowledge, config.aggregation)) {
            r.explicit_hits.push_back({h.entry.entity, h.entry.description, h.entry.category, h.score});
        }
    }
    if (config.candidates > 0) {
        r.implicit = oracle::retrieve_implicit(oracle, r.prompt, sample.question, config.candidates);
    }
    return r;
}

std::vector<SampleRetrieval> retrieve_all(const Store& store, const std::vector<eval::QASample>& samples,
                                          oracle::Oracle& oracle, const RetrievalConfig& config, std::size_t threads) {
    std::vector<SampleRetrieval> out(samples.size());
    parallel_for(samples.size(), threads,
                 [&](std::size_t i, std::size_t) { out[i] = retrieve_sample(store, samples[i], oracle, config); });
    return out;
}

std::vector<std::string> passage_texts(const SampleRetrieval& r) {
    std::vector<std::string> out;
    for (const auto& h : r.explicit_hits) {
        out.push_back(prompts::build_explicit_passage({h.entity, h.description, h.category, {}}).text);
    }
    for (const auto& c : r.implicit) out.push_back(prompts::build_implicit_passage(c.answer, c.explanation).text);
    out.push_back(prompts::build_question_passage(r.prompt).text);
    return out;
}

std::string training_answer(const eval::QASample& sample) {
    std::vector<std::string> norm;
    for (const auto& a : sample.ground_truth) norm.push_back(eval::normalize_answer(a));
    std::size_t best = 0;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        const auto count = static_cast<std::size_t>(std::count(norm.begin(), norm.end(), norm[i]));
        if (count > best_count) {
            best = i;
            best_count = count;
        }
    }
    if (norm.empty()) throw Error(ErrorKind::kValidation, "sample '" + sample.sample_id + "' has no answers");
    return norm[best];
}

fusion::Vocabulary build_vocabulary(const std::vector<SampleRetrieval>& retrievals,
                                    const std::vector<eval::QASample>& samples, std::size_t max_size) {
    std::vector<std::string> corpus;
    for (const auto& r : retrievals) {
        for (auto& t : passage_texts(r)) corpus.push_back(std::move(t));
    }
    for (const auto& s : samples) corpus.push_back(training_answer(s));
    return fusion::Vocabulary::build(corpus, max_size);
}

fusion::FusionInput build_fusion_input(const SampleRetrieval& r, const regions::RegionArtifact& art,
                                       const fusion::Vocabulary& vocab, std::size_t max_regions,
                                       std::size_t max_tokens) {
    fusion::FusionInput in;
    for (const auto& h : r.explicit_hits) {
        in.explicit_passages.push_back(fusion::tokenize(
                prompts::build_explicit_passage({h.entity, h.description, h.category, {}}).text, vocab, max_tokens));
    }
    for (const auto& c : r.implicit) {
        in.implicit_passages.push_back(
                fusion::tokenize(prompts::build_implicit_passage(c.answer, c.explanation).text, vocab, max_tokens));
    }
    in.question = fusion::tokenize(prompts::build_question_passage(r.prompt).text, vocab, max_tokens);
    const std::size_t m = std::min(max_regions, art.region_count());
    for (std::size_t j = 0; j < m; ++j) {
        const auto row = art.region_embeddings.row(j);
        in.region_features.emplace_back(row.begin(), row.end());
        in.boxes.push_back(regions::normalize_box(art.boxes[j], art.image_size));
    }
    return in;
}

std::vector<fusion::TrainingExample> training_examples(const Store& store, const std::vector<eval::QASample>& samples,
                                                       const std::vector<SampleRetrieval>& retrievals,
                                                       const fusion::Vocabulary& vocab, std::size_t max_regions,
                                                       std::size_t max_tokens) {
    const auto by_id = index_retrievals(retrievals);
    std::vector<fusion::TrainingExample> out;
    for (const auto& s : samples) {
        fusion::TrainingExample ex;
        ex.id = s.sample_id;
        ex.input = build_fusion_input(find_retrieval(by_id, s.sample_id), store.artifact(s.image_id), vocab,
                                      max_regions, max_tokens);
        ex.target = fusion::tokenize(training_answer(s), vocab, 0);
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<std::string> predict_answers(std::vector<fusion::FusionModel>& models,
                                         const std::vector<fusion::FusionInput>& inputs,
                                         const fusion::Vocabulary& vocab, std::size_t max_len, std::size_t threads) {
    std::vector<std::string> out(inputs.size());
    threads = std::max<std::size_t>(1, std::min(threads, inputs.size()));
    // forward passes read parameters only, but each worker gets its own copy
    // so no state is shared
    std::vector<std::vector<fusion::FusionModel>> replicas(threads > 1 ? threads : 0, models);
    parallel_for(inputs.size(), threads, [&](std::size_t i, std::size_t w) {
        auto& set = threads > 1 ? replicas[w] : models;
        out[i] = fusion::predict(set, inputs[i], vocab, max_len);
    });
    return out;
}

std::vector<eval::QASample> select_split(const std::vector<eval::QASample>& samples, const std::string& split) {
    if (split == "all") return samples;
    std::vector<eval::QASample> out;
    for (const auto& s : samples) {
        if (s.split == split) out.push_back(s);
    }
    return out;
}

void write_manifest(const fs::path& output_file, const PipelineConfig& config, const std::string& command) {
    const json m = {{"file", output_file.filename().string()},
                    {"command", command},
                    {"config_hash", config.hash()},
                    {"seed", config.seed},
                    {"version", kVersion},
                    {"formats", {{"rvem", rvem::kVersion}, {"rvck", fusion::kCheckpointVersion}}},
                    {"prompt_convention", "context: {caption}. {tag}, {tag}. question: {question}"}};
    std::ofstream out(output_file.string() + ".manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write manifest for " + output_file.string());
    out << m.dump(2) << '\n';
}

void cmd_ingest(const PipelineConfig& config) {
    require_path(config.paths.kb, "paths.kb");
    require_path(config.paths.tags, "paths.tags");
    require_path(config.paths.regions, "paths.regions");
    regions::RegionManifest region_manifest;
    auto artifacts = regions::load_region_artifacts(config.paths.regions, &region_manifest);
    auto entries = kb::read_kb_file(config.paths.kb);
    auto tags = kb::load_tags(config.paths.tags);
    // Without embedding files, entries and tags get stub embeddings of the
    // region width.
    const std::size_t dim = region_manifest.embedding_dim;
    auto stub_dim = [&](const char* what) {
        if (dim == 0) {
            throw Error(ErrorKind::kMissingInput, std::string("paths.") + what +
                                                          " is not set and no region embeddings fix the stub width");
        }
        return dim;
    };
    if (!config.paths.kb_embeddings.empty()) {
        require_path(config.paths.kb_embeddings, "paths.kb_embeddings");
        entries = kb::attach_embeddings(std::move(entries), rvem::read(config.paths.kb_embeddings));
    } else {
        std::vector<std::string> texts;
        for (const auto& e : entries) texts.push_back(kb::reformat_entry(e));
        const std::size_t d = stub_dim("kb_embeddings");
        entries = kb::attach_embeddings(std::move(entries), vecindex::EmbeddingMatrix(d, stub_rows(texts, d)));
    }
    if (!config.paths.tag_embeddings.empty()) {
        require_path(config.paths.tag_embeddings, "paths.tag_embeddings");
        tags = kb::attach_embeddings(std::move(tags), rvem::read(config.paths.tag_embeddings));
    } else {
        std::vector<std::string> texts;
        for (const auto& t : tags) texts.push_back("tag:" + t.tag);
        const std::size_t d = stub_dim("tag_embeddings");
        tags = kb::attach_embeddings(std::move(tags), vecindex::EmbeddingMatrix(d, stub_rows(texts, d)));
    }
    Store store = make_store(std::move(entries), std::move(tags), std::move(artifacts), config.retrieval.categories);

    const fs::path dir = store_dir(config);
    fs::create_directories(dir);
    kb::write_kb_file(dir / "kb.jsonl", store.kb);
    rvem::write(dir / "kb.rvem", kb::embedding_matrix(store.kb));
    kb::write_tags(dir / "tags.txt", store.tags);
    rvem::write(dir / "tags.rvem", kb::embedding_matrix(store.tags));
    const json summary = {{"kb_entries", store.kb.size()},
                          {"tags", store.tags.size()},
                          {"images", region_manifest.images},
                          {"total_regions", region_manifest.total_regions},
                          {"empty_artifacts", region_manifest.empty_artifacts},
                          {"embeddings_normalized", region_manifest.embeddings_normalized},
                          {"embedding_dim", region_manifest.embedding_dim},
                          {"warnings", store.warnings}};
    {
        std::ofstream out(dir / "store.json", std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::kIo, "cannot write " + (dir / "store.json").string());
        out << summary.dump(2) << '\n';
    }
    for (const char* f : {"kb.jsonl", "kb.rvem", "tags.txt", "tags.rvem", "store.json"}) {
        write_manifest(dir / f, config, "ingest");
    }
}

void cmd_retrieve(const PipelineConfig& config) {
    const Store store = load_store(config);
    const auto samples = load_samples(config);
    if (!config.oracle.endpoint.empty()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "oracle.endpoint is set but no live oracle client is linked into this build; record a replay "
                    "cache instead");
    }
    std::unique_ptr<oracle::Oracle> source;
    if (config.retrieval.candidates > 0) {
        require_path(config.paths.cache, "paths.cache");
        source = std::make_unique<oracle::ReplayCache>(config.paths.cache);
    } else {
        source = std::make_unique<oracle::MockOracle>();
    }
    const auto out = retrieve_all(store, samples, *source, config.retrieval, config.threads);
    const fs::path path = out_dir(config) / "retrieval.jsonl";
    fs::create_directories(out_dir(config));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    for (const auto& r : out) f << r.to_json().dump() << '\n';
    f.close();
    write_manifest(path, config, "retrieve");
}

void cmd_train(const PipelineConfig& config) {
    const Store store = load_store(config);
    const auto samples = select_split(load_samples(config), config.train_split);
    if (samples.empty()) throw Error(ErrorKind::kMissingInput, "no samples in split '" + config.train_split + "'");
    const auto retrievals = load_retrievals(config);
    const auto by_id = index_retrievals(retrievals);
    std::vector<SampleRetrieval> train_retrievals;
    for (const auto& s : samples) train_retrievals.push_back(find_retrieval(by_id, s.sample_id));

    const auto vocab = build_vocabulary(train_retrievals, samples, config.vocab_max);
    const fs::path vocab_path = out_dir(config) / "vocab.txt";
    vocab.save(vocab_path);
    write_manifest(vocab_path, config, "train");

    fusion::ModelConfig mc = config.model;
    mc.vocab_size = vocab.size();
    if (store.manifest.embedding_dim != 0) mc.region_dim = store.manifest.embedding_dim;
    const auto examples =
            training_examples(store, samples, retrievals, vocab, config.retrieval.regions, mc.max_passage_tokens);

    fs::create_directories(out_dir(config) / "models");
    for (const auto seed : config.model_seeds()) {
        fusion::FusionModel model(mc, seed);
        const auto result = fusion::train(model, examples, config.optimizer, seed);
        save_checkpoint(model_path(config, seed), model);
        write_manifest(model_path(config, seed), config, "train");
        fusion::write_loss_curve(loss_path(config, seed), result.loss_curve);
        write_manifest(loss_path(config, seed), config, "train");
    }
}

void cmd_predict(const PipelineConfig& config) {
    const Store store = load_store(config);
    const auto samples = select_split(load_samples(config), config.predict_split);
    const auto retrievals = load_retrievals(config);
    const auto by_id = index_retrievals(retrievals);
    const fs::path vocab_path = out_dir(config) / "vocab.txt";
    require_file(vocab_path, "vocabulary", "run `revive train` first");
    const auto vocab = fusion::Vocabulary::load(vocab_path);
    std::vector<fusion::FusionModel> models;
    for (const auto seed : config.model_seeds()) {
        require_file(model_path(config, seed), "checkpoint", "run `revive train` first");
        models.push_back(fusion::load_checkpoint(model_path(config, seed)));
    }
    const std::size_t max_tokens = models.front().config().max_passage_tokens;
    std::vector<fusion::FusionInput> inputs;
    for (const auto& s : samples) {
        inputs.push_back(build_fusion_input(find_retrieval(by_id, s.sample_id), store.artifact(s.image_id), vocab,
                                            config.retrieval.regions, max_tokens));
    }
    const auto answers = predict_answers(models, inputs, vocab, config.decode_max_len, config.threads);
    std::vector<std::pair<std::string, std::string>> rows;
    for (std::size_t i = 0; i < samples.size(); ++i) rows.emplace_back(samples[i].sample_id, answers[i]);
    const fs::path path = out_dir(config) / "predictions.jsonl";
    eval::write_predictions(path, rows);
    write_manifest(path, config, "predict");
}

eval::Report cmd_eval(const PipelineConfig& config) {
    auto samples = select_split(load_samples(config), config.predict_split);
    const fs::path pred_path = out_dir(config) / "predictions.jsonl";
    require_file(pred_path, "predictions", "run `revive predict` first");
    const auto predictions = eval::read_predictions(pred_path);
    for (auto& s : samples) {
        const auto it = predictions.find(s.sample_id);
        if (it != predictions.end()) s.prediction = it->second;
    }
    const auto report = eval::score_dataset(
            samples, config.eval_mode == "averaged" ? eval::AccuracyMode::kAveraged : eval::AccuracyMode::kSimple);
    report.write_json(out_dir(config) / "report.json");
    report.write_csv(out_dir(config) / "report.csv");
    write_manifest(out_dir(config) / "report.json", config, "eval");
    write_manifest(out_dir(config) / "report.csv", config, "eval");
    return report;
}

std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw Error(ErrorKind::kInvalidArgument, "grid axis '" + text + "' is not of the form key=v1,v2,...");
    }
    std::vector<std::string> values;
    std::size_t start = eq + 1;
    for (;;) {
        const auto comma = text.find(',', start);
        values.push_back(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (values.back().empty()) throw Error(ErrorKind::kInvalidArgument, "grid axis '" + text + "' has an empty value");
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return {text.substr(0, eq), values};
}

std::vector<SweepRow> cmd_sweep(const PipelineConfig& config,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& grid) {
    if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep needs at least one --grid axis");
    std::vector<SweepRow> rows;
    std::vector<std::size_t> at(grid.size(), 0);
    for (;;) {
        json tree = config.to_json();
        SweepRow row;
        std::string name;
        for (std::size_t a = 0; a < grid.size(); ++a) {
            const auto& [key, values] = grid[a];
            apply_override(tree, key + "=" + values[at[a]]);
            row.setting.emplace_back(key, values[at[a]]);
            name += (a ? "_" : "") + key + "=" + values[at[a]];
        }
        std::replace(name.begin(), name.end(), '/', '-');
        tree["paths"]["output"] = (out_dir(config) / "sweep" / name).string();
        const auto sub = PipelineConfig::from_json(tree);
        cmd_ingest(sub);
        cmd_retrieve(sub);
        cmd_train(sub);
        cmd_predict(sub);
        row.accuracy_percent = cmd_eval(sub).accuracy_percent;
        rows.push_back(std::move(row));

        std::size_t a = grid.size();
        while (a > 0) {
            --a;
            if (++at[a] < grid[a].second.size()) break;
            at[a] = 0;
            if (a == 0) {
                a = grid.size() + 1;
                break;
            }
        }
        if (a == grid.size() + 1) break;
    }
    const fs::path path = out_dir(config) / "sweep.csv";
    fs::create_directories(out_dir(config));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    for (const auto& [key, values] : grid) out << key << ',';
    out << "accuracy\n";
    char buf[32];
    for (const auto& r : rows) {
        for (const auto& [key, value] : r.setting) out << value << ',';
        std::snprintf(buf, sizeof buf, "%.4f", r.accuracy_percent);
        out << buf << '\n';
    }
    out.close();
    write_manifest(path, config, "sweep");
    return rows;
}

} // namespace revive::pipeline
