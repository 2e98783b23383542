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

#include "revive/syndata.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "revive/error.hpp"
#include "revive/prompts.hpp"
#include "revive/rvem.hpp"
#include "revive/vecindex.hpp"

namespace revive::syndata {

namespace {

const std::vector<std::string>& object_words() {
    static const std::vector<std::string> kObjects = {"dog",   "cat",   "car",   "bus",   "kite",  "chair",
                                                      "cup",   "horse", "boat",  "clock", "bench", "train"};
    return kObjects;
}

const std::vector<std::string>& quadrant_names() {
    static const std::vector<std::string> kQuadrants = {"top left", "top right", "bottom left", "bottom right"};
    return kQuadrants;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    // k distinct indices from [0, n), in random order.
    std::vector<std::size_t> distinct(std::size_t n, std::size_t k) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        shuffle(all);
        all.resize(k);
        return all;
    }

private:
    std::mt19937_64 engine_;
};

class WordMaker {
public:
    explicit WordMaker(Rng& rng) : rng_(rng) {
        for (const auto& w : object_words()) used_.insert(w);
        for (const char* w : {"a", "an", "the", "is", "of", "what", "in", "known", "for"}) used_.insert(w);
    }

    std::string make(std::size_t syllables) {
        static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
        static const char* kVowels[] = {"a", "e", "i", "o", "u"};
        for (;;) {
            std::string w;
            for (std::size_t s = 0; s < syllables; ++s) {
                w += kOnsets[rng_.below(14)];
                w += kVowels[rng_.below(5)];
            }
            if (used_.insert(w).second) return w;
        }
    }

private:
    Rng& rng_;
    std::set<std::string> used_;
};

std::string format_id(const char* prefix, std::size_t i) {
    std::string digits = std::to_string(i);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return prefix + digits;
}

std::string lowercase(std::string s) {
    for (auto& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

regions::Box quadrant_box(Rng& rng, std::size_t quadrant, int width, int height) {
    const double hw = width / 2.0;
    const double hh = height / 2.0;
    const double ox = static_cast<double>(quadrant % 2) * hw;
    const double oy = static_cast<double>(quadrant / 2) * hh;
    const double x1 = std::floor(ox + rng.uniform(0.05, 0.35) * hw);
    const double y1 = std::floor(oy + rng.uniform(0.05, 0.35) * hh);
    const double x2 = std::floor(x1 + rng.uniform(0.3, 0.6) * hw);
    const double y2 = std::floor(y1 + rng.uniform(0.3, 0.6) * hh);
    return {x1, y1, x2, y2};
}

regions::Box free_box(Rng& rng, int width, int height) {
    const double x1 = std::floor(rng.uniform(0.0, 0.6) * width);
    const double y1 = std::floor(rng.uniform(0.0, 0.6) * height);
    const double x2 = std::floor(x1 + rng.uniform(0.1, 0.39) * width);
    const double y2 = std::floor(y1 + rng.uniform(0.1, 0.39) * height);
    return {x1, y1, x2, y2};
}

std::string caption_for(std::vector<std::string> objects) {
    if (objects.empty()) return "a photo of something";
    std::sort(objects.begin(), objects.end());
    objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
    std::string out = "a photo of";
    for (std::size_t i = 0; i < objects.size(); ++i) out += (i == 0 ? " " : " and ") + objects[i];
    return out;
}

void check_feasible(const SynConfig& c) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::kInfeasible, "syndata: " + why); };
    if (c.samples == 0 || c.kb_size == 0 || c.tag_size == 0 || c.dim == 0 || c.regions_per_image == 0) {
        fail("sizes must be >= 1");
    }
    if (c.object_count < 1 || c.object_count > object_words().size()) fail("object_count must be in [1, 12]");
    if (c.tag_size < c.object_count) fail("tag vocabulary smaller than the object set");
    if (c.answer_pool < 3) fail("answer_pool must be >= 3 (planted answer plus distinct distractors)");
    if (c.explicit_share < 0 || c.implicit_share < 0 || c.visual_share < 0 ||
        c.explicit_share + c.implicit_share + c.visual_share <= 0) {
        fail("channel shares must be non-negative with a positive sum");
    }
    if (c.explicit_share > 0 && c.kb_size < 1) fail("explicit planting needs a knowledge base");
    if (c.regions_per_image > c.object_count + 1) fail("more regions per image than distinct objects");
    if (!(c.eval_fraction >= 0.0 && c.eval_fraction < 1.0)) fail("eval_fraction must be in [0, 1)");
    if (c.width < 8 || c.height < 8) fail("image too small");
    if (c.cache_candidate_counts.empty()) fail("cache_candidate_counts is empty");
    for (auto u : c.cache_candidate_counts) {
        if (u == 0) fail("candidate counts must be >= 1");
    }
}

} // namespace

SynDataset generate(const SynConfig& c) {
    check_feasible(c);
    Rng rng(c.seed);
    WordMaker words(rng);
    SynDataset out;

    std::vector<std::string> objects(object_words().begin(),
                                     object_words().begin() + static_cast<std::ptrdiff_t>(c.object_count));
    std::vector<std::string> answers;
    for (std::size_t i = 0; i < c.answer_pool; ++i) answers.push_back(words.make(2));

    const auto& cats = kb::default_categories();
    std::vector<std::size_t> plantable;
    for (std::size_t i = 0; i < c.kb_size; ++i) {
        kb::KnowledgeEntry e;
        e.entity = words.make(3);
        // every tenth entry sits outside the default categories
        e.category = (i % 10 == 9) ? "Food" : cats[i % cats.size()];
        e.description = lowercase(e.category) + " known for " + answers[rng.below(answers.size())];
        e.embedding = regions::stub_embed(kb::reformat_entry(e), c.dim);
        if (e.category != "Food") plantable.push_back(i);
        out.kb.push_back(std::move(e));
    }
    if (c.explicit_share > 0 && plantable.empty()) {
        throw Error(ErrorKind::kInfeasible, "syndata: no knowledge entry in the default categories");
    }

    for (const auto& o : objects) out.tags.push_back({o, regions::stub_embed("tag:" + o, c.dim)});
    while (out.tags.size() < c.tag_size) {
        const std::string t = words.make(2 + rng.below(2));
        out.tags.push_back({t, regions::stub_embed("tag:" + t, c.dim)});
    }
    auto object_embedding = [&](std::size_t obj) { return out.tags[obj].embedding; };

    // channel assignment: proportional counts, shuffled
    const double total = c.explicit_share + c.implicit_share + c.visual_share;
    const auto n_exp = static_cast<std::size_t>(std::llround(c.explicit_share / total * c.samples));
    const auto n_imp = std::min(c.samples - n_exp,
                                static_cast<std::size_t>(std::llround(c.implicit_share / total * c.samples)));
    std::vector<std::string> channels;
    for (std::size_t i = 0; i < c.samples; ++i) {
        channels.push_back(i < n_exp ? kExplicitChannel : (i < n_exp + n_imp ? kImplicitChannel : kVisualChannel));
    }
    if (c.visual_share == 0) {
        for (auto& ch : channels) {
            if (ch == kVisualChannel) ch = c.implicit_share > 0 ? kImplicitChannel : kExplicitChannel;
        }
    }
    rng.shuffle(channels);

    const std::size_t n_eval = static_cast<std::size_t>(std::llround(c.eval_fraction * c.samples));
    vecindex::Index tag_index = vecindex::Index::build(kb::embedding_matrix(out.tags));
    std::set<std::pair<std::string, std::size_t>> cached;
    auto record = [&](std::string prompt, std::size_t n, std::vector<std::string> completions) {
        if (cached.insert({prompt, n}).second) out.cache.push_back({std::move(prompt), n, std::move(completions)});
    };

    for (std::size_t i = 0; i < c.samples; ++i) {
        const std::string& channel = channels[i];
        regions::RegionArtifact art;
        art.image_id = format_id("img", i);
        art.image_size = {c.width, c.height};
        art.embedding_file = art.image_id + ".rvem";
        std::vector<std::vector<float>> feats;
        std::vector<std::string> present;
        std::string question;
        std::string answer;

        if (channel == kVisualChannel) {
            const std::size_t quad = rng.below(4);
            const std::size_t obj = rng.below(objects.size());
            art.boxes.push_back(quadrant_box(rng, quad, c.width, c.height));
            feats.push_back(object_embedding(obj));
            present.push_back(objects[obj]);
            question = "where is the " + objects[obj] + "?";
            answer = quadrant_names()[quad];
        } else {
            const std::size_t m = c.regions_per_image;
            const bool plant_entry = channel == kExplicitChannel;
            const std::size_t planted_slot = plant_entry ? rng.below(m) : m;
            const auto objs = rng.distinct(objects.size(), plant_entry ? m - 1 : m);
            std::size_t next_obj = 0;
            for (std::size_t j = 0; j < m; ++j) {
                art.boxes.push_back(free_box(rng, c.width, c.height));
                if (j == planted_slot) {
                    const auto& e = out.kb[plantable[rng.below(plantable.size())]];
                    feats.push_back(e.embedding);
                    question = "what is " + e.entity + " known for?";
                    answer = e.description.substr(e.description.rfind(' ') + 1);
                } else {
                    const std::size_t o = objs[next_obj++];
                    feats.push_back(object_embedding(o));
                    present.push_back(objects[o]);
                }
            }
            if (!plant_entry) {
                question = "what does the " + present[rng.below(present.size())] + " suggest?";
                // a function of the oracle prompt, so identical prompts never
                // carry different answers
                answer = answers[regions::fnv1a64(caption_for(present) + "|" + question) % answers.size()];
            }
        }
        art.caption = caption_for(present);
        art.region_embeddings = vecindex::EmbeddingMatrix::from_rows(c.dim, feats);

        eval::QASample s;
        s.sample_id = format_id("s", i);
        s.image_id = art.image_id;
        s.question = question;
        s.channel = channel;
        s.planted_answer = answer;
        s.split = i >= c.samples - n_eval ? "eval" : "train";
        s.ground_truth.assign(8, answer);
        for (std::size_t k = 0; k < 2; ++k) {
            std::string other;
            do {
                other = answers[rng.below(answers.size())];
            } while (other == answer);
            s.ground_truth.push_back(other);
        }

        // oracle transcripts for every configured (P, U)
        std::vector<std::string> first_tags;
        for (std::size_t p : c.cache_tag_counts) {
            std::vector<std::string> tag_names;
            if (p > 0) {
                for (const auto& h : regions::retrieve_tags(art, tag_index, out.tags, p)) tag_names.push_back(h.tag);
            }
            const std::string prompt_x = prompts::build_context_prompt(art.caption, tag_names, question);
            for (std::size_t u : c.cache_candidate_counts) {
                std::vector<std::string> cands;
                const std::size_t planted = channel == kImplicitChannel ? u / 2 + 1 : 0;
                for (std::size_t k = 0; k < planted; ++k) cands.push_back(answer);
                while (cands.size() < u) {
                    const std::string& d = answers[rng.below(answers.size())];
                    if (channel == kImplicitChannel && d == answer) continue;
                    cands.push_back(d);
                }
                rng.shuffle(cands);
                for (const auto& cand : cands) {
                    const std::string anchor = present.empty() ? std::string("scene") : present.front();
                    record(prompts::build_explanation_prompt(question, cand), 1,
                           {cand + " is often linked to the " + anchor});
                }
                record(prompt_x, u, std::move(cands));
            }
        }

        out.artifacts.push_back(std::move(art));
        out.samples.push_back(std::move(s));
    }
    return out;
}

void write_dataset(const SynDataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "regions");
    kb::write_kb_file(dir / "kb.jsonl", data.kb);
    rvem::write(dir / "kb.rvem", kb::embedding_matrix(data.kb));
    kb::write_tags(dir / "tags.txt", data.tags);
    rvem::write(dir / "tags.rvem", kb::embedding_matrix(data.tags));
    for (const auto& a : data.artifacts) regions::write_region_artifact(dir / "regions", a);
    eval::write_samples(dir / "samples.jsonl", data.samples);
    oracle::write_cache_file(dir / "oracle_cache.jsonl", data.cache);
}

double label_solver_accuracy(const SynDataset& data) {
    std::vector<eval::QASample> solved = data.samples;
    for (auto& s : solved) s.prediction = s.planted_answer;
    return eval::score_dataset(solved).accuracy_percent;
}

} // namespace revive::syndata
