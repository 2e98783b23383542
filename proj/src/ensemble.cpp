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

#include "revive/ensemble.hpp"

#include <map>

#include "revive/error.hpp"
#include "revive/eval.hpp"

namespace revive::fusion {

std::string majority_vote(const std::vector<std::string>& answers) {
    if (answers.empty()) throw Error(ErrorKind::kInvalidArgument, "majority_vote: no answers");
    std::map<std::string, std::size_t> counts;
    for (const auto& a : answers) ++counts[a];
    std::size_t best = 0;
    for (std::size_t i = 1; i < answers.size(); ++i) {
        if (counts[answers[i]] > counts[answers[best]]) best = i;
    }
    return answers[best];
}

std::string predict(std::vector<FusionModel>& models, const FusionInput& input, const Vocabulary& vocab,
                    std::size_t max_len) {
    if (models.empty()) throw Error(ErrorKind::kInvalidArgument, "predict: no models");
    std::vector<std::string> answers;
    answers.reserve(models.size());
    for (auto& model : models) {
        const auto ids = decode(model, encode(model, input), max_len);
        answers.push_back(eval::normalize_answer(detokenize(ids, vocab)));
    }
    return majority_vote(answers);
}

} // namespace revive::fusion
