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

#include "revive/prompts.hpp"

#include "revive/error.hpp"

namespace revive::prompts {

std::string build_context_prompt(const std::string& caption, const std::vector<std::string>& tags,
                                 const std::string& question) {
    if (caption.empty() || question.empty()) {
        throw Error(ErrorKind::kInvalidArgument, "context prompt needs a caption and a question");
    }
    std::string out = "context: " + caption + ".";
    if (!tags.empty()) {
        out += ' ';
        for (std::size_t i = 0; i < tags.size(); ++i) {
            if (i > 0) out += ", ";
            out += tags[i];
        }
        out += '.';
    }
    out += " question: " + question;
    return out;
}

std::string build_explanation_prompt(const std::string& question, const std::string& candidate) {
    if (candidate.empty()) throw Error(ErrorKind::kInvalidArgument, "explanation prompt needs a candidate");
    return question + " " + candidate + ". This is because";
}

Passage build_explicit_passage(const kb::KnowledgeEntry& entry) {
    return {PassageKind::kExplicitKnowledge, "entity: " + entry.entity + " description: " + entry.description};
}

Passage build_implicit_passage(const std::string& candidate, const std::string& explanation) {
    return {PassageKind::kImplicitCandidate, "candidate: " + candidate + " evidence: " + explanation};
}

Passage build_question_passage(const std::string& prompt_x) {
    if (prompt_x.empty()) throw Error(ErrorKind::kInvalidArgument, "empty question prompt");
    return {PassageKind::kQuestion, prompt_x};
}

} // namespace revive::prompts
