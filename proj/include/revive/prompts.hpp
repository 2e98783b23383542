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

#include <string>
#include <vector>

#include "revive/kb.hpp"

namespace revive::prompts {

enum class PassageKind { kExplicitKnowledge, kImplicitCandidate, kQuestion };

struct Passage {
    PassageKind kind = PassageKind::kQuestion;
    std::string text;
};

// "context: {caption}. {tag1}, {tag2}, .... question: {question}"; the tag
// segment is dropped when `tags` is empty.
std::string build_context_prompt(const std::string& caption, const std::vector<std::string>& tags,
                                 const std::string& question);

// "{question} {candidate}. This is because"
std::string build_explanation_prompt(const std::string& question, const std::string& candidate);

// "entity: {entity} description: {description}"
Passage build_explicit_passage(const kb::KnowledgeEntry& entry);

// "candidate: {candidate} evidence: {explanation}"
Passage build_implicit_passage(const std::string& candidate, const std::string& explanation);

Passage build_question_passage(const std::string& prompt_x);

} // namespace revive::prompts
