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
#include <string>
#include <vector>

#include "revive/fusion_model.hpp"
#include "revive/tokenizer.hpp"

namespace revive::fusion {

// Most frequent answer; among equally frequent answers the one produced by
// the lowest model index wins.
std::string majority_vote(const std::vector<std::string>& answers);

// Greedy-decodes the sample with every model, normalizes each answer and
// returns the majority vote.
std::string predict(std::vector<FusionModel>& models, const FusionInput& input, const Vocabulary& vocab,
                    std::size_t max_len);

} // namespace revive::fusion
