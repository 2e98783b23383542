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

#include <cstdint>
#include <filesystem>
#include <string>

#include "revive/vecindex.hpp"

// RVEM embedding files:
//   "RVEM" | version u16 | dim u32 | count u64 | count*dim f32, all little-endian.
// Row ids live in an optional sidecar "<file>.ids.jsonl" holding one
// {"row": n, "id": "..."} object per line; without it ids are row indices.
namespace revive::rvem {

inline constexpr std::uint16_t kVersion = 1;

std::filesystem::path ids_sidecar_path(const std::filesystem::path& path);

// Writes the sidecar only when ids differ from the implicit row indices.
void write(const std::filesystem::path& path, const vecindex::EmbeddingMatrix& matrix);

vecindex::EmbeddingMatrix read(const std::filesystem::path& path);

} // namespace revive::rvem
