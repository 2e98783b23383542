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

#include "revive/fusion_model.hpp"

// RVCK model checkpoints, little-endian:
//   "RVCK" | version u16 | config_len u32 | ModelConfig JSON (config_len bytes)
//   | tensor_count u32 | per tensor: name_len u32, name, ndim u32,
//     dims u64[ndim], f32 data row-major
namespace revive::fusion {

inline constexpr std::uint16_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const FusionModel& model);
FusionModel load_checkpoint(const std::filesystem::path& path);

// Round every parameter to float32, i.e. the precision a checkpoint stores.
void round_to_checkpoint_precision(FusionModel& model);

} // namespace revive::fusion
