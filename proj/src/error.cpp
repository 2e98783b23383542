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

#include "revive/error.hpp"

namespace revive {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::kDimensionMismatch:
        return "dimension_mismatch";
    case ErrorKind::kInvalidArgument:
        return "invalid_argument";
    case ErrorKind::kParse:
        return "parse_error";
    case ErrorKind::kValidation:
        return "validation_error";
    case ErrorKind::kMissingInput:
        return "missing_input";
    case ErrorKind::kIo:
        return "io_error";
    case ErrorKind::kOracle:
        return "oracle_error";
    case ErrorKind::kTraining:
        return "training_error";
    case ErrorKind::kInfeasible:
        return "infeasible";
    }
    return "unknown";
}

} // namespace revive
