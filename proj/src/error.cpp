// Copyright 2026 The rawvae Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "rawvae/error.hpp"

namespace rawvae {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedWav: return "MalformedWav";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kRateMismatch: return "RateMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kFormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kBadStep: return "BadStep";
    case ErrorCode::kCurveLengthMismatch: return "CurveLengthMismatch";
    case ErrorCode::kEmptySpec: return "EmptySpec";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kUnknownUnit: return "UnknownUnit";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kNumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

}  // namespace rawvae
