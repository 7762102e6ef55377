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

#pragma once

#include <cstddef>
#include <cstdint>

#include "rawvae/vae.hpp"

namespace rawvae {

struct GradientCheckOptions {
  double tolerance = 1e-3;
  double step = 1e-4;
  // Parameters compared; all of them when the model has fewer.
  std::size_t max_parameters = 128;
  std::size_t batch = 3;
  bool zero_noise = false;
  // Multiplies the analytic gradient before comparison. Anything other than
  // 1 must make the check fail; used to test the harness itself.
  double corrupt_factor = 1.0;
  std::uint64_t seed = 7;
};

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_parameter = 0;
  bool passed = false;
};

// Compares backward() against central finite differences in double precision
// on a freshly initialized model with the given shapes.
GradientCheckReport gradient_check(const VaeHyperParams& hyper,
                                   const GradientCheckOptions& options = {});

}  // namespace rawvae
