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

#include "rawvae/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rawvae {

GradientCheckReport gradient_check(const VaeHyperParams& hyper,
                                   const GradientCheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  auto model = BasicVaeModel<double>::initialized(hyper, rng);
  const std::size_t n = options.batch;

  std::uniform_real_distribution<double> amplitude(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n * hyper.window_size);
  for (double& v : x) v = amplitude(rng);
  std::vector<double> eps(n * hyper.latent_dim, 0.0);
  if (!options.zero_noise) {
    for (double& v : eps) v = normal(rng);
  }
  // Randomize biases too so no unit sits exactly on the rectifier kink.
  for (auto& layer : model.layers()) {
    for (double& b : layer.bias) b = 0.1 * amplitude(rng);
  }

  Workspace<double> ws;
  BasicVaeModel<double> grads(hyper);
  backward<double>(model, x, eps, n, hyper.alpha, ws, grads);

  // Flat views over every parameter and its gradient.
  std::vector<double*> params;
  std::vector<double> analytic;
  {
    auto p = model.parameters();
    auto g = grads.parameters();
    for (std::size_t t = 0; t < p.size(); ++t) {
      for (std::size_t i = 0; i < p[t].size(); ++i) {
        params.push_back(&p[t][i]);
        analytic.push_back(g[t][i] * options.corrupt_factor);
      }
    }
  }

  std::vector<std::size_t> chosen(params.size());
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  if (chosen.size() > options.max_parameters) {
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(options.max_parameters);
    std::sort(chosen.begin(), chosen.end());
  }

  GradientCheckReport report;
  for (std::size_t idx : chosen) {
    double* p = params[idx];
    const double saved = *p;
    *p = saved + options.step;
    const double plus = forward_loss<double>(model, x, eps, n, hyper.alpha, ws).total;
    *p = saved - options.step;
    const double minus = forward_loss<double>(model, x, eps, n, hyper.alpha, ws).total;
    *p = saved;
    const double numeric = (plus - minus) / (2.0 * options.step);
    const double a = analytic[idx];
    // The floor keeps parameters with vanishing gradients from dominating
    // through round-off in the difference quotient.
    const double scale = std::max({std::abs(a), std::abs(numeric), 1e-7});
    const double rel = std::abs(a - numeric) / scale;
    if (rel > report.max_relative_error || report.checked == 0) {
      report.max_relative_error = std::max(report.max_relative_error, rel);
      if (rel >= report.max_relative_error) report.worst_parameter = idx;
    }
    ++report.checked;
  }
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace rawvae
