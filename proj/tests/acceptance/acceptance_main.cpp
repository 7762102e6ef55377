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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Tolerances and budgets are fixed below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "rawvae/bench.hpp"
#include "rawvae/cli.hpp"
#include "rawvae/error.hpp"
#include "rawvae/gradient_check.hpp"
#include "rawvae/latent.hpp"
#include "rawvae/run_config.hpp"
#include "rawvae/simd/kernels.hpp"
#include "rawvae/som.hpp"
#include "rawvae/train.hpp"

namespace {

using namespace rawvae;
using Clock = std::chrono::steady_clock;

constexpr double kGradTolerance = 1e-3;
constexpr std::size_t kGradMinParameters = 100;
constexpr double kGradBudgetS = 10.0;

constexpr std::size_t kKlStats = 20;
constexpr std::size_t kKlDraws = 1'000'000;
constexpr double kKlRelTolerance = 0.01;
constexpr double kKlBudgetS = 30.0;

constexpr std::size_t kTrainWindows = 200;
constexpr int kTrainEpochs = 200;
constexpr double kTrainRatio = 0.25;
constexpr double kTrainBudgetS = 300.0;

constexpr double kLatencyTargetMs = 10.0;
constexpr double kLatencyCeilingMs = 50.0;
constexpr std::size_t kLatencyReps = 30;

constexpr double kBlobSigma = 0.1;
constexpr double kBlobDistance = 5.0;
constexpr std::size_t kBlobDim = 30;
constexpr std::size_t kBlobPoints = 50;
constexpr double kBlobRadiusSigmas = 3.0;
constexpr double kSingleUnitTolerance = 1e-3;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  VaeHyperParams h;
  h.window_size = 8;
  h.hidden_sizes = {4};
  h.latent_dim = 2;
  GradientCheckOptions o;
  o.tolerance = kGradTolerance;
  o.max_parameters = 1000;
  const auto r = gradient_check(h, o);
  const double t = seconds_since(t0);
  const bool pass = r.max_relative_error < kGradTolerance && r.checked >= kGradMinParameters &&
                    t < kGradBudgetS;
  return {pass, "max_rel_err=" + fmt(r.max_relative_error) + " params=" +
                    std::to_string(r.checked) + " time_s=" + fmt(t)};
}

Outcome kl_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 stats_rng(2024);
  std::uniform_real_distribution<double> mu_dist(-2.0, 2.0), lv_dist(-1.0, 1.0);
  std::mt19937_64 draw_rng(99);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (std::size_t s = 0; s < kKlStats; ++s) {
    LatentStats st;
    for (int j = 0; j < 4; ++j) {
      st.mu.push_back(static_cast<float>(mu_dist(stats_rng)));
      st.logvar.push_back(static_cast<float>(lv_dist(stats_rng)));
    }
    // E_q[log q(z) - log p(z)] with z = mu + sigma * eps.
    double sum = 0.0;
    for (std::size_t d = 0; d < kKlDraws; ++d) {
      double lr = 0.0;
      for (int j = 0; j < 4; ++j) {
        const double sigma = std::exp(0.5 * st.logvar[j]);
        const double eps = n01(draw_rng);
        const double z = st.mu[j] + sigma * eps;
        lr += 0.5 * (z * z - eps * eps) - 0.5 * st.logvar[j];
      }
      sum += lr;
    }
    const double mc = sum / static_cast<double>(kKlDraws);
    const double closed = kl_divergence(st);
    worst = std::max(worst, std::abs(mc - closed) / closed);
  }
  const double t = seconds_since(t0);
  return {worst < kKlRelTolerance && t < kKlBudgetS,
          "worst_rel_dev=" + fmt(worst) + " stats=" + std::to_string(kKlStats) +
              " draws=" + std::to_string(kKlDraws) + " time_s=" + fmt(t)};
}

Outcome training_sanity() {
  const auto t0 = Clock::now();
  VaeHyperParams h;
  h.epochs = kTrainEpochs;
  const std::size_t samples = (kTrainWindows - 1) * h.train_hop + h.window_size;
  const AudioBuffer sine = testing::sine(440.0, samples, 44100, 1.0);
  std::vector<WindowSet> data{window(sine, h.window_size, h.train_hop)};
  if (data[0].count() != kTrainWindows) return {false, "window count mismatch"};
  bool finite = true;
  const Checkpoint c = train(data, h, [&](int, const EpochLoss& l) {
    finite = finite && std::isfinite(l.recon) && std::isfinite(l.kl);
  });
  const double t = seconds_since(t0);
  const double first = c.loss_history.front().recon;
  const double last = c.loss_history.back().recon;
  return {finite && last < kTrainRatio * first && t < kTrainBudgetS,
          "epoch1_recon=" + fmt(first) + " final_recon=" + fmt(last) +
              " ratio=" + fmt(last / first) + " time_s=" + fmt(t)};
}

std::vector<float> window_by_window(const VaeModel& m, const AudioBuffer& x) {
  std::vector<float> out;
  const std::size_t w = m.window_size();
  for (std::size_t s = 0; s + w <= x.size(); s += w) {
    const auto st = encoder_forward(m, std::span<const float>(x.samples).subspan(s, w));
    const auto y = decoder_forward(m, st.mu);
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

Outcome endpoint_identities() {
  std::mt19937_64 rng(5);
  const VaeModel m = VaeModel::initialized(VaeHyperParams{}, rng);
  const AudioBuffer a = testing::sine(330.0, 1024 * 12 + 100);
  const AudioBuffer b = testing::noise(1024 * 14, 8);
  const auto [ta, tb] = truncate_pair(a, b);
  const auto ra = window_by_window(m, ta);
  const auto rb = window_by_window(m, tb);
  const auto mean = SynthesisMode::mean_only();
  const std::size_t n = meso_window_count(m, a, b);
  const bool meso1 = meso_interpolate(m, a, b, generate_curve(ConstantCurve{1.0}, n), mean).samples == ra;
  const bool meso0 = meso_interpolate(m, a, b, generate_curve(ConstantCurve{0.0}, n), mean).samples == rb;
  const auto step = stepwise_interpolate(m, a, b, 1.0, 1.0, mean).samples;
  const bool step0 = step.size() == 2 * ra.size() &&
                     std::equal(rb.begin(), rb.end(), step.begin());
  const bool step1 = step.size() == 2 * ra.size() &&
                     std::equal(ra.begin(), ra.end(), step.begin() + static_cast<long>(ra.size()));
  auto yn = [](bool v) { return v ? "exact" : "differs"; };
  return {meso1 && meso0 && step0 && step1,
          std::string("meso c=1 ") + yn(meso1) + ", meso c=0 " + yn(meso0) + ", step w=0 " +
              yn(step0) + ", step w=1 " + yn(step1)};
}

Outcome duration_laws() {
  std::ostringstream detail;
  bool pass = true;
  std::mt19937_64 rng(6);
  VaeHyperParams small;
  small.window_size = 64;
  small.latent_dim = 4;
  small.hidden_sizes = {8};
  const VaeModel sm = VaeModel::initialized(small, rng);
  const AudioBuffer x = testing::sine(200.0, 64 * 10);
  for (auto [r, s] : {std::pair{1.0, 0.5}, {1.0, 0.25}, {0.8, 0.2}}) {
    const std::size_t expect = static_cast<std::size_t>(std::floor(r / s + 1e-9)) + 1;
    const std::size_t got = stepwise_segment_count(r, s);
    const std::size_t len = stepwise_interpolate(sm, x, x, r, s, SynthesisMode::sampled(1)).size();
    const bool ok = got == expect && len == expect * x.size();
    pass = pass && ok;
    detail << "step(" << r << "," << s << ")=" << got << " ";
  }

  const VaeModel m = VaeModel::initialized(VaeHyperParams{}, rng);
  for (std::size_t windows : {10u, 215u}) {
    const AudioBuffer in = testing::sine(220.0, windows * 1024);
    const std::size_t n = extended_window_count(m, in, in, 256);
    const auto out = extended_interpolate(m, in, in, generate_curve(LinearCurve{1, 0}, n), 256,
                                          SynthesisMode::sampled(2));
    const double ratio = static_cast<double>(out.size()) / static_cast<double>(in.size());
    bool ok = out.size() == n * 1024 && n == window_count(in.size(), 1024, 256);
    // 4 - 3/windows: inside [3.9, 4.0] from 30 input windows on.
    if (windows >= 30) ok = ok && ratio >= 3.9 && ratio <= 4.0;
    pass = pass && ok;
    detail << "extend(" << windows << " windows)=" << n << "x1024 ratio=" << fmt(ratio) << " ";
  }
  return {pass, detail.str()};
}

Outcome latency() {
  std::mt19937_64 rng(0);
  const VaeModel m = VaeModel::initialized(VaeHyperParams{}, rng);
  const BenchReport r = run_decode_benchmark(m, 1.0, kLatencyReps, 0);
  const bool pass = r.windows == 44 && r.median_ms < kLatencyTargetMs &&
                    r.median_ms < kLatencyCeilingMs;
  return {pass, "backend=" + std::string(simd::backend_name(simd::active_backend())) +
                    " windows=" + std::to_string(r.windows) + " median_ms=" + fmt(r.median_ms) +
                    " p95_ms=" + fmt(r.p95_ms) + " target_ms=" + fmt(kLatencyTargetMs)};
}

Outcome som_properties() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  std::vector<double> c1(kBlobDim), c2(kBlobDim), dir(kBlobDim);
  double norm = 0.0;
  for (auto& d : dir) {
    d = n01(rng);
    norm += d * d;
  }
  for (std::size_t j = 0; j < kBlobDim; ++j) {
    c1[j] = 0.05 * static_cast<double>(j);
    c2[j] = c1[j] + kBlobDistance * dir[j] / std::sqrt(norm);
  }
  std::vector<std::vector<double>> pts;
  for (const auto* c : {&c1, &c2}) {
    for (std::size_t i = 0; i < kBlobPoints; ++i) {
      std::vector<double> p(kBlobDim);
      for (std::size_t j = 0; j < kBlobDim; ++j) p[j] = (*c)[j] + kBlobSigma * n01(rng);
      pts.push_back(std::move(p));
    }
  }
  auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };

  SomTrainParams p;
  p.width = 2;
  p.height = 1;
  p.epochs = 100;
  p.final_radius = 0.1;
  p.seed = 1;
  const SomMap map = train_som(pts, p);
  std::vector<std::vector<double>> protos;
  for (std::size_t x = 0; x < 2; ++x) {
    std::vector<double> raw(kBlobDim);
    for (std::size_t j = 0; j < kBlobDim; ++j) {
      raw[j] = double(map.prototype(x, 0)[j]) * map.feature_scale[j] + map.feature_mean[j];
    }
    protos.push_back(raw);
  }
  const double limit = kBlobRadiusSigmas * kBlobSigma;
  const double straight = std::max(dist(protos[0], c1), dist(protos[1], c2));
  const double swapped = std::max(dist(protos[0], c2), dist(protos[1], c1));
  const double best = std::min(straight, swapped);
  const bool qe_down = map.quantization_error.back() < map.quantization_error.front();

  SomTrainParams one = p;
  one.width = 1;
  one.final_radius = 1.0;
  const SomMap single = train_som(pts, one);
  double worst = 0.0;
  for (float v : single.prototype(0, 0)) worst = std::max(worst, std::abs(double(v)));

  return {best < limit && qe_down && worst < kSingleUnitTolerance,
          "max_proto_dist=" + fmt(best) + " (limit " + fmt(limit) + ") qe " +
              fmt(map.quantization_error.front()) + "->" + fmt(map.quantization_error.back()) +
              " 1x1_dev=" + fmt(worst)};
}

bool same_file(const std::filesystem::path& a, const std::filesystem::path& b) {
  return testing::read_bytes(a) == testing::read_bytes(b);
}

Outcome persistence() {
  testing::TempDir dir;
  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) {
    const int code = cli::run(args, sink, sink);
    if (code != 0) throw std::runtime_error("cli failed: " + sink.str());
  };
  std::vector<std::string> failed;

  // Library round trips.
  VaeHyperParams h;
  h.window_size = 128;
  h.latent_dim = 8;
  h.hidden_sizes = {32};
  h.epochs = 3;
  h.batch_size = 16;
  std::vector<WindowSet> data{window(testing::sine(440, 4000), 128, 64)};
  const Checkpoint ck = train(data, h);
  save_checkpoint(ck, dir / "a.ckpt");
  if (!(load_checkpoint(dir / "a.ckpt") == ck)) failed.push_back("checkpoint");

  SomTrainParams sp;
  sp.epochs = 5;
  std::vector<std::vector<double>> feats;
  for (int i = 0; i < 12; ++i) feats.push_back({double(i), double(i * i % 5), std::sin(i)});
  const SomMap map = train_som(feats, sp);
  save_som(map, dir / "a.som");
  if (!(load_som(dir / "a.som") == map)) failed.push_back("som");

  AudioBuffer wav = testing::noise(3000, 4, 44100, 1.0);
  wav.samples[0] = std::numeric_limits<float>::denorm_min();
  save_wav(wav, dir / "a.wav", WavEncoding::kFloat32);
  if (load_wav(dir / "a.wav").samples != wav.samples) failed.push_back("wav");

  // Every CLI artifact again from its sidecar.
  const auto corpus = dir / "corpus";
  std::filesystem::create_directories(corpus);
  save_wav(testing::sine(220, 6000), corpus / "x.wav", WavEncoding::kPcm16);
  save_wav(testing::noise(7000, 9), corpus / "y.wav", WavEncoding::kFloat32);
  save_wav(testing::sine(1500, 5000, 22050), corpus / "z.wav", WavEncoding::kPcm16);

  // Runs a command, then reruns it from the artifact's sidecar with a new
  // output location.
  auto twice = [&](std::vector<std::string> args, const std::filesystem::path& artifact,
                   const std::string& out_flag, const std::string& out_value) {
    cli(args);
    const std::size_t words = args[0] == "synth" || args[0] == "som" ? 2 : 1;
    std::vector<std::string> again(args.begin(), args.begin() + static_cast<long>(words));
    for (const auto& a : {std::string("--config"), RunConfig::sidecar_path(artifact).string(),
                          out_flag, out_value}) {
      again.push_back(a);
    }
    cli(again);
  };

  twice({"train", "--data-dir", corpus.string(), "--out-dir", (dir / "r1").string(), "--epochs",
         "3", "--window-size", "128", "--latent-dim", "8", "--hidden-sizes", "32", "--batch-size",
         "16", "--train-hop", "64"},
        dir / "r1" / "model.ckpt", "--out-dir", (dir / "r2").string());
  if (!same_file(dir / "r1" / "model.ckpt", dir / "r2" / "model.ckpt")) failed.push_back("cli train");

  const auto model = (dir / "r1" / "model.ckpt").string();
  for (const std::string s : {"step", "meso", "extend"}) {
    std::vector<std::string> args{"synth", s, "--model", model, "--in1", (corpus / "x.wav").string(),
                                  "--in2", (corpus / "y.wav").string(), "--out",
                                  (dir / (s + "1.wav")).string(), "--seed", "31"};
    if (s == "meso") {
      args.push_back("--curve");
      args.push_back("sine:p=7,a=0.8");
    }
    twice(args, dir / (s + "1.wav"), "--out", (dir / (s + "2.wav")).string());
    if (!same_file(dir / (s + "1.wav"), dir / (s + "2.wav"))) failed.push_back("cli synth " + s);
  }

  twice({"som", "build", "--data-dir", corpus.string(), "--out", (dir / "m1.som").string(),
                "--epochs", "10", "--seed", "4"},
        dir / "m1.som", "--out", (dir / "m2.som").string());
  if (!same_file(dir / "m1.som", dir / "m2.som")) failed.push_back("cli som build");

  std::string detail = "checkpoint, som, float32 wav, sidecar reruns of train/synth x3/som build";
  if (!failed.empty()) {
    detail = "mismatch in:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  std::cout << "kernels: " << simd::backend_name(simd::active_backend()) << "\n";
  report("gradient-correctness", gradient_correctness);
  report("kl-oracle", kl_oracle);
  report("training-sanity", training_sanity);
  report("endpoint-identities", endpoint_identities);
  report("duration-laws", duration_laws);
  report("latency", latency);
  report("som-properties", som_properties);
  report("persistence", persistence);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
