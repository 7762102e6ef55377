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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "rawvae/bench.hpp"
#include "rawvae/cli.hpp"
#include "rawvae/error.hpp"
#include "rawvae/latent.hpp"
#include "rawvae/run_config.hpp"
#include "rawvae/som.hpp"
#include "rawvae/train.hpp"
#include "support.hpp"

namespace rawvae {
namespace {

using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus = dir / "corpus";
    std::filesystem::create_directories(corpus);
    save_wav(testing::sine(220, 9000), corpus / "a.wav", WavEncoding::kPcm16);
    save_wav(testing::sine(880, 7000, 44100, 0.8), corpus / "b.wav", WavEncoding::kPcm16);
    save_wav(testing::noise(8000, 3, 22050), corpus / "c.wav", WavEncoding::kFloat32);
  }

  std::vector<std::string> small_train(const std::string& out_dir) {
    return {"train",          "--data-dir",    corpus.string(), "--out-dir", out_dir,
            "--epochs",       "5",             "--window-size", "64",        "--latent-dim",
            "4",              "--hidden-sizes", "16",           "--batch-size", "16",
            "--learning-rate", "1e-3",          "--train-hop",   "32"};
  }

  std::filesystem::path trained_model() {
    const auto out = (dir / "run").string();
    EXPECT_EQ(run(small_train(out)).code, 0);
    return dir / "run" / "model.ckpt";
  }

  TempDir dir;
  std::filesystem::path corpus;
};

TEST_F(Cli, TrainWritesCheckpointLossLogAndSidecar) {
  const auto r = run(small_train((dir / "run").string()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "run" / "model.ckpt"));
  EXPECT_EQ(count_lines(dir / "run" / "loss.txt"), 5u);
  EXPECT_TRUE(std::filesystem::exists(dir / "run" / "model.ckpt.cfg"));

  // Same config twice, and again from the sidecar.
  ASSERT_EQ(run(small_train((dir / "again").string())).code, 0);
  ASSERT_EQ(run({"train", "--config", (dir / "run" / "model.ckpt.cfg").string(), "--out-dir",
                 (dir / "sidecar").string()})
                .code,
            0);
  const auto original = testing::read_bytes(dir / "run" / "model.ckpt");
  EXPECT_EQ(original, testing::read_bytes(dir / "again" / "model.ckpt"));
  EXPECT_EQ(original, testing::read_bytes(dir / "sidecar" / "model.ckpt"));
}

TEST_F(Cli, UsageAndInputErrorsExitWithTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train", "--data-dir", (dir / "missing").string(), "--out-dir",
                 (dir / "o").string()})
                .code,
            2);
  std::filesystem::create_directories(dir / "empty");
  EXPECT_EQ(run({"train", "--data-dir", (dir / "empty").string(), "--out-dir",
                 (dir / "o").string()})
                .code,
            2);
  EXPECT_EQ(run({"train", "--no-such-flag", "1"}).code, 2);
  EXPECT_EQ(run({"train", "--epochs", "many"}).code, 2);

  std::ofstream(dir / "bad.cfg") << "data_dir=" << corpus.string() << "\nwindow_sise=64\n";
  const auto r = run({"train", "--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("window_sise"), std::string::npos);
}

TEST_F(Cli, NonFiniteTrainingExitsWithThree) {
  AudioBuffer bad = testing::sine(220, 4000);
  bad.samples[100] = std::numeric_limits<float>::infinity();
  std::filesystem::create_directories(dir / "bad");
  save_wav(bad, dir / "bad" / "x.wav", WavEncoding::kFloat32);
  auto args = small_train((dir / "o").string());
  args[2] = (dir / "bad").string();
  args.push_back("--normalize");
  args.push_back("0");
  EXPECT_EQ(run(args).code, 3);
}

TEST_F(Cli, UnderscoreFlagsAreAccepted) {
  auto args = small_train((dir / "run").string());
  args[1] = "--data_dir";
  EXPECT_EQ(run(args).code, 0);
}

TEST_F(Cli, SynthStepProducesFloorPlusOneSegments) {
  const auto model = trained_model();
  const auto out = dir / "step.wav";
  const auto r = run({"synth", "step", "--model", model.string(), "--in1",
                      (corpus / "a.wav").string(), "--in2", (corpus / "b.wav").string(), "--out",
                      out.string(), "--range", "1", "--step", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const AudioBuffer wav = load_wav(out);
  EXPECT_EQ(wav.size(), 5 * (7000 / 64) * 64);
}

TEST_F(Cli, SynthOutputsRegenerateFromSidecars) {
  const auto model = trained_model();
  for (const std::string strategy : {"step", "meso", "extend"}) {
    const auto out = dir / (strategy + ".wav");
    std::vector<std::string> args{"synth",  strategy,     "--model", model.string(), "--in1",
                                  (corpus / "a.wav").string(), "--in2",
                                  (corpus / "c.wav").string(), "--out", out.string(), "--seed",
                                  "77",     "--crossfade", "4"};
    if (strategy == "extend") {
      args.push_back("--hop");
      args.push_back("16");
    }
    ASSERT_EQ(run(args).code, 0) << strategy;
    const auto copy = dir / (strategy + "_copy.wav");
    ASSERT_EQ(run({"synth", strategy, "--config", RunConfig::sidecar_path(out).string(), "--out",
                   copy.string()})
                  .code,
              0);
    EXPECT_EQ(testing::read_bytes(out), testing::read_bytes(copy)) << strategy;
  }
}

TEST_F(Cli, MesoConstantOneReconstructsFirstInput) {
  const auto model_path = trained_model();
  const auto out = dir / "meso.wav";
  ASSERT_EQ(run({"synth", "meso", "--model", model_path.string(), "--in1",
                 (corpus / "a.wav").string(), "--in2", (corpus / "b.wav").string(), "--out",
                 out.string(), "--curve", "const:1.0", "--mode", "mean"})
                .code,
            0);
  const VaeModel model = load_checkpoint(model_path).model;
  AudioBuffer a = load_wav(corpus / "a.wav");
  a.samples.resize(7000);
  const auto path = encode_audio(model, a, 64);
  const auto blended = as_blended(path);
  const auto ref = decode_path(model, blended.means, blended.stds, SynthesisMode::mean_only());
  EXPECT_EQ(load_wav(out).samples, ref.samples);
}

TEST_F(Cli, ExtendOnFiveSecondsGivesRoughlyTwenty) {
  std::mt19937_64 rng(1);
  Checkpoint c;
  c.model = VaeModel::initialized(VaeHyperParams{}, rng);
  c.adam = AdamState(c.model);
  save_checkpoint(c, dir / "default.ckpt");
  save_wav(testing::sine(220, 5 * 44100), dir / "x.wav", WavEncoding::kFloat32);
  save_wav(testing::noise(5 * 44100, 2), dir / "y.wav", WavEncoding::kFloat32);
  ASSERT_EQ(run({"synth", "extend", "--model", (dir / "default.ckpt").string(), "--in1",
                 (dir / "x.wav").string(), "--in2", (dir / "y.wav").string(), "--out",
                 (dir / "e.wav").string()})
                .code,
            0);
  const double seconds = load_wav(dir / "e.wav").duration_seconds();
  EXPECT_GT(seconds, 19.5);
  EXPECT_LE(seconds, 20.0);
}

TEST_F(Cli, HopIsOnlyASettingOfExtend) {
  const auto model = trained_model();
  EXPECT_EQ(run({"synth", "meso", "--model", model.string(), "--in1", (corpus / "a.wav").string(),
                 "--in2", (corpus / "b.wav").string(), "--out", (dir / "m.wav").string(),
                 "--hop", "16"})
                .code,
            2);
}

TEST_F(Cli, BadCurveIsAnInputError) {
  const auto model = trained_model();
  const auto r = run({"synth", "meso", "--model", model.string(), "--in1",
                      (corpus / "a.wav").string(), "--in2", (corpus / "b.wav").string(), "--out",
                      (dir / "m.wav").string(), "--curve", "wobble:3"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, SomBuildClustersAndConcat) {
  const auto map = dir / "map.som";
  ASSERT_EQ(run({"som", "build", "--data-dir", corpus.string(), "--out", map.string(), "--width",
                 "3", "--height", "3", "--epochs", "20"})
                .code,
            0);
  EXPECT_TRUE(std::filesystem::exists(RunConfig::sidecar_path(map)));

  const auto r = run({"som", "clusters", "--map", map.string(), "--data-dir", corpus.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line, single_unit, single_file;
  std::size_t members = 0;
  while (std::getline(lines, line)) {
    const auto colon = line.find(": ");
    const auto files = line.substr(colon + 2);
    const auto n = static_cast<std::size_t>(std::count(files.begin(), files.end(), ';')) + 1;
    members += n;
    if (n == 1) {
      single_unit = line.substr(0, colon);
      single_file = files;
    }
  }
  EXPECT_EQ(members, 3u);

  // Three files on nine units: at least one unit holds exactly one file.
  ASSERT_FALSE(single_unit.empty());
  const auto out = dir / "unit.wav";
  ASSERT_EQ(run({"som", "concat", "--map", map.string(), "--data-dir", corpus.string(), "--unit",
                 single_unit, "--out", out.string()})
                .code,
            0);
  const AudioBuffer member = resample(load_wav(corpus / single_file), 44100);
  EXPECT_EQ(load_wav(out).samples, member.samples);

  EXPECT_EQ(run({"som", "concat", "--map", map.string(), "--data-dir", corpus.string(), "--unit",
                 "7,7", "--out", out.string()})
                .code,
            2);

  const auto copy = dir / "map_copy.som";
  ASSERT_EQ(run({"som", "build", "--config", RunConfig::sidecar_path(map).string(), "--out",
                 copy.string()})
                .code,
            0);
  EXPECT_EQ(testing::read_bytes(map), testing::read_bytes(copy));
}

TEST_F(Cli, BenchReportsWindowCount) {
  const auto r = run({"bench", "--reps", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("windows=44 "), std::string::npos);
  EXPECT_NE(r.out.find("median_ms="), std::string::npos);
  EXPECT_NE(r.out.find("p95_ms="), std::string::npos);
}

TEST(Bench, RepeatedMediansStayWithinFactorTwo) {
  std::mt19937_64 rng(0);
  const VaeModel m = VaeModel::initialized(VaeHyperParams{}, rng);
  std::vector<double> medians;
  for (int i = 0; i < 3; ++i) medians.push_back(run_decode_benchmark(m, 1.0, 30, 0).median_ms);
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  EXPECT_LT(*hi, 2.0 * *lo);
  EXPECT_EQ(bench_window_count(m, 1.0), 44u);
  EXPECT_EQ(bench_window_count(m, 0.5), 22u);
  EXPECT_THROW(run_decode_benchmark(m, 0.0, 30, 0), Error);
}

TEST_F(Cli, ExportLatentsOneRowPerWindow) {
  const auto model = trained_model();
  const auto out = dir / "lat.csv";
  ASSERT_EQ(run({"export-latents", "--model", model.string(), "--in", (corpus / "a.wav").string(),
                 "--out", out.string(), "--hop", "32"})
                .code,
            0);
  EXPECT_EQ(count_lines(out), 1 + window_count(9000, 64, 32));
}

TEST(RunConfigFile, ParsesCommentsAndRejectsUnknownKeys) {
  RunConfig c("test", {{"a", "1", ""}, {"b", "x", ""}});
  c.load_text("# comment\n\n  a=2\nb = not trimmed\r\n");
  EXPECT_EQ(c.get("a"), "2");
  EXPECT_EQ(c.get("b"), " not trimmed");
  EXPECT_EQ(c.to_text(), "# rawvae test\na=2\nb= not trimmed\n");
  EXPECT_THROW(c.load_text("c=1\n"), Error);
  EXPECT_THROW(c.load_text("novalue\n"), Error);
  EXPECT_THROW(c.get_double("b"), Error);
}

}  // namespace
}  // namespace rawvae
