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

#include "rawvae/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "rawvae/audio.hpp"
#include "rawvae/bench.hpp"
#include "rawvae/container.hpp"
#include "rawvae/error.hpp"
#include "rawvae/features.hpp"
#include "rawvae/latent.hpp"
#include "rawvae/run_config.hpp"
#include "rawvae/simd/kernels.hpp"
#include "rawvae/som.hpp"
#include "rawvae/train.hpp"

namespace rawvae::cli {
namespace {

namespace fs = std::filesystem;

struct Io {
  std::ostream& out;
  std::ostream& err;
};

std::string num(double v) { return format_double(v); }

std::string shortest(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
std::string num(std::size_t v) { return std::to_string(v); }

std::vector<ConfigKey> vae_keys() {
  const VaeHyperParams d;
  return {
      {"data_dir", "", "directory of training WAV files"},
      {"out_dir", "", "directory for model.ckpt and loss.txt"},
      {"window_size", num(d.window_size), "samples per window"},
      {"latent_dim", num(d.latent_dim), "latent dimensions"},
      {"hidden_sizes", "512", "comma-separated hidden layer widths"},
      {"alpha", num(d.alpha), "KL weight"},
      {"learning_rate", num(d.learning_rate), "Adam step size"},
      {"epochs", std::to_string(d.epochs), "training epochs"},
      {"batch_size", num(d.batch_size), "windows per Adam step"},
      {"sample_rate", std::to_string(d.sample_rate), "rate all audio is resampled to"},
      {"train_hop", num(d.train_hop), "stride between training windows"},
      {"normalize", "1", "peak-normalize each file before slicing"},
      {"seed", "0", "random seed"},
  };
}

std::vector<ConfigKey> synth_keys(const std::string& strategy) {
  std::vector<ConfigKey> keys{
      {"model", "", "checkpoint path"},
      {"in1", "", "first input WAV (blend weight 1)"},
      {"in2", "", "second input WAV (blend weight 0)"},
      {"out", "", "output WAV"},
      {"mode", "sample", "sample | mean"},
      {"seed", "0", "noise seed for sample mode"},
      {"crossfade", "0", "samples of linear crossfade between frames"},
      {"normalize", "0", "peak-normalize inputs before encoding"},
  };
  if (strategy == "step") {
    keys.push_back({"range", "1", "blend weight range"});
    keys.push_back({"step", "0.25", "blend weight step"});
  } else {
    keys.push_back({"curve", "lin:1:0", "interpolation curve spec"});
  }
  if (strategy == "extend") keys.push_back({"hop", "256", "encoding hop in samples"});
  return keys;
}

std::vector<ConfigKey> som_build_keys() {
  const SomTrainParams d;
  return {
      {"data_dir", "", "directory of WAV files"},
      {"out", "", "map file"},
      {"width", "0", "grid width (0 = automatic)"},
      {"height", "0", "grid height (0 = automatic)"},
      {"epochs", std::to_string(d.epochs), "training epochs"},
      {"learning_rate", num(d.learning_rate), "initial learning rate"},
      {"radius", num(d.radius), "initial radius (0 = half the larger side)"},
      {"final_radius", num(d.final_radius), "radius at the last epoch"},
      {"sample_rate", std::to_string(kDefaultSampleRate), "analysis rate"},
      {"normalize", "1", "peak-normalize files before analysis"},
      {"features", ThumbnailConfig{}.to_string(), "thumbnail recipe"},
      {"seed", "0", "random seed"},
  };
}

std::vector<ConfigKey> som_use_keys(bool concat) {
  std::vector<ConfigKey> keys{
      {"map", "", "map file"},
      {"data_dir", "", "directory of WAV files"},
      {"sample_rate", std::to_string(kDefaultSampleRate), "analysis rate"},
      {"normalize", "1", "peak-normalize files before analysis"},
      {"out", "", concat ? "output WAV" : "listing file (empty = stdout)"},
  };
  if (concat) keys.push_back({"unit", "", "grid unit as x,y"});
  return keys;
}

std::vector<ConfigKey> bench_keys() {
  return {
      {"model", "", "checkpoint path (empty = untrained default architecture)"},
      {"seconds", "1", "audio duration to decode"},
      {"reps", "30", "timed repetitions"},
      {"seed", "0", "seed for latents and the untrained model"},
  };
}

std::vector<ConfigKey> export_keys() {
  return {
      {"model", "", "checkpoint path"},
      {"in", "", "input WAV"},
      {"out", "", "output CSV"},
      {"hop", "0", "encoding hop (0 = window size)"},
      {"normalize", "0", "peak-normalize the input"},
  };
}

const std::string& require(const RunConfig& cfg, const std::string& key) {
  const auto& v = cfg.get(key);
  if (v.empty()) throw Error(ErrorCode::kInvalidArgument, "--" + key + " is required");
  return v;
}

int get_int(const RunConfig& cfg, const std::string& key) {
  const auto v = cfg.get_u64(key);
  if (v > 1'000'000'000ULL) throw Error(ErrorCode::kInvalidArgument, key + " is too large");
  return static_cast<int>(v);
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<std::size_t>(parse_u64(item)));
  }
  return out;
}

std::vector<fs::path> list_wavs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoFailure, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no WAV files in " + dir.string());
  }
  return files;
}

AudioBuffer prepare(const fs::path& path, int rate, bool normalize) {
  AudioBuffer audio = resample(load_wav(path), rate);
  return normalize ? peak_normalize(audio) : audio;
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

SynthesisMode parse_mode(const RunConfig& cfg) {
  const auto& mode = cfg.get("mode");
  if (mode == "mean") return SynthesisMode::mean_only();
  if (mode == "sample") return SynthesisMode::sampled(cfg.get_u64("seed"));
  throw Error(ErrorCode::kInvalidArgument, "mode must be 'mean' or 'sample', got '" + mode + "'");
}

int cmd_train(const RunConfig& cfg, Io io) {
  VaeHyperParams hyper;
  hyper.window_size = cfg.get_u64("window_size");
  hyper.latent_dim = cfg.get_u64("latent_dim");
  hyper.hidden_sizes = parse_size_list(cfg.get("hidden_sizes"));
  hyper.alpha = cfg.get_double("alpha");
  hyper.learning_rate = cfg.get_double("learning_rate");
  hyper.epochs = get_int(cfg, "epochs");
  hyper.batch_size = cfg.get_u64("batch_size");
  hyper.sample_rate = get_int(cfg, "sample_rate");
  hyper.train_hop = cfg.get_u64("train_hop");
  hyper.seed = cfg.get_u64("seed");
  hyper.validate();

  const fs::path out_dir = require(cfg, "out_dir");
  const bool normalize = cfg.get_bool("normalize");
  std::vector<WindowSet> dataset;
  std::size_t total = 0;
  for (const auto& file : list_wavs(require(cfg, "data_dir"))) {
    const AudioBuffer audio = prepare(file, hyper.sample_rate, normalize);
    if (audio.size() < hyper.window_size) {
      io.err << "skipping " << file.filename().string() << ": shorter than one window\n";
      continue;
    }
    WindowSet windows = window(audio, hyper.window_size, hyper.train_hop);
    total += windows.count();
    dataset.push_back(std::move(windows));
  }
  io.out << "training on " << total << " windows from " << dataset.size() << " files\n";

  const Checkpoint ckpt = train(dataset, hyper, [&](int epoch, const EpochLoss& loss) {
    io.out << "epoch " << epoch << "/" << hyper.epochs << " recon=" << loss.recon
           << " kl=" << loss.kl << "\n";
  });

  fs::create_directories(out_dir);
  const fs::path ckpt_path = out_dir / "model.ckpt";
  save_checkpoint(ckpt, ckpt_path);
  cfg.write_sidecar(ckpt_path);

  std::ofstream log(out_dir / "loss.txt", std::ios::trunc);
  for (std::size_t e = 0; e < ckpt.loss_history.size(); ++e) {
    const auto& l = ckpt.loss_history[e];
    log << (e + 1) << ' ' << shortest(l.recon) << ' ' << shortest(l.kl) << '\n';
  }
  if (!log) throw Error(ErrorCode::kIoFailure, "cannot write loss log");
  io.out << "wrote " << ckpt_path.string() << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& strategy, const RunConfig& cfg, Io io) {
  const Checkpoint ckpt = load_checkpoint(require(cfg, "model"));
  const VaeModel& model = ckpt.model;
  const bool normalize = cfg.get_bool("normalize");
  const int rate = model.hyper().sample_rate;
  const AudioBuffer a = prepare(require(cfg, "in1"), rate, normalize);
  const AudioBuffer b = prepare(require(cfg, "in2"), rate, normalize);
  const fs::path out_path = require(cfg, "out");
  const SynthesisMode mode = parse_mode(cfg);
  const std::size_t crossfade = cfg.get_u64("crossfade");

  AudioBuffer out;
  if (strategy == "step") {
    const double range = cfg.get_double("range");
    const double step = cfg.get_double("step");
    const std::size_t segments = stepwise_segment_count(range, step);
    out = stepwise_interpolate(model, a, b, range, step, mode, crossfade);
    io.out << segments << " segments\n";
  } else {
    const CurveSpec spec = parse_curve_spec(cfg.get("curve"));
    if (strategy == "meso") {
      const auto curve = generate_curve(spec, meso_window_count(model, a, b));
      out = meso_interpolate(model, a, b, curve, mode, crossfade);
    } else {
      const std::size_t hop = cfg.get_u64("hop");
      const auto curve = generate_curve(spec, extended_window_count(model, a, b, hop));
      out = extended_interpolate(model, a, b, curve, hop, mode, crossfade);
    }
  }
  ensure_parent(out_path);
  save_wav(out, out_path, WavEncoding::kFloat32);
  cfg.write_sidecar(out_path);
  io.out << "wrote " << out_path.string() << " (" << out.size() << " samples, "
         << out.duration_seconds() << " s)\n";
  return kExitOk;
}

std::vector<Thumbnail> thumbnails_for(const fs::path& dir, int rate, bool normalize,
                                      const ThumbnailConfig& features, Io io) {
  std::vector<Thumbnail> thumbs;
  for (const auto& file : list_wavs(dir)) {
    const AudioBuffer audio = prepare(file, rate, normalize);
    if (audio.size() < features.frame_size) {
      io.err << "skipping " << file.filename().string() << ": shorter than one frame\n";
      continue;
    }
    thumbs.push_back(extract_thumbnail(audio, features, file.filename().string()));
  }
  return thumbs;
}

int cmd_som_build(const RunConfig& cfg, Io io) {
  const ThumbnailConfig features = ThumbnailConfig::parse(cfg.get("features"));
  const auto thumbs = thumbnails_for(require(cfg, "data_dir"), get_int(cfg, "sample_rate"),
                                     cfg.get_bool("normalize"), features, io);
  SomTrainParams params;
  params.width = cfg.get_u64("width");
  params.height = cfg.get_u64("height");
  const std::size_t side = default_grid_side(thumbs.size());
  if (params.width == 0) params.width = side;
  if (params.height == 0) params.height = side;
  params.epochs = get_int(cfg, "epochs");
  params.learning_rate = cfg.get_double("learning_rate");
  params.radius = cfg.get_double("radius");
  params.final_radius = cfg.get_double("final_radius");
  params.seed = cfg.get_u64("seed");

  const SomMap map = train_som(thumbs, params);
  const fs::path out_path = require(cfg, "out");
  ensure_parent(out_path);
  save_som(map, out_path);
  cfg.write_sidecar(out_path);
  io.out << "trained " << map.width << "x" << map.height << " map on " << thumbs.size()
         << " files, quantization error " << map.quantization_error.back() << "\n";
  return kExitOk;
}

std::vector<Cluster> clusters_for(const RunConfig& cfg, const SomMap& map, Io io) {
  const auto thumbs = thumbnails_for(require(cfg, "data_dir"), get_int(cfg, "sample_rate"),
                                     cfg.get_bool("normalize"), map.feature_config, io);
  return assign_clusters(map, thumbs);
}

int cmd_som_clusters(const RunConfig& cfg, Io io) {
  const SomMap map = load_som(require(cfg, "map"));
  const auto clusters = clusters_for(cfg, map, io);
  const auto& out = cfg.get("out");
  if (out.empty()) {
    write_clusters(clusters, io.out);
  } else {
    ensure_parent(out);
    std::ofstream file(out, std::ios::trunc);
    write_clusters(clusters, file);
    if (!file) throw Error(ErrorCode::kIoFailure, "cannot write " + out);
    cfg.write_sidecar(out);
  }
  return kExitOk;
}

GridUnit parse_unit(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "unit must be x,y, got '" + text + "'");
  }
  return {static_cast<std::size_t>(parse_u64(text.substr(0, comma))),
          static_cast<std::size_t>(parse_u64(text.substr(comma + 1)))};
}

int cmd_som_concat(const RunConfig& cfg, Io io) {
  const SomMap map = load_som(require(cfg, "map"));
  const GridUnit unit = parse_unit(require(cfg, "unit"));
  if (unit.x >= map.width || unit.y >= map.height) {
    throw Error(ErrorCode::kUnknownUnit, "unit " + cfg.get("unit") + " is outside the " +
                                             std::to_string(map.width) + "x" +
                                             std::to_string(map.height) + " grid");
  }
  const auto clusters = clusters_for(cfg, map, io);
  const auto it = std::find_if(clusters.begin(), clusters.end(),
                               [&](const Cluster& c) { return c.unit == unit; });
  if (it == clusters.end()) {
    throw Error(ErrorCode::kUnknownUnit, "unit " + cfg.get("unit") + " has no members");
  }
  const fs::path dir = cfg.get("data_dir");
  const int rate = get_int(cfg, "sample_rate");
  const AudioBuffer out = concatenate_cluster(
      *it, [&](const std::string& ref) { return resample(load_wav(dir / ref), rate); });
  const fs::path out_path = require(cfg, "out");
  ensure_parent(out_path);
  save_wav(out, out_path, WavEncoding::kFloat32);
  cfg.write_sidecar(out_path);
  io.out << "wrote " << it->members.size() << " files to " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg, Io io) {
  VaeModel model;
  if (cfg.get("model").empty()) {
    std::mt19937_64 rng(cfg.get_u64("seed"));
    model = VaeModel::initialized(VaeHyperParams{}, rng);
  } else {
    model = load_checkpoint(cfg.get("model")).model;
  }
  const BenchReport report = run_decode_benchmark(model, cfg.get_double("seconds"),
                                                  cfg.get_u64("reps"), cfg.get_u64("seed"));
  io.out << "backend=" << simd::backend_name(simd::active_backend())
         << " windows=" << report.windows << " reps=" << report.repetitions
         << " median_ms=" << report.median_ms << " p95_ms=" << report.p95_ms << "\n";
  return kExitOk;
}

int cmd_export(const RunConfig& cfg, Io io) {
  const Checkpoint ckpt = load_checkpoint(require(cfg, "model"));
  const AudioBuffer input = prepare(require(cfg, "in"), ckpt.hyper().sample_rate,
                                    cfg.get_bool("normalize"));
  std::size_t hop = cfg.get_u64("hop");
  if (hop == 0) hop = ckpt.model.window_size();
  const LatentPath path = encode_audio(ckpt.model, input, hop);
  const fs::path out_path = require(cfg, "out");
  ensure_parent(out_path);
  export_latents(path, out_path);
  cfg.write_sidecar(out_path);
  io.out << "wrote " << path.size() << " windows to " << out_path.string() << "\n";
  return kExitOk;
}

// One leaf subcommand: its settings, the CLI11 storage for each flag, and the
// handler that runs on the resolved config.
struct Command {
  std::string name;
  std::vector<ConfigKey> keys;
  std::function<int(const RunConfig&, Io)> handler;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
};

void attach(CLI::App* parent, const std::string& sub, Command& cmd, const std::string& help) {
  cmd.app = parent->add_subcommand(sub, help);
  cmd.app->add_option("--config", cmd.config_file, "key=value settings file");
  for (const auto& key : cmd.keys) {
    std::string dashed = key.name;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    std::string names = "--" + dashed;
    if (dashed != key.name) names += ",--" + key.name;
    auto* opt = cmd.app->add_option(names, cmd.flag_values[key.name], key.help);
    opt->default_str(key.default_value);
    cmd.flag_options[key.name] = opt;
  }
}

int execute(const Command& cmd, Io io) {
  RunConfig cfg(cmd.name, cmd.keys);
  if (!cmd.config_file.empty()) cfg.load_file(cmd.config_file);
  for (const auto& key : cmd.keys) {
    if (cmd.flag_options.at(key.name)->count() > 0) {
      cfg.set(key.name, cmd.flag_values.at(key.name));
    }
  }
  return cmd.handler(cfg, io);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Io io{out, err};
  CLI::App app("Raw-audio VAE toolkit: training, latent interpolation and corpus maps",
               "rawvae");
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](std::string name, std::vector<ConfigKey> keys,
                  std::function<int(const RunConfig&, Io)> handler) -> Command& {
    commands.push_back(std::make_unique<Command>());
    auto& c = *commands.back();
    c.name = std::move(name);
    c.keys = std::move(keys);
    c.handler = std::move(handler);
    return c;
  };

  attach(&app, "train", make("train", vae_keys(), cmd_train), "train a VAE checkpoint");

  auto* synth = app.add_subcommand("synth", "interpolate between two recordings");
  synth->require_subcommand(1);
  for (const std::string strategy : {"step", "meso", "extend"}) {
    attach(synth, strategy,
           make("synth " + strategy, synth_keys(strategy),
                [strategy](const RunConfig& c, Io i) { return cmd_synth(strategy, c, i); }),
           strategy == "step"     ? "fixed blend per segment"
           : strategy == "meso"   ? "per-window blend curve"
                                  : "per-window blend curve over overlapped windows");
  }

  auto* som = app.add_subcommand("som", "self-organizing map over a corpus");
  som->require_subcommand(1);
  attach(som, "build", make("som build", som_build_keys(), cmd_som_build), "train and save a map");
  attach(som, "clusters", make("som clusters", som_use_keys(false), cmd_som_clusters),
         "list files per map unit");
  attach(som, "concat", make("som concat", som_use_keys(true), cmd_som_concat),
         "concatenate one unit's files");

  attach(&app, "bench", make("bench", bench_keys(), cmd_bench), "time decoding");
  attach(&app, "export-latents", make("export-latents", export_keys(), cmd_export),
         "write per-window latent statistics as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  for (const auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    try {
      return execute(*cmd, io);
    } catch (const Error& e) {
      err << "rawvae " << cmd->name << ": " << e.what() << "\n";
      return e.code() == ErrorCode::kNumericFailure ? kExitNumeric : kExitUsage;
    } catch (const std::exception& e) {
      err << "rawvae " << cmd->name << ": " << e.what() << "\n";
      return 1;
    }
  }
  return kExitUsage;
}

}  // namespace rawvae::cli
