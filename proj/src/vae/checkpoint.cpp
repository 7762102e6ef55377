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

#include <fstream>
#include <iterator>
#include <sstream>

#include "rawvae/container.hpp"
#include "rawvae/error.hpp"
#include "rawvae/train.hpp"

namespace rawvae {
namespace {

constexpr Magic kCheckpointMagic{'R', 'A', 'V', 'A', 'E', '\0', '\1'};

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::vector<std::size_t> split_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<std::size_t>(parse_u64(item)));
  }
  return out;
}

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

void expect_shape(const Tensor& t, std::initializer_list<std::size_t> dims) {
  bool ok = t.dims.size() == dims.size();
  std::size_t i = 0;
  for (auto d : dims) {
    if (!ok) break;
    ok = t.dims[i++] == d;
  }
  if (!ok) throw Error(ErrorCode::kCorruptFile, "tensor shape does not match header");
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  const auto& h = ckpt.hyper();
  const std::string header = format_header({
      {"format_version", std::to_string(Checkpoint::kFormatVersion)},
      {"window_size", std::to_string(h.window_size)},
      {"latent_dim", std::to_string(h.latent_dim)},
      {"hidden_sizes", join_sizes(h.hidden_sizes)},
      {"alpha", format_double(h.alpha)},
      {"learning_rate", format_double(h.learning_rate)},
      {"epochs", std::to_string(h.epochs)},
      {"batch_size", std::to_string(h.batch_size)},
      {"sample_rate", std::to_string(h.sample_rate)},
      {"seed", std::to_string(h.seed)},
      {"train_hop", std::to_string(h.train_hop)},
      {"adam_step", std::to_string(ckpt.adam.step)},
      {"loss_epochs", std::to_string(ckpt.loss_history.size())},
  });

  ContainerWriter writer(kCheckpointMagic, header);
  for (const auto& layer : ckpt.model.layers()) {
    writer.add_tensor({u32(layer.out), u32(layer.in)}, layer.weight);
    writer.add_tensor({u32(layer.out)}, layer.bias);
  }
  for (const auto* moments : {&ckpt.adam.first_moment, &ckpt.adam.second_moment}) {
    if (moments->size() != ckpt.model.layers().size() * 2) {
      throw Error(ErrorCode::kShapeMismatch, "optimizer state does not match model");
    }
    for (const auto& m : *moments) writer.add_tensor({u32(m.size())}, m);
  }
  std::vector<float> losses;
  for (const auto& e : ckpt.loss_history) {
    losses.push_back(e.recon);
    losses.push_back(e.kl);
  }
  writer.add_tensor({u32(ckpt.loss_history.size()), 2u}, losses);
  return std::move(writer).finish();
}

Checkpoint deserialize_checkpoint(std::vector<std::uint8_t> bytes) {
  ContainerReader reader(std::move(bytes), kCheckpointMagic);
  const HeaderMap header = parse_header(reader.header());
  const auto version = parse_u64(header_value(header, "format_version"));
  if (version != Checkpoint::kFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "checkpoint header declares version " + std::to_string(version));
  }

  VaeHyperParams h;
  try {
    h.window_size = parse_u64(header_value(header, "window_size"));
    h.latent_dim = parse_u64(header_value(header, "latent_dim"));
    h.hidden_sizes = split_sizes(header_value(header, "hidden_sizes"));
    h.alpha = parse_double(header_value(header, "alpha"));
    h.learning_rate = parse_double(header_value(header, "learning_rate"));
    h.epochs = static_cast<int>(parse_u64(header_value(header, "epochs")));
    h.batch_size = parse_u64(header_value(header, "batch_size"));
    h.sample_rate = static_cast<int>(parse_u64(header_value(header, "sample_rate")));
    h.seed = parse_u64(header_value(header, "seed"));
    h.train_hop = parse_u64(header_value(header, "train_hop"));
    h.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptFile) throw;
    throw Error(ErrorCode::kCorruptFile, std::string("bad header: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.model = VaeModel(h);
  for (auto& layer : ckpt.model.layers()) {
    auto w = reader.next_tensor();
    expect_shape(w, {layer.out, layer.in});
    layer.weight = std::move(w.data);
    auto b = reader.next_tensor();
    expect_shape(b, {layer.out});
    layer.bias = std::move(b.data);
  }
  ckpt.adam = AdamState(ckpt.model);
  ckpt.adam.step = parse_u64(header_value(header, "adam_step"));
  for (auto* moments : {&ckpt.adam.first_moment, &ckpt.adam.second_moment}) {
    for (auto& m : *moments) {
      auto t = reader.next_tensor();
      expect_shape(t, {m.size()});
      m = std::move(t.data);
    }
  }
  const std::size_t epochs = parse_u64(header_value(header, "loss_epochs"));
  auto losses = reader.next_tensor();
  expect_shape(losses, {epochs, 2});
  for (std::size_t e = 0; e < epochs; ++e) {
    ckpt.loss_history.push_back({losses.data[2 * e], losses.data[2 * e + 1]});
  }
  if (!reader.at_end()) throw Error(ErrorCode::kCorruptFile, "trailing data");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint(std::move(bytes));
}

}  // namespace rawvae
