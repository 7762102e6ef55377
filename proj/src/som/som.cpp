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

#include "rawvae/som.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "rawvae/container.hpp"
#include "rawvae/error.hpp"
#include "rawvae/simd/kernels.hpp"

namespace rawvae {
namespace {

constexpr Magic kSomMagic{'R', 'A', 'S', 'O', 'M', '\0', '\1'};

double grid_distance_sq(std::size_t unit, std::size_t width, GridUnit bmu) {
  const double dx = static_cast<double>(unit % width) - static_cast<double>(bmu.x);
  const double dy = static_cast<double>(unit / width) - static_cast<double>(bmu.y);
  return dx * dx + dy * dy;
}

double neighbourhood(double dist_sq, double radius) {
  return std::exp(-dist_sq / (2.0 * radius * radius));
}

}  // namespace

std::vector<float> SomMap::standardize(std::span<const double> features) const {
  if (features.size() != dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "feature vector has " + std::to_string(features.size()) +
                    " entries, map expects " + std::to_string(dim));
  }
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = static_cast<float>((features[i] - feature_mean[i]) / feature_scale[i]);
  }
  return out;
}

std::size_t default_grid_side(std::size_t thumbnail_count) {
  const double side = std::round(std::sqrt(5.0 * std::sqrt(static_cast<double>(thumbnail_count))));
  return std::max<std::size_t>(2, static_cast<std::size_t>(side));
}

GridUnit best_matching_unit_standardized(const SomMap& map,
                                         std::span<const float> standardized) {
  if (standardized.size() != map.dim) {
    throw Error(ErrorCode::kShapeMismatch, "query dimension differs from map");
  }
  const auto& k = simd::kernels<float>();
  GridUnit best;
  float best_dist = 0.0f;
  bool first = true;
  for (std::size_t y = 0; y < map.height; ++y) {
    for (std::size_t x = 0; x < map.width; ++x) {
      const float d = k.squared_distance(standardized.data(),
                                         map.prototype(x, y).data(), map.dim);
      if (first || d < best_dist) {
        best = {x, y};
        best_dist = d;
        first = false;
      }
    }
  }
  return best;
}

GridUnit best_matching_unit(const SomMap& map, std::span<const double> features) {
  const auto z = map.standardize(features);
  return best_matching_unit_standardized(map, z);
}

double quantization_error(const SomMap& map,
                          std::span<const std::vector<double>> features) {
  if (features.empty()) return 0.0;
  const auto& k = simd::kernels<float>();
  double total = 0.0;
  for (const auto& f : features) {
    const auto z = map.standardize(f);
    const GridUnit u = best_matching_unit_standardized(map, z);
    total += std::sqrt(static_cast<double>(
        k.squared_distance(z.data(), map.prototype(u.x, u.y).data(), map.dim)));
  }
  return total / static_cast<double>(features.size());
}

SomMap train_som(std::span<const std::vector<double>> features,
                 const SomTrainParams& params, const ThumbnailConfig& feature_config) {
  if (features.empty()) throw Error(ErrorCode::kEmptyInput, "no thumbnails to train on");
  if (params.width < 1 || params.height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "map dimensions must be >= 1");
  }
  if (params.epochs < 0 || !(params.learning_rate > 0.0) || params.radius < 0.0 ||
      !(params.final_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid SOM training parameters");
  }
  const std::size_t dim = features.front().size();
  if (dim == 0) throw Error(ErrorCode::kEmptyInput, "zero-dimensional features");
  for (const auto& f : features) {
    if (f.size() != dim) throw Error(ErrorCode::kShapeMismatch, "ragged feature vectors");
    for (double v : f) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite feature");
    }
  }

  SomMap map;
  map.width = params.width;
  map.height = params.height;
  map.dim = dim;
  map.training = params;
  map.feature_config = feature_config;
  if (map.training.radius == 0.0) {
    map.training.radius =
        std::max(1.0, static_cast<double>(std::max(params.width, params.height)) / 2.0);
  }

  const double count = static_cast<double>(features.size());
  map.feature_mean.resize(dim);
  map.feature_scale.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    double sum = 0.0;
    for (const auto& f : features) sum += f[j];
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& f : features) sq += (f[j] - mean) * (f[j] - mean);
    const double sd = std::sqrt(sq / count);
    map.feature_mean[j] = static_cast<float>(mean);
    map.feature_scale[j] = sd > 0.0 ? static_cast<float>(sd) : 1.0f;
  }
  std::vector<std::vector<float>> data;
  data.reserve(features.size());
  for (const auto& f : features) data.push_back(map.standardize(f));

  std::mt19937_64 rng(params.seed);
  const std::size_t units = map.width * map.height;
  map.prototypes.resize(units * dim);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  for (std::size_t u = 0; u < units; ++u) {
    const auto& src = data[pick(rng)];
    std::copy(src.begin(), src.end(), map.prototypes.begin() + static_cast<std::ptrdiff_t>(u * dim));
  }

  auto record_error = [&] {
    double total = 0.0;
    const auto& k = simd::kernels<float>();
    for (const auto& z : data) {
      const GridUnit b = best_matching_unit_standardized(map, z);
      total += std::sqrt(static_cast<double>(
          k.squared_distance(z.data(), map.prototype(b.x, b.y).data(), dim)));
    }
    map.quantization_error.push_back(static_cast<float>(total / count));
  };

  const double lr0 = params.learning_rate;
  const double r0 = map.training.radius;
  const double r1 = params.final_radius;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int e = 0; e < params.epochs; ++e) {
    const double frac =
        params.epochs > 1 ? static_cast<double>(e) / (params.epochs - 1) : 1.0;
    const double lr = lr0 * std::pow(0.01, frac);
    const double radius = r0 * std::pow(r1 / r0, frac);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& z = data[idx];
      const GridUnit b = best_matching_unit_standardized(map, z);
      for (std::size_t u = 0; u < units; ++u) {
        const double step = lr * neighbourhood(grid_distance_sq(u, map.width, b), radius);
        float* p = map.prototypes.data() + u * dim;
        for (std::size_t j = 0; j < dim; ++j) {
          p[j] = static_cast<float>(p[j] + step * (static_cast<double>(z[j]) - p[j]));
        }
      }
    }
    record_error();
  }

  // Convergence pass: neighbourhood-weighted means at the final radius.
  std::vector<GridUnit> bmus;
  bmus.reserve(data.size());
  for (const auto& z : data) bmus.push_back(best_matching_unit_standardized(map, z));
  std::vector<double> acc(dim);
  for (std::size_t u = 0; u < units; ++u) {
    std::fill(acc.begin(), acc.end(), 0.0);
    double weight = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double h = neighbourhood(grid_distance_sq(u, map.width, bmus[i]), r1);
      weight += h;
      for (std::size_t j = 0; j < dim; ++j) acc[j] += h * data[i][j];
    }
    if (weight > 1e-12) {
      float* p = map.prototypes.data() + u * dim;
      for (std::size_t j = 0; j < dim; ++j) p[j] = static_cast<float>(acc[j] / weight);
    }
  }
  record_error();
  return map;
}

SomMap train_som(std::span<const Thumbnail> thumbnails, const SomTrainParams& params) {
  if (thumbnails.empty()) throw Error(ErrorCode::kEmptyInput, "no thumbnails to train on");
  std::vector<std::vector<double>> features;
  for (const auto& t : thumbnails) {
    if (!(t.config == thumbnails.front().config)) {
      throw Error(ErrorCode::kConfigMismatch, "thumbnails use different feature recipes");
    }
    features.push_back(t.features);
  }
  return train_som(features, params, thumbnails.front().config);
}

std::vector<Cluster> assign_clusters(const SomMap& map,
                                     std::span<const Thumbnail> thumbnails) {
  std::vector<Cluster> by_unit(map.width * map.height);
  for (const auto& t : thumbnails) {
    if (!(t.config == map.feature_config) || t.features.size() != map.dim) {
      throw Error(ErrorCode::kConfigMismatch,
                  t.file_ref + ": thumbnail recipe " + t.config.to_string() +
                      " differs from map recipe " + map.feature_config.to_string());
    }
    const GridUnit u = best_matching_unit(map, t.features);
    auto& c = by_unit[u.y * map.width + u.x];
    c.unit = u;
    c.members.push_back(t.file_ref);
  }
  std::vector<Cluster> out;
  for (auto& c : by_unit) {
    if (!c.members.empty()) out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    return a.members.size() > b.members.size();
  });
  return out;
}

AudioBuffer concatenate_cluster(const Cluster& cluster, const AudioLoader& loader) {
  if (cluster.members.empty()) throw Error(ErrorCode::kEmptyInput, "empty cluster");
  auto members = cluster.members;
  std::sort(members.begin(), members.end());
  std::vector<AudioBuffer> parts;
  parts.reserve(members.size());
  for (const auto& m : members) parts.push_back(loader(m));
  AudioBuffer out = concatenate(parts);
  out.source_label = "cluster " + std::to_string(cluster.unit.x) + "," +
                     std::to_string(cluster.unit.y);
  return out;
}

bool in_meso_duration_band(const AudioBuffer& buffer) {
  const double seconds = buffer.duration_seconds();
  return seconds >= 10.0 && seconds <= 30.0;
}

void save_som(const SomMap& map, const std::filesystem::path& path) {
  const auto& t = map.training;
  const std::string header = format_header({
      {"format_version", std::to_string(SomMap::kFormatVersion)},
      {"width", std::to_string(map.width)},
      {"height", std::to_string(map.height)},
      {"dim", std::to_string(map.dim)},
      {"epochs", std::to_string(t.epochs)},
      {"learning_rate", format_double(t.learning_rate)},
      {"radius", format_double(t.radius)},
      {"final_radius", format_double(t.final_radius)},
      {"seed", std::to_string(t.seed)},
      {"feature_config", map.feature_config.to_string()},
      {"error_entries", std::to_string(map.quantization_error.size())},
  });
  ContainerWriter writer(kSomMagic, header);
  const auto u32 = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  writer.add_tensor({u32(map.height), u32(map.width), u32(map.dim)}, map.prototypes);
  writer.add_tensor({u32(map.dim)}, map.feature_mean);
  writer.add_tensor({u32(map.dim)}, map.feature_scale);
  writer.add_tensor({u32(map.quantization_error.size())}, map.quantization_error);
  std::move(writer).write_file(path);
}

SomMap load_som(const std::filesystem::path& path) {
  auto reader = ContainerReader::open(path, kSomMagic);
  const HeaderMap header = parse_header(reader.header());
  if (parse_u64(header_value(header, "format_version")) != SomMap::kFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch, "unsupported SOM map version");
  }
  SomMap map;
  try {
    map.width = parse_u64(header_value(header, "width"));
    map.height = parse_u64(header_value(header, "height"));
    map.dim = parse_u64(header_value(header, "dim"));
    map.training.width = map.width;
    map.training.height = map.height;
    map.training.epochs = static_cast<int>(parse_u64(header_value(header, "epochs")));
    map.training.learning_rate = parse_double(header_value(header, "learning_rate"));
    map.training.radius = parse_double(header_value(header, "radius"));
    map.training.final_radius = parse_double(header_value(header, "final_radius"));
    map.training.seed = parse_u64(header_value(header, "seed"));
    map.feature_config = ThumbnailConfig::parse(header_value(header, "feature_config"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptFile) throw;
    throw Error(ErrorCode::kCorruptFile, std::string("bad SOM header: ") + e.what());
  }
  const std::size_t errors = parse_u64(header_value(header, "error_entries"));
  auto take = [&](std::vector<std::size_t> dims) {
    Tensor t = reader.next_tensor();
    if (t.dims.size() != dims.size() ||
        !std::equal(dims.begin(), dims.end(), t.dims.begin())) {
      throw Error(ErrorCode::kCorruptFile, "SOM tensor shape does not match header");
    }
    return std::move(t.data);
  };
  map.prototypes = take({map.height, map.width, map.dim});
  map.feature_mean = take({map.dim});
  map.feature_scale = take({map.dim});
  map.quantization_error = take({errors});
  if (!reader.at_end()) throw Error(ErrorCode::kCorruptFile, "trailing data");
  return map;
}

void write_clusters(std::span<const Cluster> clusters, std::ostream& out) {
  for (const auto& c : clusters) {
    out << c.unit.x << ',' << c.unit.y << ": ";
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (i) out << ';';
      out << c.members[i];
    }
    out << '\n';
  }
}

}  // namespace rawvae
