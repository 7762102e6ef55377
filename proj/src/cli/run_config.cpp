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

#include "rawvae/run_config.hpp"

#include <fstream>
#include <sstream>

#include "rawvae/container.hpp"
#include "rawvae/error.hpp"

namespace rawvae {

RunConfig::RunConfig(std::string command, std::vector<ConfigKey> keys)
    : command_(std::move(command)), keys_(std::move(keys)) {
  for (const auto& k : keys_) values_.push_back(k.default_value);
}

std::size_t RunConfig::index_of(const std::string& key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i].name == key) return i;
  }
  throw Error(ErrorCode::kUnknownKey, "'" + key + "' is not a setting of '" + command_ + "'");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  values_[index_of(key)] = value;
}

void RunConfig::load_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "config line without '=': " + line);
    }
    std::string key = line.substr(start, eq - start);
    key.erase(key.find_last_not_of(" \t") + 1);
    set(key, line.substr(eq + 1));
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str());
}

const std::string& RunConfig::get(const std::string& key) const {
  return values_[index_of(key)];
}

double RunConfig::get_double(const std::string& key) const {
  try {
    return parse_double(get(key));
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument, key + ": expected a number, got '" + get(key) + "'");
  }
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  try {
    return parse_u64(get(key));
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                key + ": expected a non-negative integer, got '" + get(key) + "'");
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error(ErrorCode::kInvalidArgument, key + ": expected a boolean, got '" + v + "'");
}

std::string RunConfig::to_text() const {
  std::string out = "# rawvae " + command_ + "\n";
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    out += keys_[i].name + "=" + values_[i] + "\n";
  }
  return out;
}

std::filesystem::path RunConfig::sidecar_path(const std::filesystem::path& artifact) {
  auto p = artifact;
  p += ".cfg";
  return p;
}

void RunConfig::write_sidecar(const std::filesystem::path& artifact) const {
  const auto path = sidecar_path(artifact);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << to_text();
}

}  // namespace rawvae
