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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rawvae {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

// Flat key=value settings for one command. Only declared keys are accepted;
// the resolved set is written next to every artifact so the run can be
// repeated with --config.
class RunConfig {
 public:
  RunConfig(std::string command, std::vector<ConfigKey> keys);

  const std::string& command() const { return command_; }
  const std::vector<ConfigKey>& keys() const { return keys_; }

  // Throw Error(kUnknownKey) for undeclared keys.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // "# rawvae <command>" followed by every key in declaration order.
  std::string to_text() const;
  void write_sidecar(const std::filesystem::path& artifact) const;

  static std::filesystem::path sidecar_path(const std::filesystem::path& artifact);

 private:
  std::size_t index_of(const std::string& key) const;

  std::string command_;
  std::vector<ConfigKey> keys_;
  std::vector<std::string> values_;
};

}  // namespace rawvae
