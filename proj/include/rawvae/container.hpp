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

// Binary tensor container shared by model checkpoints and SOM map files.
//
//   magic (7 bytes, last byte is the format version)
//   u32 header length, UTF-8 header of key=value lines
//   tensors: u32 rank, u32 dims[rank], float32 payload (row-major)
//   u32 CRC-32 of every preceding byte
//
// All integers and floats are little-endian.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rawvae {

using Magic = std::array<char, 7>;

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
};

class ContainerWriter {
 public:
  ContainerWriter(const Magic& magic, std::string_view header);

  void add_tensor(std::span<const std::uint32_t> dims, std::span<const float> data);
  void add_tensor(std::initializer_list<std::uint32_t> dims,
                  std::span<const float> data) {
    add_tensor(std::span<const std::uint32_t>(dims.begin(), dims.size()), data);
  }

  // Appends the checksum and returns the finished bytes.
  std::vector<std::uint8_t> finish() &&;
  void write_file(const std::filesystem::path& path) &&;

 private:
  std::vector<std::uint8_t> bytes_;
};

class ContainerReader {
 public:
  // Validates magic, version byte and checksum. Throws CorruptFile or
  // FormatVersionMismatch.
  ContainerReader(std::vector<std::uint8_t> bytes, const Magic& magic);
  static ContainerReader open(const std::filesystem::path& path, const Magic& magic);

  const std::string& header() const { return header_; }
  bool at_end() const { return pos_ == end_; }
  Tensor next_tensor();

 private:
  std::vector<std::uint8_t> bytes_;
  std::string header_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// key=value header lines.
using HeaderMap = std::map<std::string, std::string>;
std::string format_header(const std::vector<std::pair<std::string, std::string>>& entries);
HeaderMap parse_header(std::string_view text);
// Throws CorruptFile when the key is absent.
const std::string& header_value(const HeaderMap& header, const std::string& key);

// Shortest text that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

}  // namespace rawvae
