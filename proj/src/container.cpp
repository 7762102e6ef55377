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

#include "rawvae/container.hpp"

#include <zlib.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rawvae/error.hpp"

namespace rawvae {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::kCorruptFile, why);
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

ContainerWriter::ContainerWriter(const Magic& magic, std::string_view header) {
  bytes_.insert(bytes_.end(), magic.begin(), magic.end());
  put_u32(bytes_, static_cast<std::uint32_t>(header.size()));
  bytes_.insert(bytes_.end(), header.begin(), header.end());
}

void ContainerWriter::add_tensor(std::span<const std::uint32_t> dims,
                                 std::span<const float> data) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  if (n != data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "tensor dims do not match payload size");
  }
  put_u32(bytes_, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put_u32(bytes_, d);
  const auto* raw = reinterpret_cast<const std::uint8_t*>(data.data());
  bytes_.insert(bytes_.end(), raw, raw + data.size_bytes());
}

std::vector<std::uint8_t> ContainerWriter::finish() && {
  put_u32(bytes_, crc32(bytes_));
  return std::move(bytes_);
}

void ContainerWriter::write_file(const std::filesystem::path& path) && {
  const auto bytes = std::move(*this).finish();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

ContainerReader::ContainerReader(std::vector<std::uint8_t> bytes, const Magic& magic)
    : bytes_(std::move(bytes)) {
  constexpr std::size_t kMagic = 7;
  if (bytes_.size() < kMagic + 4 + 4) corrupt("file too short");
  if (std::memcmp(bytes_.data(), magic.data(), kMagic - 1) != 0) {
    corrupt("bad magic");
  }
  if (bytes_[kMagic - 1] != static_cast<std::uint8_t>(magic[kMagic - 1])) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "format version " + std::to_string(bytes_[kMagic - 1]) +
                    ", supported " + std::to_string(static_cast<int>(magic[kMagic - 1])));
  }
  end_ = bytes_.size() - 4;
  const std::uint32_t stored = get_u32(bytes_.data() + end_);
  if (stored != crc32(std::span<const std::uint8_t>(bytes_.data(), end_))) {
    corrupt("checksum mismatch");
  }
  pos_ = kMagic;
  const std::uint32_t header_len = get_u32(bytes_.data() + pos_);
  pos_ += 4;
  if (header_len > end_ - pos_) corrupt("header overruns file");
  header_.assign(reinterpret_cast<const char*>(bytes_.data() + pos_), header_len);
  pos_ += header_len;
}

ContainerReader ContainerReader::open(const std::filesystem::path& path,
                                      const Magic& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ContainerReader(std::move(bytes), magic);
}

Tensor ContainerReader::next_tensor() {
  auto need = [&](std::size_t n) {
    if (end_ - pos_ < n) corrupt("tensor overruns file");
  };
  need(4);
  const std::uint32_t rank = get_u32(bytes_.data() + pos_);
  pos_ += 4;
  if (rank > 8) corrupt("implausible tensor rank");
  Tensor t;
  need(4ull * rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims.push_back(get_u32(bytes_.data() + pos_));
    pos_ += 4;
  }
  const std::size_t n = t.element_count();
  if (n > (end_ - pos_) / 4) corrupt("tensor payload overruns file");
  t.data.resize(n);
  std::memcpy(t.data.data(), bytes_.data() + pos_, n * 4);
  pos_ += n * 4;
  return t;
}

std::string format_header(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

HeaderMap parse_header(std::string_view text) {
  HeaderMap out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) corrupt("header line without '='");
    out.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  return out;
}

const std::string& header_value(const HeaderMap& header, const std::string& key) {
  const auto it = header.find(key);
  if (it == header.end()) corrupt("header is missing '" + key + "'");
  return it->second;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "not a non-negative integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace rawvae
