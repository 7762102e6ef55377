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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rawvae/audio.hpp"
#include "rawvae/error.hpp"

namespace rawvae {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  template <typename T>
  T read() {
    if (remaining() < sizeof(T)) {
      throw Error(ErrorCode::kMalformedWav, "unexpected end of file");
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) {
      throw Error(ErrorCode::kMalformedWav, "chunk extends past end of file");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(std::size_t n) { take(n); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

bool fourcc_equals(std::uint32_t value, const char (&tag)[5]) {
  std::uint32_t expected;
  std::memcpy(&expected, tag, 4);
  return value == expected;
}

struct FormatChunk {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits_per_sample = 0;
};

FormatChunk parse_format(std::span<const std::uint8_t> body) {
  if (body.size() < 16) {
    throw Error(ErrorCode::kMalformedWav, "fmt chunk shorter than 16 bytes");
  }
  ByteReader r(body);
  FormatChunk fmt;
  fmt.tag = r.read<std::uint16_t>();
  fmt.channels = r.read<std::uint16_t>();
  fmt.sample_rate = r.read<std::uint32_t>();
  r.read<std::uint32_t>();  // byte rate
  fmt.block_align = r.read<std::uint16_t>();
  fmt.bits_per_sample = r.read<std::uint16_t>();
  if (fmt.tag == kFormatExtensible) {
    if (body.size() < 40) {
      throw Error(ErrorCode::kMalformedWav, "truncated WAVE_FORMAT_EXTENSIBLE");
    }
    r.read<std::uint16_t>();  // cbSize
    r.read<std::uint16_t>();  // valid bits
    r.read<std::uint32_t>();  // channel mask
    // The sub-format GUID starts with the plain format tag.
    fmt.tag = r.read<std::uint16_t>();
  }
  return fmt;
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

void append_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  ByteReader r(bytes);
  if (bytes.size() < 12 || !fourcc_equals(r.read<std::uint32_t>(), "RIFF")) {
    throw Error(ErrorCode::kMalformedWav, path.string() + ": missing RIFF tag");
  }
  const auto riff_size = r.read<std::uint32_t>();
  if (!fourcc_equals(r.read<std::uint32_t>(), "WAVE")) {
    throw Error(ErrorCode::kMalformedWav, path.string() + ": not a WAVE file");
  }
  if (riff_size < 4 || riff_size > bytes.size() - 8) {
    throw Error(ErrorCode::kMalformedWav, path.string() + ": bad RIFF size");
  }

  std::optional<FormatChunk> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  while (r.remaining() >= 8) {
    const auto id = r.read<std::uint32_t>();
    const auto size = r.read<std::uint32_t>();
    auto body = r.take(size);
    if (size % 2 == 1 && r.remaining() > 0) r.skip(1);  // pad byte
    if (fourcc_equals(id, "fmt ")) {
      fmt = parse_format(body);
    } else if (fourcc_equals(id, "data")) {
      data = body;
    }
  }
  if (!fmt) throw Error(ErrorCode::kMalformedWav, path.string() + ": no fmt chunk");
  if (!data) throw Error(ErrorCode::kMalformedWav, path.string() + ": no data chunk");

  const bool pcm16 = fmt->tag == kFormatPcm && fmt->bits_per_sample == 16;
  const bool float32 = fmt->tag == kFormatFloat && fmt->bits_per_sample == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                path.string() + ": format tag " + std::to_string(fmt->tag) +
                    " with " + std::to_string(fmt->bits_per_sample) +
                    " bits per sample");
  }
  if (fmt->channels == 0 || fmt->sample_rate == 0) {
    throw Error(ErrorCode::kMalformedWav, path.string() + ": zero channels or rate");
  }
  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  if (fmt->block_align != frame_bytes) {
    throw Error(ErrorCode::kMalformedWav, path.string() + ": inconsistent block align");
  }

  const std::size_t frames = data->size() / frame_bytes;
  AudioBuffer out;
  out.sample_rate = static_cast<int>(fmt->sample_rate);
  out.source_label = path.string();
  out.samples.resize(frames);
  const std::uint8_t* p = data->data();
  const float channels = static_cast<float>(fmt->channels);
  for (std::size_t i = 0; i < frames; ++i) {
    float sum = 0.0f;
    for (std::size_t c = 0; c < fmt->channels; ++c) {
      float v;
      if (pcm16) {
        std::int16_t s;
        std::memcpy(&s, p, 2);
        v = static_cast<float>(s) / 32768.0f;
      } else {
        std::memcpy(&v, p, 4);
      }
      sum += v;
      p += bytes_per_sample;
    }
    out.samples[i] = fmt->channels == 1 ? sum : sum / channels;
  }
  return out;
}

void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavEncoding encoding) {
  if (buffer.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "refusing to write an empty buffer");
  }
  if (buffer.sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(buffer.size() * bytes_per_sample);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  append_tag(out, "RIFF");
  append_u32(out, 36 + data_bytes + (data_bytes % 2));
  append_tag(out, "WAVE");
  append_tag(out, "fmt ");
  append_u32(out, 16);
  append_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  append_u16(out, 1);
  append_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  append_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * bytes_per_sample);
  append_u16(out, bytes_per_sample);
  append_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  append_tag(out, "data");
  append_u32(out, data_bytes);
  for (float s : buffer.samples) {
    if (pcm16) {
      const float scaled = std::nearbyint(s * 32768.0f);
      const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0f, 32767.0f));
      append_u16(out, static_cast<std::uint16_t>(q));
    } else {
      append_u32(out, std::bit_cast<std::uint32_t>(s));
    }
  }
  if (data_bytes % 2 == 1) out.push_back(0);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  }
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
  }
}

}  // namespace rawvae
