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
#include <cmath>
#include <numbers>
#include <sstream>

#include "rawvae/container.hpp"
#include "rawvae/error.hpp"
#include "rawvae/latent.hpp"

namespace rawvae {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = text.find(sep);
    out.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return out;
}

double number(std::string_view text, std::string_view context) {
  try {
    return parse_double(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                "curve spec '" + std::string(context) + "': bad number '" +
                    std::string(text) + "'");
  }
}

struct CurveEvaluator {
  std::size_t length;

  std::vector<double> operator()(const ConstantCurve& c) const {
    return std::vector<double>(length, c.value);
  }
  std::vector<double> operator()(const LinearCurve& c) const {
    std::vector<double> v(length);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = length == 1 ? 0.0 : static_cast<double>(i) / (length - 1);
      v[i] = c.from + (c.to - c.from) * t;
    }
    return v;
  }
  std::vector<double> operator()(const SineCurve& c) const {
    if (c.period == 0.0) throw Error(ErrorCode::kInvalidArgument, "sine period is zero");
    std::vector<double> v(length);
    for (std::size_t i = 0; i < length; ++i) {
      v[i] = c.offset + c.amplitude * std::sin(2.0 * std::numbers::pi *
                                                    static_cast<double>(i) / c.period +
                                                c.phase);
    }
    return v;
  }
  std::vector<double> operator()(const BreakpointCurve& c) const {
    if (c.points.empty()) throw Error(ErrorCode::kEmptySpec, "no breakpoints");
    auto pts = c.points;
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> v(length);
    for (std::size_t i = 0; i < length; ++i) {
      const double x = static_cast<double>(i);
      if (x <= pts.front().first) {
        v[i] = pts.front().second;
      } else if (x >= pts.back().first) {
        v[i] = pts.back().second;
      } else {
        const auto hi = std::upper_bound(
            pts.begin(), pts.end(), x,
            [](double value, const auto& p) { return value < p.first; });
        const auto lo = hi - 1;
        const double t = (x - lo->first) / (hi->first - lo->first);
        v[i] = lo->second + (hi->second - lo->second) * t;
      }
    }
    return v;
  }
};

}  // namespace

CurveSpec parse_curve_spec(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kEmptySpec, "empty curve spec");
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  const auto rest = colon == std::string_view::npos ? std::string_view{}
                                                    : text.substr(colon + 1);
  if (rest.empty()) {
    throw Error(ErrorCode::kEmptySpec, "curve spec '" + std::string(text) + "' has no parameters");
  }
  if (kind == "const") return ConstantCurve{number(rest, text)};
  if (kind == "lin") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) {
      throw Error(ErrorCode::kInvalidArgument, "expected lin:<from>:<to>");
    }
    return LinearCurve{number(parts[0], text), number(parts[1], text)};
  }
  if (kind == "sine") {
    SineCurve c;
    for (auto kv : split(rest, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kInvalidArgument, "expected key=value in sine spec");
      }
      const auto key = kv.substr(0, eq);
      const double value = number(kv.substr(eq + 1), text);
      if (key == "p") c.period = value;
      else if (key == "ph") c.phase = value;
      else if (key == "a") c.amplitude = value;
      else if (key == "o") c.offset = value;
      else throw Error(ErrorCode::kInvalidArgument, "unknown sine key '" + std::string(key) + "'");
    }
    return c;
  }
  if (kind == "bp") {
    BreakpointCurve c;
    for (auto kv : split(rest, ',')) {
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kInvalidArgument, "expected index=value in breakpoint spec");
      }
      c.points.emplace_back(number(kv.substr(0, eq), text), number(kv.substr(eq + 1), text));
    }
    if (c.points.empty()) throw Error(ErrorCode::kEmptySpec, "no breakpoints");
    return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown curve kind '" + std::string(kind) + "'");
}

std::string to_string(const CurveSpec& spec) {
  struct Printer {
    std::string operator()(const ConstantCurve& c) const {
      return "const:" + format_double(c.value);
    }
    std::string operator()(const LinearCurve& c) const {
      return "lin:" + format_double(c.from) + ":" + format_double(c.to);
    }
    std::string operator()(const SineCurve& c) const {
      return "sine:p=" + format_double(c.period) + ",ph=" + format_double(c.phase) +
             ",a=" + format_double(c.amplitude) + ",o=" + format_double(c.offset);
    }
    std::string operator()(const BreakpointCurve& c) const {
      std::string out = "bp:";
      for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (i) out += ',';
        out += format_double(c.points[i].first) + "=" + format_double(c.points[i].second);
      }
      return out;
    }
  };
  return std::visit(Printer{}, spec);
}

InterpolationCurve::InterpolationCurve(std::vector<double> values)
    : values_(std::move(values)) {
  for (double& v : values_) {
    if (std::isnan(v)) throw Error(ErrorCode::kInvalidArgument, "NaN curve value");
    v = std::clamp(v, -1.0, 1.0);
  }
}

InterpolationCurve generate_curve(const CurveSpec& spec, std::size_t length) {
  if (length == 0) throw Error(ErrorCode::kInvalidArgument, "curve length must be >= 1");
  return InterpolationCurve(std::visit(CurveEvaluator{length}, spec));
}

}  // namespace rawvae
