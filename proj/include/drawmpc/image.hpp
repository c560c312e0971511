/*
 Copyright 2026 The drawmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace drawmpc {

// Row-major binary mask, 1 = foreground (ink).
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height && bits[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, bool on) { bits[static_cast<std::size_t>(y) * width + x] = on ? 1 : 0; }
  std::size_t count() const;

  bool operator==(const BinaryImage&) const = default;
};

// Reads P1 (ASCII) and P4 (packed binary) bitmaps; throws ParseError.
BinaryImage read_pbm(std::istream& in);
BinaryImage read_pbm(const std::filesystem::path& path);
void write_pbm(std::ostream& out, const BinaryImage& img);  // P1

// Zhang-Suen two-subiteration thinning, run until no pixel changes.
BinaryImage skeletonize(const BinaryImage& img);

// Number of 8-connected foreground components.
int connected_components(const BinaryImage& img);

}  // namespace drawmpc
