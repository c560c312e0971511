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

#include "drawmpc/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "drawmpc/errors.hpp"

namespace drawmpc {
namespace {

// Next whitespace-separated token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_dimension(const std::string& tok) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw ParseError("pbm: bad dimension '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("pbm: bad dimension '" + tok + "'");
  }
}

}  // namespace

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

BinaryImage read_pbm(std::istream& in) {
  const std::string magic = next_token(in);
  if (magic != "P1" && magic != "P4") throw ParseError("pbm: expected P1 or P4 magic");
  const int w = parse_dimension(next_token(in));
  const int h = parse_dimension(next_token(in));
  BinaryImage img(w, h);
  if (magic == "P1") {
    // Digits may be packed without separators.
    std::size_t filled = 0;
    int c;
    while (filled < img.bits.size() && (c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
      } else if (c == '0' || c == '1') {
        img.bits[filled++] = static_cast<std::uint8_t>(c - '0');
      } else if (!std::isspace(c)) {
        throw ParseError("pbm: unexpected character in P1 raster");
      }
    }
    if (filled != img.bits.size()) throw ParseError("pbm: truncated P1 raster");
  } else {
    const int row_bytes = (w + 7) / 8;
    std::vector<char> row(static_cast<std::size_t>(row_bytes));
    for (int y = 0; y < h; ++y) {
      if (!in.read(row.data(), row_bytes)) throw ParseError("pbm: truncated P4 raster");
      for (int x = 0; x < w; ++x) {
        const auto byte = static_cast<unsigned char>(row[static_cast<std::size_t>(x / 8)]);
        img.set(x, y, (byte >> (7 - x % 8)) & 1u);
      }
    }
  }
  return img;
}

BinaryImage read_pbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_pbm(in);
}

void write_pbm(std::ostream& out, const BinaryImage& img) {
  out << "P1\n" << img.width << ' ' << img.height << '\n';
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (x) out << ' ';
      out << (img.at(x, y) ? '1' : '0');
    }
    out << '\n';
  }
}

BinaryImage skeletonize(const BinaryImage& img) {
  BinaryImage out = img;
  std::vector<std::size_t> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      doomed.clear();
      for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
          if (!out.at(x, y)) continue;
          // P2..P9 clockwise starting north.
          const std::array<int, 8> n = {out.at(x, y - 1),     out.at(x + 1, y - 1), out.at(x + 1, y),
                                        out.at(x + 1, y + 1), out.at(x, y + 1),     out.at(x - 1, y + 1),
                                        out.at(x - 1, y),     out.at(x - 1, y - 1)};
          int b = 0, a = 0;
          for (int k = 0; k < 8; ++k) {
            b += n[k];
            a += (n[k] == 0 && n[(k + 1) % 8] == 1);
          }
          if (b < 2 || b > 6 || a != 1) continue;
          const int p2 = n[0], p4 = n[2], p6 = n[4], p8 = n[6];
          const bool ok = pass == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                                    : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
          if (ok) doomed.push_back(static_cast<std::size_t>(y) * out.width + x);
        }
      }
      for (std::size_t idx : doomed) out.bits[idx] = 0;
      changed = changed || !doomed.empty();
    }
  }
  return out;
}

int connected_components(const BinaryImage& img) {
  std::vector<std::uint8_t> seen(img.bits.size(), 0);
  std::vector<std::pair<int, int>> stack;
  int components = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * img.width + x;
      if (!img.bits[idx] || seen[idx]) continue;
      ++components;
      seen[idx] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (!img.at(nx, ny)) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * img.width + nx;
            if (!seen[nidx]) {
              seen[nidx] = 1;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
    }
  }
  return components;
}

}  // namespace drawmpc
