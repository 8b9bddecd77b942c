#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pzl/rng.hpp"
#include "pzl/unicode.hpp"

namespace pzl {

// Self-contained stroke-based typeface. Glyphs are polyline strokes on a
// 100x100 design grid (y grows downward) rasterized with deterministic
// grayscale coverage, so rendering is byte-stable with no external font
// dependency. Latin capitals, digits and numeric signs are built in; CJK
// codepoints get procedurally synthesized stroke patterns (stable per
// codepoint, pairwise distinct in practice). A stroke-font file can override
// or extend the built-in set.

struct StrokePoint {
  int x = 0, y = 0;
};

struct Stroke {
  int width = 11;  // on the 100-unit design grid
  std::vector<StrokePoint> points;
};

using GlyphStrokes = std::vector<Stroke>;

struct GlyphMask {
  int w = 0, h = 0;
  std::vector<std::uint8_t> coverage;

  std::uint8_t at(int x, int y) const { return coverage[static_cast<std::size_t>(y) * w + x]; }
};

class MissingGlyphError : public std::runtime_error {
 public:
  explicit MissingGlyphError(char32_t cp)
      : std::runtime_error(format(cp)), codepoint(cp) {}
  char32_t codepoint;

 private:
  static std::string format(char32_t cp) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "missing glyph U+%04X", static_cast<unsigned>(cp));
    return buf;
  }
};

namespace glyphdata {

inline GlyphStrokes make(std::initializer_list<Stroke> strokes) { return GlyphStrokes(strokes); }

inline const std::map<char32_t, GlyphStrokes>& builtin_table() {
  static const std::map<char32_t, GlyphStrokes> table = {
      {U'A', {{11, {{10, 100}, {50, 2}, {90, 100}}}, {11, {{27, 62}, {73, 62}}}}},
      {U'B',
       {{11, {{16, 2}, {16, 98}}},
        {11, {{16, 2}, {58, 2}, {74, 12}, {74, 38}, {58, 48}, {16, 48}}},
        {11, {{16, 48}, {62, 48}, {80, 60}, {80, 86}, {62, 98}, {16, 98}}}}},
      {U'C', {{11, {{84, 16}, {64, 4}, {36, 4}, {16, 20}, {16, 80}, {36, 96}, {64, 96}, {84, 84}}}}},
      {U'D',
       {{11, {{16, 2}, {16, 98}}},
        {11, {{16, 2}, {52, 2}, {78, 18}, {84, 50}, {78, 82}, {52, 98}, {16, 98}}}}},
      {U'E', {{11, {{82, 2}, {16, 2}, {16, 98}, {82, 98}}}, {11, {{16, 50}, {66, 50}}}}},
      {U'F', {{11, {{82, 2}, {16, 2}, {16, 98}}}, {11, {{16, 50}, {66, 50}}}}},
      {U'G',
       {{11,
         {{84, 16}, {62, 4}, {36, 4}, {16, 20}, {16, 80}, {36, 96}, {62, 96}, {84, 82}, {84, 56}, {56, 56}}}}},
      {U'H', {{11, {{16, 2}, {16, 98}}}, {11, {{84, 2}, {84, 98}}}, {11, {{16, 50}, {84, 50}}}}},
      {U'I', {{11, {{32, 2}, {68, 2}}}, {11, {{50, 2}, {50, 98}}}, {11, {{32, 98}, {68, 98}}}}},
      {U'J', {{11, {{72, 2}, {72, 78}, {58, 96}, {34, 96}, {20, 82}}}}},
      {U'K', {{11, {{16, 2}, {16, 98}}}, {11, {{82, 2}, {16, 52}}}, {11, {{16, 52}, {82, 98}}}}},
      {U'L', {{11, {{16, 2}, {16, 98}, {80, 98}}}}},
      {U'M', {{11, {{12, 98}, {12, 2}, {50, 58}, {88, 2}, {88, 98}}}}},
      {U'N', {{11, {{16, 98}, {16, 2}, {84, 98}, {84, 2}}}}},
      {U'O',
       {{11, {{34, 4}, {66, 4}, {84, 22}, {84, 78}, {66, 96}, {34, 96}, {16, 78}, {16, 22}, {34, 4}}}}},
      {U'P', {{11, {{16, 98}, {16, 2}, {60, 2}, {80, 14}, {80, 40}, {60, 52}, {16, 52}}}}},
      {U'Q',
       {{11, {{34, 4}, {66, 4}, {84, 22}, {84, 78}, {66, 96}, {34, 96}, {16, 78}, {16, 22}, {34, 4}}},
        {11, {{58, 68}, {88, 98}}}}},
      {U'R',
       {{11, {{16, 98}, {16, 2}, {60, 2}, {80, 14}, {80, 40}, {60, 52}, {16, 52}}},
        {11, {{46, 52}, {84, 98}}}}},
      {U'S',
       {{11,
         {{82, 14}, {62, 4}, {36, 4}, {18, 16}, {18, 36}, {34, 48}, {66, 52}, {82, 64}, {82, 84}, {64, 96}, {36, 96}, {16, 86}}}}},
      {U'T', {{11, {{10, 2}, {90, 2}}}, {11, {{50, 2}, {50, 98}}}}},
      {U'U', {{11, {{16, 2}, {16, 78}, {34, 96}, {66, 96}, {84, 78}, {84, 2}}}}},
      {U'V', {{11, {{12, 2}, {50, 98}, {88, 2}}}}},
      {U'W', {{11, {{8, 2}, {27, 98}, {50, 40}, {73, 98}, {92, 2}}}}},
      {U'X', {{11, {{14, 2}, {86, 98}}}, {11, {{86, 2}, {14, 98}}}}},
      {U'Y', {{11, {{12, 2}, {50, 47}, {88, 2}}}, {11, {{50, 47}, {50, 98}}}}},
      {U'Z', {{11, {{14, 2}, {86, 2}, {14, 98}, {86, 98}}}}},
      {U'0',
       {{11, {{36, 4}, {64, 4}, {82, 24}, {82, 76}, {64, 96}, {36, 96}, {18, 76}, {18, 24}, {36, 4}}}}},
      {U'1', {{11, {{32, 20}, {54, 4}, {54, 98}}}, {11, {{32, 98}, {76, 98}}}}},
      {U'2', {{11, {{20, 16}, {36, 4}, {64, 4}, {80, 16}, {80, 36}, {16, 98}, {84, 98}}}}},
      {U'3',
       {{11, {{20, 12}, {38, 4}, {62, 4}, {78, 14}, {78, 36}, {60, 46}, {42, 46}}},
        {11, {{60, 46}, {80, 58}, {80, 84}, {62, 96}, {38, 96}, {18, 86}}}}},
      {U'4', {{11, {{68, 98}, {68, 4}, {14, 66}, {88, 66}}}}},
      {U'5',
       {{11,
         {{78, 4}, {24, 4}, {20, 46}, {56, 40}, {76, 52}, {78, 80}, {62, 96}, {36, 96}, {18, 86}}}}},
      {U'6',
       {{11,
         {{76, 12}, {56, 4}, {34, 4}, {18, 22}, {18, 78}, {34, 96}, {62, 96}, {80, 82}, {80, 58}, {60, 46}, {20, 52}}}}},
      {U'7', {{11, {{16, 4}, {84, 4}, {44, 98}}}}},
      {U'8',
       {{11,
         {{50, 4}, {68, 4}, {80, 14}, {80, 36}, {68, 46}, {32, 46}, {20, 36}, {20, 14}, {32, 4}, {50, 4}}},
        {11,
         {{50, 46}, {70, 46}, {82, 58}, {82, 84}, {70, 96}, {30, 96}, {18, 84}, {18, 58}, {30, 46}, {50, 46}}}}},
      {U'9',
       {{11,
         {{24, 88}, {44, 96}, {66, 96}, {82, 78}, {82, 22}, {66, 4}, {38, 4}, {20, 18}, {20, 42}, {40, 54}, {80, 48}}}}},
      {U'-', {{11, {{26, 50}, {74, 50}}}}},
      {U'+', {{11, {{50, 26}, {50, 74}}}, {11, {{26, 50}, {74, 50}}}}},
      {U'.', {{18, {{50, 88}, {50, 94}}}}},
  };
  return table;
}

inline bool is_cjk(char32_t cp) {
  return (cp >= 0x2E80 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2A6DF);
}

// Procedural stroke pattern for a CJK codepoint: a lattice of horizontal,
// vertical and diagonal strokes, optionally boxed, derived from the
// codepoint alone.
inline GlyphStrokes synthesize_cjk(char32_t cp) {
  GlyphStrokes glyph;
  std::uint64_t h = mix64(0x68616e7aULL, static_cast<std::uint64_t>(cp));
  auto draw_bits = [&]() { return splitmix64(h); };

  const int width = 8;
  const std::uint64_t b0 = draw_bits();
  if ((b0 & 3) == 0) {
    glyph.push_back({width, {{14, 14}, {86, 14}, {86, 86}, {14, 86}, {14, 14}}});
  }
  const int strokes = 3 + static_cast<int>((b0 >> 2) % 5);
  for (int i = 0; i < strokes; ++i) {
    const std::uint64_t hi = draw_bits();
    const int kind = static_cast<int>(hi % 4);
    const int a = 16 + static_cast<int>((hi >> 8) % 69);   // principal offset
    const int lo = 14 + static_cast<int>((hi >> 20) % 22);
    const int hi2 = 86 - static_cast<int>((hi >> 28) % 22);
    switch (kind) {
      case 0:  // horizontal
        glyph.push_back({width, {{lo, a}, {hi2, a}}});
        break;
      case 1:  // vertical
        glyph.push_back({width, {{a, lo}, {a, hi2}}});
        break;
      case 2:  // falling diagonal segment
        glyph.push_back({width, {{lo, std::min(a, 70)}, {hi2, std::min(a, 70) + 22}}});
        break;
      default:  // bent stroke
        glyph.push_back({width, {{lo, a}, {hi2, a}, {hi2, std::min(hi2 + 18, 92)}}});
        break;
    }
  }
  return glyph;
}

}  // namespace glyphdata

inline GlyphMask rasterize_strokes(const GlyphStrokes& strokes, int size_px) {
  if (size_px <= 0) throw std::invalid_argument("glyph size must be positive");
  GlyphMask mask;
  mask.w = mask.h = size_px;
  mask.coverage.assign(static_cast<std::size_t>(size_px) * size_px, 0);
  const double scale = size_px / 100.0;
  for (const Stroke& stroke : strokes) {
    const double half = std::max(0.6, stroke.width * scale * 0.5);
    for (std::size_t i = 0; i + 1 < stroke.points.size(); ++i) {
      const double ax = stroke.points[i].x * scale, ay = stroke.points[i].y * scale;
      const double bx = stroke.points[i + 1].x * scale, by = stroke.points[i + 1].y * scale;
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - half - 1)));
      const int x1 = std::min(size_px - 1, static_cast<int>(std::ceil(std::max(ax, bx) + half + 1)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - half - 1)));
      const int y1 = std::min(size_px - 1, static_cast<int>(std::ceil(std::max(ay, by) + half + 1)));
      const double dx = bx - ax, dy = by - ay;
      const double len2 = dx * dx + dy * dy;
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          const double qx = ax + t * dx, qy = ay + t * dy;
          const double d = std::hypot(px - qx, py - qy);
          const double cov = std::clamp(half + 0.5 - d, 0.0, 1.0);
          const auto v = static_cast<std::uint8_t>(std::lround(cov * 255.0));
          auto& cell = mask.coverage[static_cast<std::size_t>(y) * size_px + x];
          cell = std::max(cell, v);
        }
      }
    }
  }
  return mask;
}

class FontLibrary {
 public:
  // Built-in glyphs plus procedural CJK synthesis; covers everything the
  // shipped pools need.
  static FontLibrary builtin() { return FontLibrary(true); }

  // Stroke-font file layered over the built-in Latin set. Synthesis is
  // disabled: codepoints absent from both sources are reported as missing.
  static FontLibrary from_file(const std::filesystem::path& path) {
    FontLibrary lib(false);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open font file: " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "strokefont v1")
      throw std::runtime_error("bad font file header in " + path.string());
    char32_t current = 0;
    bool have_glyph = false;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream iss(line);
      std::string tag;
      iss >> tag;
      if (tag == "glyph") {
        std::string hex;
        iss >> hex;
        current = static_cast<char32_t>(std::stoul(hex, nullptr, 16));
        lib.file_glyphs_[current];  // allow empty glyph definitions to be replaced below
        have_glyph = true;
      } else if (tag == "s") {
        if (!have_glyph)
          throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                   ": stroke before any glyph");
        Stroke s;
        iss >> s.width;
        std::string pt;
        while (iss >> pt) {
          const auto comma = pt.find(',');
          if (comma == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed point '" + pt + "'");
          s.points.push_back({std::stoi(pt.substr(0, comma)), std::stoi(pt.substr(comma + 1))});
        }
        if (s.points.size() < 2)
          throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                   ": stroke needs at least two points");
        lib.file_glyphs_[current].push_back(std::move(s));
      } else {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": unknown directive '" + tag + "'");
      }
    }
    return lib;
  }

  bool covers(char32_t cp) const {
    if (file_glyphs_.count(cp)) return true;
    if (glyphdata::builtin_table().count(cp)) return true;
    return synthesize_cjk_ && glyphdata::is_cjk(cp);
  }

  GlyphStrokes strokes_for(char32_t cp) const {
    if (auto it = file_glyphs_.find(cp); it != file_glyphs_.end()) return it->second;
    const auto& table = glyphdata::builtin_table();
    if (auto it = table.find(cp); it != table.end()) return it->second;
    if (synthesize_cjk_ && glyphdata::is_cjk(cp)) return glyphdata::synthesize_cjk(cp);
    throw MissingGlyphError(cp);
  }

  // Cached rasterization; safe to share across render workers.
  const GlyphMask& mask(char32_t cp, int size_px) const {
    const std::pair<char32_t, int> key{cp, size_px};
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->masks.find(key);
    if (it == cache_->masks.end())
      it = cache_->masks.emplace(key, rasterize_strokes(strokes_for(cp), size_px)).first;
    return it->second;
  }

  // Uppercase ASCII string laid out on a fixed advance; used for numeric
  // cell content.
  GlyphMask text_mask(std::string_view text, int height_px) const {
    if (text.empty()) throw std::invalid_argument("empty text cluster");
    const int advance = std::max(1, static_cast<int>(std::lround(height_px * 0.86)));
    GlyphMask out;
    out.h = height_px;
    out.w = height_px + advance * static_cast<int>(text.size() - 1);
    out.coverage.assign(static_cast<std::size_t>(out.w) * out.h, 0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      const GlyphMask& g = mask(static_cast<char32_t>(text[i]), height_px);
      const int xoff = advance * static_cast<int>(i);
      for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x) {
          auto& cell = out.coverage[static_cast<std::size_t>(y) * out.w + x + xoff];
          cell = std::max(cell, g.at(x, y));
        }
    }
    return out;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write font file: " + path.string());
    out << "strokefont v1\n";
    for (const auto& [cp, strokes] : file_glyphs_) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
      out << "glyph " << buf << "\n";
      for (const Stroke& s : strokes) {
        out << "s " << s.width;
        for (const auto& p : s.points) out << " " << p.x << "," << p.y;
        out << "\n";
      }
    }
  }

  void add_glyph(char32_t cp, GlyphStrokes strokes) { file_glyphs_[cp] = std::move(strokes); }

 private:
  explicit FontLibrary(bool synthesize) : synthesize_cjk_(synthesize) {}

  struct MaskCache {
    std::mutex mutex;
    std::map<std::pair<char32_t, int>, GlyphMask> masks;
  };

  std::map<char32_t, GlyphStrokes> file_glyphs_;
  bool synthesize_cjk_ = true;
  std::shared_ptr<MaskCache> cache_ = std::make_shared<MaskCache>();
};

}  // namespace pzl
