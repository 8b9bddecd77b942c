#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pzl/glyphs.hpp"
#include "pzl/image.hpp"
#include "pzl/png.hpp"
#include "pzl/rules.hpp"

namespace pzl {

struct RenderStyle {
  Rgb background{255, 255, 255};
  bool grid_lines = true;
  Rgb grid_line_color{200, 200, 200};
  Rgb glyph_color{0, 0, 0};
  int glyph_scale_permille = 700;  // of the cell side
  std::shared_ptr<const FontLibrary> font;

  static RenderStyle defaults() {
    RenderStyle s;
    s.font = std::make_shared<FontLibrary>(FontLibrary::builtin());
    return s;
  }

  const FontLibrary& font_ref() const {
    if (!font) throw std::runtime_error("render style has no font");
    return *font;
  }
};

// Decoded icon rasters shared across render workers.
class IconCache {
 public:
  explicit IconCache(const SourcePool& icon_pool) {
    for (const auto& e : icon_pool.icons) paths_[e.id] = e.path;
  }

  const ImageRgba& get(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(id);
    if (it == cache_.end()) {
      auto pit = paths_.find(id);
      if (pit == paths_.end()) throw std::runtime_error("unknown icon id: " + id);
      it = cache_.emplace(id, read_png_rgba(pit->second)).first;
    }
    return it->second;
  }

 private:
  std::map<std::string, fs::path> paths_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, ImageRgba> cache_;
};

namespace renderdetail {

inline void draw_grid_lines(Image& img, const GridSpec& grid, const RenderStyle& style) {
  if (!style.grid_lines) return;
  for (int k = 1; k < grid.n; ++k) {
    const int x = grid.cell_rect(0, k).x;
    const int y = grid.cell_rect(k, 0).y;
    for (int i = 0; i < grid.resolution; ++i) {
      img.set(x, i, style.grid_line_color);
      img.set(i, y, style.grid_line_color);
    }
  }
}

inline void blend_mask(Image& img, const GlyphMask& mask, int x0, int y0, Rgb color) {
  for (int y = 0; y < mask.h; ++y) {
    const int dy = y0 + y;
    if (dy < 0 || dy >= img.height()) continue;
    for (int x = 0; x < mask.w; ++x) {
      const int dx = x0 + x;
      if (dx < 0 || dx >= img.width()) continue;
      const int a = mask.at(x, y);
      if (a == 0) continue;
      Rgb d = img.at(dx, dy);
      d.r = static_cast<std::uint8_t>((color.r * a + d.r * (255 - a) + 127) / 255);
      d.g = static_cast<std::uint8_t>((color.g * a + d.g * (255 - a) + 127) / 255);
      d.b = static_cast<std::uint8_t>((color.b * a + d.b * (255 - a) + 127) / 255);
      img.set(dx, dy, d);
    }
  }
}

}  // namespace renderdetail

// Single glyph centered in a cell at glyph_scale of the cell side.
inline void draw_glyph_in_cell(Image& img, const PixelRect& cell, char32_t cp,
                               const RenderStyle& style) {
  const int side = std::min(cell.w, cell.h);
  const int size = std::max(4, side * style.glyph_scale_permille / 1000);
  const GlyphMask& mask = style.font_ref().mask(cp, size);
  renderdetail::blend_mask(img, mask, cell.x + (cell.w - mask.w) / 2, cell.y + (cell.h - mask.h) / 2,
                           style.glyph_color);
}

// Short ASCII string (numbers) centered in a cell; height shrinks when the
// cluster would overflow the cell width.
inline void draw_text_in_cell(Image& img, const PixelRect& cell, const std::string& text,
                              const RenderStyle& style) {
  if (text.empty()) return;
  const int side = std::min(cell.w, cell.h);
  int height = std::max(4, side * style.glyph_scale_permille / 1000);
  const double cluster_w = 1.0 + 0.86 * (static_cast<double>(text.size()) - 1.0);
  const int max_w = cell.w * 92 / 100;
  if (static_cast<int>(height * cluster_w) > max_w)
    height = std::max(4, static_cast<int>(max_w / cluster_w));
  const GlyphMask mask = style.font_ref().text_mask(text, height);
  renderdetail::blend_mask(img, mask, cell.x + (cell.w - mask.w) / 2, cell.y + (cell.h - mask.h) / 2,
                           style.glyph_color);
}

// Icon scaled to the glyph box preserving aspect, optionally tinted
// (monochrome sources only; tint replaces RGB, alpha is preserved).
inline void draw_icon_in_cell(Image& img, const PixelRect& cell, const ImageRgba& icon, int tint,
                              const RenderStyle& style) {
  const int side = std::min(cell.w, cell.h);
  const int box = std::max(4, side * style.glyph_scale_permille / 1000);
  int w = box, h = box;
  if (icon.width() > icon.height())
    h = std::max(1, box * icon.height() / icon.width());
  else
    w = std::max(1, box * icon.width() / icon.height());
  ImageRgba scaled = icon.resample(w, h);
  if (tint >= 0) {
    const Rgb c = tint_palette()[static_cast<std::size_t>(tint) % tint_palette().size()];
    for (int y = 0; y < scaled.height(); ++y)
      for (int x = 0; x < scaled.width(); ++x) {
        const std::uint8_t* p = scaled.pixel(x, y);
        scaled.set(x, y, c.r, c.g, c.b, p[3]);
      }
  }
  alpha_composite(img, scaled, cell.x + (cell.w - w) / 2, cell.y + (cell.h - h) / 2);
}

// --- Grid renders ---------------------------------------------------------------

inline Image render_grid(const IconConnectRule& rule, const IconCache& icons,
                         const RenderStyle& style) {
  Image img(rule.grid.resolution, rule.grid.resolution, style.background);
  renderdetail::draw_grid_lines(img, rule.grid, style);
  const auto cells = rule.cells();
  for (int r = 0; r < rule.grid.n; ++r)
    for (int c = 0; c < rule.grid.n; ++c) {
      const std::string& id = cells[static_cast<std::size_t>(r) * rule.grid.n + c];
      const int tint = id == rule.target_icon ? rule.tint : -1;
      draw_icon_in_cell(img, rule.grid.cell_rect(r, c), icons.get(id), tint, style);
    }
  return img;
}

inline Image render_grid(const HanziMatrixRule& rule, const RenderStyle& style) {
  Image img(rule.grid.resolution, rule.grid.resolution, style.background);
  renderdetail::draw_grid_lines(img, rule.grid, style);
  for (int r = 0; r < rule.grid.n; ++r)
    for (int c = 0; c < rule.grid.n; ++c)
      draw_glyph_in_cell(img, rule.grid.cell_rect(r, c),
                         rule.cells[static_cast<std::size_t>(r) * rule.grid.n + c], style);
  return img;
}

inline Image render_grid(const WordSearchRule& rule, const RenderStyle& style) {
  Image img(rule.grid.resolution, rule.grid.resolution, style.background);
  renderdetail::draw_grid_lines(img, rule.grid, style);
  for (int r = 0; r < rule.grid.n; ++r)
    for (int c = 0; c < rule.grid.n; ++c)
      draw_glyph_in_cell(img, rule.grid.cell_rect(r, c), static_cast<char32_t>(rule.at(r, c)),
                         style);
  return img;
}

inline Image render_grid(const GridSumRule& rule, const RenderStyle& style) {
  Image img(rule.grid.resolution, rule.grid.resolution, style.background);
  renderdetail::draw_grid_lines(img, rule.grid, style);
  for (int r = 0; r < rule.grid.n; ++r)
    for (int c = 0; c < rule.grid.n; ++c)
      draw_text_in_cell(img, rule.grid.cell_rect(r, c),
                        rule.values[static_cast<std::size_t>(r) * rule.grid.n + c].to_string(),
                        style);
  return img;
}

// Target-icon legend strip attached alongside Icon Connect prompts. The
// sample fingerprint keeps legends distinct across datasets.
inline Image render_icon_legend(const ImageRgba& icon, int tint, std::uint64_t dither_seed,
                                const RenderStyle& style) {
  const int side = 96;
  Image img(side, side, style.background);
  PixelRect box{0, 0, side, side};
  draw_icon_in_cell(img, box, icon, tint, style);
  apply_fingerprint_dither(img, dither_seed);
  return img;
}

// --- Image-task renders -----------------------------------------------------------

struct JigsawRender {
  Image incomplete;
  std::array<Image, 4> option_tiles;  // [missing, distractor0..2]
};

inline constexpr Rgb kMissingTileFill{128, 128, 128};

inline JigsawRender split_tiles(const Image& base, const JigsawRule& rule) {
  JigsawRender out;
  const PixelRect& missing = rule.boundaries[static_cast<std::size_t>(rule.missing_index)];
  base.check_rect(missing);
  out.incomplete = base;
  out.incomplete.fill_rect(missing, kMissingTileFill);
  out.option_tiles[0] = base.crop(missing);
  for (int d = 0; d < 3; ++d)
    out.option_tiles[static_cast<std::size_t>(d) + 1] =
        base.crop(rule.boundaries[static_cast<std::size_t>(rule.distractors[static_cast<std::size_t>(d)])]);
  return out;
}

inline Image apply_distortions(const Image& base, const DiffHuntRule& rule) {
  for (std::size_t i = 0; i < rule.regions.size(); ++i)
    for (std::size_t j = i + 1; j < rule.regions.size(); ++j)
      if (rule.regions[i].rect.intersects(rule.regions[j].rect))
        throw std::invalid_argument("difference-hunt regions overlap");
  Image out = base;
  for (const auto& reg : rule.regions) {
    const std::uint64_t key = mix64(rule.noise_seed,
                                    (static_cast<std::uint64_t>(reg.rect.x) << 36) ^
                                        (static_cast<std::uint64_t>(reg.rect.y) << 24) ^
                                        (static_cast<std::uint64_t>(reg.rect.w) << 12) ^
                                        static_cast<std::uint64_t>(reg.rect.h));
    apply_distortion(out, base, reg.rect, reg.kind, reg.intensity_permille, key);
  }
  return out;
}

// Source ingestion: center-crop to square, then box-resample to the target
// resolution. The per-sample fingerprint is applied by the caller, not here.
inline Image load_source_image(const ImageEntry& entry, int resolution) {
  Image img = read_png(entry.path);
  if (img.width() < 2 || img.height() < 2)
    throw std::runtime_error("degenerate source image: " + entry.path.string());
  return img.center_crop_square().resample(resolution, resolution);
}

}  // namespace pzl
