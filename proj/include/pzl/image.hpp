#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "pzl/rng.hpp"
#include "pzl/types.hpp"

namespace pzl {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb& o) const { return r == o.r && g == o.g && b == o.b; }
};

// 8-bit RGB raster with deterministic integer/fixed-point operations.
// All pipelines render through this type; byte-stable output is part of the
// contract, so no operation may depend on platform float behavior beyond
// IEEE double arithmetic.
class Image {
 public:
  Image() = default;
  Image(int w, int h, Rgb fill = {255, 255, 255}) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("degenerate image dimensions");
    for (std::size_t i = 0; i < px_.size(); i += 3) {
      px_[i] = fill.r;
      px_[i + 1] = fill.g;
      px_[i + 2] = fill.b;
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }
  bool empty() const { return px_.empty(); }

  const std::uint8_t* data() const { return px_.data(); }
  std::uint8_t* data() { return px_.data(); }
  std::size_t size_bytes() const { return px_.size(); }

  Rgb at(int x, int y) const {
    const std::size_t i = idx(x, y);
    return {px_[i], px_[i + 1], px_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = idx(x, y);
    px_[i] = c.r;
    px_[i + 1] = c.g;
    px_[i + 2] = c.b;
  }

  bool operator==(const Image& o) const { return w_ == o.w_ && h_ == o.h_ && px_ == o.px_; }

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a64_bytes(&w_, sizeof(w_));
    h = fnv1a64_bytes(&h_, sizeof(h_), h);
    return fnv1a64_bytes(px_.data(), px_.size(), h);
  }

  void fill_rect(const PixelRect& r, Rgb c) {
    check_rect(r);
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) set(x, y, c);
  }

  Image crop(const PixelRect& r) const {
    check_rect(r);
    Image out(r.w, r.h);
    for (int y = 0; y < r.h; ++y)
      std::memcpy(out.px_.data() + out.idx(0, y), px_.data() + idx(r.x, r.y + y),
                  static_cast<std::size_t>(r.w) * 3);
    return out;
  }

  void paste(const Image& src, int x, int y) {
    PixelRect r{x, y, src.w_, src.h_};
    check_rect(r);
    for (int row = 0; row < src.h_; ++row)
      std::memcpy(px_.data() + idx(x, y + row), src.px_.data() + src.idx(0, row),
                  static_cast<std::size_t>(src.w_) * 3);
  }

  // Area-averaging resample (box filter) in 16.16 fixed point. Exact for
  // integer downscale factors, deterministic everywhere.
  Image resample(int nw, int nh) const {
    if (nw <= 0 || nh <= 0) throw std::invalid_argument("degenerate resample target");
    if (nw == w_ && nh == h_) return *this;
    Image out(nw, nh);
    for (int oy = 0; oy < nh; ++oy) {
      const std::int64_t y0 = static_cast<std::int64_t>(oy) * h_;      // scaled by nh
      const std::int64_t y1 = static_cast<std::int64_t>(oy + 1) * h_;  // scaled by nh
      for (int ox = 0; ox < nw; ++ox) {
        const std::int64_t x0 = static_cast<std::int64_t>(ox) * w_;
        const std::int64_t x1 = static_cast<std::int64_t>(ox + 1) * w_;
        std::int64_t acc[3] = {0, 0, 0};
        std::int64_t total = 0;
        for (std::int64_t sy = y0 / nh; sy * nh < y1; ++sy) {
          const std::int64_t cy0 = std::max<std::int64_t>(y0, sy * nh);
          const std::int64_t cy1 = std::min<std::int64_t>(y1, (sy + 1) * nh);
          const std::int64_t wy = cy1 - cy0;
          if (wy <= 0 || sy >= h_) continue;
          for (std::int64_t sx = x0 / nw; sx * nw < x1; ++sx) {
            const std::int64_t cx0 = std::max<std::int64_t>(x0, sx * nw);
            const std::int64_t cx1 = std::min<std::int64_t>(x1, (sx + 1) * nw);
            const std::int64_t wx = cx1 - cx0;
            if (wx <= 0 || sx >= w_) continue;
            const std::int64_t wgt = wx * wy;
            const std::size_t i = idx(static_cast<int>(sx), static_cast<int>(sy));
            acc[0] += wgt * px_[i];
            acc[1] += wgt * px_[i + 1];
            acc[2] += wgt * px_[i + 2];
            total += wgt;
          }
        }
        Rgb c{static_cast<std::uint8_t>((acc[0] + total / 2) / total),
              static_cast<std::uint8_t>((acc[1] + total / 2) / total),
              static_cast<std::uint8_t>((acc[2] + total / 2) / total)};
        out.set(ox, oy, c);
      }
    }
    return out;
  }

  Image center_crop_square() const {
    const int side = std::min(w_, h_);
    return crop({(w_ - side) / 2, (h_ - side) / 2, side, side});
  }

  void check_rect(const PixelRect& r) const {
    if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 || r.x + r.w > w_ || r.y + r.h > h_)
      throw std::out_of_range("rectangle outside image bounds");
  }

  std::size_t idx(int x, int y) const {
    return (static_cast<std::size_t>(y) * w_ + x) * 3;
  }

 private:
  int w_ = 0, h_ = 0;
  std::vector<std::uint8_t> px_;
};

// RGBA raster used only for icon assets (alpha compositing onto cells).
class ImageRgba {
 public:
  ImageRgba() = default;
  ImageRgba(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 4, 0) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("degenerate image dimensions");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  const std::uint8_t* data() const { return px_.data(); }
  std::uint8_t* data() { return px_.data(); }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a) {
    const std::size_t i = idx(x, y);
    px_[i] = r;
    px_[i + 1] = g;
    px_[i + 2] = b;
    px_[i + 3] = a;
  }
  const std::uint8_t* pixel(int x, int y) const { return px_.data() + idx(x, y); }

  ImageRgba resample(int nw, int nh) const {
    if (nw <= 0 || nh <= 0) throw std::invalid_argument("degenerate resample target");
    if (nw == w_ && nh == h_) return *this;
    ImageRgba out(nw, nh);
    for (int oy = 0; oy < nh; ++oy) {
      for (int ox = 0; ox < nw; ++ox) {
        const std::int64_t y0 = static_cast<std::int64_t>(oy) * h_;
        const std::int64_t y1 = static_cast<std::int64_t>(oy + 1) * h_;
        const std::int64_t x0 = static_cast<std::int64_t>(ox) * w_;
        const std::int64_t x1 = static_cast<std::int64_t>(ox + 1) * w_;
        std::int64_t acc[4] = {0, 0, 0, 0};
        std::int64_t total = 0;
        for (std::int64_t sy = y0 / nh; sy * nh < y1 && sy < h_; ++sy) {
          const std::int64_t wy = std::min<std::int64_t>(y1, (sy + 1) * nh) - std::max<std::int64_t>(y0, sy * nh);
          if (wy <= 0) continue;
          for (std::int64_t sx = x0 / nw; sx * nw < x1 && sx < w_; ++sx) {
            const std::int64_t wx = std::min<std::int64_t>(x1, (sx + 1) * nw) - std::max<std::int64_t>(x0, sx * nw);
            if (wx <= 0) continue;
            const std::int64_t wgt = wx * wy;
            const std::uint8_t* p = px_.data() + idx(static_cast<int>(sx), static_cast<int>(sy));
            // premultiplied accumulation so transparent texels do not bleed color
            acc[0] += wgt * p[0] * p[3];
            acc[1] += wgt * p[1] * p[3];
            acc[2] += wgt * p[2] * p[3];
            acc[3] += wgt * p[3];
            total += wgt;
          }
        }
        const std::int64_t a = (acc[3] + total / 2) / total;
        std::uint8_t rgba[4] = {0, 0, 0, static_cast<std::uint8_t>(a)};
        if (acc[3] > 0)
          for (int c = 0; c < 3; ++c)
            rgba[c] = static_cast<std::uint8_t>(std::min<std::int64_t>(255, (acc[c] + acc[3] / 2) / acc[3]));
        out.set(ox, oy, rgba[0], rgba[1], rgba[2], rgba[3]);
      }
    }
    return out;
  }

  std::size_t idx(int x, int y) const { return (static_cast<std::size_t>(y) * w_ + x) * 4; }

 private:
  int w_ = 0, h_ = 0;
  std::vector<std::uint8_t> px_;
};

inline void alpha_composite(Image& dst, const ImageRgba& src, int x, int y) {
  for (int sy = 0; sy < src.height(); ++sy) {
    const int dy = y + sy;
    if (dy < 0 || dy >= dst.height()) continue;
    for (int sx = 0; sx < src.width(); ++sx) {
      const int dx = x + sx;
      if (dx < 0 || dx >= dst.width()) continue;
      const std::uint8_t* p = src.pixel(sx, sy);
      const int a = p[3];
      if (a == 0) continue;
      Rgb d = dst.at(dx, dy);
      d.r = static_cast<std::uint8_t>((p[0] * a + d.r * (255 - a) + 127) / 255);
      d.g = static_cast<std::uint8_t>((p[1] * a + d.g * (255 - a) + 127) / 255);
      d.b = static_cast<std::uint8_t>((p[2] * a + d.b * (255 - a) + 127) / 255);
      dst.set(dx, dy, d);
    }
  }
}

// --- Difference metrics -----------------------------------------------------

inline double mean_abs_diff(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument("mean_abs_diff: size mismatch");
  std::int64_t acc = 0;
  const std::size_t n = a.size_bytes();
  const std::uint8_t* pa = a.data();
  const std::uint8_t* pb = b.data();
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(int(pa[i]) - int(pb[i]));
  return static_cast<double>(acc) / static_cast<double>(n);
}

inline double mean_abs_diff_region(const Image& a, const Image& b, const PixelRect& r) {
  a.check_rect(r);
  b.check_rect(r);
  std::int64_t acc = 0;
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x) {
      const Rgb ca = a.at(x, y), cb = b.at(x, y);
      acc += std::abs(int(ca.r) - int(cb.r)) + std::abs(int(ca.g) - int(cb.g)) +
             std::abs(int(ca.b) - int(cb.b));
    }
  return static_cast<double>(acc) / (static_cast<double>(r.area()) * 3.0);
}

// Boolean mask of pixels that differ between two same-sized images.
inline std::vector<std::uint8_t> diff_mask(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument("diff_mask: size mismatch");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(a.width()) * a.height(), 0);
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (!(a.at(x, y) == b.at(x, y))) mask[static_cast<std::size_t>(y) * a.width() + x] = 1;
  return mask;
}

// 4-connected component count over a nonzero mask.
inline int count_components(const std::vector<std::uint8_t>& mask, int w, int h) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  int components = 0;
  for (int start = 0; start < w * h; ++start) {
    if (!mask[start] || seen[start]) continue;
    ++components;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      const int cx = cur % w, cy = cur / w;
      const int nbr[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
      for (auto& nb : nbr) {
        if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
        const int ni = nb[1] * w + nb[0];
        if (mask[ni] && !seen[ni]) {
          seen[ni] = 1;
          stack.push_back(ni);
        }
      }
    }
  }
  return components;
}

// --- Distortion primitives ---------------------------------------------------
// Each writes only inside `region`, reading neighbor pixels from the
// unmodified source image. Intensity is in per-mille (1000 = strongest).

enum class DistortionKind { Underexposure, Overexposure, Noise, Blur, ColorInversion };

inline std::string_view distortion_slug(DistortionKind k) {
  switch (k) {
    case DistortionKind::Underexposure: return "underexposure";
    case DistortionKind::Overexposure: return "overexposure";
    case DistortionKind::Noise: return "noise";
    case DistortionKind::Blur: return "blur";
    case DistortionKind::ColorInversion: return "color_inversion";
  }
  throw std::logic_error("bad distortion kind");
}

inline DistortionKind distortion_from_slug(std::string_view s) {
  if (s == "underexposure") return DistortionKind::Underexposure;
  if (s == "overexposure") return DistortionKind::Overexposure;
  if (s == "noise") return DistortionKind::Noise;
  if (s == "blur") return DistortionKind::Blur;
  if (s == "color_inversion") return DistortionKind::ColorInversion;
  throw std::invalid_argument("unknown distortion kind: " + std::string(s));
}

inline int blur_radius_for(int intensity_permille) {
  const int r = static_cast<int>(std::lround(4.0 * intensity_permille / 1000.0));
  return std::max(1, r);
}

// noise_seed keys the noise pattern so re-rendering a recorded region is
// byte-stable.
inline void apply_distortion(Image& dst, const Image& src, const PixelRect& region,
                             DistortionKind kind, int intensity_permille,
                             std::uint64_t noise_seed) {
  src.check_rect(region);
  dst.check_rect(region);
  const double intensity = intensity_permille / 1000.0;
  switch (kind) {
    case DistortionKind::Underexposure: {
      const double f = 1.0 - 0.5 * intensity;
      for (int y = region.y; y < region.y + region.h; ++y)
        for (int x = region.x; x < region.x + region.w; ++x) {
          const Rgb c = src.at(x, y);
          dst.set(x, y,
                  {static_cast<std::uint8_t>(std::lround(c.r * f)),
                   static_cast<std::uint8_t>(std::lround(c.g * f)),
                   static_cast<std::uint8_t>(std::lround(c.b * f))});
        }
      break;
    }
    case DistortionKind::Overexposure: {
      const double f = 0.5 * intensity;
      for (int y = region.y; y < region.y + region.h; ++y)
        for (int x = region.x; x < region.x + region.w; ++x) {
          const Rgb c = src.at(x, y);
          auto up = [&](std::uint8_t v) {
            return static_cast<std::uint8_t>(std::lround(v + (255.0 - v) * f));
          };
          dst.set(x, y, {up(c.r), up(c.g), up(c.b)});
        }
      break;
    }
    case DistortionKind::Noise: {
      const int amp = static_cast<int>(std::lround(40.0 * intensity));
      for (int y = region.y; y < region.y + region.h; ++y)
        for (int x = region.x; x < region.x + region.w; ++x) {
          std::uint64_t h = mix64(noise_seed, (static_cast<std::uint64_t>(y) << 24) ^ static_cast<std::uint64_t>(x));
          const Rgb c = src.at(x, y);
          auto jitter = [&](std::uint8_t v, int shift) {
            const int d = amp == 0 ? 0
                                   : static_cast<int>((h >> shift) % (2 * amp + 1)) - amp;
            return static_cast<std::uint8_t>(std::clamp(int(v) + d, 0, 255));
          };
          dst.set(x, y, {jitter(c.r, 0), jitter(c.g, 21), jitter(c.b, 42)});
        }
      break;
    }
    case DistortionKind::Blur: {
      const int r = blur_radius_for(intensity_permille);
      for (int y = region.y; y < region.y + region.h; ++y)
        for (int x = region.x; x < region.x + region.w; ++x) {
          std::int64_t acc[3] = {0, 0, 0};
          int count = 0;
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
              const int sx = std::clamp(x + dx, 0, src.width() - 1);
              const int sy = std::clamp(y + dy, 0, src.height() - 1);
              const Rgb c = src.at(sx, sy);
              acc[0] += c.r;
              acc[1] += c.g;
              acc[2] += c.b;
              ++count;
            }
          dst.set(x, y,
                  {static_cast<std::uint8_t>((acc[0] + count / 2) / count),
                   static_cast<std::uint8_t>((acc[1] + count / 2) / count),
                   static_cast<std::uint8_t>((acc[2] + count / 2) / count)});
        }
      break;
    }
    case DistortionKind::ColorInversion: {
      for (int y = region.y; y < region.y + region.h; ++y)
        for (int x = region.x; x < region.x + region.w; ++x) {
          const Rgb c = src.at(x, y);
          dst.set(x, y, {static_cast<std::uint8_t>(255 - c.r), static_cast<std::uint8_t>(255 - c.g),
                         static_cast<std::uint8_t>(255 - c.b)});
        }
      break;
    }
  }
}

// Sparse, imperceptible +-1 dither keyed by `seed`. Applied to every
// pool-derived base image so regenerating with a different master seed can
// never reproduce identical pixels; roughly one pixel in eight is touched.
inline void apply_fingerprint_dither(Image& img, std::uint64_t seed) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      std::uint64_t h = mix64(seed, (static_cast<std::uint64_t>(y) << 24) ^ static_cast<std::uint64_t>(x));
      if ((h & 7) != 0) continue;
      Rgb c = img.at(x, y);
      auto nudge = [&](std::uint8_t v, int shift) {
        const int d = ((h >> shift) & 1) ? 1 : -1;
        return static_cast<std::uint8_t>(std::clamp(int(v) + d, 0, 255));
      };
      img.set(x, y, {nudge(c.r, 8), nudge(c.g, 9), nudge(c.b, 10)});
    }
}

}  // namespace pzl
