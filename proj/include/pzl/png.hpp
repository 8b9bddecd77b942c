#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>
#include <zlib.h>

#include "pzl/image.hpp"

namespace pzl {

// PNG encoding is hand-rolled over zlib with pinned parameters (fixed filter
// per row, fixed compression settings) so identical pixels always produce
// identical bytes. Decoding goes through libpng and accepts any common PNG
// variant (palette, grayscale, 16-bit, alpha, interlaced).

namespace detail {

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::uint8_t* data, std::size_t len) {
  put_u32be(out, static_cast<std::uint32_t>(len));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (len) out.insert(out.end(), data, data + len);
  const std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + start, static_cast<uInt>(4 + len)));
  put_u32be(out, crc);
}

inline std::vector<std::uint8_t> deflate_bytes(const std::vector<std::uint8_t>& raw, int level) {
  uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(bound);
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, 15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw std::runtime_error("deflate init failed");
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw std::runtime_error("deflate failed");
  out.resize(zs.total_out);
  return out;
}

}  // namespace detail

// channels: 3 (RGB) or 4 (RGBA). level: zlib compression level 1-9.
inline std::vector<std::uint8_t> encode_png(const std::uint8_t* pixels, int w, int h, int channels,
                                            int level = 4) {
  if (w <= 0 || h <= 0 || (channels != 3 && channels != 4))
    throw std::invalid_argument("encode_png: bad arguments");
  const std::size_t stride = static_cast<std::size_t>(w) * channels;

  // Sub filter on every row: cheap, effective on gradients, and fixed so the
  // byte stream never depends on a heuristic.
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = pixels + stride * static_cast<std::size_t>(y);
    raw.push_back(1);  // filter type: Sub
    for (std::size_t i = 0; i < stride; ++i) {
      const std::uint8_t left = i >= static_cast<std::size_t>(channels) ? row[i - channels] : 0;
      raw.push_back(static_cast<std::uint8_t>(row[i] - left));
    }
  }
  const std::vector<std::uint8_t> compressed = detail::deflate_bytes(raw, level);

  std::vector<std::uint8_t> out;
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.insert(out.end(), sig, sig + 8);
  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(w >> 24);
  ihdr[1] = static_cast<std::uint8_t>(w >> 16);
  ihdr[2] = static_cast<std::uint8_t>(w >> 8);
  ihdr[3] = static_cast<std::uint8_t>(w);
  ihdr[4] = static_cast<std::uint8_t>(h >> 24);
  ihdr[5] = static_cast<std::uint8_t>(h >> 16);
  ihdr[6] = static_cast<std::uint8_t>(h >> 8);
  ihdr[7] = static_cast<std::uint8_t>(h);
  ihdr[8] = 8;                                        // bit depth
  ihdr[9] = channels == 3 ? 2 : 6;                    // color type
  ihdr[10] = 0;                                       // compression
  ihdr[11] = 0;                                       // filter method
  ihdr[12] = 0;                                       // no interlace
  detail::append_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  detail::append_chunk(out, "IDAT", compressed.data(), compressed.size());
  detail::append_chunk(out, "IEND", nullptr, 0);
  return out;
}

inline std::vector<std::uint8_t> encode_png(const Image& img, int level = 4) {
  return encode_png(img.data(), img.width(), img.height(), 3, level);
}

inline std::vector<std::uint8_t> encode_png(const ImageRgba& img, int level = 4) {
  return encode_png(img.data(), img.width(), img.height(), 4, level);
}

inline void write_png(const std::filesystem::path& path, const Image& img, int level = 4) {
  const auto bytes = encode_png(img, level);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_png(const std::filesystem::path& path, const ImageRgba& img, int level = 4) {
  const auto bytes = encode_png(img, level);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace detail {

struct PngMemReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

inline void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<PngMemReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->size) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, r->data + r->pos, n);
  r->pos += n;
}

}  // namespace detail

// Decodes to RGBA; the RGB loader below drops alpha over white.
inline ImageRgba decode_png_rgba(const std::uint8_t* bytes, std::size_t len) {
  if (len < 8 || png_sig_cmp(bytes, 0, 8) != 0)
    throw std::runtime_error("not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng init failed");
  }
  std::vector<png_bytep> rows;
  ImageRgba out;
  detail::PngMemReader reader{bytes, len, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG decode failed");
  }
  png_set_read_fn(png, &reader, detail::png_mem_read);
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_set_add_alpha(png, 0xff, PNG_FILLER_AFTER);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(w) * 4) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unsupported PNG layout");
  }
  out = ImageRgba(w, h);
  rows.resize(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = out.data() + out.idx(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

inline ImageRgba read_png_rgba(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_png_rgba(bytes.data(), bytes.size());
}

inline Image flatten_over_white(const ImageRgba& rgba) {
  Image out(rgba.width(), rgba.height());
  for (int y = 0; y < rgba.height(); ++y)
    for (int x = 0; x < rgba.width(); ++x) {
      const std::uint8_t* p = rgba.pixel(x, y);
      const int a = p[3];
      out.set(x, y,
              {static_cast<std::uint8_t>((p[0] * a + 255 * (255 - a) + 127) / 255),
               static_cast<std::uint8_t>((p[1] * a + 255 * (255 - a) + 127) / 255),
               static_cast<std::uint8_t>((p[2] * a + 255 * (255 - a) + 127) / 255)});
    }
  return out;
}

inline Image read_png(const std::filesystem::path& path) {
  return flatten_over_white(read_png_rgba(path));
}

}  // namespace pzl
