#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pzl/glyphs.hpp"
#include "pzl/png.hpp"
#include "pzl/render.hpp"
#include "test_helpers.hpp"

using namespace pzl;
using testutil::shared_pools;

TEST_CASE("builtin glyphs are present, nonempty and pairwise distinct") {
  const FontLibrary font = FontLibrary::builtin();
  const std::string charset = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-.+";
  std::set<std::uint64_t> hashes;
  for (char c : charset) {
    const GlyphMask& m = font.mask(static_cast<char32_t>(c), 48);
    std::int64_t ink = 0;
    for (auto v : m.coverage) ink += v;
    INFO("glyph " << c);
    REQUIRE(ink > 0);
    REQUIRE(hashes.insert(fnv1a64_bytes(m.coverage.data(), m.coverage.size())).second);
  }
}

TEST_CASE("hanzi pool codepoints rasterize to pairwise distinct masks") {
  const FontLibrary font = FontLibrary::builtin();
  const SourcePool pool = load_hanzi_pool(shared_pools().hanzi_file, shared_pools().near_form_file);
  std::set<std::uint64_t> hashes;
  for (const auto& e : pool.hanzi) {
    const GlyphMask& m = font.mask(e.codepoint, 48);
    std::int64_t ink = 0;
    for (auto v : m.coverage) ink += v;
    REQUIRE(ink > 0);
    if (!hashes.insert(fnv1a64_bytes(m.coverage.data(), m.coverage.size())).second)
      FAIL("mask collision for U+" << std::hex << static_cast<unsigned>(e.codepoint));
  }
}

TEST_CASE("glyph rasterization is deterministic") {
  const FontLibrary a = FontLibrary::builtin();
  const FontLibrary b = FontLibrary::builtin();
  for (char32_t cp : {U'A', U'7', U'中'}) {
    const GlyphMask& ma = a.mask(cp, 96);
    const GlyphMask& mb = b.mask(cp, 96);
    REQUIRE(ma.coverage == mb.coverage);
  }
}

TEST_CASE("missing glyph errors name the codepoint") {
  const FontLibrary font = FontLibrary::builtin();
  try {
    font.strokes_for(0x0394);  // greek delta: not builtin, not CJK
    FAIL("expected MissingGlyphError");
  } catch (const MissingGlyphError& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("U+0394"));
  }
}

TEST_CASE("stroke font files round-trip and gate coverage") {
  testutil::TempDir dir("font");
  FontLibrary base = FontLibrary::builtin();
  base.add_glyph(0x4E00, {{10, {{10, 50}, {90, 50}}}});
  base.save(dir.path / "font.txt");
  const FontLibrary loaded = FontLibrary::from_file(dir.path / "font.txt");
  CHECK(loaded.covers(0x4E00));
  CHECK(loaded.covers(U'A'));     // builtin fallback stays
  CHECK(!loaded.covers(0x4E01));  // synthesis disabled for file fonts
  CHECK_THROWS_AS(loaded.strokes_for(0x4E01), MissingGlyphError);
}

TEST_CASE("png encode/decode round-trips pixels exactly") {
  RandomStream rs(6);
  Image img(37, 23);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      img.set(x, y,
              {static_cast<std::uint8_t>(rs.next_below(256)), static_cast<std::uint8_t>(rs.next_below(256)),
               static_cast<std::uint8_t>(rs.next_below(256))});
  const auto bytes = encode_png(img);
  const Image back = flatten_over_white(decode_png_rgba(bytes.data(), bytes.size()));
  REQUIRE(back == img);

  SECTION("encoding is byte-stable") {
    CHECK(encode_png(img) == bytes);
  }
  SECTION("rgba round-trip preserves alpha") {
    ImageRgba icon(16, 16);
    icon.set(3, 4, 250, 20, 30, 128);
    const auto pb = encode_png(icon);
    const ImageRgba rback = decode_png_rgba(pb.data(), pb.size());
    const std::uint8_t* p = rback.pixel(3, 4);
    CHECK(int(p[0]) == 250);
    CHECK(int(p[3]) == 128);
  }
}

TEST_CASE("image resample: pass-through and center crop rules") {
  Image img(1024, 768);
  const Image cropped = img.center_crop_square();
  CHECK(cropped.width() == 768);
  CHECK(cropped.height() == 768);

  Image small(8, 8);
  CHECK(small.resample(8, 8) == small);

  // integer downscale averages exactly: 2x2 blocks of (0,0,0)/(255,255,255)
  Image checker(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      checker.set(x, y, (x / 2 + y / 2) % 2 ? Rgb{255, 255, 255} : Rgb{0, 0, 0});
  const Image half = checker.resample(2, 2);
  CHECK(half.at(0, 0) == Rgb{0, 0, 0});
  CHECK(half.at(1, 0) == Rgb{255, 255, 255});
}

TEST_CASE("grid renders are byte-stable and structurally consistent") {
  const RenderStyle style = RenderStyle::defaults();
  WordSearchRule rule;
  {
    MaterialSet mats;
    mats.kind = PoolKind::Word;
    mats.words.push_back({"CAT"});
    SeedContext ctx{5551};
    for (int trial = 0;; ++trial) {
      RandomStream rs = ctx.stream_for(TaskId::WordSearch, static_cast<std::uint64_t>(trial));
      rule = design_word_search(mats, GridSpec(3, 512), true, rs);
      if (rule.row_oriented && rule.line == 0 && rule.start == 0) break;
    }
  }
  const Image a = render_grid(rule, style);
  const Image b = render_grid(rule, style);
  REQUIRE(a == b);

  // structural check: every cell region equals a fresh single-cell render of
  // its expected glyph (grid lines excluded by construction order)
  int matched = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const PixelRect cell = rule.grid.cell_rect(r, c);
      Image expected(rule.grid.resolution, rule.grid.resolution, style.background);
      renderdetail::draw_grid_lines(expected, rule.grid, style);
      draw_glyph_in_cell(expected, cell, static_cast<char32_t>(rule.at(r, c)), style);
      const Image cell_got = a.crop(cell);
      const Image cell_want = expected.crop(cell);
      if (cell_got == cell_want) ++matched;
    }
  REQUIRE(matched == 9);
  // and the top row spells C, A, T per the rule's cell map
  CHECK(rule.at(0, 0) == 'C');
  CHECK(rule.at(0, 1) == 'A');
  CHECK(rule.at(0, 2) == 'T');
}

TEST_CASE("grid sum cells render the exact decimal text") {
  GridSumRule rule;
  rule.grid = GridSpec(3, 512);
  rule.precision = NumberPrecision::TwoDecimal;
  rule.values.assign(9, Decimal(0, 2));
  rule.values[4] = Decimal(-350, 2);
  Decimal total(0, 2);
  for (const auto& v : rule.values) total = total + v;
  rule.sum = total;
  CHECK(rule.values[4].to_string() == "-3.50");

  const RenderStyle style = RenderStyle::defaults();
  const Image img = render_grid(rule, style);
  Image expected(rule.grid.resolution, rule.grid.resolution, style.background);
  renderdetail::draw_grid_lines(expected, rule.grid, style);
  draw_text_in_cell(expected, rule.grid.cell_rect(1, 1), "-3.50", style);
  CHECK(img.crop(rule.grid.cell_rect(1, 1)) == expected.crop(rule.grid.cell_rect(1, 1)));
}

TEST_CASE("hanzi grid render uses the rule's cells") {
  HanziMatrixRule rule;
  rule.grid = GridSpec(3, 512);
  rule.cells = {U'一', U'二', U'三', U'一', U'二',
                U'三', U'一', U'二', U'三'};
  rule.unique_count = 3;
  const RenderStyle style = RenderStyle::defaults();
  const Image img = render_grid(rule, style);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      Image expected(rule.grid.resolution, rule.grid.resolution, style.background);
      renderdetail::draw_grid_lines(expected, rule.grid, style);
      draw_glyph_in_cell(expected, rule.grid.cell_rect(r, c),
                         rule.cells[static_cast<std::size_t>(r) * 3 + c], style);
      REQUIRE(img.crop(rule.grid.cell_rect(r, c)) == expected.crop(rule.grid.cell_rect(r, c)));
    }
}

TEST_CASE("icon grid render composites the target with its tint") {
  const SourcePool icons = load_icon_pool(shared_pools().icons_dir);
  const IconCache cache(icons);
  SeedContext ctx{17};
  RandomStream rs = ctx.stream_for(TaskId::IconConnect, 0);
  SamplingCondition cond;
  cond.count = 17;
  cond.color_mode = ColorMode::Tinted;
  const MaterialSet mats = sample_materials(icons, cond, rs);
  const IconConnectRule rule = design_icon_connect(mats, GridSpec(4, 512), rs);
  const Image a = render_grid(rule, cache, RenderStyle::defaults());
  const Image b = render_grid(rule, cache, RenderStyle::defaults());
  REQUIRE(a == b);
  CHECK(a.width() == 512);
}

TEST_CASE("jigsaw split: gray hole, exact extraction, reconstruction") {
  const SourcePool pool = load_image_pool(shared_pools().images_dir);
  Image base = load_source_image(pool.images[2], 512);
  apply_fingerprint_dither(base, 1234);
  RandomStream rs(3);
  const auto designed = design_jigsaw(pool.images[2], base, 2, false, rs, 1234);
  REQUIRE(!designed.rejected());
  const JigsawRule& rule = *designed.rule;
  const JigsawRender render = split_tiles(base, rule);

  const PixelRect& hole = rule.boundaries[static_cast<std::size_t>(rule.missing_index)];
  // incomplete differs from the source only inside the missing quadrant
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x) {
      const bool inside = hole.contains(x, y);
      if (inside)
        REQUIRE(render.incomplete.at(x, y) == kMissingTileFill);
      else if (!(render.incomplete.at(x, y) == base.at(x, y)))
        FAIL("incomplete image differs outside the hole");
    }
  // pasting the correct option tile back reconstructs the source byte-exactly
  Image rebuilt = render.incomplete;
  rebuilt.paste(render.option_tiles[0], hole.x, hole.y);
  REQUIRE(rebuilt == base);
  // distractor floor holds on the extracted tiles
  for (int d = 1; d < 4; ++d) {
    Image tile = render.option_tiles[static_cast<std::size_t>(d)];
    if (tile.width() != render.option_tiles[0].width() || tile.height() != render.option_tiles[0].height())
      tile = tile.resample(render.option_tiles[0].width(), render.option_tiles[0].height());
    REQUIRE(mean_abs_diff(tile, render.option_tiles[0]) >= 2.0);
  }
}

TEST_CASE("distortion identities") {
  const SourcePool pool = load_image_pool(shared_pools().images_dir);
  Image base = load_source_image(pool.images[5], 256);

  SECTION("zero regions leave the image byte-identical") {
    DiffHuntRule rule;
    rule.resolution = 256;
    rule.level = 1;
    rule.noise_seed = 9;
    CHECK(apply_distortions(base, rule) == base);
  }
  SECTION("color inversion is an involution") {
    const PixelRect rect{30, 40, 50, 60};
    Image once = base;
    apply_distortion(once, base, rect, DistortionKind::ColorInversion, 1000, 0);
    Image twice = once;
    apply_distortion(twice, once, rect, DistortionKind::ColorInversion, 1000, 0);
    CHECK(twice == base);
  }
  SECTION("noise is reproducible from the rule key") {
    const PixelRect rect{10, 10, 30, 30};
    Image a = base, b = base;
    apply_distortion(a, base, rect, DistortionKind::Noise, 700, 77);
    apply_distortion(b, base, rect, DistortionKind::Noise, 700, 77);
    CHECK(a == b);
    Image c = base;
    apply_distortion(c, base, rect, DistortionKind::Noise, 700, 78);
    CHECK(!(c == a));
  }
  SECTION("overlapping regions are rejected") {
    DiffHuntRule rule;
    rule.resolution = 256;
    rule.level = 1;
    rule.regions.push_back({{10, 10, 50, 50}, DistortionKind::Noise, 1000});
    rule.regions.push_back({{40, 40, 50, 50}, DistortionKind::Blur, 1000});
    CHECK_THROWS(apply_distortions(base, rule));
  }
}

TEST_CASE("load_source_image crop and determinism") {
  testutil::TempDir dir("src");
  Image wide(300, 200);
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 300; ++x)
      wide.set(x, y, {static_cast<std::uint8_t>(x % 256), static_cast<std::uint8_t>(y % 256), 7});
  write_png(dir.path / "wide.png", wide);
  ImageEntry entry{"wide", dir.path / "wide.png", "", ""};
  const Image a = load_source_image(entry, 256);
  CHECK(a.width() == 256);
  CHECK(a.height() == 256);
  const Image b = load_source_image(entry, 256);
  REQUIRE(a == b);
}

TEST_CASE("fingerprint dither is sparse, small and seed-keyed") {
  Image img(128, 128, {100, 100, 100});
  Image dithered = img;
  apply_fingerprint_dither(dithered, 555);
  int changed = 0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      const Rgb a = img.at(x, y), b = dithered.at(x, y);
      const int delta = std::abs(a.r - b.r) + std::abs(a.g - b.g) + std::abs(a.b - b.b);
      if (delta) ++changed;
      REQUIRE(delta <= 3);
    }
  CHECK(changed > 128 * 128 / 16);
  CHECK(changed < 128 * 128 / 4);
  Image other = img;
  apply_fingerprint_dither(other, 556);
  CHECK(!(other == dithered));
}
