#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pzl/image.hpp"
#include "pzl/pools.hpp"
#include "pzl/types.hpp"

namespace pzl {

// Fixed 12-color tint palette for monochrome icons.
inline const std::array<Rgb, 12>& tint_palette() {
  static const std::array<Rgb, 12> palette = {{
      {200, 30, 30},   {230, 120, 20}, {200, 180, 0},  {60, 160, 40},
      {0, 150, 130},   {30, 100, 200}, {90, 50, 180},  {180, 40, 160},
      {120, 80, 40},   {90, 90, 90},   {220, 60, 100}, {20, 60, 120},
  }};
  return palette;
}

struct IconRun {
  bool row_oriented = true;
  int line = 0;    // row index when row oriented, otherwise column index
  int start = 0;   // offset within the line
  int length = 2;  // m

  // 1-based phrase used in the question text, e.g. "row 3".
  std::string phrase() const {
    return std::string(row_oriented ? "row " : "column ") + std::to_string(line + 1);
  }
};

struct IconConnectRule {
  GridSpec grid;
  std::string target_icon;
  int tint = -1;  // index into tint_palette(), -1 = original colors
  IconRun run;
  std::vector<std::string> filler;  // row-major, non-run cells only

  bool in_run(int row, int col) const {
    if (run.row_oriented)
      return row == run.line && col >= run.start && col < run.start + run.length;
    return col == run.line && row >= run.start && row < run.start + run.length;
  }

  // Full row-major cell map (target id in run cells, fillers elsewhere).
  std::vector<std::string> cells() const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(grid.n) * grid.n);
    std::size_t next_filler = 0;
    for (int r = 0; r < grid.n; ++r)
      for (int c = 0; c < grid.n; ++c) {
        if (in_run(r, c)) {
          out.push_back(target_icon);
        } else {
          if (next_filler >= filler.size()) throw std::logic_error("filler list too short");
          out.push_back(filler[next_filler++]);
        }
      }
    return out;
  }
};

struct HanziMatrixRule {
  GridSpec grid;
  std::vector<char32_t> cells;  // row-major, n*n
  int unique_count = 2;
};

struct WordSearchRule {
  GridSpec grid;
  std::string word;
  bool present = true;
  bool row_oriented = true;  // meaningful only when present
  int line = 0;
  int start = 0;
  std::vector<char> letters;  // row-major, n*n, 'A'..'Z'

  char at(int row, int col) const { return letters[static_cast<std::size_t>(row) * grid.n + col]; }
};

struct GridSumRule {
  GridSpec grid;
  SignMode sign_mode = SignMode::Mixed;
  NumberPrecision precision = NumberPrecision::Integer;
  std::vector<Decimal> values;  // row-major, n*n
  Decimal sum;
};

struct JigsawRule {
  std::string source_image;
  std::string source_caption;
  int resolution = 512;
  int n = 3;
  bool random_segmentation = false;
  std::vector<PixelRect> boundaries;  // row-major, n*n
  int missing_index = 0;
  std::array<int, 3> distractors = {0, 0, 0};
  std::uint64_t dither_seed = 0;  // keys the per-sample base fingerprint
};

struct DiffRegion {
  PixelRect rect;
  DistortionKind kind = DistortionKind::Noise;
  int intensity_permille = 1000;
};

struct DiffHuntRule {
  std::string source_image;
  std::string source_caption;
  int resolution = 512;
  int level = 1;
  std::vector<DiffRegion> regions;
  std::uint64_t noise_seed = 0;   // keys noise patterns inside regions
  std::uint64_t dither_seed = 0;  // keys the per-sample base fingerprint
};

using PuzzleRule =
    std::variant<IconConnectRule, HanziMatrixRule, WordSearchRule, GridSumRule, JigsawRule, DiffHuntRule>;

inline TaskId rule_task(const PuzzleRule& rule) {
  return static_cast<TaskId>(rule.index());
}

// Difficulty schedule for Difference Hunt: region side range and distortion
// intensity both shrink as the level rises. Constants are recorded in every
// config snapshot.
struct DiffHuntSchedule {
  static double side_frac_max(int level) { return 0.25 + (0.08 - 0.25) * (level - 1) / 4.0; }
  static double side_frac_min(int level) { return 0.6 * side_frac_max(level); }
  static int intensity_permille(int level) {
    return static_cast<int>(std::lround(1000.0 + (400.0 - 1000.0) * (level - 1) / 4.0));
  }
  static int side_min_px(int level, int resolution) {
    return std::max(8, static_cast<int>(std::floor(side_frac_min(level) * resolution)));
  }
  static int side_max_px(int level, int resolution) {
    return std::max(side_min_px(level, resolution),
                    static_cast<int>(std::floor(side_frac_max(level) * resolution)));
  }
  // Regions must keep this many blank pixels between each other so each
  // distortion stays its own connected difference component.
  static constexpr int kRegionGapPx = 4;
  static constexpr double kDistractorFloor = 2.0;   // mean abs diff, 8-bit
  static constexpr double kDetectabilityFloor = 3.0;
  static constexpr int kMinTileSidePx = 16;
};

// --- Designers ----------------------------------------------------------------

// The failure channel for content-driven rejection (as opposed to caller
// errors, which throw): a rejected sample is skipped upstream and replaced
// by over-drawing the next seed index.
template <typename R>
struct Designed {
  std::optional<R> rule;
  std::string reject_reason;

  bool rejected() const { return !rule.has_value(); }
};

inline IconConnectRule design_icon_connect(const MaterialSet& materials, const GridSpec& grid,
                                           RandomStream& rng) {
  if (materials.kind != PoolKind::Icon) throw std::invalid_argument("icon materials required");
  const int n = grid.n;
  const int m = static_cast<int>(rng.next_int(2, n));
  const int filler_cells = n * n - m;
  if (static_cast<int>(materials.icons.size()) < filler_cells + 1)
    throw PoolError("insufficient distinct icons: need " + std::to_string(filler_cells + 1) +
                    ", have " + std::to_string(materials.icons.size()));

  IconConnectRule rule;
  rule.grid = grid;
  rule.target_icon = materials.icons[0].id;
  if (materials.condition.color_mode == ColorMode::Tinted && materials.icons[0].monochrome)
    rule.tint = static_cast<int>(rng.next_below(tint_palette().size()));

  rule.run.row_oriented = rng.next_below(2) == 0;
  rule.run.line = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
  rule.run.start = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - m + 1)));
  rule.run.length = m;

  // draw fillers without replacement from the non-target materials
  std::vector<std::size_t> idx(materials.icons.size() - 1);
  std::iota(idx.begin(), idx.end(), 1);
  for (int i = 0; i < filler_cells; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.next_below(idx.size() - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  for (int i = 0; i < filler_cells; ++i)
    rule.filler.push_back(materials.icons[idx[static_cast<std::size_t>(i)]].id);
  return rule;
}

inline HanziMatrixRule design_hanzi_matrix(const MaterialSet& materials, const GridSpec& grid,
                                           RandomStream& rng) {
  if (materials.kind != PoolKind::Hanzi) throw std::invalid_argument("hanzi materials required");
  const int n = grid.n;
  const int cells = n * n;
  const int m = static_cast<int>(materials.hanzi.size());
  if (m < 2 || m > cells)
    throw std::invalid_argument("hanzi material count must be in [2, n^2], got " + std::to_string(m));

  // Uniform composition of n^2 into m positive parts: m-1 distinct cut
  // positions out of n^2 - 1.
  std::vector<int> cuts(static_cast<std::size_t>(cells - 1));
  std::iota(cuts.begin(), cuts.end(), 1);
  for (int i = 0; i < m - 1; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.next_below(cuts.size() - i));
    std::swap(cuts[static_cast<std::size_t>(i)], cuts[j]);
  }
  cuts.resize(static_cast<std::size_t>(m - 1));
  std::sort(cuts.begin(), cuts.end());

  HanziMatrixRule rule;
  rule.grid = grid;
  rule.unique_count = m;
  int prev = 0;
  for (int i = 0; i < m; ++i) {
    const int next = i < m - 1 ? cuts[static_cast<std::size_t>(i)] : cells;
    for (int k = prev; k < next; ++k) rule.cells.push_back(materials.hanzi[static_cast<std::size_t>(i)].codepoint);
    prev = next;
  }
  rng.shuffle(rule.cells.data(), rule.cells.size());
  return rule;
}

// Forward row/column occurrences of `word` in an n*n letter grid.
inline int word_occurrences(const std::vector<char>& letters, int n, const std::string& word) {
  const int len = static_cast<int>(word.size());
  if (len > n) return 0;
  int found = 0;
  for (int line = 0; line < n; ++line) {
    for (int start = 0; start + len <= n; ++start) {
      bool row_match = true, col_match = true;
      for (int k = 0; k < len; ++k) {
        if (letters[static_cast<std::size_t>(line) * n + start + k] != word[static_cast<std::size_t>(k)])
          row_match = false;
        if (letters[static_cast<std::size_t>(start + k) * n + line] != word[static_cast<std::size_t>(k)])
          col_match = false;
      }
      found += row_match ? 1 : 0;
      found += col_match ? 1 : 0;
    }
  }
  return found;
}

inline WordSearchRule design_word_search(const MaterialSet& materials, const GridSpec& grid,
                                         bool present, RandomStream& rng) {
  if (materials.kind != PoolKind::Word || materials.words.empty())
    throw std::invalid_argument("word materials required");
  const std::string& word = materials.words[0].word;
  const int n = grid.n;
  const int len = static_cast<int>(word.size());
  if (len > n)
    throw std::invalid_argument("word '" + word + "' does not fit grid n=" + std::to_string(n));

  WordSearchRule rule;
  rule.grid = grid;
  rule.word = word;
  rule.present = present;
  rule.letters.assign(static_cast<std::size_t>(n) * n, 'A');

  auto fill_all = [&] {
    for (auto& c : rule.letters) c = static_cast<char>('A' + rng.next_below(26));
  };

  if (present) {
    rule.row_oriented = rng.next_below(2) == 0;
    rule.line = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    rule.start = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - len + 1)));
    fill_all();
    for (int k = 0; k < len; ++k) {
      if (rule.row_oriented)
        rule.letters[static_cast<std::size_t>(rule.line) * n + rule.start + k] = word[static_cast<std::size_t>(k)];
      else
        rule.letters[static_cast<std::size_t>(rule.start + k) * n + rule.line] = word[static_cast<std::size_t>(k)];
    }
  } else {
    // whole-grid resampling keeps the distribution uniform conditioned on
    // absence; collisions are rare enough that the bound is theoretical
    bool clean = false;
    for (int attempt = 0; attempt < 1000 && !clean; ++attempt) {
      fill_all();
      clean = word_occurrences(rule.letters, n, word) == 0;
    }
    if (!clean)
      throw std::runtime_error("word-search negative resample bound exhausted for '" + word + "'");
  }
  return rule;
}

inline GridSumRule design_grid_sum(const GridSpec& grid, const SamplingCondition& cond,
                                   RandomStream& rng) {
  GridSumRule rule;
  rule.grid = grid;
  rule.sign_mode = cond.sign_mode;
  rule.precision = cond.precision;
  rule.values = sample_numbers(cond, grid.n * grid.n, rng);
  Decimal total(0, static_cast<int>(cond.precision));
  for (const Decimal& v : rule.values) total = total + v;
  rule.sum = total;
  return rule;
}

namespace detail {

// Cut positions along one axis: regular spacing with residual pixels on the
// last segment; random segmentation jitters interior cuts by at most a
// quarter of the spacing while keeping every span at least 16 px.
inline std::vector<int> segment_axis(int resolution, int n, bool random_seg, RandomStream& rng) {
  const int cell = resolution / n;
  std::vector<int> cuts(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) cuts[static_cast<std::size_t>(i)] = i * cell;
  cuts[static_cast<std::size_t>(n)] = resolution;
  if (!random_seg || n < 2) return cuts;

  const int jitter_max = cell / 4;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> trial = cuts;
    for (int i = 1; i < n; ++i)
      trial[static_cast<std::size_t>(i)] =
          i * cell + static_cast<int>(rng.next_int(-jitter_max, jitter_max));
    bool ok = true;
    for (int i = 0; i < n; ++i)
      if (trial[static_cast<std::size_t>(i + 1)] - trial[static_cast<std::size_t>(i)] <
          DiffHuntSchedule::kMinTileSidePx)
        ok = false;
    if (ok) return trial;
  }
  return cuts;  // fall back to the regular segmentation
}

}  // namespace detail

// `base` is the already loaded, resized and fingerprinted source image;
// distractor floors are measured on it so the recorded rule matches the
// rendered tiles exactly.
inline Designed<JigsawRule> design_jigsaw(const ImageEntry& image, const Image& base, int n,
                                          bool random_segmentation, RandomStream& rng,
                                          std::uint64_t dither_seed) {
  if (n < 2 || n > 9) throw std::invalid_argument("jigsaw n must be in [2, 9]");
  const int res = base.width();
  if (base.height() != res) throw std::invalid_argument("jigsaw base image must be square");
  if (res != 256 && res != 512 && res != 1024)
    throw std::invalid_argument("jigsaw resolution must be one of 256, 512, 1024");

  JigsawRule rule;
  rule.source_image = image.id;
  rule.source_caption = image.caption;
  rule.resolution = res;
  rule.n = n;
  rule.random_segmentation = random_segmentation;
  rule.dither_seed = dither_seed;

  const auto xcuts = detail::segment_axis(res, n, random_segmentation, rng);
  const auto ycuts = detail::segment_axis(res, n, random_segmentation, rng);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      rule.boundaries.push_back({xcuts[static_cast<std::size_t>(c)], ycuts[static_cast<std::size_t>(r)],
                                 xcuts[static_cast<std::size_t>(c + 1)] - xcuts[static_cast<std::size_t>(c)],
                                 ycuts[static_cast<std::size_t>(r + 1)] - ycuts[static_cast<std::size_t>(r)]});

  const int tiles = n * n;
  rule.missing_index = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(tiles)));
  const Image missing_tile = base.crop(rule.boundaries[static_cast<std::size_t>(rule.missing_index)]);

  std::set<int> chosen{rule.missing_index};
  for (int d = 0; d < 3; ++d) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const int cand = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(tiles)));
      if (chosen.count(cand)) continue;
      Image tile = base.crop(rule.boundaries[static_cast<std::size_t>(cand)]);
      if (tile.width() != missing_tile.width() || tile.height() != missing_tile.height())
        tile = tile.resample(missing_tile.width(), missing_tile.height());
      if (mean_abs_diff(tile, missing_tile) < DiffHuntSchedule::kDistractorFloor) continue;
      rule.distractors[static_cast<std::size_t>(d)] = cand;
      chosen.insert(cand);
      placed = true;
    }
    if (!placed)
      return {std::nullopt, "jigsaw distractor floor unattainable on image '" + image.id + "'"};
  }
  return {rule, ""};
}

inline Designed<DiffHuntRule> design_difference_hunt(const ImageEntry& image, const Image& base,
                                                     int level, RandomStream& rng,
                                                     std::uint64_t dither_seed) {
  if (level < 1 || level > 5) throw std::invalid_argument("difference-hunt level must be in [1, 5]");
  const int res = base.width();
  if (base.height() != res) throw std::invalid_argument("difference-hunt base image must be square");

  DiffHuntRule rule;
  rule.source_image = image.id;
  rule.source_caption = image.caption;
  rule.resolution = res;
  rule.level = level;
  rule.dither_seed = dither_seed;
  rule.noise_seed = rng.next_u64();

  const int m = static_cast<int>(rng.next_int(2, 8));
  const int smin = DiffHuntSchedule::side_min_px(level, res);
  const int smax = DiffHuntSchedule::side_max_px(level, res);
  const int intensity = DiffHuntSchedule::intensity_permille(level);
  const int gap = DiffHuntSchedule::kRegionGapPx;

  Image scratch = base;
  int placements = 0;
  while (static_cast<int>(rule.regions.size()) < m) {
    if (placements >= 500) {
      return {std::nullopt, "difference-hunt placement bound exhausted on image '" + image.id +
                                "' at level " + std::to_string(level)};
    }
    ++placements;
    const int w = static_cast<int>(rng.next_int(smin, smax));
    const int h = static_cast<int>(rng.next_int(smin, smax));
    if (w >= res || h >= res) continue;
    const PixelRect rect{static_cast<int>(rng.next_below(static_cast<std::uint64_t>(res - w + 1))),
                         static_cast<int>(rng.next_below(static_cast<std::uint64_t>(res - h + 1))), w, h};
    const PixelRect padded{rect.x - gap, rect.y - gap, rect.w + 2 * gap, rect.h + 2 * gap};
    bool clash = false;
    for (const auto& reg : rule.regions)
      if (padded.intersects(reg.rect)) clash = true;
    if (clash) continue;

    // Trial-apply; if the distortion is invisible here (e.g. blur on a flat
    // area) rotate through the other kinds before abandoning the rectangle.
    const int first_kind = static_cast<int>(rng.next_below(5));
    bool accepted = false;
    for (int k = 0; k < 5 && !accepted; ++k) {
      const auto kind = static_cast<DistortionKind>((first_kind + k) % 5);
      const std::uint64_t key = mix64(rule.noise_seed,
                                      (static_cast<std::uint64_t>(rect.x) << 36) ^
                                          (static_cast<std::uint64_t>(rect.y) << 24) ^
                                          (static_cast<std::uint64_t>(rect.w) << 12) ^
                                          static_cast<std::uint64_t>(rect.h));
      apply_distortion(scratch, base, rect, kind, intensity, key);
      const double diff = mean_abs_diff_region(scratch, base, rect);
      // revert the trial before deciding
      const Image patch = base.crop(rect);
      scratch.paste(patch, rect.x, rect.y);
      if (diff >= DiffHuntSchedule::kDetectabilityFloor) {
        rule.regions.push_back({rect, kind, intensity});
        accepted = true;
      }
    }
  }
  return {rule, ""};
}

// --- Verification --------------------------------------------------------------

struct RuleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RuleReport {
  bool passed = true;
  std::vector<RuleCheck> checks;
  std::optional<GroundTruth> derived;

  void add(std::string name, bool ok, std::string detail = "") {
    passed = passed && ok;
    checks.push_back({std::move(name), ok, std::move(detail)});
  }
};

// Ground truth as the generation pipeline records it (from rule fields).
inline GroundTruth ground_truth_for(const PuzzleRule& rule) {
  return std::visit(
      [](const auto& r) -> GroundTruth {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IconConnectRule>) return GroundTruth::make_count(r.run.length);
        if constexpr (std::is_same_v<T, HanziMatrixRule>) return GroundTruth::make_count(r.unique_count);
        if constexpr (std::is_same_v<T, WordSearchRule>) return GroundTruth::make_yesno(r.present);
        if constexpr (std::is_same_v<T, GridSumRule>) return GroundTruth::make_sum(r.sum);
        if constexpr (std::is_same_v<T, JigsawRule>) return GroundTruth::make_tile(r.missing_index);
        if constexpr (std::is_same_v<T, DiffHuntRule>)
          return GroundTruth::make_count(static_cast<int>(r.regions.size()));
      },
      rule);
}

// Re-derives the answer from the rule by brute force and checks every
// invariant. Failures are report entries, never exceptions.
inline RuleReport verify_rule(const PuzzleRule& rule) {
  RuleReport report;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IconConnectRule>) {
          const int n = r.grid.n;
          const int m = r.run.length;
          report.add("m_range", m >= 2 && m <= n, "m=" + std::to_string(m));
          report.add("run_fits", r.run.start >= 0 && r.run.start + m <= n && r.run.line >= 0 &&
                                     r.run.line < n);
          std::vector<std::string> cells;
          try {
            cells = r.cells();
          } catch (const std::exception& e) {
            report.add("cell_map", false, e.what());
            return;
          }
          int total = 0;
          for (const auto& id : cells) total += id == r.target_icon ? 1 : 0;
          report.add("target_count", total == m,
                     "target appears " + std::to_string(total) + " times, expected " + std::to_string(m));
          // brute-force scan: longest consecutive run over every row and column
          int longest = 0;
          for (int line = 0; line < n; ++line) {
            int row_run = 0, col_run = 0;
            for (int k = 0; k < n; ++k) {
              row_run = cells[static_cast<std::size_t>(line) * n + k] == r.target_icon ? row_run + 1 : 0;
              col_run = cells[static_cast<std::size_t>(k) * n + line] == r.target_icon ? col_run + 1 : 0;
              longest = std::max({longest, row_run, col_run});
            }
          }
          report.add("consecutive_run", longest == m,
                     "longest run " + std::to_string(longest) + ", expected " + std::to_string(m));
          std::set<std::string> distinct(r.filler.begin(), r.filler.end());
          report.add("fillers_distinct", distinct.size() == r.filler.size());
          report.add("target_outside_run", distinct.count(r.target_icon) == 0,
                     distinct.count(r.target_icon) ? "target outside run" : "");
          if (report.passed) report.derived = GroundTruth::make_count(longest);
        } else if constexpr (std::is_same_v<T, HanziMatrixRule>) {
          const int cells = r.grid.n * r.grid.n;
          report.add("cell_count", static_cast<int>(r.cells.size()) == cells);
          const std::set<char32_t> distinct(r.cells.begin(), r.cells.end());
          report.add("distinct_recount", static_cast<int>(distinct.size()) == r.unique_count,
                     "recounted " + std::to_string(distinct.size()) + ", stored " +
                         std::to_string(r.unique_count));
          report.add("m_range", r.unique_count >= 2 && r.unique_count <= cells);
          if (report.passed) report.derived = GroundTruth::make_count(static_cast<int>(distinct.size()));
        } else if constexpr (std::is_same_v<T, WordSearchRule>) {
          const int n = r.grid.n;
          report.add("cell_count", static_cast<int>(r.letters.size()) == n * n);
          report.add("word_fits", static_cast<int>(r.word.size()) <= n);
          bool letters_ok = true;
          for (char c : r.letters) letters_ok = letters_ok && c >= 'A' && c <= 'Z';
          report.add("letters_alphabetic", letters_ok);
          const int occurrences = word_occurrences(r.letters, n, r.word);
          if (r.present) {
            bool at_place = true;
            for (std::size_t k = 0; k < r.word.size(); ++k) {
              const char expect = r.word[k];
              const char got = r.row_oriented
                                   ? r.letters[static_cast<std::size_t>(r.line) * n + r.start + k]
                                   : r.letters[(static_cast<std::size_t>(r.start) + k) * n + r.line];
              at_place = at_place && expect == got;
            }
            report.add("word_at_placement", at_place);
            report.add("word_found", occurrences >= 1);
          } else {
            report.add("word_absent", occurrences == 0,
                       occurrences ? "found " + std::to_string(occurrences) + " occurrences" : "");
          }
          if (report.passed) report.derived = GroundTruth::make_yesno(occurrences >= 1);
        } else if constexpr (std::is_same_v<T, GridSumRule>) {
          const int cells = r.grid.n * r.grid.n;
          report.add("cell_count", static_cast<int>(r.values.size()) == cells);
          bool in_range = true;
          for (const Decimal& v : r.values)
            in_range = in_range && !(v < Decimal(-100, 0)) && !(Decimal(100, 0) < v);
          report.add("values_in_range", in_range);
          Decimal total(0, static_cast<int>(r.precision));
          for (const Decimal& v : r.values) total = total + v;
          report.add("re_summation", total == r.sum,
                     "recomputed " + total.to_string() + ", stored " + r.sum.to_string());
          if (report.passed) report.derived = GroundTruth::make_sum(total);
        } else if constexpr (std::is_same_v<T, JigsawRule>) {
          const int tiles = r.n * r.n;
          report.add("tile_count", static_cast<int>(r.boundaries.size()) == tiles);
          std::int64_t area = 0;
          bool inside = true, min_side = true;
          for (const auto& b : r.boundaries) {
            area += b.area();
            inside = inside && b.x >= 0 && b.y >= 0 && b.x + b.w <= r.resolution &&
                     b.y + b.h <= r.resolution;
            min_side = min_side && b.w >= DiffHuntSchedule::kMinTileSidePx &&
                       b.h >= DiffHuntSchedule::kMinTileSidePx;
          }
          bool disjoint = true;
          for (std::size_t i = 0; i < r.boundaries.size(); ++i)
            for (std::size_t j = i + 1; j < r.boundaries.size(); ++j)
              disjoint = disjoint && !r.boundaries[i].intersects(r.boundaries[j]);
          report.add("partition_area", area == static_cast<std::int64_t>(r.resolution) * r.resolution,
                     "tile areas sum to " + std::to_string(area));
          report.add("partition_disjoint", disjoint);
          report.add("tiles_inside", inside);
          report.add("tile_min_side", min_side);
          report.add("missing_in_range", r.missing_index >= 0 && r.missing_index < tiles);
          std::set<int> d(r.distractors.begin(), r.distractors.end());
          report.add("distractors_distinct",
                     d.size() == 3 && d.count(r.missing_index) == 0 &&
                         *d.begin() >= 0 && *d.rbegin() < tiles);
          if (report.passed) report.derived = GroundTruth::make_tile(r.missing_index);
        } else if constexpr (std::is_same_v<T, DiffHuntRule>) {
          const int m = static_cast<int>(r.regions.size());
          report.add("m_range", m >= 2 && m <= 8, "m=" + std::to_string(m));
          report.add("level_range", r.level >= 1 && r.level <= 5);
          const int smin = DiffHuntSchedule::side_min_px(r.level, r.resolution);
          const int smax = DiffHuntSchedule::side_max_px(r.level, r.resolution);
          bool sides_ok = true, inside = true, intensity_ok = true;
          for (const auto& reg : r.regions) {
            sides_ok = sides_ok && reg.rect.w >= smin && reg.rect.w <= smax && reg.rect.h >= smin &&
                       reg.rect.h <= smax;
            inside = inside && reg.rect.x >= 0 && reg.rect.y >= 0 &&
                     reg.rect.x + reg.rect.w <= r.resolution && reg.rect.y + reg.rect.h <= r.resolution;
            intensity_ok = intensity_ok &&
                           reg.intensity_permille == DiffHuntSchedule::intensity_permille(r.level);
          }
          bool disjoint = true;
          for (std::size_t i = 0; i < r.regions.size(); ++i)
            for (std::size_t j = i + 1; j < r.regions.size(); ++j)
              disjoint = disjoint && !r.regions[i].rect.intersects(r.regions[j].rect);
          report.add("region_sides_in_schedule", sides_ok);
          report.add("regions_inside", inside);
          report.add("regions_disjoint", disjoint);
          report.add("intensity_matches_level", intensity_ok);
          if (report.passed) report.derived = GroundTruth::make_count(m);
        }
      },
      rule);

  if (report.passed && report.derived) {
    const GroundTruth expected = ground_truth_for(rule);
    report.add("derived_matches_recorded", *report.derived == expected);
  }
  return report;
}

}  // namespace pzl
