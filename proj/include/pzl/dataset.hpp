#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pzl/png.hpp"
#include "pzl/poolgen.hpp"
#include "pzl/pools.hpp"
#include "pzl/qa.hpp"
#include "pzl/render.hpp"
#include "pzl/rules.hpp"
#include "pzl/sample.hpp"

namespace pzl {

struct PoolPaths {
  fs::path icons_dir;
  fs::path hanzi_file;
  fs::path near_form_file;
  fs::path words_file;
  fs::path images_dir;
  fs::path captions_file;

  static PoolPaths from_root(const fs::path& root) {
    PoolPaths p;
    p.icons_dir = root / "icons";
    p.hanzi_file = root / "hanzi.txt";
    p.near_form_file = root / "hanzi_nearform.txt";
    p.words_file = root / "words.txt";
    p.images_dir = root / "images";
    const fs::path captions = root / "images" / "captions.tsv";
    if (fs::exists(captions)) p.captions_file = captions;
    return p;
  }
};

struct DifficultyDistribution {
  int grid_n_min = 3;
  int grid_n_max = 9;
  std::vector<int> resolutions = {256, 512, 1024};
  int level_min = 1;
  int level_max = 5;
};

struct DatasetConfig {
  std::uint64_t master_seed = 7;
  OptionMode mode = OptionMode::FixedOption;
  std::map<TaskId, int> counts = default_counts();
  PoolPaths pools;
  DifficultyDistribution difficulty;
  // style
  bool grid_lines = true;
  int glyph_scale_permille = 700;
  fs::path font_file;  // empty = builtin stroke font
  fs::path prompt_templates_file;
  int word_search_yes_percent = 50;
  bool write_images = true;
  int workers = 0;  // 0 = hardware concurrency
  int png_level_grid = 4;
  int png_level_photo = 3;

  static std::map<TaskId, int> default_counts() {
    return {{TaskId::IconConnect, 2000}, {TaskId::HanziMatrix, 2000}, {TaskId::WordSearch, 2000},
            {TaskId::GridSum, 2000},     {TaskId::Jigsaw, 1920},      {TaskId::DifferenceHunt, 1920}};
  }

  int count_for(TaskId t) const {
    auto it = counts.find(t);
    return it == counts.end() ? 0 : it->second;
  }

  int total_count() const {
    int total = 0;
    for (const auto& [t, c] : counts) total += c;
    return total;
  }
};

struct RefreshConfig {
  fs::path images_dir;
  fs::path captions_file;
  std::set<TaskId> tasks = {TaskId::Jigsaw, TaskId::DifferenceHunt};
  int count_per_task = 1000;
  OptionMode mode = OptionMode::RandomizedOption;
  std::uint64_t master_seed = 7;
  int workers = 0;
};

struct RejectionEntry {
  TaskId task;
  std::uint64_t index;
  std::string reason;
};

struct GenerationReport {
  std::map<TaskId, int> generated;
  std::vector<RejectionEntry> rejections;
  double elapsed_seconds = 0;
};

// --- Config (de)serialization --------------------------------------------------

inline json dataset_config_to_json(const DatasetConfig& cfg) {
  json counts = json::object();
  for (const auto& [t, c] : cfg.counts) counts[std::string(task_slug(t))] = c;
  return json{{"master_seed", cfg.master_seed},
              {"mode", std::string(option_mode_slug(cfg.mode))},
              {"counts", counts},
              {"pools",
               {{"icons", cfg.pools.icons_dir.string()},
                {"hanzi", cfg.pools.hanzi_file.string()},
                {"hanzi_nearform", cfg.pools.near_form_file.string()},
                {"words", cfg.pools.words_file.string()},
                {"images", cfg.pools.images_dir.string()},
                {"captions", cfg.pools.captions_file.string()}}},
              {"difficulty",
               {{"grid_n_min", cfg.difficulty.grid_n_min},
                {"grid_n_max", cfg.difficulty.grid_n_max},
                {"resolutions", cfg.difficulty.resolutions},
                {"level_min", cfg.difficulty.level_min},
                {"level_max", cfg.difficulty.level_max}}},
              {"style",
               {{"grid_lines", cfg.grid_lines},
                {"glyph_scale_permille", cfg.glyph_scale_permille},
                {"font", cfg.font_file.empty() ? "builtin" : cfg.font_file.string()}}},
              {"prompt_templates_file", cfg.prompt_templates_file.string()},
              {"word_search_yes_percent", cfg.word_search_yes_percent},
              {"write_images", cfg.write_images},
              {"workers", cfg.workers},
              {"png_level_grid", cfg.png_level_grid},
              {"png_level_photo", cfg.png_level_photo}};
}

inline DatasetConfig dataset_config_from_json(const json& j) {
  DatasetConfig cfg;
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.mode = option_mode_from_slug(j.value("mode", "fixed"));
  if (j.contains("counts")) {
    cfg.counts.clear();
    for (const auto& [slug, c] : j.at("counts").items())
      cfg.counts[task_from_slug(slug)] = c.get<int>();
  }
  if (j.contains("pools")) {
    const json& p = j.at("pools");
    cfg.pools.icons_dir = p.value("icons", "");
    cfg.pools.hanzi_file = p.value("hanzi", "");
    cfg.pools.near_form_file = p.value("hanzi_nearform", "");
    cfg.pools.words_file = p.value("words", "");
    cfg.pools.images_dir = p.value("images", "");
    cfg.pools.captions_file = p.value("captions", "");
  }
  if (j.contains("difficulty")) {
    const json& d = j.at("difficulty");
    cfg.difficulty.grid_n_min = d.value("grid_n_min", 3);
    cfg.difficulty.grid_n_max = d.value("grid_n_max", 9);
    if (d.contains("resolutions")) cfg.difficulty.resolutions = d.at("resolutions").get<std::vector<int>>();
    cfg.difficulty.level_min = d.value("level_min", 1);
    cfg.difficulty.level_max = d.value("level_max", 5);
  }
  if (j.contains("style")) {
    const json& s = j.at("style");
    cfg.grid_lines = s.value("grid_lines", true);
    cfg.glyph_scale_permille = s.value("glyph_scale_permille", 700);
    const std::string font = s.value("font", "builtin");
    if (font != "builtin") cfg.font_file = font;
  }
  cfg.prompt_templates_file = j.value("prompt_templates_file", "");
  cfg.word_search_yes_percent = j.value("word_search_yes_percent", 50);
  cfg.write_images = j.value("write_images", true);
  cfg.workers = j.value("workers", 0);
  cfg.png_level_grid = j.value("png_level_grid", 4);
  cfg.png_level_photo = j.value("png_level_photo", 3);
  return cfg;
}

// --- Generation pipeline --------------------------------------------------------

namespace gen {

// Bounded cache of crop-resized pool images; values are immutable once
// inserted so shared_ptrs stay valid after eviction.
class BaseImageCache {
 public:
  explicit BaseImageCache(std::size_t capacity = 64) : capacity_(capacity) {}

  std::shared_ptr<const Image> get(const ImageEntry& entry, int resolution) {
    const std::string key = entry.id + "@" + std::to_string(resolution);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto img = std::make_shared<const Image>(load_source_image(entry, resolution));
    if (order_.size() >= capacity_) {
      cache_.erase(order_.front());
      order_.pop_front();
    }
    cache_.emplace(key, img);
    order_.push_back(key);
    return img;
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Image>> cache_;
  std::deque<std::string> order_;
};

struct PoolBundle {
  SourcePool icons;
  SourcePool hanzi;
  SourcePool words;
  SourcePool images;
  std::unique_ptr<IconCache> icon_cache;
  BaseImageCache base_cache;

  bool has(PoolKind k) const {
    switch (k) {
      case PoolKind::Icon: return !icons.icons.empty();
      case PoolKind::Hanzi: return !hanzi.hanzi.empty();
      case PoolKind::Word: return !words.words.empty();
      case PoolKind::Image: return !images.images.empty();
      default: return false;
    }
  }
};

inline void load_pools(const DatasetConfig& cfg, PoolBundle& pools) {
  auto needs = [&](TaskId t) { return cfg.count_for(t) > 0; };
  if (needs(TaskId::IconConnect)) {
    pools.icons = load_icon_pool(cfg.pools.icons_dir);
    pools.icon_cache = std::make_unique<IconCache>(pools.icons);
  }
  if (needs(TaskId::HanziMatrix))
    pools.hanzi = load_hanzi_pool(cfg.pools.hanzi_file, cfg.pools.near_form_file);
  if (needs(TaskId::WordSearch)) pools.words = load_word_pool(cfg.pools.words_file);
  if (needs(TaskId::Jigsaw) || needs(TaskId::DifferenceHunt))
    pools.images = load_image_pool(cfg.pools.images_dir, cfg.pools.captions_file);
}

struct EncodedFile {
  std::string relative_path;
  std::vector<std::uint8_t> bytes;
};

struct SampleOutcome {
  bool accepted = false;
  std::string reject_reason;
  PuzzleSample sample;
  std::vector<EncodedFile> files;
};

// Exact Yes/No stratification: sample `index` is a positive iff the Bresenham
// accumulator crosses an integer at this step.
inline bool word_search_positive(std::uint64_t index, int yes_percent) {
  const std::uint64_t num = static_cast<std::uint64_t>(yes_percent);
  return ((index + 1) * num) / 100 > (index * num) / 100;
}

inline std::string image_dir_of(TaskId task) {
  return "images/" + std::string(task_slug(task));
}

// Builds one sample. The per-sample draw order is fixed and documented by
// the code path; any change to it is a determinism break.
inline SampleOutcome generate_sample(const DatasetConfig& cfg, PoolBundle& pools,
                                     const RenderStyle& style, const PromptTemplates& templates,
                                     TaskId task, std::uint64_t index) {
  SampleOutcome out;
  SeedContext ctx{cfg.master_seed};
  RandomStream rs = ctx.stream_for(task, index);
  const std::string id = sample_id(task, index);
  const std::string img_dir = image_dir_of(task);

  PuzzleSample& s = out.sample;
  s.id = id;
  s.task = task;
  s.seed_index = index;

  auto draw_resolution = [&] {
    return cfg.difficulty.resolutions[rs.next_below(cfg.difficulty.resolutions.size())];
  };
  // render lazily: manifest-only runs skip rasterization and encoding entirely
  auto push_png = [&](const std::string& rel, int level, auto&& make_image) {
    if (cfg.write_images) out.files.push_back({rel, encode_png(make_image(), level)});
  };
  std::optional<Image> photo_base;  // jigsaw/difference-hunt fingerprinted base

  switch (task) {
    case TaskId::IconConnect: {
      const int n = static_cast<int>(rs.next_int(cfg.difficulty.grid_n_min, cfg.difficulty.grid_n_max));
      const GridSpec grid(n, 512);
      SamplingCondition cond;
      cond.count = n * n + 1;
      cond.color_mode = rs.next_below(2) == 0 ? ColorMode::Original : ColorMode::Tinted;
      const MaterialSet mats = sample_materials(pools.icons, cond, rs);
      const IconConnectRule rule = design_icon_connect(mats, grid, rs);
      const std::uint64_t legend_dither = rs.next_u64();
      s.rule = PuzzleRule{rule};
      s.difficulty = json{{"n", n},
                          {"color_mode", cond.color_mode == ColorMode::Tinted ? "tinted" : "original"}};
      push_png(img_dir + "/" + id + ".png", cfg.png_level_grid,
               [&] { return render_grid(rule, *pools.icon_cache, style); });
      push_png(img_dir + "/" + id + "_legend.png", cfg.png_level_grid, [&] {
        return render_icon_legend(pools.icon_cache->get(rule.target_icon), rule.tint, legend_dither,
                                  style);
      });
      s.image_refs = {img_dir + "/" + id + ".png", img_dir + "/" + id + "_legend.png"};
      break;
    }
    case TaskId::HanziMatrix: {
      const int n = static_cast<int>(rs.next_int(cfg.difficulty.grid_n_min, cfg.difficulty.grid_n_max));
      const GridSpec grid(n, 512);
      const int m = static_cast<int>(
          rs.next_int(2, std::min<std::int64_t>(n * n, static_cast<std::int64_t>(pools.hanzi.hanzi.size()))));
      SamplingCondition cond;
      cond.count = m;
      cond.near_form_priority = true;
      const MaterialSet mats = sample_materials(pools.hanzi, cond, rs);
      const HanziMatrixRule rule = design_hanzi_matrix(mats, grid, rs);
      s.rule = PuzzleRule{rule};
      s.difficulty = json{{"n", n}, {"near_form_priority", true}};
      push_png(img_dir + "/" + id + ".png", cfg.png_level_grid,
               [&] { return render_grid(rule, style); });
      s.image_refs = {img_dir + "/" + id + ".png"};
      break;
    }
    case TaskId::WordSearch: {
      const int n = static_cast<int>(rs.next_int(cfg.difficulty.grid_n_min, cfg.difficulty.grid_n_max));
      const GridSpec grid(n, 512);
      const bool present = word_search_positive(index, cfg.word_search_yes_percent);
      SamplingCondition cond;
      cond.count = 1;
      cond.max_word_length = n;
      const MaterialSet mats = sample_materials(pools.words, cond, rs);
      const WordSearchRule rule = design_word_search(mats, grid, present, rs);
      s.rule = PuzzleRule{rule};
      s.difficulty = json{{"n", n}, {"word_length", static_cast<int>(rule.word.size())}};
      push_png(img_dir + "/" + id + ".png", cfg.png_level_grid,
               [&] { return render_grid(rule, style); });
      s.image_refs = {img_dir + "/" + id + ".png"};
      break;
    }
    case TaskId::GridSum: {
      const int n = static_cast<int>(rs.next_int(cfg.difficulty.grid_n_min, cfg.difficulty.grid_n_max));
      const GridSpec grid(n, 512);
      SamplingCondition cond;
      cond.sign_mode = static_cast<SignMode>(rs.next_below(3));
      cond.precision = static_cast<NumberPrecision>(rs.next_below(3));
      const GridSumRule rule = design_grid_sum(grid, cond, rs);
      s.rule = PuzzleRule{rule};
      s.difficulty = json{{"n", n},
                          {"sign_mode", std::string(sign_mode_slug(cond.sign_mode))},
                          {"precision", static_cast<int>(cond.precision)}};
      push_png(img_dir + "/" + id + ".png", cfg.png_level_grid,
               [&] { return render_grid(rule, style); });
      s.image_refs = {img_dir + "/" + id + ".png"};
      break;
    }
    case TaskId::Jigsaw: {
      const int n = static_cast<int>(rs.next_int(cfg.difficulty.grid_n_min, cfg.difficulty.grid_n_max));
      const int resolution = draw_resolution();
      const bool random_seg = rs.next_below(2) == 1;
      const ImageEntry& entry = pools.images.images[rs.next_below(pools.images.images.size())];
      const std::uint64_t dither = rs.next_u64();
      photo_base = *pools.base_cache.get(entry, resolution);
      apply_fingerprint_dither(*photo_base, dither);
      const auto designed = design_jigsaw(entry, *photo_base, n, random_seg, rs, dither);
      if (designed.rejected()) {
        out.reject_reason = designed.reject_reason;
        return out;
      }
      const JigsawRule& rule = *designed.rule;
      s.rule = PuzzleRule{rule};
      s.difficulty = json{{"n", n},
                          {"resolution", resolution},
                          {"segmentation", random_seg ? "random" : "regular"}};
      break;
    }
    case TaskId::DifferenceHunt: {
      const int level = static_cast<int>(rs.next_int(cfg.difficulty.level_min, cfg.difficulty.level_max));
      const int resolution = draw_resolution();
      const ImageEntry& entry = pools.images.images[rs.next_below(pools.images.images.size())];
      const std::uint64_t dither = rs.next_u64();
      photo_base = *pools.base_cache.get(entry, resolution);
      apply_fingerprint_dither(*photo_base, dither);
      const auto designed = design_difference_hunt(entry, *photo_base, level, rs, dither);
      if (designed.rejected()) {
        out.reject_reason = designed.reject_reason;
        return out;
      }
      const DiffHuntRule& rule = *designed.rule;
      s.rule = PuzzleRule{rule};
      s.difficulty = json{{"resolution", resolution}, {"level", level}};
      push_png(img_dir + "/" + id + ".png", cfg.png_level_photo, [&] { return *photo_base; });
      push_png(img_dir + "/" + id + "_pair.png", cfg.png_level_photo,
               [&] { return apply_distortions(*photo_base, rule); });
      s.image_refs = {img_dir + "/" + id + ".png", img_dir + "/" + id + "_pair.png"};
      break;
    }
  }

  s.ground_truth = ground_truth_for(s.rule);
  s.question = build_question(s.rule, templates);
  if (cfg.mode == OptionMode::DirectAnswer) {
    s.options.reset();
  } else {
    s.options = arrange_options(derive_options(s.rule), cfg.mode, task, rs);
  }

  // Jigsaw option tiles are written in label order (tile0 = A .. tile3 = D)
  // so the attachment order matches the arrangement.
  if (task == TaskId::Jigsaw) {
    const JigsawRule& rule = std::get<JigsawRule>(s.rule);
    const Image& base = *photo_base;
    s.image_refs = {img_dir + "/" + id + "_incomplete.png"};
    push_png(img_dir + "/" + id + "_incomplete.png", cfg.png_level_photo, [&] {
      Image incomplete = base;
      incomplete.fill_rect(rule.boundaries[static_cast<std::size_t>(rule.missing_index)],
                           kMissingTileFill);
      return incomplete;
    });
    for (std::size_t slot = 0; slot < s.options->entries.size(); ++slot) {
      const std::string& display = s.options->entries[slot].second;  // "tile k"
      const int tile_index = std::stoi(display.substr(5));
      const std::string rel = img_dir + "/" + id + "_tile" + std::to_string(slot) + ".png";
      push_png(rel, cfg.png_level_photo,
               [&] { return base.crop(rule.boundaries[static_cast<std::size_t>(tile_index)]); });
      s.image_refs.push_back(rel);
    }
  }

  out.accepted = true;
  return out;
}

}  // namespace gen

// --- Dataset writer --------------------------------------------------------------

inline RenderStyle style_from_config(const DatasetConfig& cfg) {
  RenderStyle style = RenderStyle::defaults();
  style.grid_lines = cfg.grid_lines;
  style.glyph_scale_permille = cfg.glyph_scale_permille;
  if (!cfg.font_file.empty())
    style.font = std::make_shared<FontLibrary>(FontLibrary::from_file(cfg.font_file));
  return style;
}

// Generates the full dataset under `out_dir`: per-sample images,
// manifest.jsonl in canonical (task, seed_index) order, rejections.log and
// config.snapshot. Rejected indices are replaced by over-drawing further
// indices of the same stream family, so the result is seed-determined
// regardless of worker count.
inline GenerationReport generate_dataset(const DatasetConfig& cfg, const fs::path& out_dir,
                                         bool force = false) {
  const auto t0 = std::chrono::steady_clock::now();
  if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
    if (!force)
      throw std::runtime_error("output directory not empty (use force): " + out_dir.string());
    fs::remove_all(out_dir);
  }
  fs::create_directories(out_dir);

  DatasetConfig cfg_resolved = cfg;
  if (cfg_resolved.mode == OptionMode::DirectAnswer && cfg_resolved.count_for(TaskId::Jigsaw) > 0)
    cfg_resolved.counts[TaskId::Jigsaw] = 0;  // no direct-answer form for jigsaw
  if (cfg_resolved.total_count() <= 0) throw std::invalid_argument("dataset would be empty");

  gen::PoolBundle pools;
  gen::load_pools(cfg_resolved, pools);
  const RenderStyle style = style_from_config(cfg_resolved);
  const PromptTemplates templates = cfg_resolved.prompt_templates_file.empty()
                                        ? PromptTemplates::defaults()
                                        : PromptTemplates::from_file(cfg_resolved.prompt_templates_file);

  // font coverage is validated before any rendering happens
  if (cfg_resolved.count_for(TaskId::HanziMatrix) > 0)
    for (const auto& h : pools.hanzi.hanzi)
      if (!style.font_ref().covers(h.codepoint)) throw MissingGlyphError(h.codepoint);

  for (TaskId t : kAllTasks)
    if (cfg_resolved.count_for(t) > 0) fs::create_directories(out_dir / gen::image_dir_of(t));

  GenerationReport report;
  std::vector<PuzzleSample> samples;

  const int worker_count = cfg_resolved.workers > 0
                               ? cfg_resolved.workers
                               : std::max(1u, std::thread::hardware_concurrency());

  for (TaskId task : kAllTasks) {
    const int target = cfg_resolved.count_for(task);
    if (target <= 0) continue;

    std::mutex mtx;
    std::map<std::uint64_t, gen::SampleOutcome> pending;
    std::atomic<std::uint64_t> next_index{0};
    std::uint64_t frontier = 0;
    int accepted = 0;
    std::atomic<bool> done{false};
    std::exception_ptr first_error;

    auto commit = [&](std::uint64_t idx, gen::SampleOutcome& outcome) {
      // runs under the lock, in strict index order
      if (!outcome.accepted) {
        report.rejections.push_back({task, idx, outcome.reject_reason});
        return;
      }
      for (const auto& file : outcome.files) {
        std::ofstream f(out_dir / file.relative_path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + file.relative_path);
        f.write(reinterpret_cast<const char*>(file.bytes.data()),
                static_cast<std::streamsize>(file.bytes.size()));
      }
      samples.push_back(std::move(outcome.sample));
      ++accepted;
      if (accepted >= target) done = true;
    };

    auto worker = [&] {
      while (!done) {
        const std::uint64_t idx = next_index.fetch_add(1);
        gen::SampleOutcome outcome;
        try {
          outcome = gen::generate_sample(cfg_resolved, pools, style, templates, task, idx);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mtx);
          if (!first_error) first_error = std::current_exception();
          done = true;
          return;
        }
        std::lock_guard<std::mutex> lock(mtx);
        pending.emplace(idx, std::move(outcome));
        while (!done) {
          auto it = pending.find(frontier);
          if (it == pending.end()) break;
          commit(frontier, it->second);
          pending.erase(it);
          ++frontier;
        }
      }
    };

    if (worker_count == 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < worker_count; ++w) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    if (accepted < target)
      throw std::runtime_error("generation under-produced for " + std::string(task_slug(task)));
    report.generated[task] = accepted;
  }

  // canonical order: task enum order, then seed index
  std::sort(samples.begin(), samples.end(), [](const PuzzleSample& a, const PuzzleSample& b) {
    if (a.task != b.task) return static_cast<int>(a.task) < static_cast<int>(b.task);
    return a.seed_index < b.seed_index;
  });
  std::sort(report.rejections.begin(), report.rejections.end(),
            [](const RejectionEntry& a, const RejectionEntry& b) {
              if (a.task != b.task) return static_cast<int>(a.task) < static_cast<int>(b.task);
              return a.index < b.index;
            });

  {
    std::ofstream manifest(out_dir / "manifest.jsonl", std::ios::trunc);
    if (!manifest) throw std::runtime_error("cannot write manifest.jsonl");
    for (const PuzzleSample& s : samples) manifest << manifest_line(s) << "\n";
  }
  {
    std::ofstream rej(out_dir / "rejections.log", std::ios::trunc);
    for (const auto& r : report.rejections)
      rej << task_slug(r.task) << "\t" << r.index << "\t" << r.reason << "\n";
  }
  {
    json snapshot = json{{"schema_version", 1},
                         {"config", dataset_config_to_json(cfg_resolved)},
                         {"dh_schedule",
                          {{"side_frac_max_l1", DiffHuntSchedule::side_frac_max(1)},
                           {"side_frac_max_l5", DiffHuntSchedule::side_frac_max(5)},
                           {"side_frac_min_factor", 0.6},
                           {"intensity_permille_l1", DiffHuntSchedule::intensity_permille(1)},
                           {"intensity_permille_l5", DiffHuntSchedule::intensity_permille(5)},
                           {"region_gap_px", DiffHuntSchedule::kRegionGapPx},
                           {"detectability_floor", DiffHuntSchedule::kDetectabilityFloor},
                           {"distractor_floor", DiffHuntSchedule::kDistractorFloor}}},
                         {"prompt_templates", templates.all()},
                         {"pool_hashes", json::object()}};
    auto& hashes = snapshot["pool_hashes"];
    if (pools.has(PoolKind::Icon)) hashes["icons"] = codec::u64_to_string(pools.icons.content_hash());
    if (pools.has(PoolKind::Hanzi)) hashes["hanzi"] = codec::u64_to_string(pools.hanzi.content_hash());
    if (pools.has(PoolKind::Word)) hashes["words"] = codec::u64_to_string(pools.words.content_hash());
    if (pools.has(PoolKind::Image)) hashes["images"] = codec::u64_to_string(pools.images.content_hash());
    std::ofstream snap(out_dir / "config.snapshot", std::ios::trunc);
    snap << snapshot.dump(2) << "\n";
  }

  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// The benchmark-refreshing workflow: regenerate the image-based tasks over a
// caller-supplied image corpus (with caption provenance), leaving the
// pipeline identical to generate_dataset.
inline GenerationReport refresh_from_images(const RefreshConfig& refresh, const fs::path& out_dir,
                                            bool force = false) {
  if (refresh.tasks.empty()) throw std::invalid_argument("refresh task set is empty");
  for (TaskId t : refresh.tasks)
    if (t != TaskId::Jigsaw && t != TaskId::DifferenceHunt)
      throw std::invalid_argument("refresh supports jigsaw and difference_hunt only");
  DatasetConfig cfg;
  cfg.master_seed = refresh.master_seed;
  cfg.mode = refresh.mode;
  cfg.counts = {};
  for (TaskId t : refresh.tasks) cfg.counts[t] = refresh.count_per_task;
  cfg.pools.images_dir = refresh.images_dir;
  cfg.pools.captions_file = refresh.captions_file;
  cfg.workers = refresh.workers;
  return generate_dataset(cfg, out_dir, force);
}

// --- Verification -----------------------------------------------------------------

struct VerifyFailure {
  std::string id;
  std::string detail;
};

struct VerifyReport {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::vector<VerifyFailure> failures;

  bool all_passed() const { return failures.empty(); }

  json to_json() const {
    json fails = json::array();
    for (const auto& f : failures) fails.push_back({{"id", f.id}, {"detail", f.detail}});
    return json{{"total", total}, {"passed", passed}, {"failures", fails}};
  }
};

namespace verifydetail {

inline void check(VerifyReport& report, std::vector<std::string>& sample_failures, bool ok,
                  const std::string& detail) {
  if (!ok) sample_failures.push_back(detail);
}

inline int tile_index_of(const std::string& display) {
  if (display.rfind("tile ", 0) != 0) throw std::runtime_error("malformed tile option: " + display);
  return std::stoi(display.substr(5));
}

}  // namespace verifydetail

// Re-derives every ground truth from its rule, re-checks option arrangements
// against the recorded mode, and re-validates rendered artifacts
// (partition/distinctness for jigsaw, diff-mask and floors for difference
// hunt, manifest-file closure in both directions).
inline VerifyReport verify_dataset(const fs::path& dir) {
  VerifyReport report;
  const fs::path manifest_path = dir / "manifest.jsonl";
  if (!fs::exists(manifest_path)) throw std::runtime_error("manifest missing: " + manifest_path.string());

  bool images_written = true;
  OptionMode mode = OptionMode::FixedOption;
  bool mode_known = false;
  if (fs::exists(dir / "config.snapshot")) {
    std::ifstream snap(dir / "config.snapshot");
    const json j = json::parse(snap);
    images_written = j.at("config").value("write_images", true);
    mode = option_mode_from_slug(j.at("config").value("mode", "fixed"));
    mode_known = true;
  }

  const std::vector<PuzzleSample> samples = read_manifest(manifest_path);
  std::set<std::string> referenced;

  for (const PuzzleSample& s : samples) {
    ++report.total;
    std::vector<std::string> failures;

    const RuleReport rule_report = verify_rule(s.rule);
    for (const auto& c : rule_report.checks)
      if (!c.passed)
        failures.push_back("rule:" + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
    if (rule_report.passed && rule_report.derived && !(*rule_report.derived == s.ground_truth))
      failures.push_back("ground_truth mismatch: re-derived " + rule_report.derived->display() +
                         ", stored " + s.ground_truth.display());

    if (s.id != sample_id(s.task, s.seed_index)) failures.push_back("id does not match task/index");

    // option invariants
    if (s.options) {
      int matches = 0;
      for (const auto& [label, text] : s.options->entries)
        matches += text == s.ground_truth.display() ? 1 : 0;
      verifydetail::check(report, failures, matches == 1,
                          "options must match ground truth exactly once, got " +
                              std::to_string(matches));
      try {
        verifydetail::check(report, failures,
                            s.options->text_for(s.options->correct_label) == s.ground_truth.display(),
                            "correct_label does not map to the ground truth");
      } catch (const std::exception& e) {
        failures.push_back(e.what());
      }
      if (mode_known && mode == OptionMode::FixedOption) {
        if (s.options->entries.size() == 4)
          verifydetail::check(report, failures, s.options->correct_label == "B",
                              "fixed mode requires the answer at B");
        if (s.task == TaskId::WordSearch && !s.options->entries.empty())
          verifydetail::check(report, failures,
                              s.options->entries[0].first == "A" &&
                                  s.options->entries[0].second == "Yes",
                              "fixed word search requires Yes at A");
      }
      if (mode_known && mode == OptionMode::DirectAnswer)
        failures.push_back("direct mode sample carries options");
    } else if (mode_known && mode != OptionMode::DirectAnswer) {
      failures.push_back("missing options outside direct mode");
    }

    // difficulty consistency with the embedded rule
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, IconConnectRule> || std::is_same_v<T, HanziMatrixRule> ||
                        std::is_same_v<T, WordSearchRule> || std::is_same_v<T, GridSumRule>) {
            verifydetail::check(report, failures, s.difficulty.value("n", -1) == r.grid.n,
                                "difficulty n mismatch");
          } else if constexpr (std::is_same_v<T, JigsawRule>) {
            verifydetail::check(report, failures, s.difficulty.value("resolution", -1) == r.resolution,
                                "difficulty resolution mismatch");
          } else if constexpr (std::is_same_v<T, DiffHuntRule>) {
            verifydetail::check(report, failures, s.difficulty.value("resolution", -1) == r.resolution,
                                "difficulty resolution mismatch");
            verifydetail::check(report, failures, s.difficulty.value("level", -1) == r.level,
                                "difficulty level mismatch");
          }
        },
        s.rule);

    for (const auto& ref : s.image_refs) referenced.insert(ref);

    if (images_written) {
      bool files_ok = true;
      for (const auto& ref : s.image_refs)
        if (!fs::exists(dir / ref)) {
          failures.push_back("missing image file: " + ref);
          files_ok = false;
        }

      if (files_ok && s.task == TaskId::Jigsaw && s.options) {
        const auto& rule = std::get<JigsawRule>(s.rule);
        const Image incomplete = read_png(dir / s.image_refs[0]);
        verifydetail::check(report, failures,
                            incomplete.width() == rule.resolution && incomplete.height() == rule.resolution,
                            "incomplete image has wrong dimensions");
        const PixelRect& hole = rule.boundaries[static_cast<std::size_t>(rule.missing_index)];
        bool hole_gray = incomplete.width() == rule.resolution;
        if (hole_gray)
          for (int y = hole.y; y < hole.y + hole.h && hole_gray; ++y)
            for (int x = hole.x; x < hole.x + hole.w && hole_gray; ++x)
              hole_gray = incomplete.at(x, y) == kMissingTileFill;
        verifydetail::check(report, failures, hole_gray, "missing-tile hole is not mid-gray");

        // tiles: dimensions match boundaries; distractors clear the floor
        std::vector<Image> tiles;
        int correct_slot = -1;
        for (std::size_t slot = 0; slot < s.options->entries.size(); ++slot) {
          tiles.push_back(read_png(dir / s.image_refs[slot + 1]));
          const int tidx = verifydetail::tile_index_of(s.options->entries[slot].second);
          const PixelRect& b = rule.boundaries[static_cast<std::size_t>(tidx)];
          verifydetail::check(report, failures,
                              tiles.back().width() == b.w && tiles.back().height() == b.h,
                              "tile dimensions do not match the boundary record");
          if (s.options->entries[slot].first == s.options->correct_label)
            correct_slot = static_cast<int>(slot);
        }
        if (correct_slot >= 0) {
          for (std::size_t slot = 0; slot < tiles.size(); ++slot) {
            if (static_cast<int>(slot) == correct_slot) continue;
            Image tile = tiles[slot];
            const Image& correct = tiles[static_cast<std::size_t>(correct_slot)];
            if (tile.width() != correct.width() || tile.height() != correct.height())
              tile = tile.resample(correct.width(), correct.height());
            verifydetail::check(report, failures,
                                mean_abs_diff(tile, correct) >= DiffHuntSchedule::kDistractorFloor,
                                "distractor tile below the distinctness floor");
          }
        } else {
          failures.push_back("correct label not among option slots");
        }
      }

      if (files_ok && s.task == TaskId::DifferenceHunt) {
        const auto& rule = std::get<DiffHuntRule>(s.rule);
        const Image original = read_png(dir / s.image_refs[0]);
        const Image pair = read_png(dir / s.image_refs[1]);
        if (original.width() == pair.width() && original.height() == pair.height()) {
          const auto mask = diff_mask(original, pair);
          bool outside_clean = true;
          for (int y = 0; y < original.height() && outside_clean; ++y)
            for (int x = 0; x < original.width() && outside_clean; ++x) {
              if (!mask[static_cast<std::size_t>(y) * original.width() + x]) continue;
              bool inside = false;
              for (const auto& reg : rule.regions) inside = inside || reg.rect.contains(x, y);
              outside_clean = inside;
            }
          verifydetail::check(report, failures, outside_clean,
                              "changed pixels outside declared regions");
          for (const auto& reg : rule.regions)
            verifydetail::check(report, failures,
                                mean_abs_diff_region(original, pair, reg.rect) >=
                                    DiffHuntSchedule::kDetectabilityFloor,
                                "region below detectability floor");
          verifydetail::check(report, failures,
                              count_components(mask, original.width(), original.height()) >=
                                  static_cast<int>(rule.regions.size()),
                              "fewer difference components than regions");
        } else {
          failures.push_back("pair image dimensions mismatch");
        }
      }
    }

    if (failures.empty()) {
      ++report.passed;
    } else {
      std::string detail;
      for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
      report.failures.push_back({s.id, detail});
    }
  }

  // files closure: no orphan images
  if (images_written && fs::exists(dir / "images")) {
    for (const auto& entry : fs::recursive_directory_iterator(dir / "images")) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = fs::relative(entry.path(), dir).generic_string();
      if (!referenced.count(rel)) report.failures.push_back({rel, "orphan image file"});
    }
  }
  return report;
}

// --- Directory hashing (determinism / freshness checks) ----------------------------

inline std::uint64_t file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64_bytes(buf, static_cast<std::size_t>(in.gcount()), h);
  return h;
}

inline std::uint64_t directory_hash(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : files) {
    const std::string rel = fs::relative(f, dir).generic_string();
    h = fnv1a64(rel, h);
    const std::uint64_t fh = file_hash(f);
    h = fnv1a64_bytes(&fh, sizeof(fh), h);
  }
  return h;
}

// Content hashes of every image file, keyed by relative path.
inline std::map<std::string, std::uint64_t> image_hashes(const fs::path& dir) {
  std::map<std::string, std::uint64_t> out;
  const fs::path images = dir / "images";
  if (!fs::exists(images)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(images))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      out[fs::relative(entry.path(), dir).generic_string()] = file_hash(entry.path());
  return out;
}

}  // namespace pzl
