#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pzl/qa.hpp"
#include "pzl/rules.hpp"

namespace pzl {

using json = nlohmann::json;

// One generated evaluation instance. The embedded rule is the full
// generation record: sufficient to re-derive the ground truth without the
// image.
struct PuzzleSample {
  std::string id;
  TaskId task = TaskId::IconConnect;
  std::vector<std::string> image_refs;  // dataset-relative paths
  std::string question;
  std::optional<OptionArrangement> options;  // absent in direct mode
  GroundTruth ground_truth;
  PuzzleRule rule;
  json difficulty = json::object();
  std::uint64_t seed_index = 0;
};

// --- JSON codec ------------------------------------------------------------------
// nlohmann's default object storage is key-sorted, which gives the manifest
// its canonical alphabetical field order for free. All values are integers,
// booleans or strings; 64-bit seeds are serialized as strings.

namespace codec {

inline json grid_to_json(const GridSpec& g) { return json{{"n", g.n}, {"resolution", g.resolution}}; }

inline GridSpec grid_from_json(const json& j) {
  return GridSpec(j.at("n").get<int>(), j.at("resolution").get<int>());
}

inline json rect_to_json(const PixelRect& r) { return json::array({r.x, r.y, r.w, r.h}); }

inline PixelRect rect_from_json(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

inline std::string u64_to_string(std::uint64_t v) { return std::to_string(v); }

inline std::uint64_t u64_from_string(const std::string& s) { return std::stoull(s); }

inline json rule_to_json(const PuzzleRule& rule) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IconConnectRule>) {
          return json{{"grid", grid_to_json(r.grid)},
                      {"target_icon", r.target_icon},
                      {"tint", r.tint},
                      {"run",
                       {{"orientation", r.run.row_oriented ? "row" : "column"},
                        {"line", r.run.line},
                        {"start", r.run.start},
                        {"length", r.run.length}}},
                      {"filler", r.filler}};
        } else if constexpr (std::is_same_v<T, HanziMatrixRule>) {
          json cells = json::array();
          for (char32_t cp : r.cells) cells.push_back(utf8_encode(cp));
          return json{{"grid", grid_to_json(r.grid)}, {"cells", cells}, {"unique_count", r.unique_count}};
        } else if constexpr (std::is_same_v<T, WordSearchRule>) {
          json rows = json::array();
          for (int row = 0; row < r.grid.n; ++row)
            rows.push_back(std::string(r.letters.begin() + static_cast<std::ptrdiff_t>(row) * r.grid.n,
                                       r.letters.begin() + static_cast<std::ptrdiff_t>(row + 1) * r.grid.n));
          json placement;
          if (r.present)
            placement = json{{"orientation", r.row_oriented ? "row" : "column"},
                             {"line", r.line},
                             {"start", r.start}};
          return json{{"grid", grid_to_json(r.grid)},
                      {"word", r.word},
                      {"present", r.present},
                      {"placement", placement},
                      {"letters", rows}};
        } else if constexpr (std::is_same_v<T, GridSumRule>) {
          json values = json::array();
          for (const Decimal& v : r.values) values.push_back(v.to_string());
          return json{{"grid", grid_to_json(r.grid)},
                      {"sign_mode", std::string(sign_mode_slug(r.sign_mode))},
                      {"precision", static_cast<int>(r.precision)},
                      {"values", values},
                      {"sum", r.sum.to_string()}};
        } else if constexpr (std::is_same_v<T, JigsawRule>) {
          json bounds = json::array();
          for (const auto& b : r.boundaries) bounds.push_back(rect_to_json(b));
          return json{{"source_image", r.source_image},
                      {"source_caption", r.source_caption},
                      {"resolution", r.resolution},
                      {"n", r.n},
                      {"segmentation", r.random_segmentation ? "random" : "regular"},
                      {"boundaries", bounds},
                      {"missing_index", r.missing_index},
                      {"distractors", json::array({r.distractors[0], r.distractors[1], r.distractors[2]})},
                      {"dither_seed", u64_to_string(r.dither_seed)}};
        } else {
          json regions = json::array();
          for (const auto& reg : r.regions)
            regions.push_back(json{{"rect", rect_to_json(reg.rect)},
                                   {"kind", std::string(distortion_slug(reg.kind))},
                                   {"intensity_permille", reg.intensity_permille}});
          return json{{"source_image", r.source_image},
                      {"source_caption", r.source_caption},
                      {"resolution", r.resolution},
                      {"level", r.level},
                      {"regions", regions},
                      {"noise_seed", u64_to_string(r.noise_seed)},
                      {"dither_seed", u64_to_string(r.dither_seed)}};
        }
      },
      rule);
}

inline PuzzleRule rule_from_json(TaskId task, const json& j) {
  switch (task) {
    case TaskId::IconConnect: {
      IconConnectRule r;
      r.grid = grid_from_json(j.at("grid"));
      r.target_icon = j.at("target_icon").get<std::string>();
      r.tint = j.at("tint").get<int>();
      const json& run = j.at("run");
      r.run.row_oriented = run.at("orientation").get<std::string>() == "row";
      r.run.line = run.at("line").get<int>();
      r.run.start = run.at("start").get<int>();
      r.run.length = run.at("length").get<int>();
      r.filler = j.at("filler").get<std::vector<std::string>>();
      return r;
    }
    case TaskId::HanziMatrix: {
      HanziMatrixRule r;
      r.grid = grid_from_json(j.at("grid"));
      for (const auto& cell : j.at("cells")) {
        const auto cps = utf8_decode(cell.get<std::string>());
        if (cps.size() != 1) throw std::runtime_error("hanzi cell must hold one codepoint");
        r.cells.push_back(cps[0]);
      }
      r.unique_count = j.at("unique_count").get<int>();
      return r;
    }
    case TaskId::WordSearch: {
      WordSearchRule r;
      r.grid = grid_from_json(j.at("grid"));
      r.word = j.at("word").get<std::string>();
      r.present = j.at("present").get<bool>();
      if (r.present) {
        const json& p = j.at("placement");
        r.row_oriented = p.at("orientation").get<std::string>() == "row";
        r.line = p.at("line").get<int>();
        r.start = p.at("start").get<int>();
      }
      for (const auto& row : j.at("letters")) {
        const std::string s = row.get<std::string>();
        r.letters.insert(r.letters.end(), s.begin(), s.end());
      }
      return r;
    }
    case TaskId::GridSum: {
      GridSumRule r;
      r.grid = grid_from_json(j.at("grid"));
      r.sign_mode = sign_mode_from_slug(j.at("sign_mode").get<std::string>());
      r.precision = static_cast<NumberPrecision>(j.at("precision").get<int>());
      for (const auto& v : j.at("values")) r.values.push_back(Decimal::parse(v.get<std::string>()));
      r.sum = Decimal::parse(j.at("sum").get<std::string>());
      return r;
    }
    case TaskId::Jigsaw: {
      JigsawRule r;
      r.source_image = j.at("source_image").get<std::string>();
      r.source_caption = j.value("source_caption", std::string());
      r.resolution = j.at("resolution").get<int>();
      r.n = j.at("n").get<int>();
      r.random_segmentation = j.at("segmentation").get<std::string>() == "random";
      for (const auto& b : j.at("boundaries")) r.boundaries.push_back(rect_from_json(b));
      r.missing_index = j.at("missing_index").get<int>();
      const json& d = j.at("distractors");
      r.distractors = {d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()};
      r.dither_seed = u64_from_string(j.at("dither_seed").get<std::string>());
      return r;
    }
    case TaskId::DifferenceHunt: {
      DiffHuntRule r;
      r.source_image = j.at("source_image").get<std::string>();
      r.source_caption = j.value("source_caption", std::string());
      r.resolution = j.at("resolution").get<int>();
      r.level = j.at("level").get<int>();
      for (const auto& reg : j.at("regions")) {
        DiffRegion region;
        region.rect = rect_from_json(reg.at("rect"));
        region.kind = distortion_from_slug(reg.at("kind").get<std::string>());
        region.intensity_permille = reg.at("intensity_permille").get<int>();
        r.regions.push_back(region);
      }
      r.noise_seed = u64_from_string(j.at("noise_seed").get<std::string>());
      r.dither_seed = u64_from_string(j.at("dither_seed").get<std::string>());
      return r;
    }
  }
  throw std::logic_error("bad task id");
}

inline json ground_truth_to_json(const GroundTruth& gt) {
  json j{{"kind", std::string(ground_truth_kind_slug(gt.kind))}};
  switch (gt.kind) {
    case GroundTruthKind::Count: j["value"] = gt.count; break;
    case GroundTruthKind::Sum: j["value"] = gt.sum.to_string(); break;
    case GroundTruthKind::YesNo: j["value"] = gt.yes; break;
    case GroundTruthKind::TileId: j["value"] = gt.tile; break;
  }
  return j;
}

inline GroundTruth ground_truth_from_json(const json& j) {
  const GroundTruthKind kind = ground_truth_kind_from_slug(j.at("kind").get<std::string>());
  switch (kind) {
    case GroundTruthKind::Count: return GroundTruth::make_count(j.at("value").get<int>());
    case GroundTruthKind::Sum:
      return GroundTruth::make_sum(Decimal::parse(j.at("value").get<std::string>()));
    case GroundTruthKind::YesNo: return GroundTruth::make_yesno(j.at("value").get<bool>());
    case GroundTruthKind::TileId: return GroundTruth::make_tile(j.at("value").get<int>());
  }
  throw std::logic_error("bad ground truth kind");
}

}  // namespace codec

inline json sample_to_json(const PuzzleSample& s) {
  json options;
  if (s.options) {
    json entries = json::object();
    for (const auto& [label, text] : s.options->entries) entries[label] = text;
    options = json{{"correct_label", s.options->correct_label}, {"entries", entries}};
  }
  return json{{"id", s.id},
              {"task", std::string(task_slug(s.task))},
              {"image_refs", s.image_refs},
              {"question", s.question},
              {"options", options},
              {"ground_truth", codec::ground_truth_to_json(s.ground_truth)},
              {"rule", codec::rule_to_json(s.rule)},
              {"difficulty", s.difficulty},
              {"seed_index", s.seed_index}};
}

inline PuzzleSample sample_from_json(const json& j) {
  PuzzleSample s;
  s.id = j.at("id").get<std::string>();
  s.task = task_from_slug(j.at("task").get<std::string>());
  s.image_refs = j.at("image_refs").get<std::vector<std::string>>();
  s.question = j.at("question").get<std::string>();
  if (!j.at("options").is_null()) {
    OptionArrangement arr;
    arr.correct_label = j.at("options").at("correct_label").get<std::string>();
    for (const auto& [label, text] : j.at("options").at("entries").items())
      arr.entries.emplace_back(label, text.get<std::string>());
    s.options = std::move(arr);
  }
  s.ground_truth = codec::ground_truth_from_json(j.at("ground_truth"));
  s.rule = codec::rule_from_json(s.task, j.at("rule"));
  s.difficulty = j.at("difficulty");
  s.seed_index = j.at("seed_index").get<std::uint64_t>();
  return s;
}

inline std::string manifest_line(const PuzzleSample& s) { return sample_to_json(s).dump(); }

inline PuzzleSample parse_manifest_line(const std::string& line) {
  return sample_from_json(json::parse(line));
}

inline std::vector<PuzzleSample> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest missing: " + path.string());
  std::vector<PuzzleSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_manifest_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// --- Prompt payload ---------------------------------------------------------------

// Single-turn zero-shot prompt: instruction, question, option lines and the
// attached images in task-defined order.
struct PromptPayload {
  std::string instruction;
  std::string question;
  std::vector<std::string> option_lines;
  std::vector<std::filesystem::path> images;
  std::string note;  // extra attachment guidance (jigsaw)

  std::string full_text() const {
    std::string out = instruction + "\n";
    if (!note.empty()) out += note + "\n";
    out += question;
    for (const auto& line : option_lines) out += "\n" + line;
    return out;
  }
};

inline PromptPayload render_prompt(const PuzzleSample& sample,
                                   const std::filesystem::path& dataset_root,
                                   const PromptTemplates& templates = PromptTemplates::defaults()) {
  PromptPayload p;
  p.question = sample.question;
  for (const auto& ref : sample.image_refs) p.images.push_back(dataset_root / ref);

  if (!sample.options) {
    p.instruction = sample.ground_truth.kind == GroundTruthKind::YesNo
                        ? templates.get("instruction.direct_yesno")
                        : templates.get("instruction.direct_number");
    return p;
  }
  p.instruction = templates.get("instruction.choice");
  if (sample.task == TaskId::Jigsaw) p.note = templates.get("jigsaw_attachment_note");
  for (const auto& [label, text] : sample.options->entries) {
    const std::string display =
        sample.task == TaskId::Jigsaw
            ? PromptTemplates::substitute(templates.get("jigsaw_option_text"), {{"label", label}})
            : text;
    p.option_lines.push_back(
        PromptTemplates::substitute(templates.get("option_line"), {{"label", label}, {"text", display}}));
  }
  return p;
}

}  // namespace pzl
