#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pzl/rules.hpp"

namespace pzl {

enum class OptionMode { FixedOption, RandomizedOption, DirectAnswer };

inline std::string_view option_mode_slug(OptionMode m) {
  switch (m) {
    case OptionMode::FixedOption: return "fixed";
    case OptionMode::RandomizedOption: return "randomized";
    case OptionMode::DirectAnswer: return "direct";
  }
  throw std::logic_error("bad option mode");
}

inline OptionMode option_mode_from_slug(std::string_view s) {
  if (s == "fixed") return OptionMode::FixedOption;
  if (s == "randomized") return OptionMode::RandomizedOption;
  if (s == "direct") return OptionMode::DirectAnswer;
  throw std::invalid_argument("unknown option mode: " + std::string(s));
}

struct OptionArrangement {
  std::vector<std::pair<std::string, std::string>> entries;  // label -> display text
  std::string correct_label;

  const std::string& text_for(const std::string& label) const {
    for (const auto& [l, t] : entries)
      if (l == label) return t;
    throw std::invalid_argument("no such option label: " + label);
  }
};

// Question and instruction templates with named slots. Artifact-defined and
// overridable from a plain key=value file; the resolved set is recorded in
// the config snapshot.
class PromptTemplates {
 public:
  static const PromptTemplates& defaults() {
    static const PromptTemplates t = make_defaults();
    return t;
  }

  static PromptTemplates from_file(const std::filesystem::path& path) {
    PromptTemplates t = make_defaults();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prompt templates: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": expected key=value");
      const std::string key = line.substr(0, eq);
      if (!t.entries_.count(key))
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": unknown template key '" + key + "'");
      t.entries_[key] = line.substr(eq + 1);
    }
    return t;
  }

  const std::string& get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("unknown template key: " + key);
    return it->second;
  }

  const std::map<std::string, std::string>& all() const { return entries_; }

  static std::string substitute(std::string tpl, const std::map<std::string, std::string>& slots) {
    for (const auto& [name, value] : slots) {
      const std::string token = "{" + name + "}";
      for (std::size_t pos = tpl.find(token); pos != std::string::npos; pos = tpl.find(token, pos))
        tpl.replace(pos, token.size(), value);
    }
    return tpl;
  }

 private:
  static PromptTemplates make_defaults() {
    PromptTemplates t;
    t.entries_ = {
        {"question.icon_connect",
         "How many times does the icon '{icon}' (see the attached legend image) appear in "
         "{position} of this image?"},
        {"question.hanzi_matrix", "How many unique Chinese characters are in the grid image?"},
        {"question.word_search", "Does this grid image contain the word '{word}'?"},
        {"question.grid_sum", "What is the sum of all the numbers in the grid image?"},
        {"question.jigsaw", "Which tile is missing from the incomplete image?"},
        {"question.difference_hunt", "How many differences are there between these two images?"},
        {"instruction.choice", "Answer with the option letter only."},
        {"instruction.direct_number", "Answer with a number only."},
        {"instruction.direct_yesno", "Answer Yes or No."},
        {"option_line", "({label}) {text}"},
        {"jigsaw_option_text", "the tile shown in option image {label}"},
        {"jigsaw_attachment_note",
         "The first attached image is the incomplete image; the next four images are the option "
         "tiles A, B, C and D in order."},
    };
    return t;
  }

  std::map<std::string, std::string> entries_;
};

inline std::string build_question(const PuzzleRule& rule,
                                  const PromptTemplates& templates = PromptTemplates::defaults()) {
  return std::visit(
      [&](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IconConnectRule>) {
          return PromptTemplates::substitute(templates.get("question.icon_connect"),
                                             {{"icon", r.target_icon}, {"position", r.run.phrase()}});
        } else if constexpr (std::is_same_v<T, HanziMatrixRule>) {
          return templates.get("question.hanzi_matrix");
        } else if constexpr (std::is_same_v<T, WordSearchRule>) {
          return PromptTemplates::substitute(templates.get("question.word_search"), {{"word", r.word}});
        } else if constexpr (std::is_same_v<T, GridSumRule>) {
          return templates.get("question.grid_sum");
        } else if constexpr (std::is_same_v<T, JigsawRule>) {
          return templates.get("question.jigsaw");
        } else {
          return templates.get("question.difference_hunt");
        }
      },
      rule);
}

// Canonical option values in ascending order plus the index of the correct
// one. Display strings are the same strings the manifest stores.
struct OptionValues {
  std::vector<std::string> display;
  std::size_t correct_index = 0;
};

inline OptionValues derive_options(const PuzzleRule& rule) {
  OptionValues out;
  const GroundTruth gt = ground_truth_for(rule);
  switch (gt.kind) {
    case GroundTruthKind::Count: {
      for (int delta = -1; delta <= 2; ++delta)
        out.display.push_back(std::to_string(gt.count + delta));
      out.correct_index = 1;
      break;
    }
    case GroundTruthKind::Sum: {
      const Decimal ten(10 * Decimal::pow10(gt.sum.digits), gt.sum.digits);
      Decimal v = gt.sum - ten;
      for (int k = 0; k < 4; ++k) {
        out.display.push_back(v.to_string());
        v = v + ten;
      }
      out.correct_index = 1;
      break;
    }
    case GroundTruthKind::YesNo: {
      out.display = {"Yes", "No"};
      out.correct_index = gt.yes ? 0 : 1;
      break;
    }
    case GroundTruthKind::TileId: {
      const auto& jig = std::get<JigsawRule>(rule);
      std::vector<int> tiles{jig.missing_index, jig.distractors[0], jig.distractors[1],
                             jig.distractors[2]};
      std::sort(tiles.begin(), tiles.end());
      for (std::size_t i = 0; i < tiles.size(); ++i) {
        out.display.push_back("tile " + std::to_string(tiles[i]));
        if (tiles[i] == jig.missing_index) out.correct_index = i;
      }
      break;
    }
  }
  return out;
}

inline const std::vector<std::string>& option_labels(std::size_t count) {
  static const std::vector<std::string> two = {"A", "B"};
  static const std::vector<std::string> four = {"A", "B", "C", "D"};
  if (count == 2) return two;
  if (count == 4) return four;
  throw std::invalid_argument("option sets have 2 or 4 entries");
}

// Fixed mode pins the correct value to slot B (binary Yes/No pins "Yes" to
// A and "No" to B regardless of the answer); randomized applies a uniform
// permutation; direct has no slots and never applies to Jigsaw.
inline OptionArrangement arrange_options(const OptionValues& values, OptionMode mode, TaskId task,
                                         RandomStream& rng) {
  if (values.display.empty() || values.correct_index >= values.display.size())
    throw std::invalid_argument("arrange_options: correct value must be among the values");
  OptionArrangement arr;
  if (mode == OptionMode::DirectAnswer) {
    if (task == TaskId::Jigsaw)
      throw std::invalid_argument("jigsaw requires image options and has no direct-answer form");
    return arr;
  }
  const auto& labels = option_labels(values.display.size());
  const bool binary = values.display.size() == 2;

  if (mode == OptionMode::FixedOption) {
    if (binary) {
      arr.entries = {{labels[0], values.display[0]}, {labels[1], values.display[1]}};
      arr.correct_label = labels[values.correct_index];
    } else {
      std::vector<std::string> rest;
      for (std::size_t i = 0; i < values.display.size(); ++i)
        if (i != values.correct_index) rest.push_back(values.display[i]);
      // B holds the answer; distractors fill A, C, D in canonical order
      arr.entries = {{"A", rest[0]},
                     {"B", values.display[values.correct_index]},
                     {"C", rest[1]},
                     {"D", rest[2]}};
      arr.correct_label = "B";
    }
    return arr;
  }

  // randomized: uniform permutation of value slots
  std::vector<std::size_t> order(values.display.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order.data(), order.size());
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    arr.entries.emplace_back(labels[slot], values.display[order[slot]]);
    if (order[slot] == values.correct_index) arr.correct_label = labels[slot];
  }
  return arr;
}

}  // namespace pzl
