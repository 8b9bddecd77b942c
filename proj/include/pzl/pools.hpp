#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pzl/decimal.hpp"
#include "pzl/rng.hpp"
#include "pzl/unicode.hpp"

namespace pzl {

namespace fs = std::filesystem;

class PoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PoolKind { Icon, Hanzi, Word, Number, Image };

inline std::string_view pool_kind_slug(PoolKind k) {
  switch (k) {
    case PoolKind::Icon: return "icon";
    case PoolKind::Hanzi: return "hanzi";
    case PoolKind::Word: return "word";
    case PoolKind::Number: return "number";
    case PoolKind::Image: return "image";
  }
  throw std::logic_error("bad pool kind");
}

struct IconEntry {
  std::string id;
  fs::path path;
  bool monochrome = false;
};

struct HanziEntry {
  char32_t codepoint = 0;
  int group = -1;  // near-form group id, -1 when ungrouped

  std::string utf8() const { return utf8_encode(codepoint); }
};

struct WordEntry {
  std::string word;  // uppercase A-Z, length 2..9
};

struct ImageEntry {
  std::string id;
  fs::path path;
  std::string category;
  std::string caption;
};

struct SourcePool {
  PoolKind kind = PoolKind::Icon;
  std::vector<IconEntry> icons;
  std::vector<HanziEntry> hanzi;
  std::vector<WordEntry> words;
  std::vector<ImageEntry> images;
  int near_form_groups = 0;

  std::size_t size() const {
    switch (kind) {
      case PoolKind::Icon: return icons.size();
      case PoolKind::Hanzi: return hanzi.size();
      case PoolKind::Word: return words.size();
      case PoolKind::Image: return images.size();
      default: return 0;
    }
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a64(pool_kind_slug(kind));
    for (const auto& e : icons) {
      h = fnv1a64(e.id, h);
      h = fnv1a64(e.monochrome ? "m" : "c", h);
    }
    for (const auto& e : hanzi) {
      h = fnv1a64(e.utf8(), h);
      h = fnv1a64(std::to_string(e.group), h);
    }
    for (const auto& e : words) h = fnv1a64(e.word, h);
    for (const auto& e : images) {
      h = fnv1a64(e.id, h);
      h = fnv1a64(e.category, h);
      h = fnv1a64(e.caption, h);
    }
    return h;
  }
};

enum class ColorMode { Original, Tinted };
enum class SignMode { Positive, Negative, Mixed };
enum class NumberPrecision { Integer = 0, OneDecimal = 1, TwoDecimal = 2 };

inline std::string_view sign_mode_slug(SignMode m) {
  switch (m) {
    case SignMode::Positive: return "positive";
    case SignMode::Negative: return "negative";
    case SignMode::Mixed: return "mixed";
  }
  throw std::logic_error("bad sign mode");
}

inline SignMode sign_mode_from_slug(std::string_view s) {
  if (s == "positive") return SignMode::Positive;
  if (s == "negative") return SignMode::Negative;
  if (s == "mixed") return SignMode::Mixed;
  throw std::invalid_argument("unknown sign mode: " + std::string(s));
}

struct SamplingCondition {
  int count = 1;

  // Icon
  ColorMode color_mode = ColorMode::Original;
  // Hanzi
  bool near_form_priority = false;
  // Word
  int max_word_length = 9;
  // Number
  SignMode sign_mode = SignMode::Mixed;
  NumberPrecision precision = NumberPrecision::Integer;
  // Image
  std::string category_filter;  // empty = any
};

struct MaterialSet {
  PoolKind kind = PoolKind::Icon;
  SamplingCondition condition;
  std::vector<IconEntry> icons;
  std::vector<HanziEntry> hanzi;
  std::vector<WordEntry> words;
  std::vector<ImageEntry> images;

  std::size_t size() const {
    switch (kind) {
      case PoolKind::Icon: return icons.size();
      case PoolKind::Hanzi: return hanzi.size();
      case PoolKind::Word: return words.size();
      case PoolKind::Image: return images.size();
      default: return 0;
    }
  }

  std::vector<std::string> provenance() const {
    std::vector<std::string> ids;
    for (const auto& e : icons) ids.push_back(e.id);
    for (const auto& e : hanzi) ids.push_back(e.utf8());
    for (const auto& e : words) ids.push_back(e.word);
    for (const auto& e : images) ids.push_back(e.id);
    return ids;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline char32_t parse_codepoint_token(const std::string& tok, const std::string& where) {
  if (tok.rfind("U+", 0) == 0 || tok.rfind("u+", 0) == 0) {
    try {
      return static_cast<char32_t>(std::stoul(tok.substr(2), nullptr, 16));
    } catch (const std::exception&) {
      throw PoolError(where + ": malformed codepoint '" + tok + "'");
    }
  }
  const auto cps = utf8_decode(tok);
  if (cps.size() != 1) throw PoolError(where + ": expected a single character, got '" + tok + "'");
  return cps[0];
}

}  // namespace detail

// Icon pool: directory of PNG rasters, optionally described by icons.tsv
// (id <TAB> filename <TAB> monochrome 0/1). Without the manifest every *.png
// becomes a color entry named by its stem.
inline SourcePool load_icon_pool(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw PoolError("icon pool directory missing: " + dir.string());
  SourcePool pool;
  pool.kind = PoolKind::Icon;
  const fs::path manifest = dir / "icons.tsv";
  std::set<std::string> ids;
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty() || line[0] == '#') continue;
      const auto cols = detail::split(line, '\t');
      const std::string where = manifest.string() + ":" + std::to_string(line_no);
      if (cols.size() < 3) throw PoolError(where + ": expected id, filename, monochrome");
      IconEntry e;
      e.id = detail::trim(cols[0]);
      e.path = dir / detail::trim(cols[1]);
      const std::string flag = detail::trim(cols[2]);
      if (flag != "0" && flag != "1") throw PoolError(where + ": monochrome flag must be 0 or 1");
      e.monochrome = flag == "1";
      if (e.id.empty()) throw PoolError(where + ": empty icon id");
      if (!ids.insert(e.id).second) throw PoolError(where + ": duplicate icon id '" + e.id + "'");
      if (!fs::exists(e.path)) throw PoolError(where + ": raster file missing: " + e.path.string());
      pool.icons.push_back(std::move(e));
    }
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      IconEntry e;
      e.id = f.stem().string();
      e.path = f;
      e.monochrome = false;
      if (!ids.insert(e.id).second) throw PoolError(dir.string() + ": duplicate icon id '" + e.id + "'");
      pool.icons.push_back(std::move(e));
    }
  }
  if (pool.icons.empty()) throw PoolError("icon pool is empty: " + dir.string());
  return pool;
}

// Hanzi pool: one codepoint per line (literal character or U+XXXX), plus an
// optional near-form file with one space-separated group per line. Groups
// need at least two members; members absent from the main list are added.
inline SourcePool load_hanzi_pool(const fs::path& list_file, const fs::path& near_form_file = {}) {
  std::ifstream in(list_file);
  if (!in) throw PoolError("hanzi list missing: " + list_file.string());
  SourcePool pool;
  pool.kind = PoolKind::Hanzi;
  std::map<char32_t, std::size_t> index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string tok = detail::trim(line);
    if (tok.empty() || tok[0] == '#') continue;
    const std::string where = list_file.string() + ":" + std::to_string(line_no);
    const char32_t cp = detail::parse_codepoint_token(tok, where);
    if (index.count(cp)) continue;  // duplicates collapse silently
    index[cp] = pool.hanzi.size();
    pool.hanzi.push_back({cp, -1});
  }
  if (pool.hanzi.empty()) throw PoolError("hanzi pool is empty: " + list_file.string());

  if (!near_form_file.empty()) {
    std::ifstream nf(near_form_file);
    if (!nf) throw PoolError("near-form file missing: " + near_form_file.string());
    int group_id = 0;
    line_no = 0;
    while (std::getline(nf, line)) {
      ++line_no;
      const std::string trimmed = detail::trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      const std::string where = near_form_file.string() + ":" + std::to_string(line_no);
      std::istringstream iss(trimmed);
      std::string tok;
      std::vector<char32_t> members;
      while (iss >> tok) members.push_back(detail::parse_codepoint_token(tok, where));
      if (members.size() < 2)
        throw PoolError(where + ": near-form group needs at least 2 members, got " +
                        std::to_string(members.size()));
      for (char32_t cp : members) {
        auto it = index.find(cp);
        if (it == index.end()) {
          index[cp] = pool.hanzi.size();
          pool.hanzi.push_back({cp, group_id});
        } else {
          if (pool.hanzi[it->second].group != -1 && pool.hanzi[it->second].group != group_id)
            throw PoolError(where + ": character '" + utf8_encode(cp) +
                            "' already belongs to another near-form group");
          pool.hanzi[it->second].group = group_id;
        }
      }
      ++group_id;
    }
    pool.near_form_groups = group_id;
  }
  return pool;
}

// Word corpus: one word per line, normalized to uppercase; duplicates
// collapse. Words must be alphabetic with length in [2, 9] so they fit some
// legal grid.
inline SourcePool load_word_pool(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw PoolError("word list missing: " + file.string());
  SourcePool pool;
  pool.kind = PoolKind::Word;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string word = detail::trim(line);
    if (word.empty() || word[0] == '#') continue;
    const std::string where = file.string() + ":" + std::to_string(line_no);
    for (char& c : word) {
      if (!std::isalpha(static_cast<unsigned char>(c)))
        throw PoolError(where + ": word '" + word + "' is not purely alphabetic");
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (word.size() < 2 || word.size() > 9)
      throw PoolError(where + ": word '" + word + "' length must be in [2, 9]");
    if (seen.insert(word).second) pool.words.push_back({word});
  }
  if (pool.words.empty()) throw PoolError("word pool is empty: " + file.string());
  return pool;
}

// Image pool: directory of PNGs with optional images.tsv
// (id <TAB> filename <TAB> category <TAB> caption) and an optional separate
// two-column captions file (id <TAB> caption) used by refresh ingestion.
inline SourcePool load_image_pool(const fs::path& dir, const fs::path& captions_file = {}) {
  if (!fs::is_directory(dir)) throw PoolError("image pool directory missing: " + dir.string());
  SourcePool pool;
  pool.kind = PoolKind::Image;
  std::set<std::string> ids;
  const fs::path manifest = dir / "images.tsv";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty() || line[0] == '#') continue;
      const auto cols = detail::split(line, '\t');
      const std::string where = manifest.string() + ":" + std::to_string(line_no);
      if (cols.size() < 2) throw PoolError(where + ": expected at least id and filename");
      ImageEntry e;
      e.id = detail::trim(cols[0]);
      e.path = dir / detail::trim(cols[1]);
      if (cols.size() > 2) e.category = detail::trim(cols[2]);
      if (cols.size() > 3) e.caption = detail::trim(cols[3]);
      if (e.id.empty()) throw PoolError(where + ": empty image id");
      if (!ids.insert(e.id).second) throw PoolError(where + ": duplicate image id '" + e.id + "'");
      if (!fs::exists(e.path)) throw PoolError(where + ": raster file missing: " + e.path.string());
      pool.images.push_back(std::move(e));
    }
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      ImageEntry e;
      e.id = f.stem().string();
      e.path = f;
      if (!ids.insert(e.id).second) throw PoolError(dir.string() + ": duplicate image id '" + e.id + "'");
      pool.images.push_back(std::move(e));
    }
  }
  if (!captions_file.empty()) {
    std::ifstream in(captions_file);
    if (!in) throw PoolError("captions file missing: " + captions_file.string());
    std::map<std::string, std::string> captions;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty() || line[0] == '#') continue;
      const auto cols = detail::split(line, '\t');
      if (cols.size() < 2)
        throw PoolError(captions_file.string() + ":" + std::to_string(line_no) +
                        ": expected id <TAB> caption");
      captions[detail::trim(cols[0])] = detail::trim(cols[1]);
    }
    for (auto& e : pool.images)
      if (auto it = captions.find(e.id); it != captions.end()) e.caption = it->second;
  }
  if (pool.images.empty()) throw PoolError("image pool is empty: " + dir.string());
  return pool;
}

// Draws cond.count distinct entries satisfying the active constraints.
// Hanzi near-form priority draws from one randomly chosen group first and
// tops up from outside the group only when the group is exhausted.
inline MaterialSet sample_materials(const SourcePool& pool, const SamplingCondition& cond,
                                    RandomStream& rng) {
  if (cond.count < 1) throw std::invalid_argument("sampling condition count must be >= 1");
  MaterialSet out;
  out.kind = pool.kind;
  out.condition = cond;

  auto draw_indices = [&](std::size_t eligible) {
    std::vector<std::size_t> idx(eligible);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: first `count` slots are the draw, in draw order
    for (int i = 0; i < cond.count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(eligible - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(cond.count));
    return idx;
  };

  switch (pool.kind) {
    case PoolKind::Icon: {
      if (pool.icons.size() < static_cast<std::size_t>(cond.count))
        throw PoolError("insufficient icons: need " + std::to_string(cond.count) + ", pool has " +
                        std::to_string(pool.icons.size()));
      for (std::size_t i : draw_indices(pool.icons.size())) out.icons.push_back(pool.icons[i]);
      break;
    }
    case PoolKind::Hanzi: {
      if (pool.hanzi.size() < static_cast<std::size_t>(cond.count))
        throw PoolError("insufficient hanzi: need " + std::to_string(cond.count) + ", pool has " +
                        std::to_string(pool.hanzi.size()));
      if (cond.near_form_priority && pool.near_form_groups > 0) {
        const int group = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pool.near_form_groups)));
        std::vector<std::size_t> in_group, outside;
        for (std::size_t i = 0; i < pool.hanzi.size(); ++i)
          (pool.hanzi[i].group == group ? in_group : outside).push_back(i);
        rng.shuffle(in_group.data(), in_group.size());
        rng.shuffle(outside.data(), outside.size());
        for (std::size_t i = 0; i < in_group.size() && out.hanzi.size() < static_cast<std::size_t>(cond.count); ++i)
          out.hanzi.push_back(pool.hanzi[in_group[i]]);
        for (std::size_t i = 0; i < outside.size() && out.hanzi.size() < static_cast<std::size_t>(cond.count); ++i)
          out.hanzi.push_back(pool.hanzi[outside[i]]);
      } else {
        for (std::size_t i : draw_indices(pool.hanzi.size())) out.hanzi.push_back(pool.hanzi[i]);
      }
      break;
    }
    case PoolKind::Word: {
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < pool.words.size(); ++i)
        if (static_cast<int>(pool.words[i].word.size()) <= cond.max_word_length) eligible.push_back(i);
      if (eligible.size() < static_cast<std::size_t>(cond.count))
        throw PoolError("insufficient words of length <= " + std::to_string(cond.max_word_length) +
                        ": need " + std::to_string(cond.count) + ", eligible " +
                        std::to_string(eligible.size()));
      // draw positions within the eligible subset
      for (int i = 0; i < cond.count; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.next_below(eligible.size() - i));
        std::swap(eligible[static_cast<std::size_t>(i)], eligible[j]);
      }
      for (int i = 0; i < cond.count; ++i) out.words.push_back(pool.words[eligible[static_cast<std::size_t>(i)]]);
      break;
    }
    case PoolKind::Image: {
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < pool.images.size(); ++i)
        if (cond.category_filter.empty() || pool.images[i].category == cond.category_filter)
          eligible.push_back(i);
      if (eligible.size() < static_cast<std::size_t>(cond.count))
        throw PoolError("insufficient images for category '" + cond.category_filter + "': need " +
                        std::to_string(cond.count) + ", eligible " + std::to_string(eligible.size()));
      for (int i = 0; i < cond.count; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.next_below(eligible.size() - i));
        std::swap(eligible[static_cast<std::size_t>(i)], eligible[j]);
      }
      for (int i = 0; i < cond.count; ++i) out.images.push_back(pool.images[eligible[static_cast<std::size_t>(i)]]);
      break;
    }
    case PoolKind::Number:
      throw std::invalid_argument("number material comes from sample_numbers");
  }
  return out;
}

// Exact decimal draws, uniform over the representable grid of the chosen
// precision within [-100, 100]. Positive excludes zero from below, negative
// from above; mixed spans the full closed range including zero.
inline std::vector<Decimal> sample_numbers(const SamplingCondition& cond, int count,
                                           RandomStream& rng) {
  if (count < 1) throw std::invalid_argument("sample_numbers count must be >= 1");
  const int digits = static_cast<int>(cond.precision);
  const std::int64_t top = 100 * Decimal::pow10(digits);
  std::vector<Decimal> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::int64_t units = 0;
    switch (cond.sign_mode) {
      case SignMode::Positive:
        units = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(top)));
        break;
      case SignMode::Negative:
        units = -(1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(top))));
        break;
      case SignMode::Mixed:
        units = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(2 * top + 1))) - top;
        break;
    }
    out.emplace_back(units, digits);
  }
  return out;
}

}  // namespace pzl
