#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pzl/decimal.hpp"
#include "pzl/rng.hpp"

namespace pzl {

enum class TaskId : int {
  IconConnect = 0,
  HanziMatrix = 1,
  WordSearch = 2,
  GridSum = 3,
  Jigsaw = 4,
  DifferenceHunt = 5,
};

inline constexpr std::array<TaskId, 6> kAllTasks = {
    TaskId::IconConnect, TaskId::HanziMatrix, TaskId::WordSearch,
    TaskId::GridSum,     TaskId::Jigsaw,      TaskId::DifferenceHunt,
};

inline std::string_view task_slug(TaskId t) {
  switch (t) {
    case TaskId::IconConnect: return "icon_connect";
    case TaskId::HanziMatrix: return "hanzi_matrix";
    case TaskId::WordSearch: return "word_search";
    case TaskId::GridSum: return "grid_sum";
    case TaskId::Jigsaw: return "jigsaw";
    case TaskId::DifferenceHunt: return "difference_hunt";
  }
  throw std::logic_error("bad task id");
}

inline TaskId task_from_slug(std::string_view s) {
  for (TaskId t : kAllTasks)
    if (task_slug(t) == s) return t;
  throw std::invalid_argument("unknown task: " + std::string(s));
}

// Capability field groupings used by metric reports.
enum class FieldId { VisualRecognition, LogicalReasoning, ContextUnderstanding };

inline FieldId task_field(TaskId t) {
  switch (t) {
    case TaskId::IconConnect:
    case TaskId::HanziMatrix: return FieldId::VisualRecognition;
    case TaskId::WordSearch:
    case TaskId::GridSum: return FieldId::LogicalReasoning;
    case TaskId::Jigsaw:
    case TaskId::DifferenceHunt: return FieldId::ContextUnderstanding;
  }
  throw std::logic_error("bad task id");
}

inline std::string_view field_slug(FieldId f) {
  switch (f) {
    case FieldId::VisualRecognition: return "visual_recognition";
    case FieldId::LogicalReasoning: return "logical_reasoning";
    case FieldId::ContextUnderstanding: return "context_understanding";
  }
  throw std::logic_error("bad field id");
}

// Deterministic per-sample stream derivation. Streams for distinct
// (task, index) pairs are independent, which makes generation order-free.
struct SeedContext {
  std::uint64_t master_seed = 0;

  RandomStream stream_for(TaskId task, std::uint64_t index) const {
    std::uint64_t k = mix64(master_seed, 0x70757a7aULL);
    k = mix64(k, static_cast<std::uint64_t>(task) + 1);
    k = mix64(k, index);
    return RandomStream(k);
  }
};

inline RandomStream derive_stream(const SeedContext& ctx, TaskId task, std::uint64_t index) {
  return ctx.stream_for(task, index);
}

struct PixelRect {
  int x = 0, y = 0, w = 0, h = 0;

  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }

  bool intersects(const PixelRect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool operator==(const PixelRect& o) const {
    return x == o.x && y == o.y && w == o.w && h == o.h;
  }
};

// Square n-by-n grid layout over a square image. Residual pixels from a
// non-divisible resolution are absorbed by the last row/column.
struct GridSpec {
  int n = 3;
  int resolution = 512;

  GridSpec() = default;
  GridSpec(int n_, int resolution_) : n(n_), resolution(resolution_) {
    if (n < 3 || n > 9) throw std::invalid_argument("grid n must be in [3, 9]");
    if (resolution != 256 && resolution != 512 && resolution != 1024)
      throw std::invalid_argument("resolution must be one of 256, 512, 1024");
  }

  int cell_px() const { return resolution / n; }

  PixelRect cell_rect(int row, int col) const {
    if (row < 0 || row >= n || col < 0 || col >= n)
      throw std::out_of_range("cell index out of range");
    const int c = cell_px();
    PixelRect r;
    r.x = col * c;
    r.y = row * c;
    r.w = (col == n - 1) ? resolution - c * (n - 1) : c;
    r.h = (row == n - 1) ? resolution - c * (n - 1) : c;
    return r;
  }

  bool operator==(const GridSpec& o) const { return n == o.n && resolution == o.resolution; }
};

enum class GroundTruthKind { Count, Sum, YesNo, TileId };

inline std::string_view ground_truth_kind_slug(GroundTruthKind k) {
  switch (k) {
    case GroundTruthKind::Count: return "count";
    case GroundTruthKind::Sum: return "sum";
    case GroundTruthKind::YesNo: return "yesno";
    case GroundTruthKind::TileId: return "tile";
  }
  throw std::logic_error("bad ground truth kind");
}

inline GroundTruthKind ground_truth_kind_from_slug(std::string_view s) {
  if (s == "count") return GroundTruthKind::Count;
  if (s == "sum") return GroundTruthKind::Sum;
  if (s == "yesno") return GroundTruthKind::YesNo;
  if (s == "tile") return GroundTruthKind::TileId;
  throw std::invalid_argument("unknown ground truth kind: " + std::string(s));
}

struct GroundTruth {
  GroundTruthKind kind = GroundTruthKind::Count;
  int count = 0;        // Count: m >= 2
  Decimal sum;          // Sum: exact decimal
  bool yes = false;     // YesNo
  int tile = 0;         // TileId

  static GroundTruth make_count(int m) {
    if (m < 2) throw std::invalid_argument("count ground truth must be >= 2");
    GroundTruth g;
    g.kind = GroundTruthKind::Count;
    g.count = m;
    return g;
  }
  static GroundTruth make_sum(Decimal d) {
    GroundTruth g;
    g.kind = GroundTruthKind::Sum;
    g.sum = d;
    return g;
  }
  static GroundTruth make_yesno(bool y) {
    GroundTruth g;
    g.kind = GroundTruthKind::YesNo;
    g.yes = y;
    return g;
  }
  static GroundTruth make_tile(int t) {
    GroundTruth g;
    g.kind = GroundTruthKind::TileId;
    g.tile = t;
    return g;
  }

  // Canonical display text, the same text an option entry shows when it
  // matches this ground truth.
  std::string display() const {
    switch (kind) {
      case GroundTruthKind::Count: return std::to_string(count);
      case GroundTruthKind::Sum: return sum.to_string();
      case GroundTruthKind::YesNo: return yes ? "Yes" : "No";
      case GroundTruthKind::TileId: return "tile " + std::to_string(tile);
    }
    throw std::logic_error("bad ground truth kind");
  }

  bool operator==(const GroundTruth& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case GroundTruthKind::Count: return count == o.count;
      case GroundTruthKind::Sum: return sum == o.sum;
      case GroundTruthKind::YesNo: return yes == o.yes;
      case GroundTruthKind::TileId: return tile == o.tile;
    }
    return false;
  }
};

inline std::string sample_id(TaskId task, std::uint64_t seed_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06llu", static_cast<unsigned long long>(seed_index));
  return std::string(task_slug(task)) + "-" + buf;
}

}  // namespace pzl
