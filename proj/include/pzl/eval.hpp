#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pzl/dataset.hpp"
#include "pzl/sample.hpp"

namespace pzl {

// Raw model (or agent) response for one sample, as stored in the records
// file. Parsing and scoring happen at score time so stored records can be
// re-scored bit-identically.
struct EvalRecord {
  std::string sample_id;
  std::string model;
  std::string mode;
  std::string raw_response;
  int retries = 0;
  double latency_ms = 0;
  std::string transport_error;  // non-empty means no response was obtained
};

inline json eval_record_to_json(const EvalRecord& r) {
  return json{{"id", r.sample_id},       {"model", r.model},
              {"mode", r.mode},          {"raw_response", r.raw_response},
              {"retries", r.retries},    {"latency_ms", r.latency_ms},
              {"error", r.transport_error}};
}

inline EvalRecord eval_record_from_json(const json& j) {
  EvalRecord r;
  r.sample_id = j.at("id").get<std::string>();
  r.model = j.value("model", "");
  r.mode = j.value("mode", "");
  r.raw_response = j.value("raw_response", "");
  r.retries = j.value("retries", 0);
  r.latency_ms = j.value("latency_ms", 0.0);
  r.transport_error = j.value("error", "");
  return r;
}

inline void write_records(const fs::path& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write records: " + path.string());
  for (const auto& r : records) out << eval_record_to_json(r).dump() << "\n";
}

inline std::vector<EvalRecord> read_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("records file missing: " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(eval_record_from_json(json::parse(line)));
  return out;
}

// --- Answer parsing -----------------------------------------------------------

enum class ParsedKind { Choice, YesNo, Number, Unparsed };

struct ParsedAnswer {
  ParsedKind kind = ParsedKind::Unparsed;
  std::string label;   // Choice
  bool yes = false;    // YesNo
  Decimal number;      // Number
};

namespace parsedetail {

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

inline bool token_at(const std::string& s, std::size_t pos, const char* word) {
  const std::size_t len = std::strlen(word);
  if (pos + len > s.size()) return false;
  for (std::size_t i = 0; i < len; ++i)
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
  const bool left_ok = pos == 0 || !is_word_char(s[pos - 1]);
  const bool right_ok = pos + len == s.size() || !is_word_char(s[pos + len]);
  return left_ok && right_ok;
}

inline bool label_allowed(char upper, const std::vector<std::string>& labels) {
  for (const auto& l : labels)
    if (!l.empty() && l[0] == upper) return true;
  return false;
}

struct ChoiceHit {
  std::string label;
  std::size_t pos = 0;
};

// Earliest "lone option letter": wrapped in () or [], preceded by
// "answer is"/"answer:", or a standalone uppercase letter.
inline std::optional<ChoiceHit> find_choice(const std::string& s,
                                            const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '[') {
      const char close = c == '(' ? ')' : ']';
      if (i + 2 < s.size() && s[i + 2] == close) {
        const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(s[i + 1])));
        if (label_allowed(upper, labels)) return ChoiceHit{std::string(1, upper), i};
      }
    }
    if (token_at(s, i, "answer")) {
      std::size_t j = i + 6;
      while (j < s.size() && (std::isspace(static_cast<unsigned char>(s[j])) != 0)) ++j;
      if (token_at(s, j, "is"))
        j += 2;
      else if (j < s.size() && s[j] == ':')
        ++j;
      while (j < s.size() &&
             (std::isspace(static_cast<unsigned char>(s[j])) != 0 || s[j] == '(' || s[j] == '['))
        ++j;
      if (j < s.size()) {
        const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(s[j])));
        const bool lone = j + 1 >= s.size() || !is_word_char(s[j + 1]);
        if (lone && label_allowed(upper, labels)) return ChoiceHit{std::string(1, upper), i};
      }
    }
    if (c >= 'A' && c <= 'Z' && label_allowed(c, labels)) {
      const bool left_ok = i == 0 || !is_word_char(s[i - 1]);
      const bool right_ok = i + 1 >= s.size() || !is_word_char(s[i + 1]);
      if (left_ok && right_ok) return ChoiceHit{std::string(1, c), i};
    }
  }
  return std::nullopt;
}

inline std::optional<bool> find_yes_no(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (token_at(s, i, "yes")) return true;
    if (token_at(s, i, "no")) return false;
  }
  return std::nullopt;
}

inline std::optional<std::pair<Decimal, std::size_t>> find_number(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool sign = c == '+' || c == '-';
    if (!sign && !std::isdigit(static_cast<unsigned char>(c))) continue;
    if (sign && (i + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])))) continue;
    if (i > 0 && (is_word_char(s[i - 1]) || s[i - 1] == '.')) continue;
    std::size_t j = i + (sign ? 1 : 0);
    std::size_t digits = 0, frac_digits = 0;
    bool fraction = false;
    while (j < s.size()) {
      if (std::isdigit(static_cast<unsigned char>(s[j]))) {
        ++digits;
        if (fraction) ++frac_digits;
        ++j;
      } else if (s[j] == '.' && !fraction && j + 1 < s.size() &&
                 std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        fraction = true;
        ++j;
      } else {
        break;
      }
    }
    if (digits == 0 || frac_digits > 4 || digits - frac_digits > 12) continue;
    try {
      return std::make_pair(Decimal::parse(s.substr(i, j - i)), i);
    } catch (const std::exception&) {
      continue;
    }
  }
  return std::nullopt;
}

inline std::size_t position_of_yes_no(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (token_at(s, i, "yes") || token_at(s, i, "no")) return i;
  return std::string::npos;
}

}  // namespace parsedetail

// First-match parsing per regime: option letter for choice modes (Word
// Search also accepts a standalone Yes/No, earliest hit wins), Yes/No token
// or decimal number for direct answers. Anything unmatched stays Unparsed
// and scores incorrect.
inline ParsedAnswer parse_answer(const std::string& raw, const PuzzleSample& sample) {
  ParsedAnswer out;
  if (sample.options && !sample.options->entries.empty()) {
    std::vector<std::string> labels;
    for (const auto& [label, text] : sample.options->entries) labels.push_back(label);
    const auto choice = parsedetail::find_choice(raw, labels);
    if (sample.task == TaskId::WordSearch) {
      // a standalone Yes/No answers the binary question; the earliest hit
      // wins against an option letter
      const std::size_t letter_pos = choice ? choice->pos : std::string::npos;
      const std::size_t yn_pos = parsedetail::position_of_yes_no(raw);
      if (yn_pos != std::string::npos && (letter_pos == std::string::npos || yn_pos < letter_pos)) {
        const bool yes = *parsedetail::find_yes_no(raw.substr(yn_pos));
        // map the token onto the label whose display text matches
        for (const auto& [label, text] : sample.options->entries)
          if ((yes && text == "Yes") || (!yes && text == "No")) {
            out.kind = ParsedKind::Choice;
            out.label = label;
            return out;
          }
      }
    }
    if (choice) {
      out.kind = ParsedKind::Choice;
      out.label = choice->label;
    }
    return out;
  }

  // direct answers
  if (sample.ground_truth.kind == GroundTruthKind::YesNo) {
    const auto yn = parsedetail::find_yes_no(raw);
    if (yn) {
      out.kind = ParsedKind::YesNo;
      out.yes = *yn;
    }
    return out;
  }
  const auto num = parsedetail::find_number(raw);
  if (num) {
    out.kind = ParsedKind::Number;
    out.number = num->first;
  }
  return out;
}

// --- Scoring ------------------------------------------------------------------

inline bool task_is_numeric(TaskId t) {
  return t == TaskId::IconConnect || t == TaskId::HanziMatrix || t == TaskId::GridSum ||
         t == TaskId::DifferenceHunt;
}

struct ScoredRecord {
  const PuzzleSample* sample = nullptr;
  ParsedAnswer parsed;
  bool correct = false;
  std::optional<double> relative_error;
};

// Eq.-style relative error with the denominator clamped to max(|y|, 1);
// an unparsed direct response contributes with y_hat := 0.
inline double relative_error_term(double y, double y_hat) {
  return std::abs(y_hat - y) / std::max(std::abs(y), 1.0);
}

inline ScoredRecord score_record(const EvalRecord& rec, const PuzzleSample& sample) {
  ScoredRecord out;
  out.sample = &sample;
  out.parsed = rec.transport_error.empty() ? parse_answer(rec.raw_response, sample) : ParsedAnswer{};

  const GroundTruth& gt = sample.ground_truth;
  if (sample.options) {
    out.correct = out.parsed.kind == ParsedKind::Choice &&
                  out.parsed.label == sample.options->correct_label;
  } else {
    switch (gt.kind) {
      case GroundTruthKind::YesNo:
        out.correct = out.parsed.kind == ParsedKind::YesNo && out.parsed.yes == gt.yes;
        break;
      case GroundTruthKind::Count:
        out.correct = out.parsed.kind == ParsedKind::Number &&
                      out.parsed.number == Decimal(gt.count, 0);
        break;
      case GroundTruthKind::Sum:
        out.correct = out.parsed.kind == ParsedKind::Number && out.parsed.number == gt.sum;
        break;
      case GroundTruthKind::TileId:
        out.correct = false;  // jigsaw has no direct-answer form
        break;
    }
    if (task_is_numeric(sample.task)) {
      const double y = gt.kind == GroundTruthKind::Sum ? gt.sum.to_double()
                                                       : static_cast<double>(gt.count);
      const double y_hat =
          out.parsed.kind == ParsedKind::Number ? out.parsed.number.to_double() : 0.0;
      out.relative_error = relative_error_term(y, y_hat);
    }
  }
  return out;
}

struct TaskMetrics {
  int total = 0;
  int correct = 0;
  int unparsed = 0;
  int mre_count = 0;
  double mre_sum = 0;

  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
  double unparsed_rate() const { return total ? static_cast<double>(unparsed) / total : 0.0; }
  std::optional<double> mre() const {
    if (!mre_count) return std::nullopt;
    return mre_sum / mre_count;
  }
};

struct MetricsReport {
  std::string model;
  std::string mode;
  std::map<TaskId, TaskMetrics> tasks;
  std::string denominator_note = "relative error denominator clamped to max(|y|, 1)";

  double field_accuracy(FieldId f) const {
    double sum = 0;
    int n = 0;
    for (const auto& [t, m] : tasks)
      if (task_field(t) == f && m.total > 0) {
        sum += m.accuracy();
        ++n;
      }
    return n ? sum / n : 0.0;
  }

  // mean of the per-task accuracies over tasks present (the six-task mean in
  // a full run)
  double overall_accuracy() const {
    double sum = 0;
    int n = 0;
    for (const auto& [t, m] : tasks)
      if (m.total > 0) {
        sum += m.accuracy();
        ++n;
      }
    return n ? sum / n : 0.0;
  }

  json to_json() const {
    json per_task = json::object();
    for (const auto& [t, m] : tasks) {
      json jt{{"total", m.total},
              {"correct", m.correct},
              {"accuracy", m.accuracy()},
              {"unparsed_rate", m.unparsed_rate()}};
      if (m.mre()) jt["mre"] = *m.mre();
      per_task[std::string(task_slug(t))] = jt;
    }
    json fields = json::object();
    for (FieldId f : {FieldId::VisualRecognition, FieldId::LogicalReasoning, FieldId::ContextUnderstanding})
      fields[std::string(field_slug(f))] = field_accuracy(f);
    return json{{"model", model},
                {"mode", mode},
                {"tasks", per_task},
                {"fields", fields},
                {"overall_accuracy", overall_accuracy()},
                {"denominator_note", denominator_note}};
  }

  std::string to_text() const {
    char buf[160];
    std::string out = "model: " + model + "  mode: " + mode + "\n";
    for (const auto& [t, m] : tasks) {
      std::snprintf(buf, sizeof(buf), "  %-16s acc %.3f  (%d/%d)", std::string(task_slug(t)).c_str(),
                    m.accuracy(), m.correct, m.total);
      out += buf;
      if (m.mre()) {
        std::snprintf(buf, sizeof(buf), "  mre %.4f", *m.mre());
        out += buf;
      }
      if (m.unparsed > 0) {
        std::snprintf(buf, sizeof(buf), "  unparsed %.3f", m.unparsed_rate());
        out += buf;
      }
      out += "\n";
    }
    for (FieldId f : {FieldId::VisualRecognition, FieldId::LogicalReasoning, FieldId::ContextUnderstanding}) {
      std::snprintf(buf, sizeof(buf), "  %-22s %.3f\n", std::string(field_slug(f)).c_str(),
                    field_accuracy(f));
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "  overall                %.3f\n", overall_accuracy());
    out += buf;
    return out;
  }
};

// Aggregates records against their dataset. Every record must join to a
// sample; an orphan means the records file belongs to another dataset.
inline MetricsReport score(const std::vector<EvalRecord>& records,
                           const std::vector<PuzzleSample>& samples) {
  std::map<std::string, const PuzzleSample*> by_id;
  for (const auto& s : samples) by_id[s.id] = &s;

  MetricsReport report;
  if (!records.empty()) {
    report.model = records.front().model;
    report.mode = records.front().mode;
  }
  for (const auto& rec : records) {
    auto it = by_id.find(rec.sample_id);
    if (it == by_id.end())
      throw std::runtime_error("record for unknown sample id: " + rec.sample_id +
                               " (records do not match this dataset)");
    const PuzzleSample& sample = *it->second;
    const ScoredRecord scored = score_record(rec, sample);
    TaskMetrics& m = report.tasks[sample.task];
    ++m.total;
    m.correct += scored.correct ? 1 : 0;
    m.unparsed += scored.parsed.kind == ParsedKind::Unparsed ? 1 : 0;
    if (scored.relative_error) {
      m.mre_sum += *scored.relative_error;
      ++m.mre_count;
    }
  }
  return report;
}

// --- Breakdown tables ----------------------------------------------------------

enum class BreakdownKey { GridN, Resolution, Level };

inline std::string_view breakdown_key_slug(BreakdownKey k) {
  switch (k) {
    case BreakdownKey::GridN: return "grid_n";
    case BreakdownKey::Resolution: return "resolution";
    case BreakdownKey::Level: return "level";
  }
  throw std::logic_error("bad breakdown key");
}

inline std::string_view breakdown_difficulty_field(BreakdownKey k) {
  switch (k) {
    case BreakdownKey::GridN: return "n";
    case BreakdownKey::Resolution: return "resolution";
    case BreakdownKey::Level: return "level";
  }
  throw std::logic_error("bad breakdown key");
}

struct BreakdownTable {
  BreakdownKey key;
  std::vector<TaskId> tasks;                        // column order
  std::map<int, std::map<TaskId, TaskMetrics>> rows;  // key value -> per-task

  std::string to_csv() const {
    std::string out = std::string(breakdown_key_slug(key));
    for (TaskId t : tasks) out += "," + std::string(task_slug(t));
    out += "\n";
    char buf[32];
    for (const auto& [value, cells] : rows) {
      out += std::to_string(value);
      for (TaskId t : tasks) {
        out += ",";
        auto it = cells.find(t);
        if (it != cells.end() && it->second.total > 0) {
          std::snprintf(buf, sizeof(buf), "%.4f", it->second.accuracy());
          out += buf;
        }
      }
      out += "\n";
    }
    return out;
  }
};

// Accuracy per difficulty-key value per task; one row per observed value.
inline BreakdownTable breakdown(const std::vector<EvalRecord>& records,
                                const std::vector<PuzzleSample>& samples, BreakdownKey key) {
  std::map<std::string, const PuzzleSample*> by_id;
  for (const auto& s : samples) by_id[s.id] = &s;

  BreakdownTable table;
  table.key = key;
  const std::string field(breakdown_difficulty_field(key));
  std::set<TaskId> seen_tasks;
  bool applicable = false;
  for (const auto& rec : records) {
    auto it = by_id.find(rec.sample_id);
    if (it == by_id.end()) throw std::runtime_error("record for unknown sample id: " + rec.sample_id);
    const PuzzleSample& sample = *it->second;
    if (!sample.difficulty.contains(field)) continue;
    applicable = true;
    const int value = sample.difficulty.at(field).get<int>();
    const ScoredRecord scored = score_record(rec, sample);
    TaskMetrics& m = table.rows[value][sample.task];
    ++m.total;
    m.correct += scored.correct ? 1 : 0;
    seen_tasks.insert(sample.task);
  }
  if (!applicable)
    throw std::runtime_error("breakdown key '" + std::string(breakdown_key_slug(key)) +
                             "' applies to none of the scored tasks");
  for (TaskId t : kAllTasks)
    if (seen_tasks.count(t)) table.tasks.push_back(t);
  return table;
}

// --- Offline agents -------------------------------------------------------------

enum class AgentKind { Oracle, Random, Constant };

struct AgentSpec {
  AgentKind kind = AgentKind::Oracle;
  std::string constant_label = "B";
  std::uint64_t seed = 1;

  static AgentSpec parse(const std::string& text) {
    AgentSpec spec;
    if (text == "oracle") {
      spec.kind = AgentKind::Oracle;
    } else if (text == "random") {
      spec.kind = AgentKind::Random;
    } else if (text.rfind("constant:", 0) == 0 && text.size() == 10) {
      spec.kind = AgentKind::Constant;
      spec.constant_label = text.substr(9);
    } else {
      throw std::invalid_argument("unknown agent '" + text + "' (oracle|random|constant:<L>)");
    }
    return spec;
  }

  std::string name() const {
    switch (kind) {
      case AgentKind::Oracle: return "oracle";
      case AgentKind::Random: return "random";
      case AgentKind::Constant: return "constant-" + constant_label;
    }
    return "agent";
  }
};

// Synthetic raw responses fed through the same parse/score path as real
// model output. The random agent draws uniformly over the sample's labels
// (or a uniform count/sum guess in direct mode); oracle reads the ground
// truth; constant always answers one label.
inline std::vector<EvalRecord> run_agent(const std::vector<PuzzleSample>& samples,
                                         const AgentSpec& spec, const std::string& mode_slug) {
  SeedContext ctx{spec.seed};
  std::vector<EvalRecord> records;
  records.reserve(samples.size());
  for (const PuzzleSample& s : samples) {
    EvalRecord rec;
    rec.sample_id = s.id;
    rec.model = spec.name();
    rec.mode = mode_slug;
    RandomStream rs = ctx.stream_for(s.task, s.seed_index);
    switch (spec.kind) {
      case AgentKind::Oracle:
        rec.raw_response = s.options ? "(" + s.options->correct_label + ")" : s.ground_truth.display();
        break;
      case AgentKind::Constant:
        rec.raw_response = "(" + spec.constant_label + ")";
        break;
      case AgentKind::Random: {
        if (s.options) {
          const auto& entries = s.options->entries;
          rec.raw_response = "(" + entries[rs.next_below(entries.size())].first + ")";
        } else {
          switch (s.ground_truth.kind) {
            case GroundTruthKind::YesNo:
              rec.raw_response = rs.next_below(2) == 0 ? "Yes" : "No";
              break;
            case GroundTruthKind::Count: {
              // uniform guess over the task's count support
              int lo = 2, hi = 8;
              if (s.task == TaskId::IconConnect) hi = std::max(2, s.difficulty.value("n", 9));
              if (s.task == TaskId::HanziMatrix) {
                const int n = s.difficulty.value("n", 9);
                hi = n * n;
              }
              rec.raw_response = std::to_string(rs.next_int(lo, hi));
              break;
            }
            case GroundTruthKind::Sum: {
              const int n = s.difficulty.value("n", 9);
              const int bound = 100 * n * n;
              rec.raw_response = std::to_string(rs.next_int(-bound, bound));
              break;
            }
            case GroundTruthKind::TileId:
              rec.raw_response = "0";
              break;
          }
        }
        break;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// Mode recorded in a dataset's config snapshot; "fixed" when absent.
inline std::string dataset_mode_slug(const fs::path& dataset_dir) {
  const fs::path snap = dataset_dir / "config.snapshot";
  if (!fs::exists(snap)) return "fixed";
  std::ifstream in(snap);
  const json j = json::parse(in);
  return j.at("config").value("mode", "fixed");
}

}  // namespace pzl
