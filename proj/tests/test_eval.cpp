#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "pzl/eval.hpp"
#include "pzl/eval_client.hpp"
#include "test_helpers.hpp"

using namespace pzl;
using testutil::shared_pools;
using testutil::TempDir;

namespace {

DatasetConfig tiny_config(std::uint64_t seed, OptionMode mode, int per_task) {
  DatasetConfig cfg;
  cfg.master_seed = seed;
  cfg.mode = mode;
  for (TaskId t : kAllTasks) cfg.counts[t] = per_task;
  const auto& p = shared_pools();
  cfg.pools.icons_dir = p.icons_dir;
  cfg.pools.hanzi_file = p.hanzi_file;
  cfg.pools.near_form_file = p.near_form_file;
  cfg.pools.words_file = p.words_file;
  cfg.pools.images_dir = p.images_dir;
  cfg.pools.captions_file = p.captions_file;
  cfg.workers = 1;
  cfg.write_images = false;  // agents never look at pixels
  return cfg;
}

PuzzleSample choice_sample(const std::string& correct_label) {
  PuzzleSample s;
  s.task = TaskId::GridSum;
  s.id = "grid_sum-000000";
  GridSumRule rule;
  rule.grid = GridSpec(3, 512);
  rule.values.assign(9, Decimal(5, 0));
  rule.sum = Decimal(45, 0);
  s.rule = PuzzleRule{rule};
  s.ground_truth = GroundTruth::make_sum(Decimal(45, 0));
  OptionArrangement arr;
  arr.entries = {{"A", "35"}, {"B", "45"}, {"C", "55"}, {"D", "65"}};
  arr.correct_label = correct_label;
  s.options = arr;
  return s;
}

PuzzleSample direct_sum_sample(Decimal sum, const std::string& id = "grid_sum-000000") {
  PuzzleSample s;
  s.task = TaskId::GridSum;
  s.id = id;
  GridSumRule rule;
  rule.grid = GridSpec(3, 512);
  rule.precision = static_cast<NumberPrecision>(sum.digits);
  rule.values.assign(8, Decimal(0, sum.digits));
  rule.values.push_back(sum);
  rule.sum = sum;
  s.rule = PuzzleRule{rule};
  s.ground_truth = GroundTruth::make_sum(sum);
  s.difficulty = json{{"n", 3}};
  return s;
}

}  // namespace

TEST_CASE("answer parsing follows the first-match rules") {
  const PuzzleSample choice = choice_sample("B");
  SECTION("parenthesized letter") {
    const ParsedAnswer a = parse_answer("The answer is (C).", choice);
    REQUIRE(a.kind == ParsedKind::Choice);
    CHECK(a.label == "C");
  }
  SECTION("bracketed and bare letters") {
    CHECK(parse_answer("[D]", choice).label == "D");
    CHECK(parse_answer("B", choice).label == "B");
    CHECK(parse_answer("I pick B.", choice).label == "B");
  }
  SECTION("answer-is prefix with lowercase") {
    CHECK(parse_answer("answer: c", choice).label == "C");
    CHECK(parse_answer("The Answer is d", choice).label == "D");
  }
  SECTION("prose letters do not fire") {
    // lowercase 'a'/'d' in words must not parse; unmatched text stays unparsed
    const ParsedAnswer a = parse_answer("a tricky and dubious reply", choice);
    CHECK(a.kind == ParsedKind::Unparsed);
  }
  SECTION("first match wins across patterns") {
    CHECK(parse_answer("(A) no wait, (B)", choice).label == "A");
  }

  SECTION("word search accepts yes/no tokens") {
    PuzzleSample ws;
    ws.task = TaskId::WordSearch;
    ws.id = "word_search-000000";
    WordSearchRule rule;
    rule.grid = GridSpec(3, 512);
    rule.word = "CAT";
    rule.present = true;
    rule.letters.assign(9, 'A');
    ws.rule = PuzzleRule{rule};
    ws.ground_truth = GroundTruth::make_yesno(true);
    OptionArrangement arr;
    arr.entries = {{"A", "Yes"}, {"B", "No"}};
    arr.correct_label = "A";
    ws.options = arr;

    CHECK(parse_answer("yes, the word appears in row 2", ws).label == "A");
    CHECK(parse_answer("No.", ws).label == "B");
    CHECK(parse_answer("(B)", ws).label == "B");
    CHECK(parse_answer("The answer is (A): yes", ws).label == "A");
  }

  SECTION("direct numeric takes the first number") {
    const PuzzleSample direct = direct_sum_sample(Decimal(455, 1));
    const ParsedAnswer a = parse_answer("approximately 45.5 or so", direct);
    REQUIRE(a.kind == ParsedKind::Number);
    CHECK(a.number == Decimal(455, 1));
    CHECK(parse_answer("-12.50 I think", direct).number == Decimal(-1250, 2));
    CHECK(parse_answer("total = 45", direct).number == Decimal(45, 0));
    CHECK(parse_answer("no digits here", direct).kind == ParsedKind::Unparsed);
  }
}

TEST_CASE("relative error terms match the published definition") {
  CHECK(relative_error_term(10.0, 12.0) == Catch::Approx(0.2));
  CHECK(relative_error_term(7.0, 7.0) == 0.0);
  CHECK(relative_error_term(0.0, 3.0) == 3.0);  // clamped denominator
  // scaling both values leaves an unclamped term unchanged
  CHECK(relative_error_term(40.0, 50.0) == Catch::Approx(relative_error_term(4.0, 5.0)));
}

TEST_CASE("MRE aggregates exactly over the three canonical terms") {
  std::vector<PuzzleSample> samples = {direct_sum_sample(Decimal(10, 0), "grid_sum-000000"),
                                       direct_sum_sample(Decimal(7, 0), "grid_sum-000001"),
                                       direct_sum_sample(Decimal(0, 0), "grid_sum-000002")};
  samples[1].id = "grid_sum-000001";
  samples[2].id = "grid_sum-000002";
  std::vector<EvalRecord> records(3);
  records[0] = {"grid_sum-000000", "m", "direct", "12", 0, 0, ""};
  records[1] = {"grid_sum-000001", "m", "direct", "7", 0, 0, ""};
  records[2] = {"grid_sum-000002", "m", "direct", "3", 0, 0, ""};
  const MetricsReport report = score(records, samples);
  const TaskMetrics& m = report.tasks.at(TaskId::GridSum);
  REQUIRE(m.mre().has_value());
  CHECK(*m.mre() == Catch::Approx(16.0 / 15.0).epsilon(1e-12));
  CHECK(m.accuracy() == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("unparsed direct responses contribute with a zero guess") {
  std::vector<PuzzleSample> samples = {direct_sum_sample(Decimal(10, 0))};
  std::vector<EvalRecord> records = {{"grid_sum-000000", "m", "direct", "i refuse", 0, 0, ""}};
  const MetricsReport report = score(records, samples);
  const TaskMetrics& m = report.tasks.at(TaskId::GridSum);
  CHECK(*m.mre() == Catch::Approx(1.0));  // |0 - 10| / 10
  CHECK(m.unparsed_rate() == 1.0);
  CHECK(m.accuracy() == 0.0);
}

TEST_CASE("orphan records are fatal") {
  std::vector<PuzzleSample> samples = {direct_sum_sample(Decimal(10, 0))};
  std::vector<EvalRecord> records = {{"word_search-000009", "m", "direct", "1", 0, 0, ""}};
  CHECK_THROWS_WITH(score(records, samples), Catch::Matchers::ContainsSubstring("unknown sample id"));
}

TEST_CASE("oracle scores perfectly in every mode") {
  TempDir out("oracle");
  int dataset_index = 0;
  for (OptionMode mode :
       {OptionMode::FixedOption, OptionMode::RandomizedOption, OptionMode::DirectAnswer}) {
    const fs::path dir = out.path / ("d" + std::to_string(dataset_index++));
    generate_dataset(tiny_config(31 + dataset_index, mode, 6), dir);
    const auto samples = read_manifest(dir / "manifest.jsonl");
    const auto records = run_agent(samples, AgentSpec{AgentKind::Oracle, "B", 1},
                                   std::string(option_mode_slug(mode)));
    const MetricsReport report = score(records, samples);
    for (const auto& [task, metrics] : report.tasks) {
      INFO("mode " << option_mode_slug(mode) << " task " << task_slug(task));
      REQUIRE(metrics.accuracy() == 1.0);
      if (metrics.mre()) REQUIRE(*metrics.mre() == 0.0);
    }
    REQUIRE(report.overall_accuracy() == 1.0);
    if (mode == OptionMode::DirectAnswer) CHECK(report.tasks.count(TaskId::Jigsaw) == 0);
  }
}

TEST_CASE("constant-B agent exposes the fixed-option positional artifact") {
  TempDir out("constb");
  generate_dataset(tiny_config(77, OptionMode::FixedOption, 10), out.path / "d");
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");
  const auto records = run_agent(samples, AgentSpec{AgentKind::Constant, "B", 1}, "fixed");
  const MetricsReport report = score(records, samples);
  for (TaskId t : {TaskId::IconConnect, TaskId::HanziMatrix, TaskId::GridSum, TaskId::Jigsaw})
    REQUIRE(report.tasks.at(t).accuracy() == 1.0);
  // binary task: B is "No", which the default balance hits half the time
  CHECK(report.tasks.at(TaskId::WordSearch).accuracy() == Catch::Approx(0.5));
}

TEST_CASE("scoring is a pure function of records and samples") {
  TempDir out("pure");
  generate_dataset(tiny_config(55, OptionMode::RandomizedOption, 5), out.path / "d");
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");
  const auto records = run_agent(samples, AgentSpec{AgentKind::Random, "B", 42}, "randomized");
  const json a = score(records, samples).to_json();
  const json b = score(records, samples).to_json();
  CHECK(a == b);

  SECTION("records round-trip through the records file") {
    write_records(out.path / "r.jsonl", records);
    const auto back = read_records(out.path / "r.jsonl");
    REQUIRE(back.size() == records.size());
    CHECK(score(back, samples).to_json() == a);
  }
}

TEST_CASE("breakdown tables cover every observed key value") {
  TempDir out("breakdown");
  generate_dataset(tiny_config(91, OptionMode::FixedOption, 14), out.path / "d");
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");
  const auto records = run_agent(samples, AgentSpec{AgentKind::Oracle, "B", 1}, "fixed");

  const BreakdownTable by_n = breakdown(records, samples, BreakdownKey::GridN);
  std::set<int> observed;
  for (const auto& s : samples)
    if (s.difficulty.contains("n")) observed.insert(s.difficulty.at("n").get<int>());
  REQUIRE(by_n.rows.size() == observed.size());
  for (const auto& [value, cells] : by_n.rows)
    for (const auto& [task, metrics] : cells) REQUIRE(metrics.accuracy() == 1.0);

  const BreakdownTable by_level = breakdown(records, samples, BreakdownKey::Level);
  for (const auto& [value, cells] : by_level.rows) {
    CHECK(value >= 1);
    CHECK(value <= 5);
    CHECK(cells.count(TaskId::DifferenceHunt) == 1);
  }

  const std::string csv = by_n.to_csv();
  CHECK_THAT(csv, Catch::Matchers::StartsWith("grid_n,"));
  CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("icon_connect"));

  SECTION("inapplicable keys are an error") {
    std::vector<PuzzleSample> ws_only;
    std::vector<EvalRecord> ws_records;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].task == TaskId::WordSearch) {
        ws_only.push_back(samples[i]);
        ws_records.push_back(records[i]);
      }
    CHECK_THROWS(breakdown(ws_records, ws_only, BreakdownKey::Level));
  }
}

TEST_CASE("responses-file evaluation joins by sample id") {
  TempDir out("responses");
  generate_dataset(tiny_config(13, OptionMode::FixedOption, 3), out.path / "d");
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");
  {
    std::ofstream f(out.path / "responses.jsonl");
    for (const auto& s : samples)
      if (s.task != TaskId::WordSearch)
        f << json{{"id", s.id}, {"raw_response", "(" + s.options->correct_label + ")"}}.dump()
          << "\n";
  }
  const auto records = run_responses_file(samples, out.path / "responses.jsonl", "replay", "fixed");
  const MetricsReport report = score(records, samples);
  CHECK(report.tasks.at(TaskId::GridSum).accuracy() == 1.0);
  // missing responses score as incorrect, never crash
  CHECK(report.tasks.at(TaskId::WordSearch).accuracy() == 0.0);
}

TEST_CASE("http client: happy path, retry, and auth preflight") {
  httplib::Server server;
  std::atomic<int> flaky_hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    if (body.at("messages").at(0).at("content").is_string()) {
      res.set_content(json{{"choices", {{{"message", {{"content", "pong"}}}}}}}.dump(),
                      "application/json");
      return;
    }
    if (body.at("model") == "flaky" && flaky_hits.fetch_add(1) < 2) {
      res.status = 500;
      return;
    }
    const auto& content = body.at("messages").at(0).at("content");
    int image_parts = 0;
    for (const auto& part : content)
      if (part.at("type") == "image_url") ++image_parts;
    res.set_content(json{{"choices",
                          {{{"message",
                             {{"content", "(B) images=" + std::to_string(image_parts)}}}}}}}
                        .dump(),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  TempDir out("http");
  generate_dataset(tiny_config(19, OptionMode::FixedOption, 2), out.path / "d");
  // images are needed as attachments for the client
  DatasetConfig cfg = tiny_config(19, OptionMode::FixedOption, 2);
  cfg.write_images = true;
  cfg.counts = {{TaskId::GridSum, 2}, {TaskId::Jigsaw, 1}};
  generate_dataset(cfg, out.path / "d", true);
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");

  ModelEndpoint endpoint;
  endpoint.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  endpoint.model = "stub";
  endpoint.token_env = "";
  endpoint.max_concurrency = 2;
  endpoint.backoff_ms = 10;

  SECTION("echo endpoint returns records that score") {
    const auto records = run_endpoint(samples, out.path / "d", endpoint, "fixed");
    REQUIRE(records.size() == samples.size());
    for (const auto& r : records) {
      CHECK(r.transport_error.empty());
      CHECK_THAT(r.raw_response, Catch::Matchers::ContainsSubstring("(B)"));
    }
    // jigsaw prompt attaches 5 images (incomplete + 4 tiles)
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].task == TaskId::Jigsaw)
        CHECK_THAT(records[i].raw_response, Catch::Matchers::ContainsSubstring("images=5"));
    const MetricsReport report = score(records, samples);
    CHECK(report.overall_accuracy() == 1.0);  // fixed mode: B is always right
  }
  SECTION("transient failures retry and then succeed") {
    ModelEndpoint flaky = endpoint;
    flaky.model = "flaky";
    flaky.max_attempts = 4;
    const QueryResult q = query_model(flaky, render_prompt(samples[0], out.path / "d"));
    CHECK(q.error.empty());
    CHECK(q.retries == 2);
  }
  SECTION("exhausted retries record a failure instead of throwing") {
    ModelEndpoint flaky = endpoint;
    flaky.model = "flaky";
    flaky.max_attempts = 1;
    flaky_hits = 0;
    const QueryResult q = query_model(flaky, render_prompt(samples[0], out.path / "d"));
    CHECK(!q.error.empty());
  }
  SECTION("preflight passes against the stub") {
    CHECK_NOTHROW(preflight(endpoint));
  }

  server.stop();
  server_thread.join();
}

TEST_CASE("preflight rejects bad credentials before any sample is sent") {
  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content("{\"error\": \"bad token\"}", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ModelEndpoint endpoint;
  endpoint.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  endpoint.model = "stub";
  endpoint.token_env = "";
  CHECK_THROWS_WITH(preflight(endpoint), Catch::Matchers::ContainsSubstring("authentication"));

  server.stop();
  server_thread.join();
}
