#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "pzl/qa.hpp"
#include "pzl/sample.hpp"
#include "test_helpers.hpp"

using namespace pzl;
using testutil::shared_pools;

namespace {

WordSearchRule make_ws(const std::string& word, bool present, std::uint64_t seed) {
  MaterialSet mats;
  mats.kind = PoolKind::Word;
  mats.words.push_back({word});
  RandomStream rs(seed);
  return design_word_search(mats, GridSpec(5, 512), present, rs);
}

GridSumRule make_gs(Decimal sum_target) {
  GridSumRule r;
  r.grid = GridSpec(3, 512);
  r.precision = static_cast<NumberPrecision>(sum_target.digits);
  r.values.assign(8, Decimal(0, sum_target.digits));
  r.values.push_back(sum_target);
  r.sum = sum_target;
  return r;
}

}  // namespace

TEST_CASE("question templates instantiate the published queries") {
  CHECK(build_question(PuzzleRule{make_ws("CAT", true, 1)}) ==
        "Does this grid image contain the word 'CAT'?");
  CHECK(build_question(PuzzleRule{make_gs(Decimal(45, 0))}) ==
        "What is the sum of all the numbers in the grid image?");
  DiffHuntRule dh;
  dh.resolution = 512;
  dh.level = 2;
  CHECK(build_question(PuzzleRule{dh}) == "How many differences are there between these two images?");
  HanziMatrixRule hm;
  hm.grid = GridSpec(3, 512);
  hm.cells.assign(9, U'一');
  hm.unique_count = 2;
  CHECK(build_question(PuzzleRule{hm}) == "How many unique Chinese characters are in the grid image?");
}

TEST_CASE("icon connect question names the icon and the run line") {
  IconConnectRule r;
  r.grid = GridSpec(3, 512);
  r.target_icon = "star5";
  r.run = {true, 2, 0, 2};
  r.filler.assign(7, "disc");
  const std::string q = build_question(PuzzleRule{r});
  CHECK_THAT(q, Catch::Matchers::ContainsSubstring("'star5'"));
  CHECK_THAT(q, Catch::Matchers::ContainsSubstring("row 3"));  // 1-based position phrase
}

TEST_CASE("count options are m-1..m+2") {
  IconConnectRule r;
  r.grid = GridSpec(4, 512);
  r.target_icon = "x";
  r.run = {true, 0, 0, 2};
  r.filler.assign(14, "y");
  const OptionValues v = derive_options(PuzzleRule{r});
  CHECK(v.display == std::vector<std::string>{"1", "2", "3", "4"});
  CHECK(v.display[v.correct_index] == "2");

  r.run.length = 4;
  r.filler.assign(12, "y");
  const OptionValues v4 = derive_options(PuzzleRule{r});
  CHECK(v4.display == std::vector<std::string>{"3", "4", "5", "6"});
  CHECK(v4.display[v4.correct_index] == "4");
}

TEST_CASE("sum options step by ten at rule precision") {
  const OptionValues v = derive_options(PuzzleRule{make_gs(Decimal(45, 0))});
  CHECK(v.display == std::vector<std::string>{"35", "45", "55", "65"});
  CHECK(v.correct_index == 1);

  const OptionValues neg = derive_options(PuzzleRule{make_gs(Decimal(-1250, 2))});
  CHECK(neg.display == std::vector<std::string>{"-22.50", "-12.50", "-2.50", "7.50"});
  CHECK(neg.display[neg.correct_index] == "-12.50");
}

TEST_CASE("word search options are Yes/No with correct value tracked") {
  const OptionValues yes = derive_options(PuzzleRule{make_ws("DOG", true, 3)});
  CHECK(yes.display == std::vector<std::string>{"Yes", "No"});
  CHECK(yes.correct_index == 0);
  const OptionValues no = derive_options(PuzzleRule{make_ws("DOG", false, 3)});
  CHECK(no.display[no.correct_index] == "No");
}

TEST_CASE("fixed mode pins the correct slot") {
  RandomStream rs(1);
  SECTION("four-option: correct at B, distractors ascending") {
    OptionValues v{{"3", "4", "5", "6"}, 1};
    const OptionArrangement arr = arrange_options(v, OptionMode::FixedOption, TaskId::IconConnect, rs);
    CHECK(arr.correct_label == "B");
    CHECK(arr.text_for("B") == "4");
    CHECK(arr.text_for("A") == "3");
    CHECK(arr.text_for("C") == "5");
    CHECK(arr.text_for("D") == "6");
  }
  SECTION("word search: Yes is at A even when the answer is No") {
    OptionValues v{{"Yes", "No"}, 1};
    const OptionArrangement arr = arrange_options(v, OptionMode::FixedOption, TaskId::WordSearch, rs);
    CHECK(arr.text_for("A") == "Yes");
    CHECK(arr.text_for("B") == "No");
    CHECK(arr.correct_label == "B");

    OptionValues vy{{"Yes", "No"}, 0};
    const OptionArrangement arry = arrange_options(vy, OptionMode::FixedOption, TaskId::WordSearch, rs);
    CHECK(arry.text_for("A") == "Yes");
    CHECK(arry.correct_label == "A");
  }
}

TEST_CASE("randomized mode is uniform over labels (chi-square)") {
  SeedContext ctx{99};
  std::map<std::string, int> hits;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    RandomStream rs = ctx.stream_for(TaskId::GridSum, static_cast<std::uint64_t>(i));
    OptionValues v{{"1", "2", "3", "4"}, 2};
    const OptionArrangement arr = arrange_options(v, OptionMode::RandomizedOption, TaskId::GridSum, rs);
    CHECK(arr.text_for(arr.correct_label) == "3");
    hits[arr.correct_label]++;
  }
  double chi2 = 0;
  const double expected = trials / 4.0;
  for (const auto& label : {"A", "B", "C", "D"}) {
    const double d = hits[label] - expected;
    chi2 += d * d / expected;
  }
  // df = 3, p = 0.01 critical value
  CHECK(chi2 < 11.345);
  for (const auto& [label, count] : hits)
    CHECK(std::abs(count - 2500) < 375);  // 25% +- 1.5pp at 10^4 samples
}

TEST_CASE("direct answer has no slots and rejects jigsaw") {
  RandomStream rs(2);
  OptionValues v{{"1", "2", "3", "4"}, 1};
  const OptionArrangement arr = arrange_options(v, OptionMode::DirectAnswer, TaskId::GridSum, rs);
  CHECK(arr.entries.empty());
  CHECK(arr.correct_label.empty());
  OptionValues tiles{{"tile 0", "tile 1", "tile 2", "tile 3"}, 0};
  CHECK_THROWS(arrange_options(tiles, OptionMode::DirectAnswer, TaskId::Jigsaw, rs));
}

TEST_CASE("jigsaw fixed arrangement: B shows the missing tile, ascending tile ids") {
  JigsawRule r;
  r.resolution = 512;
  r.n = 3;
  for (int i = 0; i < 9; ++i) r.boundaries.push_back({0, 0, 1, 1});
  r.missing_index = 5;
  r.distractors = {7, 1, 3};
  const OptionValues v = derive_options(PuzzleRule{r});
  CHECK(v.display == std::vector<std::string>{"tile 1", "tile 3", "tile 5", "tile 7"});
  CHECK(v.display[v.correct_index] == "tile 5");
  RandomStream rs(1);
  const OptionArrangement arr = arrange_options(v, OptionMode::FixedOption, TaskId::Jigsaw, rs);
  CHECK(arr.text_for("B") == "tile 5");
  CHECK(arr.correct_label == "B");
}

TEST_CASE("manifest round-trip is field-equal") {
  // build one sample of each task shape and round-trip it
  SeedContext ctx{7};
  std::vector<PuzzleSample> samples;

  {
    PuzzleSample s;
    s.task = TaskId::WordSearch;
    s.id = sample_id(s.task, 12);
    s.seed_index = 12;
    s.rule = PuzzleRule{make_ws("CAT", true, 4)};
    s.ground_truth = ground_truth_for(s.rule);
    s.question = build_question(s.rule);
    RandomStream rs = ctx.stream_for(s.task, 12);
    s.options = arrange_options(derive_options(s.rule), OptionMode::FixedOption, s.task, rs);
    s.image_refs = {"images/word_search/" + s.id + ".png"};
    s.difficulty = json{{"n", 5}, {"word_length", 3}};
    samples.push_back(s);
  }
  {
    PuzzleSample s;
    s.task = TaskId::GridSum;
    s.id = sample_id(s.task, 3);
    s.seed_index = 3;
    s.rule = PuzzleRule{make_gs(Decimal(-1250, 2))};
    s.ground_truth = ground_truth_for(s.rule);
    s.question = build_question(s.rule);
    s.options.reset();  // direct mode
    s.image_refs = {"images/grid_sum/" + s.id + ".png"};
    s.difficulty = json{{"n", 3}, {"precision", 2}, {"sign_mode", "mixed"}};
    samples.push_back(s);
  }
  {
    PuzzleSample s;
    s.task = TaskId::DifferenceHunt;
    s.id = sample_id(s.task, 0);
    DiffHuntRule dh;
    dh.source_image = "scene001";
    dh.source_caption = "a scene";
    dh.resolution = 256;
    dh.level = 3;
    dh.noise_seed = 0xDEADBEEFCAFEBABEULL;
    dh.dither_seed = 42;
    dh.regions.push_back({{10, 10, 40, 40}, DistortionKind::Blur,
                          DiffHuntSchedule::intensity_permille(3)});
    dh.regions.push_back({{100, 100, 40, 44}, DistortionKind::Noise,
                          DiffHuntSchedule::intensity_permille(3)});
    s.rule = PuzzleRule{dh};
    s.ground_truth = ground_truth_for(s.rule);
    s.question = build_question(s.rule);
    RandomStream rs = ctx.stream_for(s.task, 0);
    s.options = arrange_options(derive_options(s.rule), OptionMode::RandomizedOption, s.task, rs);
    s.image_refs = {"images/difference_hunt/a.png", "images/difference_hunt/a_pair.png"};
    s.difficulty = json{{"resolution", 256}, {"level", 3}};
    samples.push_back(s);
  }

  for (const PuzzleSample& s : samples) {
    const std::string line = manifest_line(s);
    const PuzzleSample back = parse_manifest_line(line);
    CHECK(back.id == s.id);
    CHECK(back.task == s.task);
    CHECK(back.image_refs == s.image_refs);
    CHECK(back.question == s.question);
    CHECK(back.options.has_value() == s.options.has_value());
    if (s.options) {
      CHECK(back.options->entries == s.options->entries);
      CHECK(back.options->correct_label == s.options->correct_label);
    }
    CHECK(back.ground_truth == s.ground_truth);
    CHECK(back.difficulty == s.difficulty);
    CHECK(back.seed_index == s.seed_index);
    // rule equality via re-serialization
    CHECK(codec::rule_to_json(back.rule) == codec::rule_to_json(s.rule));
    // byte-stable: serializing the round-tripped sample reproduces the line
    CHECK(manifest_line(back) == line);
  }
}

TEST_CASE("exactly one option matches the ground truth") {
  SeedContext ctx{2025};
  const SourcePool words = load_word_pool(shared_pools().words_file);
  for (int trial = 0; trial < 2000; ++trial) {
    RandomStream rs = ctx.stream_for(TaskId::GridSum, static_cast<std::uint64_t>(trial));
    SamplingCondition cond;
    cond.sign_mode = static_cast<SignMode>(rs.next_below(3));
    cond.precision = static_cast<NumberPrecision>(rs.next_below(3));
    const GridSumRule rule = design_grid_sum(GridSpec(3, 512), cond, rs);
    const GroundTruth gt = ground_truth_for(PuzzleRule{rule});
    const auto mode = trial % 2 ? OptionMode::FixedOption : OptionMode::RandomizedOption;
    const OptionArrangement arr = arrange_options(derive_options(PuzzleRule{rule}), mode, TaskId::GridSum, rs);
    int matches = 0;
    for (const auto& [label, text] : arr.entries) matches += text == gt.display() ? 1 : 0;
    REQUIRE(matches == 1);
    REQUIRE(arr.text_for(arr.correct_label) == gt.display());
  }
}

TEST_CASE("prompt payload structure per mode and task") {
  PuzzleSample s;
  s.task = TaskId::GridSum;
  s.id = "grid_sum-000001";
  s.rule = PuzzleRule{make_gs(Decimal(45, 0))};
  s.ground_truth = ground_truth_for(s.rule);
  s.question = build_question(s.rule);
  s.image_refs = {"images/grid_sum/grid_sum-000001.png"};

  SECTION("fixed mode grid sum has exactly four option lines") {
    RandomStream rs(5);
    s.options = arrange_options(derive_options(s.rule), OptionMode::FixedOption, s.task, rs);
    const PromptPayload p = render_prompt(s, "/data");
    REQUIRE(p.option_lines.size() == 4);
    CHECK(p.option_lines[0] == "(A) 35");
    CHECK(p.option_lines[1] == "(B) 45");
    CHECK(p.instruction == "Answer with the option letter only.");
    REQUIRE(p.images.size() == 1);
    CHECK(p.images[0] == std::filesystem::path("/data/images/grid_sum/grid_sum-000001.png"));
  }
  SECTION("direct word search has no option lines and Yes/No instruction") {
    PuzzleSample ws;
    ws.task = TaskId::WordSearch;
    ws.rule = PuzzleRule{make_ws("CAT", false, 9)};
    ws.ground_truth = ground_truth_for(ws.rule);
    ws.question = build_question(ws.rule);
    ws.image_refs = {"images/word_search/x.png"};
    const PromptPayload p = render_prompt(ws, "/data");
    CHECK(p.option_lines.empty());
    CHECK(p.instruction == "Answer Yes or No.");
  }
  SECTION("direct grid sum asks for a number") {
    const PromptPayload p = render_prompt(s, "/data");
    CHECK(p.instruction == "Answer with a number only.");
  }
}

TEST_CASE("prompt template overrides load from file") {
  testutil::TempDir dir("templates");
  {
    std::ofstream out(dir.path / "prompts.txt");
    out << "instruction.choice=Reply with one letter.\n";
  }
  const PromptTemplates t = PromptTemplates::from_file(dir.path / "prompts.txt");
  CHECK(t.get("instruction.choice") == "Reply with one letter.");
  CHECK(t.get("question.grid_sum") == PromptTemplates::defaults().get("question.grid_sum"));
  {
    std::ofstream out(dir.path / "bad.txt");
    out << "nonsense.key=x\n";
  }
  CHECK_THROWS(PromptTemplates::from_file(dir.path / "bad.txt"));
}
