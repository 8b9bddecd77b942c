#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "pzl/dataset.hpp"
#include "test_helpers.hpp"

using namespace pzl;
using testutil::shared_pools;
using testutil::TempDir;

namespace {

DatasetConfig small_config(std::uint64_t seed, OptionMode mode, int per_task) {
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
  return cfg;
}

}  // namespace

TEST_CASE("generate + verify closure on a small dataset") {
  TempDir out("gen");
  DatasetConfig cfg = small_config(7, OptionMode::FixedOption, 8);
  const GenerationReport rep = generate_dataset(cfg, out.path / "d1");
  for (TaskId t : kAllTasks) REQUIRE(rep.generated.at(t) == 8);

  const VerifyReport verify = verify_dataset(out.path / "d1");
  for (const auto& f : verify.failures) UNSCOPED_INFO(f.id << ": " << f.detail);
  REQUIRE(verify.all_passed());
  REQUIRE(verify.total == 48);
  REQUIRE(verify.passed == 48);

  SECTION("manifest is in canonical (task, seed_index) order") {
    const auto samples = read_manifest(out.path / "d1" / "manifest.jsonl");
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const bool ordered =
          static_cast<int>(samples[i - 1].task) < static_cast<int>(samples[i].task) ||
          (samples[i - 1].task == samples[i].task && samples[i - 1].seed_index < samples[i].seed_index);
      REQUIRE(ordered);
    }
  }
  SECTION("output directory refuses overwrite without force") {
    CHECK_THROWS_WITH(generate_dataset(cfg, out.path / "d1"),
                      Catch::Matchers::ContainsSubstring("not empty"));
    CHECK_NOTHROW(generate_dataset(cfg, out.path / "d1", /*force=*/true));
  }
}

TEST_CASE("same seed reproduces byte-identical datasets; workers do not matter") {
  TempDir out("det");
  DatasetConfig cfg = small_config(21, OptionMode::RandomizedOption, 6);
  generate_dataset(cfg, out.path / "a");
  generate_dataset(cfg, out.path / "b");
  REQUIRE(directory_hash(out.path / "a") == directory_hash(out.path / "b"));

  DatasetConfig parallel = cfg;
  parallel.workers = 3;
  generate_dataset(parallel, out.path / "c");
  // worker count is not part of the identity: compare manifests byte for byte
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  REQUIRE(slurp(out.path / "a" / "manifest.jsonl") == slurp(out.path / "c" / "manifest.jsonl"));
  // images too: only the resolved-config snapshot records the worker count
  REQUIRE(image_hashes(out.path / "a") == image_hashes(out.path / "c"));
}

TEST_CASE("different seeds share no image bytes") {
  TempDir out("fresh");
  DatasetConfig cfg = small_config(100, OptionMode::FixedOption, 4);
  generate_dataset(cfg, out.path / "a");
  cfg.master_seed = 101;
  generate_dataset(cfg, out.path / "b");
  const auto ha = image_hashes(out.path / "a");
  const auto hb = image_hashes(out.path / "b");
  REQUIRE(!ha.empty());
  std::set<std::uint64_t> set_a;
  for (const auto& [rel, h] : ha) set_a.insert(h);
  for (const auto& [rel, h] : hb)
    if (set_a.count(h)) FAIL("image hash collision across seeds at " << rel);
}

TEST_CASE("word search yes/no balance is exact under the default ratio") {
  TempDir out("wsbal");
  DatasetConfig cfg = small_config(3, OptionMode::FixedOption, 0);
  cfg.counts = {{TaskId::WordSearch, 10}};
  generate_dataset(cfg, out.path / "d");
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");
  REQUIRE(samples.size() == 10);
  int yes = 0;
  for (const auto& s : samples) yes += s.ground_truth.yes ? 1 : 0;
  CHECK(yes == 5);
}

TEST_CASE("direct mode drops jigsaw and omits options") {
  TempDir out("direct");
  DatasetConfig cfg = small_config(4, OptionMode::DirectAnswer, 3);
  const GenerationReport rep = generate_dataset(cfg, out.path / "d");
  CHECK(rep.generated.count(TaskId::Jigsaw) == 0);
  const auto samples = read_manifest(out.path / "d" / "manifest.jsonl");
  REQUIRE(samples.size() == 15);  // five tasks remain
  for (const auto& s : samples) {
    CHECK(s.task != TaskId::Jigsaw);
    CHECK(!s.options.has_value());
  }
  const VerifyReport verify = verify_dataset(out.path / "d");
  REQUIRE(verify.all_passed());
}

TEST_CASE("verify pinpoints a corrupted record by id") {
  TempDir out("corrupt");
  DatasetConfig cfg = small_config(11, OptionMode::FixedOption, 0);
  cfg.counts = {{TaskId::GridSum, 5}};
  generate_dataset(cfg, out.path / "d");

  const fs::path manifest = out.path / "d" / "manifest.jsonl";
  std::vector<std::string> lines;
  {
    std::ifstream in(manifest);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() == 5);
  json j = json::parse(lines[2]);
  const std::string victim = j.at("id");
  // nudge the stored sum by one cent-equivalent
  const Decimal stored = Decimal::parse(j["ground_truth"]["value"].get<std::string>());
  j["ground_truth"]["value"] = (stored + Decimal(1, stored.digits)).to_string();
  lines[2] = j.dump();
  {
    std::ofstream outf(manifest, std::ios::trunc);
    for (const auto& l : lines) outf << l << "\n";
  }

  const VerifyReport verify = verify_dataset(out.path / "d");
  REQUIRE(verify.failures.size() == 1);
  CHECK(verify.failures[0].id == victim);
  CHECK(verify.total == 5);
  CHECK(verify.passed == 4);
}

TEST_CASE("verify enforces manifest-to-files closure in both directions") {
  TempDir out("closure");
  DatasetConfig cfg = small_config(13, OptionMode::FixedOption, 0);
  cfg.counts = {{TaskId::WordSearch, 3}};
  generate_dataset(cfg, out.path / "d");
  REQUIRE(verify_dataset(out.path / "d").all_passed());

  SECTION("missing referenced image") {
    fs::remove(out.path / "d" / "images/word_search/word_search-000001.png");
    const VerifyReport verify = verify_dataset(out.path / "d");
    REQUIRE(!verify.all_passed());
    CHECK_THAT(verify.failures[0].detail, Catch::Matchers::ContainsSubstring("missing image file"));
  }
  SECTION("orphan image file") {
    write_png(out.path / "d" / "images/word_search/stray.png", Image(8, 8));
    const VerifyReport verify = verify_dataset(out.path / "d");
    REQUIRE(!verify.all_passed());
    bool orphan = false;
    for (const auto& f : verify.failures) orphan = orphan || f.detail == "orphan image file";
    CHECK(orphan);
  }
}

TEST_CASE("verify on an empty directory reports the missing manifest") {
  TempDir out("empty");
  CHECK_THROWS_WITH(verify_dataset(out.path), Catch::Matchers::ContainsSubstring("manifest missing"));
}

TEST_CASE("refresh generates verified image-task datasets over a custom pool") {
  TempDir out("refresh");
  RefreshConfig refresh;
  refresh.images_dir = shared_pools().images_dir;
  refresh.captions_file = shared_pools().captions_file;
  refresh.count_per_task = 6;
  refresh.master_seed = 5;
  refresh.workers = 1;
  const GenerationReport rep = refresh_from_images(refresh, out.path / "r");
  CHECK(rep.generated.at(TaskId::Jigsaw) == 6);
  CHECK(rep.generated.at(TaskId::DifferenceHunt) == 6);
  const VerifyReport verify = verify_dataset(out.path / "r");
  for (const auto& f : verify.failures) UNSCOPED_INFO(f.id << ": " << f.detail);
  REQUIRE(verify.all_passed());

  // provenance: every record carries its source image id and caption
  for (const auto& s : read_manifest(out.path / "r" / "manifest.jsonl")) {
    const json rule = codec::rule_to_json(s.rule);
    CHECK(!rule.at("source_image").get<std::string>().empty());
    CHECK(!rule.at("source_caption").get<std::string>().empty());
  }
}

TEST_CASE("refresh layout decisions reproduce across pools under one seed") {
  // two pools with identical structure but different pixels
  TempDir pools("twopools");
  poolgen::write_image_pool(pools.path / "A", 12, 11, 384);
  poolgen::write_image_pool(pools.path / "B", 12, 12, 384);

  TempDir out("refresh2");
  RefreshConfig refresh;
  refresh.count_per_task = 5;
  refresh.master_seed = 9;
  refresh.workers = 1;
  refresh.images_dir = pools.path / "A";
  refresh.captions_file = pools.path / "A" / "captions.tsv";
  const GenerationReport rep_a = refresh_from_images(refresh, out.path / "A");
  refresh.images_dir = pools.path / "B";
  refresh.captions_file = pools.path / "B" / "captions.tsv";
  const GenerationReport rep_b = refresh_from_images(refresh, out.path / "B");

  // no content-driven retries in either run, so layouts must line up
  REQUIRE(rep_a.rejections.empty());
  REQUIRE(rep_b.rejections.empty());
  const auto ma = read_manifest(out.path / "A" / "manifest.jsonl");
  const auto mb = read_manifest(out.path / "B" / "manifest.jsonl");
  REQUIRE(ma.size() == mb.size());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    json ja = codec::rule_to_json(ma[i].rule);
    json jb = codec::rule_to_json(mb[i].rule);
    ja.erase("source_caption");
    jb.erase("source_caption");
    REQUIRE(ja == jb);  // same scene ids and layout decisions, pixels differ
    REQUIRE(ma[i].question == mb[i].question);
  }
}

TEST_CASE("config JSON round-trips") {
  DatasetConfig cfg = small_config(77, OptionMode::RandomizedOption, 9);
  cfg.word_search_yes_percent = 40;
  cfg.png_level_photo = 2;
  const DatasetConfig back = dataset_config_from_json(dataset_config_to_json(cfg));
  CHECK(back.master_seed == 77);
  CHECK(back.mode == OptionMode::RandomizedOption);
  CHECK(back.counts == cfg.counts);
  CHECK(back.word_search_yes_percent == 40);
  CHECK(back.png_level_photo == 2);
  CHECK(back.pools.words_file == cfg.pools.words_file);
}
