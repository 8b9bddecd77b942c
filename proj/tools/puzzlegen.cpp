// Command-line entry point: generate, verify, refresh, eval, score, report,
// selftest. Exit codes: 0 ok, 1 usage, 2 verification failure, 3 runtime
// error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "pzl/dataset.hpp"
#include "pzl/eval.hpp"
#include "pzl/eval_client.hpp"
#include "pzl/poolgen.hpp"

namespace {

using namespace pzl;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitRuntime = 3;

struct GenerateFlags {
  std::string config_file;
  std::string out_dir;
  std::string pools_root;
  std::string font;
  std::string tasks;
  std::string counts;
  std::string mode;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  bool force = false;
  bool no_images = false;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

DatasetConfig resolve_config(const GenerateFlags& flags) {
  DatasetConfig cfg;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) throw std::runtime_error("cannot open config: " + flags.config_file);
    cfg = dataset_config_from_json(json::parse(in));
  }
  if (flags.seed_set) cfg.master_seed = flags.seed;
  if (!flags.mode.empty()) cfg.mode = option_mode_from_slug(flags.mode);
  if (!flags.pools_root.empty()) cfg.pools = PoolPaths::from_root(flags.pools_root);
  if (!flags.font.empty() && flags.font != "builtin") cfg.font_file = flags.font;
  if (flags.workers > 0) cfg.workers = flags.workers;
  if (flags.no_images) cfg.write_images = false;
  if (!flags.tasks.empty()) {
    const auto keep = split_csv(flags.tasks);
    std::map<TaskId, int> filtered;
    for (const auto& slug : keep) {
      const TaskId t = task_from_slug(slug);
      filtered[t] = cfg.count_for(t);
    }
    cfg.counts = filtered;
  }
  if (!flags.counts.empty()) {
    for (const auto& item : split_csv(flags.counts)) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("--counts expects task=N entries, got '" + item + "'");
      cfg.counts[task_from_slug(item.substr(0, eq))] = std::stoi(item.substr(eq + 1));
    }
  }
  return cfg;
}

void print_generation_report(const GenerationReport& report) {
  int total = 0;
  for (const auto& [task, count] : report.generated) {
    std::printf("  %-16s %d samples\n", std::string(task_slug(task)).c_str(), count);
    total += count;
  }
  std::printf("  total %d samples, %zu rejected draws, %.1fs\n", total, report.rejections.size(),
              report.elapsed_seconds);
}

int cmd_verify(const std::string& dataset_dir) {
  const VerifyReport report = verify_dataset(dataset_dir);
  std::printf("verify: %zu/%zu records passed\n", report.passed, report.total);
  for (const auto& f : report.failures) std::printf("  FAIL %s: %s\n", f.id.c_str(), f.detail.c_str());
  return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

void write_report_files(const fs::path& report_dir, const MetricsReport& metrics,
                        const std::vector<EvalRecord>& records,
                        const std::vector<PuzzleSample>& samples) {
  fs::create_directories(report_dir);
  {
    std::ofstream out(report_dir / "report.json", std::ios::trunc);
    out << metrics.to_json().dump(2) << "\n";
  }
  {
    std::ofstream out(report_dir / "report.txt", std::ios::trunc);
    out << metrics.to_text();
  }
  for (BreakdownKey key : {BreakdownKey::GridN, BreakdownKey::Resolution, BreakdownKey::Level}) {
    try {
      const BreakdownTable table = breakdown(records, samples, key);
      std::ofstream out(report_dir /
                            ("breakdown_" + std::string(breakdown_key_slug(key)) + ".csv"),
                        std::ios::trunc);
      out << table.to_csv();
    } catch (const std::exception&) {
      // key not applicable to this record set
    }
  }
}

int cmd_selftest(const std::string& keep_dir, std::uint64_t seed) {
  const fs::path root = keep_dir.empty()
                            ? fs::temp_directory_path() / ("puzzlegen-selftest-" +
                                                           std::to_string(::getpid()))
                            : fs::path(keep_dir);
  fs::remove_all(root);
  fs::create_directories(root);
  bool ok = true;
  try {
    std::printf("selftest: synthesizing sample pools under %s\n", root.c_str());
    const auto pools = poolgen::write_all(root / "pools", seed, 24, 512);

    DatasetConfig cfg;
    cfg.master_seed = seed;
    cfg.mode = OptionMode::FixedOption;
    for (TaskId t : kAllTasks) cfg.counts[t] = 100;
    cfg.pools = PoolPaths::from_root(root / "pools");
    const fs::path dataset = root / "dataset";
    std::printf("selftest: generating 600-sample fixed-mode dataset\n");
    print_generation_report(generate_dataset(cfg, dataset));

    const VerifyReport verify = verify_dataset(dataset);
    std::printf("selftest: verify %zu/%zu\n", verify.passed, verify.total);
    ok = ok && verify.all_passed();

    const auto samples = read_manifest(dataset / "manifest.jsonl");
    const auto oracle = run_agent(samples, AgentSpec{AgentKind::Oracle, "B", 1}, "fixed");
    const MetricsReport oracle_metrics = score(oracle, samples);
    std::printf("selftest: oracle overall accuracy %.3f\n", oracle_metrics.overall_accuracy());
    ok = ok && oracle_metrics.overall_accuracy() == 1.0;

    const auto random = run_agent(samples, AgentSpec{AgentKind::Random, "B", 2}, "fixed");
    const MetricsReport random_metrics = score(random, samples);
    std::printf("%s", random_metrics.to_text().c_str());

    const auto constant = run_agent(samples, AgentSpec{AgentKind::Constant, "B", 3}, "fixed");
    const MetricsReport constant_metrics = score(constant, samples);
    for (TaskId t : {TaskId::IconConnect, TaskId::HanziMatrix, TaskId::GridSum, TaskId::Jigsaw}) {
      const double acc = constant_metrics.tasks.at(t).accuracy();
      std::printf("selftest: constant-B on %s = %.3f\n", std::string(task_slug(t)).c_str(), acc);
      ok = ok && acc == 1.0;  // fixed mode pins the answer at B
    }
  } catch (...) {
    if (keep_dir.empty()) fs::remove_all(root);
    throw;
  }
  if (keep_dir.empty()) fs::remove_all(root);
  std::printf("selftest: %s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"puzzlegen: procedural visual-puzzle VQA benchmark generator and evaluator"};
  app.require_subcommand(1);

  // generate
  GenerateFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Generate a puzzle dataset");
  gen->add_option("--config", gen_flags.config_file, "JSON config file");
  gen->add_option("--seed", gen_flags.seed, "Master seed")->each([&](const std::string&) {
    gen_flags.seed_set = true;
  });
  gen->add_option("--mode", gen_flags.mode, "fixed|randomized|direct");
  gen->add_option("--tasks", gen_flags.tasks, "Comma-separated task subset");
  gen->add_option("--counts", gen_flags.counts, "Per-task counts, e.g. grid_sum=100,jigsaw=50");
  gen->add_option("--pools", gen_flags.pools_root, "Pool root directory");
  gen->add_option("--font", gen_flags.font, "Stroke-font file (default builtin)");
  gen->add_option("--out", gen_flags.out_dir, "Output directory")->required();
  gen->add_option("--workers", gen_flags.workers, "Worker threads (default: cores)");
  gen->add_flag("--force", gen_flags.force, "Overwrite a non-empty output directory");
  gen->add_flag("--no-images", gen_flags.no_images, "Manifest-only run (skip image files)");

  // verify
  std::string verify_dir;
  auto* ver = app.add_subcommand("verify", "Re-derive and check every record of a dataset");
  ver->add_option("dataset", verify_dir, "Dataset directory")->required();

  // refresh
  RefreshConfig refresh_cfg;
  std::string refresh_out, refresh_tasks = "jigsaw,difference_hunt", refresh_mode = "randomized";
  std::string refresh_images, refresh_captions;
  bool refresh_force = false;
  auto* ref = app.add_subcommand("refresh", "Regenerate image-based tasks over a new image corpus");
  ref->add_option("--images", refresh_images, "Image pool directory")->required();
  ref->add_option("--captions", refresh_captions, "Two-column captions manifest (id<TAB>caption)");
  ref->add_option("--tasks", refresh_tasks, "Subset of jigsaw,difference_hunt");
  ref->add_option("--count", refresh_cfg.count_per_task, "Samples per task");
  ref->add_option("--seed", refresh_cfg.master_seed, "Master seed");
  ref->add_option("--mode", refresh_mode, "fixed|randomized|direct");
  ref->add_option("--workers", refresh_cfg.workers, "Worker threads");
  ref->add_option("--out", refresh_out, "Output directory")->required();
  ref->add_flag("--force", refresh_force, "Overwrite a non-empty output directory");

  // eval
  std::string eval_dataset, eval_records_out = "records.jsonl";
  std::string eval_endpoint, eval_model, eval_token_env = "MODEL_API_KEY";
  std::string eval_responses, eval_agent;
  std::uint64_t eval_agent_seed = 1;
  int eval_concurrency = 4;
  auto* ev = app.add_subcommand("eval", "Collect raw responses from an endpoint, file or agent");
  ev->add_option("--dataset", eval_dataset, "Dataset directory")->required();
  ev->add_option("--records", eval_records_out, "Records output file (JSONL)");
  ev->add_option("--endpoint", eval_endpoint, "Chat-completions base URL, e.g. http://host:8000/v1");
  ev->add_option("--model", eval_model, "Model identifier");
  ev->add_option("--env-token", eval_token_env, "Environment variable holding the bearer token");
  ev->add_option("--concurrency", eval_concurrency, "Max in-flight requests");
  ev->add_option("--responses", eval_responses, "Offline responses file (JSONL id/raw_response)");
  ev->add_option("--agent", eval_agent, "Built-in agent: oracle|random|constant:<L>");
  ev->add_option("--agent-seed", eval_agent_seed, "Random agent seed");

  // score / report
  std::string score_dataset, score_records, report_out;
  auto* sc = app.add_subcommand("score", "Score stored records against their dataset");
  sc->add_option("--dataset", score_dataset, "Dataset directory")->required();
  sc->add_option("--records", score_records, "Records file")->required();
  auto* rp = app.add_subcommand("report", "Write metrics report and breakdown tables");
  rp->add_option("--dataset", score_dataset, "Dataset directory")->required();
  rp->add_option("--records", score_records, "Records file")->required();
  rp->add_option("--out", report_out, "Report directory")->required();

  // selftest
  std::string selftest_keep;
  std::uint64_t selftest_seed = 7;
  auto* st = app.add_subcommand("selftest", "End-to-end oracle/random agent run on a throwaway dataset");
  st->add_option("--out", selftest_keep, "Keep the selftest artifacts in this directory");
  st->add_option("--seed", selftest_seed, "Master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const DatasetConfig cfg = resolve_config(gen_flags);
      const GenerationReport report = generate_dataset(cfg, gen_flags.out_dir, gen_flags.force);
      print_generation_report(report);
      return kExitOk;
    }
    if (ver->parsed()) return cmd_verify(verify_dir);
    if (ref->parsed()) {
      refresh_cfg.images_dir = refresh_images;
      refresh_cfg.captions_file = refresh_captions;
      refresh_cfg.mode = option_mode_from_slug(refresh_mode);
      refresh_cfg.tasks.clear();
      for (const auto& slug : split_csv(refresh_tasks)) refresh_cfg.tasks.insert(task_from_slug(slug));
      const GenerationReport report = refresh_from_images(refresh_cfg, refresh_out, refresh_force);
      print_generation_report(report);
      return kExitOk;
    }
    if (ev->parsed()) {
      const auto samples = read_manifest(fs::path(eval_dataset) / "manifest.jsonl");
      const std::string mode = dataset_mode_slug(eval_dataset);
      std::vector<EvalRecord> records;
      if (!eval_agent.empty()) {
        records = run_agent(samples, AgentSpec::parse(eval_agent).with_seed(eval_agent_seed), mode);
      } else if (!eval_responses.empty()) {
        if (eval_model.empty()) eval_model = "replay";
        records = run_responses_file(samples, eval_responses, eval_model, mode);
      } else if (!eval_endpoint.empty()) {
        if (eval_model.empty()) throw std::runtime_error("--endpoint requires --model");
        ModelEndpoint endpoint;
        endpoint.base_url = eval_endpoint;
        endpoint.model = eval_model;
        endpoint.token_env = eval_token_env;
        endpoint.max_concurrency = eval_concurrency;
        records = run_endpoint(samples, eval_dataset, endpoint, mode);
      } else {
        throw std::runtime_error("eval needs one of --endpoint, --responses or --agent");
      }
      write_records(eval_records_out, records);
      std::printf("eval: wrote %zu records to %s\n", records.size(), eval_records_out.c_str());
      return kExitOk;
    }
    if (sc->parsed() || rp->parsed()) {
      const auto samples = read_manifest(fs::path(score_dataset) / "manifest.jsonl");
      const auto records = read_records(score_records);
      const MetricsReport metrics = score(records, samples);
      std::printf("%s", metrics.to_text().c_str());
      if (rp->parsed()) {
        write_report_files(report_out, metrics, records, samples);
        std::printf("report: wrote %s\n", report_out.c_str());
      }
      return kExitOk;
    }
    if (st->parsed()) return cmd_selftest(selftest_keep, selftest_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
