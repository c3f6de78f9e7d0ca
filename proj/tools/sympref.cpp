// sympref: symbolic-execution test generation, four-category grading,
// pass@k evaluation, preference datasets, and toy actor training over the
// MiniLang task corpus.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sympref/io/corpus.hpp"
#include "sympref/io/jsonl.hpp"
#include "sympref/metrics.hpp"
#include "sympref/prefdata.hpp"
#include "sympref/support/parallel.hpp"
#include "sympref/toytrain/loop.hpp"

namespace fs = std::filesystem;
using sympref::io::DataError;
using sympref::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Writes to a file, or stdout for "-".
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (path != "-") {
      file_.emplace(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::optional<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

double parse_double_field(const json& j, const char* what) {
  if (!j.is_number()) throw DataError(std::string(what) + " must be a number");
  return j.get<double>();
}

sympref::toytrain::RewardMap parse_reward_map(const std::string& text) {
  sympref::toytrain::RewardMap map;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad --reward-map: ") + e.what());
  }
  if (j.is_array() && j.size() == 4) {
    for (int i = 0; i < 4; ++i)
      map.by_category[static_cast<std::size_t>(i)] = parse_double_field(j[static_cast<std::size_t>(i)], "reward");
  } else if (j.is_object()) {
    for (int i = 0; i < 4; ++i) {
      const char* name = sympref::grade_category_name(static_cast<sympref::GradeCategory>(i));
      if (j.contains(name))
        map.by_category[static_cast<std::size_t>(i)] = parse_double_field(j.at(name), name);
    }
  } else {
    throw DataError("--reward-map must be a 4-array or an object keyed by category name");
  }
  map.validate();
  return map;
}

// Candidate files for one suite file: either one subdirectory of .ml files
// per task id, or a flat directory of .ml files when there is one suite.
std::map<std::string, std::vector<sympref::Candidate>> collect_candidates(
    const fs::path& root, const std::vector<sympref::TestSuite>& suites) {
  if (!fs::is_directory(root))
    throw DataError("candidate directory not found: " + root.string());
  auto sorted_ml_files = [](const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".ml")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
  };

  std::map<std::string, std::vector<sympref::Candidate>> out;
  bool saw_subdir = false;
  for (const auto& entry : fs::directory_iterator(root))
    saw_subdir |= entry.is_directory();

  if (saw_subdir) {
    for (const auto& suite : suites) {
      const fs::path dir = root / suite.task_id;
      if (!fs::is_directory(dir)) continue;
      for (const auto& file : sorted_ml_files(dir))
        out[suite.task_id].push_back(
            {file.filename().string(), sympref::io::read_file(file)});
    }
    return out;
  }
  if (suites.size() != 1)
    throw DataError("flat candidate directories need exactly one suite; got " +
                    std::to_string(suites.size()));
  for (const auto& file : sorted_ml_files(root))
    out[suites.front().task_id].push_back(
        {file.filename().string(), sympref::io::read_file(file)});
  return out;
}

std::vector<sympref::TestSuite> load_suites(const std::string& path) {
  auto in = open_input(path);
  std::vector<sympref::TestSuite> suites;
  for (const auto& j : sympref::io::read_jsonl(in))
    suites.push_back(sympref::io::suite_from_json(j));
  if (suites.empty()) throw DataError("no suites in " + path);
  return suites;
}

std::vector<sympref::GradeRecord> load_grades(const std::string& path) {
  auto in = open_input(path);
  std::vector<sympref::GradeRecord> grades;
  for (const auto& j : sympref::io::read_jsonl(in))
    grades.push_back(sympref::io::grade_from_json(j));
  if (grades.empty()) throw DataError("no grade records in " + path);
  return grades;
}

int cmd_gen_tests(const std::string& corpus_dir, const std::string& out_path,
                  const sympref::GenConfig& gen, bool dump_cfg) {
  const auto tasks = sympref::io::load_corpus(corpus_dir);
  OutputSink out(out_path);

  struct PerTask {
    std::optional<sympref::TestSuite> suite;
    std::string note;
    std::string cfg_dump;
  };
  sympref::GenConfig quiet = gen;
  quiet.log = nullptr;  // warnings are collected per task and ordered below
  auto results = sympref::parallel_map<PerTask>(tasks.size(), [&](std::size_t i) {
    PerTask r;
    try {
      if (dump_cfg) {
        const auto typed = sympref::check_ground_truth(tasks[i]);
        r.cfg_dump = sympref::build_cfg(typed).dump();
      }
      r.suite = sympref::generate_tests(tasks[i], quiet);
      if (r.suite->cases.empty()) {
        r.note = "warning: task " + tasks[i].id + ": no feasible cases, suite not emitted";
        r.suite.reset();
      }
    } catch (const sympref::TaskRejected& e) {
      r.note = std::string("warning: ") + e.what();
    }
    return r;
  });

  std::size_t emitted = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (dump_cfg)
      std::cerr << "cfg " << tasks[i].id << ":\n" << results[i].cfg_dump;
    if (!results[i].note.empty()) std::cerr << results[i].note << "\n";
    if (results[i].suite) {
      out.stream() << sympref::io::to_json(*results[i].suite).dump() << "\n";
      ++emitted;
    }
  }
  if (emitted == 0) {
    std::cerr << "error: every task was rejected\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_grade(const std::string& suite_path, const std::string& candidates_dir,
              std::int64_t fuel, const std::string& out_path) {
  const auto suites = load_suites(suite_path);
  const auto candidates = collect_candidates(candidates_dir, suites);
  OutputSink out(out_path);
  std::size_t graded = 0;
  for (const auto& suite : suites) {
    auto it = candidates.find(suite.task_id);
    if (it == candidates.end()) continue;
    const auto records = sympref::grade_batch(it->second, suite, fuel);
    for (const auto& r : records) out.stream() << sympref::io::to_json(r).dump() << "\n";
    graded += records.size();
  }
  if (graded == 0) throw DataError("no candidates matched any suite");
  return kExitOk;
}

int cmd_passk(const std::string& grades_path, std::int64_t k,
              const std::string& corpus_dir) {
  const auto grades = load_grades(grades_path);

  std::map<std::string, sympref::PassAtKInput> per_task;
  std::vector<std::string> task_order;
  for (const auto& g : grades) {
    auto [it, inserted] = per_task.try_emplace(g.task_id);
    if (inserted) task_order.push_back(g.task_id);
    ++it->second.n;
    if (g.category == sympref::GradeCategory::TestPassed) ++it->second.c;
  }
  for (auto& [task_id, in] : per_task) {
    in.k = k;
    if (in.n < k)
      throw DataError("task " + task_id + " has only " + std::to_string(in.n) +
                      " samples for k=" + std::to_string(k));
  }

  std::map<std::string, sympref::Difficulty> difficulty;
  if (!corpus_dir.empty())
    for (const auto& task : sympref::io::load_corpus(corpus_dir))
      difficulty[task.id] = task.difficulty;

  auto row = [&](const std::string& label, const std::vector<sympref::PassAtKInput>& xs) {
    if (xs.empty()) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * sympref::aggregate_pass_at_k(xs, k));
    std::cout << label << buf << "\n";
  };

  std::cout << "pass@" << k << " (x100, mean over tasks)\n";
  if (!difficulty.empty()) {
    for (const auto d : {sympref::Difficulty::Introductory, sympref::Difficulty::Interview,
                         sympref::Difficulty::Competition}) {
      std::vector<sympref::PassAtKInput> xs;
      for (const auto& task_id : task_order) {
        auto it = difficulty.find(task_id);
        if (it != difficulty.end() && it->second == d) xs.push_back(per_task[task_id]);
      }
      char label[32];
      std::snprintf(label, sizeof label, "%-14s", sympref::difficulty_name(d));
      row(label, xs);
    }
  }
  std::vector<sympref::PassAtKInput> all_tasks;
  for (const auto& task_id : task_order) all_tasks.push_back(per_task[task_id]);
  row("total         ", all_tasks);
  return kExitOk;
}

int cmd_stats(const std::string& suite_path, const std::string& out_path,
              const std::string& hist_tsv) {
  const auto suites = load_suites(suite_path);
  const auto stats = sympref::suite_stats(suites);
  json hist = json::object();
  for (const auto& [count, freq] : stats.histogram) hist[std::to_string(count)] = freq;
  const json out = {{"suites", suites.size()},
                    {"mean", stats.mean.to_double()},
                    {"mean_exact", stats.mean.to_string()},
                    {"median", stats.median.to_double()},
                    {"median_exact", stats.median.to_string()},
                    {"histogram", hist}};
  OutputSink sink(out_path);
  sink.stream() << out.dump(2) << "\n";
  if (!hist_tsv.empty()) {
    std::ofstream tsv(hist_tsv, std::ios::binary);
    if (!tsv) throw DataError("cannot open " + hist_tsv);
    tsv << "cases\tsuites\n";
    for (const auto& [count, freq] : stats.histogram) tsv << count << "\t" << freq << "\n";
  }
  return kExitOk;
}

int cmd_build_prefs(const std::string& grades_path, const std::string& candidates_dir,
                    std::uint64_t seed, const std::string& chosen_rule,
                    const std::string& out_path) {
  const auto grades = load_grades(grades_path);

  sympref::CandidateStore store;
  if (!fs::is_directory(candidates_dir))
    throw DataError("candidate directory not found: " + candidates_dir);
  for (const auto& task_entry : fs::directory_iterator(candidates_dir)) {
    if (!task_entry.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(task_entry.path()))
      if (file.is_regular_file() && file.path().extension() == ".ml")
        store[task_entry.path().filename().string()][file.path().filename().string()] =
            sympref::io::read_file(file.path());
  }

  const auto rule = chosen_rule == "uniform" ? sympref::ChosenRule::Uniform
                                             : sympref::ChosenRule::First;
  const auto result = sympref::build_preference_pairs(grades, store, seed, rule);
  OutputSink out(out_path);
  sympref::io::write_jsonl(out.stream(), result.pairs);
  std::cerr << "built " << result.pairs.size() << " pairs, skipped "
            << result.skipped_tasks << " tasks\n";
  return kExitOk;
}

int cmd_train_toy(const std::string& corpus_dir, const sympref::GenConfig& gen,
                  const sympref::toytrain::LoopConfig& loop,
                  const std::string& metrics_path, const std::string& critic_path) {
  const auto tasks = sympref::io::load_corpus(corpus_dir);
  const auto corpus = sympref::toytrain::prepare_corpus(tasks, gen);
  auto config = loop;
  config.log = &std::cerr;
  const auto outcome = sympref::toytrain::run_training_loop(corpus, config);

  OutputSink out(metrics_path);
  char buf[128];
  out.stream() << "iteration,mean_reward,pass_at_" << config.k << "\n";
  for (const auto& row : outcome.history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.iteration, row.mean_reward,
                  row.pass_at_k);
    out.stream() << buf;
  }
  if (!critic_path.empty()) {
    std::ofstream cf(critic_path, std::ios::binary);
    if (!cf) throw DataError("cannot open " + critic_path);
    cf << sympref::io::to_json(outcome.critic).dump() << "\n";
  }
  return kExitOk;
}

int cmd_eval_critic(const std::string& pred_path, const std::string& model_path,
                    const std::string& candidates_dir, const std::string& actual_path) {
  const auto actuals = load_grades(actual_path);
  std::map<std::pair<std::string, std::string>, sympref::GradeCategory> actual_by_key;
  for (const auto& g : actuals) actual_by_key[{g.task_id, g.candidate_id}] = g.category;

  sympref::CriticEval eval;
  auto join = [&](const std::string& task_id, const std::string& candidate_id,
                  sympref::GradeCategory predicted) {
    auto it = actual_by_key.find({task_id, candidate_id});
    if (it == actual_by_key.end())
      throw DataError("no actual grade for " + task_id + "/" + candidate_id);
    eval.predictions.push_back(predicted);
    eval.actuals.push_back(it->second);
  };

  if (!pred_path.empty()) {
    for (const auto& g : load_grades(pred_path)) join(g.task_id, g.candidate_id, g.category);
  } else {
    auto in = open_input(model_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError(std::string("bad critic model: ") + e.what());
    }
    const auto model = sympref::io::critic_from_json(j);
    if (!fs::is_directory(candidates_dir))
      throw DataError("candidate directory not found: " + candidates_dir);
    std::vector<fs::path> task_dirs;
    for (const auto& entry : fs::directory_iterator(candidates_dir))
      if (entry.is_directory()) task_dirs.push_back(entry.path());
    std::sort(task_dirs.begin(), task_dirs.end());
    for (const auto& dir : task_dirs) {
      std::vector<fs::path> files;
      for (const auto& file : fs::directory_iterator(dir))
        if (file.is_regular_file() && file.path().extension() == ".ml")
          files.push_back(file.path());
      std::sort(files.begin(), files.end());
      for (const auto& file : files)
        join(dir.filename().string(), file.filename().string(),
             sympref::toytrain::predict(model, sympref::io::read_file(file)).category);
    }
  }

  const auto metrics = sympref::critic_metrics(eval);
  const json out = {{"count", eval.predictions.size()},
                    {"accuracy", metrics.accuracy},
                    {"mae", metrics.mae}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic-execution test generation and preference training toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");

  // Shared settings, bound per subcommand below.
  sympref::GenConfig gen;
  std::string corpus_dir;
  std::string out_path = "-";
  std::string suites_path;
  std::string grades_path;
  std::string candidates_dir;
  std::uint64_t seed = 0;

  auto add_solver_flags = [&gen](CLI::App* cmd) {
    cmd->add_option("--loop-bound", gen.loop_bound, "loop unrolling bound")
        ->capture_default_str();
    cmd->add_option("--path-cap", gen.path_cap, "maximum number of enumerated paths")
        ->capture_default_str();
    cmd->add_option("--domain-lo", gen.solver.domain_lo, "solver domain lower bound")
        ->capture_default_str();
    cmd->add_option("--domain-hi", gen.solver.domain_hi, "solver domain upper bound")
        ->capture_default_str();
    cmd->add_option("--budget", gen.solver.search_budget, "solver search budget")
        ->capture_default_str();
    cmd->add_option("--fuel", gen.fuel, "interpreter step budget")->capture_default_str();
  };

  auto* gen_tests = app.add_subcommand("gen-tests", "generate path-covering test suites");
  gen_tests->add_option("--corpus", corpus_dir, "task corpus directory")->required();
  gen_tests->add_option("--out", out_path, "suites JSONL output, - for stdout");
  add_solver_flags(gen_tests);
  gen_tests->add_flag("--merge-samples", gen.merge_samples,
                      "append sample tests to generated suites");
  bool dump_cfg = false;
  gen_tests->add_flag("--dump-cfg", dump_cfg, "dump each task's CFG edges to stderr");

  auto* grade_cmd = app.add_subcommand("grade", "grade candidate programs against suites");
  std::int64_t grade_fuel = sympref::minilang::kDefaultFuel;
  grade_cmd->add_option("--suite", suites_path, "suites JSONL file")->required();
  grade_cmd->add_option("--candidates", candidates_dir, "candidate .ml directory")
      ->required();
  grade_cmd->add_option("--fuel", grade_fuel, "interpreter step budget")
      ->capture_default_str();
  grade_cmd->add_option("--out", out_path, "grades JSONL output, - for stdout");

  auto* passk = app.add_subcommand("passk", "pass@k table from grade records");
  std::int64_t k = 5;
  std::string passk_corpus;
  passk->add_option("--grades", grades_path, "grades JSONL file")->required();
  passk->add_option("--k", k, "top-k cutoff")->capture_default_str();
  passk->add_option("--corpus", passk_corpus, "corpus directory for difficulty rows");

  auto* stats = app.add_subcommand("stats", "suite size statistics and histogram");
  std::string hist_tsv;
  stats->add_option("--suites", suites_path, "suites JSONL file")->required();
  stats->add_option("--out", out_path, "stats JSON output, - for stdout");
  stats->add_option("--hist-tsv", hist_tsv, "also write a gnuplot-ready histogram TSV");

  auto* prefs = app.add_subcommand("build-prefs", "chosen-rejected preference pairs");
  std::string chosen_rule = "first";
  prefs->add_option("--grades", grades_path, "grades JSONL file")->required();
  prefs->add_option("--candidates", candidates_dir, "candidate .ml directory")->required();
  prefs->add_option("--seed", seed, "RNG seed")->capture_default_str();
  prefs->add_option("--chosen", chosen_rule, "correct-solution rule: first|uniform")
      ->check(CLI::IsMember({"first", "uniform"}));
  prefs->add_option("--out", out_path, "pairs JSONL output, - for stdout");

  auto* train = app.add_subcommand("train-toy", "toy RL / DPO actor training");
  sympref::toytrain::LoopConfig loop;
  std::string mode = "rl";
  std::string critic_kind = "trained";
  std::string reward_map_text;
  std::string metrics_path = "-";
  std::string save_critic;
  train->add_option("--corpus", corpus_dir, "task corpus directory")->required();
  train->add_option("--mode", mode, "training mode")->check(CLI::IsMember({"rl", "dpo"}));
  train->add_option("--iterations", loop.iterations, "training iterations")
      ->capture_default_str();
  train->add_option("--samples-per-task", loop.samples_per_task, "programs per task")
      ->capture_default_str();
  train->add_option("--seed", loop.seed, "RNG seed")->capture_default_str();
  train->add_option("--reward-map", reward_map_text,
                    "JSON rewards per category, array or object");
  train->add_option("--critic", critic_kind, "critic used for RL rewards")
      ->check(CLI::IsMember({"trained", "oracle", "untrained"}));
  train->add_option("--actor-lr", loop.actor_learning_rate, "actor learning rate")
      ->capture_default_str();
  train->add_option("--critic-epochs", loop.critic_epochs, "critic training epochs")
      ->capture_default_str();
  train->add_option("--critic-lr", loop.critic_learning_rate, "critic learning rate")
      ->capture_default_str();
  train->add_option("--beta", loop.dpo.beta, "DPO beta")->capture_default_str();
  train->add_option("--dpo-lr", loop.dpo.learning_rate, "DPO learning rate")
      ->capture_default_str();
  train->add_option("--k", loop.k, "pass@k cutoff in metrics")->capture_default_str();
  train->add_option("--train-fuel", loop.fuel, "interpreter budget while training")
      ->capture_default_str();
  train->add_option("--max-depth", loop.max_depth, "grammar sampling depth")
      ->capture_default_str();
  train->add_option("--out-metrics", metrics_path, "metrics CSV output, - for stdout");
  train->add_option("--save-critic", save_critic, "write the trained critic model JSON");
  add_solver_flags(train);

  auto* eval_critic = app.add_subcommand("eval-critic", "accuracy and ordinal MAE");
  std::string pred_path;
  std::string model_path;
  std::string actual_path;
  eval_critic->add_option("--pred", pred_path, "predicted grades JSONL");
  eval_critic->add_option("--model", model_path, "critic model JSON");
  eval_critic->add_option("--candidates", candidates_dir,
                          "candidate .ml directory (with --model)");
  eval_critic->add_option("--actual", actual_path, "actual grades JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_tests->parsed()) return cmd_gen_tests(corpus_dir, out_path, gen, dump_cfg);
    if (grade_cmd->parsed())
      return cmd_grade(suites_path, candidates_dir, grade_fuel, out_path);
    if (passk->parsed()) return cmd_passk(grades_path, k, passk_corpus);
    if (stats->parsed()) return cmd_stats(suites_path, out_path, hist_tsv);
    if (prefs->parsed())
      return cmd_build_prefs(grades_path, candidates_dir, seed, chosen_rule, out_path);
    if (train->parsed()) {
      loop.mode = mode == "dpo" ? sympref::toytrain::TrainMode::Dpo
                                : sympref::toytrain::TrainMode::Rl;
      loop.critic = critic_kind == "oracle"      ? sympref::toytrain::CriticKind::Oracle
                    : critic_kind == "untrained" ? sympref::toytrain::CriticKind::Untrained
                                                 : sympref::toytrain::CriticKind::Trained;
      if (!reward_map_text.empty()) loop.reward_map = parse_reward_map(reward_map_text);
      return cmd_train_toy(corpus_dir, gen, loop, metrics_path, save_critic);
    }
    if (eval_critic->parsed()) {
      if (pred_path.empty() == model_path.empty()) {
        std::cerr << "error: pass exactly one of --pred or --model\n";
        return kExitUsage;
      }
      if (!model_path.empty() && candidates_dir.empty()) {
        std::cerr << "error: --model needs --candidates\n";
        return kExitUsage;
      }
      return cmd_eval_critic(pred_path, model_path, candidates_dir, actual_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
