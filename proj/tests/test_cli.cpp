#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end checks of the command-line contract: exit codes, report output,
// and determinism across worker counts. Spawns the real binary.

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "lemmaforge/config.hpp"
#include "lemmaforge/dataset_io.hpp"

using namespace lemmaforge;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

CliResult run_cli(const std::vector<std::string>& args) {
  const char* cli = std::getenv("LEMMAFORGE_CLI");
  REQUIRE(cli != nullptr);
  int fds[2];
  REQUIRE(pipe(fds) == 0);
  pid_t pid = fork();
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(cli));
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(cli, argv.data());
    _exit(127);
  }
  close(fds[1]);
  CliResult result;
  char buf[4096];
  ssize_t n;
  while ((n = read(fds[0], buf, sizeof(buf))) > 0) {
    result.output.append(buf, static_cast<size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("lemmaforge_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config file parsing and environment precedence") {
  lemmaforge::GlobalConfig parsed = lemmaforge::parse_config_text(
      "# toolchain\n"
      "repl_path = \"/opt/repl\"\n"
      "lean_project = /work/mathlib\n"
      "pool_size = 6\n"
      "verify_timeout_s = 45\n"
      "model.gpt.endpoint = \"https://api.example/v1/chat/completions\"\n"
      "model.gpt.param.temperature = 0.2\n");
  CHECK(parsed.repl_path == "/opt/repl");
  CHECK(parsed.lean_project_root == "/work/mathlib");
  CHECK(parsed.pool_size == 6);
  CHECK(parsed.verify_timeout_s == doctest::Approx(45.0));
  REQUIRE(parsed.models.count("gpt") == 1);
  CHECK(parsed.models.at("gpt").endpoint == "https://api.example/v1/chat/completions");
  CHECK(parsed.models.at("gpt").params.at("temperature") == "0.2");

  SUBCASE("malformed lines raise ConfigError") {
    CHECK_THROWS_AS(lemmaforge::parse_config_text("just words\n"), lemmaforge::ConfigError);
    CHECK_THROWS_AS(lemmaforge::parse_config_text("model.gpt = x\n"), lemmaforge::ConfigError);
  }
  SUBCASE("environment overrides the file") {
    fs::path dir = fresh_dir("config");
    fs::path file = dir / "lemmaforge.toml";
    util::write_file_atomic(file, "repl_path = /from/file\npool_size = 2\n");
    setenv("LEMMAFORGE_CONFIG", file.string().c_str(), 1);
    const char* saved = std::getenv("LEMMAFORGE_REPL");
    setenv("LEMMAFORGE_REPL", "/from/env", 1);
    lemmaforge::GlobalConfig loaded = lemmaforge::load_config();
    CHECK(loaded.repl_path == "/from/env");  // env beats file
    CHECK(loaded.pool_size == 2);            // file value survives elsewhere
    unsetenv("LEMMAFORGE_CONFIG");
    if (saved) setenv("LEMMAFORGE_REPL", saved, 1);
  }
}

TEST_CASE("verify exit codes encode the dataset verdict") {
  fs::path dir = fresh_dir("verify");
  fs::create_directories(dir / "1992-P1");
  util::write_file_atomic(dir / "1992-P1" / "ok1.lean",
                          fixtures::kPreamble + "theorem ok1 : 1 + 1 = 2 := by\n  norm_num\n");
  util::write_file_atomic(dir / "1992-P1" / "ok2.lean",
                          fixtures::kPreamble + "theorem ok2 : 2 + 2 = 4 := by\n  norm_num\n");

  CliResult all_good = run_cli({"verify", dir.string()});
  CHECK(all_good.exit_code == 0);
  CHECK(all_good.output.find("proved 2") != std::string::npos);

  util::write_file_atomic(dir / "1992-P1" / "gap.lean",
                          fixtures::kPreamble + "theorem gap : 0 ≤ 3 := by\n  sorry\n");
  CliResult with_gap = run_cli({"verify", dir.string()});
  CHECK(with_gap.exit_code == 1);
  CHECK(with_gap.output.find("incomplete 1") != std::string::npos);

  SUBCASE("verdicts are identical across worker counts") {
    CliResult serial = run_cli({"verify", dir.string(), "--jobs", "1", "--porcelain"});
    CliResult parallel = run_cli({"verify", dir.string(), "--jobs", "8", "--porcelain"});
    auto verdicts = [](const std::string& out) {
      std::map<std::string, std::string> m;
      for (const auto& line : util::split_lines(out)) {
        if (line.empty() || line[0] != '{') continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        m[j.value("item", "")] = j.value("status", "");
      }
      return m;
    };
    CHECK(verdicts(serial.output) == verdicts(parallel.output));
    CHECK(verdicts(serial.output).size() == 3);
  }
}

TEST_CASE("missing configuration is a usage error") {
  fs::path file = fresh_dir("noconfig") / "t.lean";
  util::write_file_atomic(file, "theorem t : True := by trivial\n");
  // Explicitly blank out the oracle path.
  const char* saved = std::getenv("LEMMAFORGE_REPL");
  unsetenv("LEMMAFORGE_REPL");
  CliResult r = run_cli({"verify", file.string()});
  if (saved) setenv("LEMMAFORGE_REPL", saved, 1);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("configuration error") != std::string::npos);

  CliResult usage = run_cli({"no_such_command"});
  CHECK(usage.exit_code == 2);
}

TEST_CASE("decompose prints per-rule counts and the theoretical bounds") {
  fs::path dir = fresh_dir("decompose");
  fs::path file = dir / "s4.lean";
  util::write_file_atomic(file, fixtures::structured_source("s4", 4));

  CliResult r = run_cli({"decompose", file.string(), "--theorem", "s4", "--strategy",
                         "structured", "--out", (dir / "out").string()});
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("n = 13, k = 4") != std::string::npos);
  CHECK(r.output.find("structured 2k = 8") != std::string::npos);
  CHECK(r.output.find("hypothesis_lift: candidates 4") != std::string::npos);
  CHECK(r.output.find("cumulative_grant: candidates 4") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "manifest.jsonl"));

  SUBCASE("strategy both on a structureless script notes the skip") {
    fs::path chain = dir / "c5.lean";
    util::write_file_atomic(chain, fixtures::chain_source("c5", 5));
    CliResult rc = run_cli({"decompose", chain.string(), "--theorem", "c5", "--strategy",
                            "both", "--out", (dir / "out2").string()});
    CHECK(rc.exit_code == 0);
    CHECK(rc.output.find("structured pass skipped") != std::string::npos);
    CHECK(rc.output.find("forward: candidates") != std::string::npos);
  }
  SUBCASE("non-verifying input is a domain failure") {
    fs::path broken = dir / "broken.lean";
    util::write_file_atomic(broken,
                            fixtures::kPreamble + "theorem broken : 0 ≤ 1 := by\n  sorry\n");
    CliResult rb = run_cli({"decompose", broken.string(), "--theorem", "broken"});
    CHECK(rb.exit_code == 1);
    CHECK(rb.output.find("does not verify") != std::string::npos);
  }
}

TEST_CASE("import and stats report per-problem tables") {
  fs::path dir = fresh_dir("import");
  fs::create_directories(dir / "1984-P6");
  fs::create_directories(dir / "2023-P4");
  for (int i = 0; i < 3; ++i) {
    util::write_file_atomic(dir / "1984-P6" / ("a" + std::to_string(i) + ".lean"),
                            fixtures::kPreamble + "theorem a" + std::to_string(i) +
                                " : 0 ≤ " + std::to_string(i) + " := by\n  norm_num\n");
  }
  util::write_file_atomic(dir / "2023-P4" / "b0.lean",
                          fixtures::kPreamble +
                              "theorem b0 : 1 ≤ 2 := by\n  skip\n  norm_num\n");

  CliResult im = run_cli({"import", dir.string(), "--write-manifest"});
  CHECK(im.exit_code == 0);
  CHECK(im.output.find("1984-P6: 3") != std::string::npos);
  CHECK(im.output.find("2023-P4: 1") != std::string::npos);
  CHECK(im.output.find("total: 4") != std::string::npos);

  CliResult st = run_cli({"stats", dir.string()});
  CHECK(st.exit_code == 0);
  CHECK(st.output.find("1984-P6") != std::string::npos);
  CHECK(st.output.find("total") != std::string::npos);

  SUBCASE("audit re-checks manifest against the filesystem and oracle") {
    CliResult clean = run_cli({"audit", dir.string()});
    CHECK(clean.exit_code == 0);
    CHECK(clean.output.find("0 issue(s)") != std::string::npos);

    fs::remove(dir / "1984-P6" / "a1.lean");
    CliResult broken = run_cli({"audit", dir.string()});
    CHECK(broken.exit_code == 1);
    CHECK(broken.output.find("file missing") != std::string::npos);
  }
}

TEST_CASE("debloat rewrites the proof and annotates removals") {
  fs::path dir = fresh_dir("debloat");
  fs::path file = dir / "bloated.lean";
  util::write_file_atomic(file, fixtures::kPreamble +
                                    "theorem bloated (a : ℤ) (h : a = 4) : a + 1 = 5 := by\n"
                                    "  have waste : 0 ≤ 1 := by\n"
                                    "    norm_num\n"
                                    "  omega\n");
  fs::path out = dir / "min.lean";
  CliResult r = run_cli({"debloat", file.string(), "--out", out.string()});
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("original length 3, minimized 1") != std::string::npos);
  std::string minimized = util::read_file(out);
  CHECK(minimized.find("waste") == std::string::npos);
  CHECK(minimized.find("omega") != std::string::npos);

  CliResult annotated = run_cli({"debloat", file.string(), "--annotate"});
  CHECK(annotated.exit_code == 0);
  CHECK(annotated.output.find("-- have waste") != std::string::npos);
}

TEST_CASE("evaluate produces a resumable run directory with porcelain output") {
  fs::path dir = fresh_dir("evaluate");
  std::vector<ExtractedLemma> lemmas;
  for (int i = 0; i < 3; ++i) {
    ExtractedLemma l;
    l.rule = ExtractionRule::Forward;
    l.param = i;
    l.id = "cli_lemma_" + std::to_string(i);
    l.binders = {{"x", "ℕ", BinderKind::Explicit, 0}};
    l.goal_text = "5 ≤ x → 5 ≤ x + " + std::to_string(i + 1);
    l.statement_text = "theorem " + l.id + " (x : ℕ) : " + l.goal_text;
    l.proof_text = "intro h\nomega\n";
    l.preamble = fixtures::kPreamble;
    l.verified = true;
    l.proof_length = 2;
    l.source_theorem = "1960-P2";
    lemmas.push_back(std::move(l));
  }
  ExportOptions options;
  options.source_problem = "1960-P2";
  export_dataset(lemmas, dir / "ds", options);

  CliResult r = run_cli({"evaluate", (dir / "ds").string(), "--model", "fake", "--rounds", "1",
                         "--model-param", "solve_ids=cli_lemma_1", "--runs-dir",
                         (dir / "runs").string(), "--run-id", "r1", "--porcelain"});
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"lemma_id\":\"cli_lemma_0\"") != std::string::npos);
  CHECK(r.output.find("1960-P2: 1/3") != std::string::npos);
  CHECK(fs::exists(dir / "runs" / "r1" / "attempts.jsonl"));
  CHECK(fs::exists(dir / "runs" / "r1" / "outcomes.jsonl"));
  CHECK(fs::exists(dir / "runs" / "r1" / "config.json"));

  SUBCASE("pass-at-k mode defaults to 32 samples and respects early stop") {
    CliResult pk = run_cli({"evaluate", (dir / "ds").string(), "--model", "fake", "--mode",
                            "pass-at-k", "--model-param", "solve_at_sample=2", "--runs-dir",
                            (dir / "runs").string(), "--run-id", "pk"});
    CHECK(pk.exit_code == 0);
    auto attempts = util::read_jsonl_lines(dir / "runs" / "pk" / "attempts.jsonl");
    CHECK(attempts.size() == 3 * 3);  // three lemmas, early-stopped at sample 2
    auto config = nlohmann::json::parse(
        util::read_file(dir / "runs" / "pk" / "config.json"));
    CHECK(config["mode"] == "pass_at_k");
    CHECK(config["samples_k"] == 32);
  }
  SUBCASE("report emits the five tables in both forms") {
    CliResult rep = run_cli({"report", (dir / "runs" / "r1").string(), "--dataset",
                             (dir / "ds").string()});
    CHECK(rep.exit_code == 0);
    for (const char* name :
         {"accuracy_by_problem", "feedback_progression", "error_taxonomy",
          "accuracy_by_length", "length_histogram"}) {
      CHECK(fs::exists(dir / "runs" / "r1" / "report" / (std::string(name) + ".txt")));
      CHECK(fs::exists(dir / "runs" / "r1" / "report" / (std::string(name) + ".json")));
    }
  }
  SUBCASE("analyze audits labels and accepts manual rows") {
    fs::path labels = dir / "labels.tsv";
    // Find a failed attempt from the run to label (error flags are only
    // legal on attempts the oracle rejected).
    std::string failed_id;
    for (const auto& line : util::read_jsonl_lines(dir / "runs" / "r1" / "attempts.jsonl")) {
      auto j = nlohmann::json::parse(line);
      if (j.value("status", "") != "proved") failed_id = j["attempt_id"].get<std::string>();
    }
    REQUIRE_FALSE(failed_id.empty());
    util::write_file_atomic(labels, failed_id + "\twrong_approach\ttrue\treviewer\tnote\n");
    CliResult an = run_cli({"analyze", (dir / "runs" / "r1").string(), "--labels",
                            labels.string()});
    CHECK(an.exit_code == 0);
    CHECK(an.output.find("applied 1 label row(s)") != std::string::npos);
    CHECK(an.output.find("violations: 0") != std::string::npos);
  }
}
