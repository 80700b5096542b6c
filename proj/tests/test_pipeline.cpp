#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "rai/error.hpp"
#include "rai/pipeline.hpp"
#include "support.hpp"

using namespace rai;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = RAI_TEST_FIXTURES;
const std::string kCli = RAI_CLI_PATH;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::string& args, const fs::path& dir, const std::string& stdin_text = "") {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt", in = dir / "stdin.txt";
  support::write_text(in, stdin_text);
  const std::string cmd = "'" + kCli + "' " + args + " <'" + in.string() + "' >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, support::read_text(out), support::read_text(err)};
}

std::string all_clear_input(const QuestionnaireDef& def) {
  std::string s;
  for (const auto& q : def.questions) s += q.risk_answer == Answer::yes ? "no\n" : "yes\n";
  return s;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config parsing") {
    const auto cfg = load_config(kFixtures + "/loans.json");
    CHECK(cfg.dataset_path == "loans.csv");
    CHECK(cfg.surrogate.max_depth == 2);
    CHECK(cfg.privacy.binning.at("age").edges == std::vector<double>{30, 45, 60});
    CHECK(cfg.resolve("loans.csv") == fs::path(kFixtures) / "loans.csv");
    CHECK_THROWS_AS(parse_config(R"({"dataset":{"path":"x"},"schema":{"columns":{}},"bogus":1})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"dataset":{"path":"x"},"schema":{"columns":{}},"threshold":2})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"dataset":{"path":"x"},"schema":{"columns":{}},"stages":["nope"]})"), Error);
    CHECK_THROWS_AS(parse_config("{"), Error);
  }

  TEST_CASE("stage names") {
    for (Stage s : kStages) CHECK(parse_stage(to_string(s)) == s);
    CHECK_THROWS_AS(parse_stage("report"), Error);
  }

  TEST_CASE("metrics and mitigation on the shifted-score fixture") {
    const auto cfg = load_config(kFixtures + "/shifted.json");
    const auto out = run_audit(cfg);
    const auto& m = out.report.body["sections"]["mitigation"];
    CHECK(m["before"]["max_abs_eod"]["value"].get<double>() == doctest::Approx(0.25));
    CHECK(m["after"]["max_abs_eod"]["value"].get<double>() <= 0.05 + 1e-12);
    CHECK(out.report.body["sections"]["assessment"] == "skipped: not requested");
    REQUIRE(out.policy.has_value());
    CHECK(out.weighted_table.has_value());
    CHECK(out.exit_code == kExitPass);
  }

  TEST_CASE("default stage list skips stages without inputs") {
    auto cfg = load_config(kFixtures + "/shifted.json");
    cfg.stages.clear();
    const auto out = run_audit(cfg);
    const auto& s = out.report.body["sections"];
    CHECK(s["metrics"].is_object());
    CHECK(s["privacy"].get<std::string>().rfind("skipped:", 0) == 0);
    CHECK(s["explanation"].get<std::string>().rfind("skipped:", 0) == 0);
    CHECK(s["assessment"] == "skipped: no answers supplied");
  }

  TEST_CASE("explicitly requested stage without inputs is an error") {
    const auto cfg = load_config(kFixtures + "/shifted.json");
    RunOptions opt;
    opt.stages = std::vector<Stage>{Stage::privacy};
    try {
      run_audit(cfg, opt);
      FAIL("expected a stage error");
    } catch (const StageError& e) {
      CHECK(e.stage() == "privacy");
    }
  }

  TEST_CASE("evidence flows into the assessment") {
    auto cfg = load_config(kFixtures + "/loans.json");
    cfg.answers_path = "answers_risk.json";
    const auto out = run_audit(cfg);
    REQUIRE(out.assessment.has_value());
    for (const auto& item : out.assessment->items) {
      if (item.check == CheckKind::proxy_scan || item.check == CheckKind::fairness_metrics ||
          item.check == CheckKind::reidentification_scan || item.check == CheckKind::surrogate_fidelity) {
        CHECK_MESSAGE(item.status != ItemStatus::open, item.question);
      }
    }
    CHECK(out.exit_code == exit_code_for(out.assessment->overall()));
  }

  TEST_CASE("interactive prompts replay in batch") {
    const auto def = builtin_questionnaire();
    std::istringstream in("maybe\n" + all_clear_input(def));
    std::ostringstream out;
    const auto sheet = prompt_answers(def, in, out);
    REQUIRE(sheet.has_value());
    CHECK(sheet->answers.size() == 19);
    CHECK(out.str().find("please answer") != std::string::npos);
    const auto replayed = parse_answers(answers_document(*sheet));
    CHECK(evaluate_answers(def, replayed) == evaluate_answers(def, *sheet));

    std::istringstream partial("yes\nno\nquit\n");
    CHECK_FALSE(prompt_answers(def, partial, out).has_value());
    std::string all_na;
    for (int i = 0; i < 19; ++i) all_na += "na\n";
    std::istringstream na_in(all_na);
    const auto na_sheet = prompt_answers(def, na_in, out);
    REQUIRE(na_sheet.has_value());
    for (const auto& [id, a] : na_sheet->answers) CHECK(a == Answer::not_applicable);
  }

  TEST_CASE("synthetic bundle is seeded") {
    const auto a = generate_synthetic(7, 200), b = generate_synthetic(7, 200), c = generate_synthetic(8, 200);
    CHECK(a.data_csv == b.data_csv);
    CHECK(a.data_csv != c.data_csv);
    const auto dir = support::scratch_dir("synthetic");
    support::write_text(dir / "data.csv", a.data_csv);
    support::write_text(dir / "config.json", a.config_json);
    support::write_text(dir / "answers.json", a.answers_json);
    const auto out = run_audit(load_config(dir / "config.json"));
    for (const char* s : {"metrics", "proxies", "mitigation", "explanation", "privacy", "assessment"}) {
      CHECK_MESSAGE(out.report.body["sections"][s].is_object(), s);
    }
  }

  TEST_CASE("cli: all-clear answers exit 0") {
    const auto dir = support::scratch_dir("cli-clear");
    const auto r = cli("audit --config '" + kFixtures + "/loans.json' --out '" + dir.string() +
                           "' --timestamp 2026-01-01T00:00:00Z",
                       dir);
    CHECK_MESSAGE(r.code == 0, r.err);
    for (const char* f : {"report.json", "report.canonical.json", "report.md", "policy.json", "weighted.csv"}) {
      CHECK_MESSAGE(fs::exists(dir / f), f);
    }
  }

  TEST_CASE("cli: missing dataset names the path") {
    const auto dir = support::scratch_dir("cli-missing");
    auto doc = nlohmann::json::parse(support::read_text(kFixtures + "/shifted.json"));
    doc["dataset"]["path"] = "does-not-exist.csv";
    support::write_text(dir / "config.json", doc.dump());
    const auto r = cli("metrics --config '" + (dir / "config.json").string() + "'", dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("does-not-exist.csv") != std::string::npos);
    CHECK(r.err.find("load") != std::string::npos);

    const auto r2 = cli("audit --config '" + (dir / "nope.json").string() + "'", dir);
    CHECK(r2.code == 1);
    CHECK(r2.err.find("nope.json") != std::string::npos);
  }

  TEST_CASE("cli: disparate impact of 0.6 blocks and exits 3") {
    const auto dir = support::scratch_dir("cli-blocked");
    const auto r = cli("audit --config '" + kFixtures + "/two_groups.json' --out '" + dir.string() + "'", dir);
    CHECK_MESSAGE(r.code == 3, r.err);
    const auto md = support::read_text(dir / "report.md");
    CHECK(md.find("| Fair AI | BLOCKED |") != std::string::npos);
  }

  TEST_CASE("cli: exit code follows the overall verdict") {
    const auto dir = support::scratch_dir("cli-risk");
    const auto r = cli("assess --config '" + kFixtures + "/loans.json' --answers '" + kFixtures +
                           "/answers_risk.json' --out '" + dir.string() + "'",
                       dir);
    const auto report = nlohmann::json::parse(support::read_text(dir / "report.json"));
    const std::string overall = report["sections"]["assessment"]["overall"];
    CHECK(r.code == (overall == "blocked" ? 3 : overall == "attention" ? 2 : 0));
    CHECK(r.code != 1);
  }

  TEST_CASE("cli: open human review exits 2") {
    const auto dir = support::scratch_dir("cli-attention");
    auto sheet = parse_answers(support::read_text(kFixtures + "/answers_clear.json"));
    sheet.answers["hc.human_rights"] = Answer::yes;
    support::write_text(dir / "answers.json", answers_document(sheet));
    const auto r = cli("assess --config '" + kFixtures + "/loans.json' --answers '" +
                           (dir / "answers.json").string() + "' --out '" + dir.string() + "'",
                       dir);
    CHECK(r.code == 2);
  }

  TEST_CASE("cli: interactive session writes a replayable answers file") {
    const auto def = builtin_questionnaire();
    const auto dir = support::scratch_dir("cli-interactive");
    const auto r = cli("assess --interactive --config '" + kFixtures + "/loans.json' --out '" +
                           dir.string() + "' --timestamp t",
                       dir, all_clear_input(def));
    CHECK_MESSAGE(r.code == 0, r.err);
    REQUIRE(fs::exists(dir / "answers.json"));
    const auto sheet = parse_answers(support::read_text(dir / "answers.json"));
    CHECK(sheet.answers.size() == 19);
    const auto first = support::read_text(dir / "report.canonical.json");

    const auto replay = support::scratch_dir("cli-replay");
    const auto r2 = cli("assess --config '" + kFixtures + "/loans.json' --answers '" +
                            (dir / "answers.json").string() + "' --out '" + replay.string() + "'",
                        replay);
    CHECK(r2.code == 0);
    const auto a = nlohmann::json::parse(first)["sections"]["assessment"];
    const auto b = nlohmann::json::parse(support::read_text(replay / "report.canonical.json"))["sections"]["assessment"];
    CHECK(a == b);

    const auto aborted = support::scratch_dir("cli-aborted");
    const auto r3 = cli("assess --interactive --config '" + kFixtures + "/loans.json' --out '" +
                            (aborted / "out").string() + "'",
                        aborted, "yes\nno\n");
    CHECK(r3.code == 1);
    CHECK_FALSE(fs::exists(aborted / "out"));
  }

  TEST_CASE("cli: generate is seeded") {
    const auto dir = support::scratch_dir("cli-generate");
    CHECK(cli("generate --seed 3 --rows 50 --out '" + (dir / "a").string() + "'", dir).code == 0);
    CHECK(cli("generate --seed 3 --rows 50 --out '" + (dir / "b").string() + "'", dir).code == 0);
    CHECK(support::read_text(dir / "a" / "data.csv") == support::read_text(dir / "b" / "data.csv"));
    CHECK(cli("audit --config '" + (dir / "a" / "config.json").string() + "'", dir).code != 1);
  }

  TEST_CASE("cli: bad usage exits 1") {
    const auto dir = support::scratch_dir("cli-usage");
    CHECK(cli("frobnicate", dir).code == 1);
    CHECK(cli("metrics", dir).code == 1);
  }
}
