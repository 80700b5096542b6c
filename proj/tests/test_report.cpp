#include <doctest.h>

#include "rai/error.hpp"
#include "rai/pipeline.hpp"
#include "rai/report.hpp"
#include "support.hpp"

using namespace rai;

namespace {

const std::string kFixtures = RAI_TEST_FIXTURES;

AuditOutcome run_loans(std::vector<Stage> stages, const std::string& answers = "answers_clear.json",
                       std::string when = "2026-01-01T00:00:00Z") {
  auto cfg = load_config(kFixtures + "/loans.json");
  cfg.answers_path = answers;
  RunOptions opt;
  opt.stages = std::move(stages);
  opt.generated_at = std::move(when);
  return run_audit(cfg, opt);
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("display numbers") {
    CHECK(display_number(0.6) == "0.6");
    CHECK(display_number(-0.2) == "-0.2");
    CHECK(display_number(2.0 / 3.0 - 0.8) == "-0.133333");
    CHECK(display_number(-0.0) == "0");
    CHECK(number_json(Maybe{}) == kUndefined);
    CHECK(number_json(0.25)["value"] == 0.25);
  }

  TEST_CASE("metrics-only run marks the other sections") {
    const auto out = run_loans({Stage::metrics});
    const auto& s = out.report.body["sections"];
    CHECK(s["metrics"].is_object());
    for (const char* name : {"proxies", "mitigation", "explanation", "privacy", "assessment"}) {
      CHECK(s[name] == "skipped: not requested");
    }
    CHECK(render_markdown(out.report).find("NOT ASSESSED") != std::string::npos);
  }

  TEST_CASE("canonical body is deterministic and excludes the timestamp") {
    const auto a = run_loans({}, "answers_risk.json", "2026-01-01T00:00:00Z");
    const auto b = run_loans({}, "answers_risk.json", "2030-06-30T12:00:00Z");
    CHECK(a.report.canonical_text() == b.report.canonical_text());
    CHECK(a.report.digest() == b.report.digest());
    CHECK(a.report.document() != b.report.document());
    auto doc = nlohmann::json::parse(a.report.document());
    CHECK(doc["generated_at"] == "2026-01-01T00:00:00Z");
    CHECK(doc["canonical_digest"] == a.report.digest());
  }

  TEST_CASE("config changes change the digest") {
    auto cfg = load_config(kFixtures + "/loans.json");
    RunOptions opt;
    opt.stages = std::vector<Stage>{Stage::metrics};
    const auto d1 = run_audit(cfg, opt).report.digest();
    auto text = nlohmann::json::parse(support::read_text(kFixtures + "/loans.json"));
    text["metrics"]["epsilon"] = 0.05;
    const auto cfg2 = parse_config(text.dump(), kFixtures);
    const auto r2 = run_audit(cfg2, opt).report;
    CHECK(r2.digest() != d1);
    CHECK(r2.body["config"]["metrics"]["epsilon"] == 0.05);
  }

  TEST_CASE("markdown rendering rules") {
    const auto out = run_loans({}, "answers_risk.json");
    const auto md = render_markdown(out.report);
    CHECK(md.find("## Principle summary") < md.find("## Metrics"));
    if (out.assessment->verdicts.at(Principle::fair) == PrincipleVerdict::blocked) {
      CHECK(md.find("| Fair AI | BLOCKED |") != std::string::npos);
    }
    for (const auto& line : out.report.body["sections"]["explanation"]["rules"]) {
      CHECK(md.find(line.get<std::string>()) != std::string::npos);
    }
    for (const auto& q : builtin_questionnaire().questions) {
      CHECK_MESSAGE(count(md, "`" + q.id + "`") == 1, q.id);
    }
    CHECK(render_markdown(out.report) == md);
  }

  TEST_CASE("blocked principle renders upper-case") {
    SectionSet sections;
    const auto def = builtin_questionnaire();
    AnswerSheet s{def.id, def.version, {}};
    for (const auto& q : def.questions) s.answers[q.id] = q.risk_answer == Answer::yes ? Answer::no : Answer::yes;
    s.answers["fair.biased_training_data"] = Answer::yes;
    FairnessReport r;
    r.privileged = "a";
    r.groups.push_back({"b", 0.0, 0.6, 0.0, 0.0, 0.0, 0.0});
    const auto a = attach_evidence(evaluate_answers(def, s), FairnessEvidence{{r}}, {});
    sections.present[Section::assessment] = to_json(a, def);
    const auto report = assemble(sections, Json::object(), {}, "t");
    CHECK(render_markdown(report).find("| Fair AI | BLOCKED |") != std::string::npos);
  }

  TEST_CASE("empty proxy section") {
    SectionSet sections;
    sections.present[Section::proxies] = to_json(ProxyScan{});
    const auto md = render_markdown(assemble(sections, Json::object(), {}, "t"));
    CHECK(md.find("no proxy findings") != std::string::npos);
  }

  TEST_CASE("assemble needs a section") {
    CHECK_THROWS_AS(assemble(SectionSet{}, Json::object(), {}, "t"), Error);
  }

  TEST_CASE("privacy values stay out by default") {
    const auto out = run_loans({Stage::privacy});
    const auto& p = out.report.body["sections"]["privacy"];
    CHECK(p["values_included"] == false);
    CHECK(p.dump().find("280") == std::string::npos);
  }

  TEST_CASE("sha256 known answer") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}
