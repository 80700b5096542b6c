// raiaudit: command-line driver for the audit pipeline.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rai/error.hpp"
#include "rai/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rai::Error(rai::ErrorKind::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw rai::Error(rai::ErrorKind::io, "failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rai::Error(rai::ErrorKind::io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Options {
  std::string config;
  std::vector<std::string> stages;
  std::string out;
  std::string answers;
  bool interactive = false;
  std::string timestamp;
};

int run(const std::string& command, const Options& opt) {
  const fs::path config_path(opt.config);
  const std::string config_text = [&] {
    try {
      return read_file(config_path);
    } catch (const rai::Error& e) {
      throw rai::StageError("config", e.what());
    }
  }();
  rai::AuditConfig config = [&] {
    try {
      return rai::parse_config(config_text, config_path.parent_path());
    } catch (const rai::Error& e) {
      throw rai::StageError("config", e.what());
    }
  }();

  rai::RunOptions run;
  run.config_sha256 = rai::sha256_hex(config_text);
  run.generated_at = opt.timestamp;
  if (command == "audit" || command == "assess") {
    if (!opt.stages.empty()) {
      std::vector<rai::Stage> stages;
      for (const auto& s : opt.stages) stages.push_back(rai::parse_stage(s));
      if (command == "assess" &&
          std::find(stages.begin(), stages.end(), rai::Stage::assess) == stages.end()) {
        stages.push_back(rai::Stage::assess);
      }
      run.stages = stages;
    }
  } else {
    run.stages = std::vector<rai::Stage>{rai::parse_stage(command)};
  }

  const fs::path out_dir = opt.out.empty() ? config.resolve(config.output_dir) : fs::path(opt.out);
  if (!opt.answers.empty()) config.answers_path = fs::absolute(opt.answers).string();

  if (opt.interactive) {
    const auto def = rai::load_questionnaire(
        config.questionnaire == "builtin" ? "builtin" : config.resolve(config.questionnaire).string());
    auto sheet = rai::prompt_answers(def, std::cin, std::cout);
    if (!sheet) throw rai::StageError("assess", "interactive session aborted; nothing written");
    fs::create_directories(out_dir);
    write_file(out_dir / "answers.json", rai::answers_document(*sheet));
    std::cout << "answers written to " << (out_dir / "answers.json").string() << "\n";
    run.answers = std::move(sheet);
  }
  if (command == "assess" && !run.answers && config.answers_path.empty()) {
    throw rai::StageError("assess", "no answers: pass --answers, --interactive or set 'answers'");
  }

  const rai::AuditOutcome outcome = rai::run_audit(config, run);
  for (const auto& w : outcome.warnings) std::cerr << "raiaudit: warning: " << w << "\n";

  fs::create_directories(out_dir);
  write_file(out_dir / "report.json", outcome.report.document());
  write_file(out_dir / "report.canonical.json", outcome.report.canonical_text());
  write_file(out_dir / "report.md", rai::render_markdown(outcome.report));
  if (outcome.policy) write_file(out_dir / "policy.json", rai::policy_document(*outcome.policy));
  if (outcome.weighted_table) {
    write_file(out_dir / "weighted.csv", rai::serialize(*outcome.weighted_table));
  }

  std::cout << "report: " << (out_dir / "report.json").string() << "\n"
            << "digest: " << outcome.report.digest() << "\n";
  if (outcome.assessment) {
    std::cout << "overall: " << rai::to_string(outcome.assessment->overall()) << "\n";
  }
  return outcome.exit_code;
}

int generate(std::uint64_t seed, std::size_t rows, const std::string& out) {
  const fs::path dir = out.empty() ? fs::path("synthetic") : fs::path(out);
  const auto bundle = rai::generate_synthetic(seed, rows);
  fs::create_directories(dir);
  write_file(dir / "data.csv", bundle.data_csv);
  write_file(dir / "config.json", bundle.config_json);
  write_file(dir / "answers.json", bundle.answers_json);
  std::cout << "wrote data.csv, config.json, answers.json to " << dir.string() << "\n";
  return rai::kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness, explainability and privacy audit for binary classifier outputs"};
  app.set_version_flag("--version", std::string(RAI_VERSION));
  app.require_subcommand(1);

  Options opt;
  const char* kStageCommands[][2] = {
      {"metrics", "group confusion, fairness metrics, Theil index, mutual information"},
      {"proxy", "features associated with sensitive attributes"},
      {"privacy", "k-anonymity scan over quasi-identifiers"},
      {"explain", "global surrogate tree over the predictions"},
      {"mitigate", "reweighing and per-group threshold optimization"},
      {"assess", "questionnaire assessment with attached evidence"},
      {"audit", "every configured stage, in pipeline order"},
  };
  std::vector<std::pair<std::string, CLI::App*>> stage_apps;
  for (const auto& [name, help] : kStageCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", opt.config, "audit config document")->required();
    sub->add_option("--out,-o", opt.out, "output directory (default: config output_dir)");
    sub->add_option("--timestamp", opt.timestamp, "fixed generated_at value");
    if (std::string(name) == "audit" || std::string(name) == "assess") {
      sub->add_option("--stage,-s", opt.stages, "run only these stages (repeatable)")
          ->check(CLI::IsMember({"metrics", "proxy", "privacy", "explain", "mitigate", "assess"}));
      sub->add_option("--answers,-a", opt.answers, "answers document");
      sub->add_flag("--interactive,-i", opt.interactive, "prompt for answers on the terminal");
    }
    stage_apps.emplace_back(name, sub);
  }

  std::uint64_t seed = 1;
  std::size_t rows = 1000;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "write seeded synthetic audit inputs");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--rows", rows, "number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--out,-o", gen_out, "output directory (default: synthetic)");

  std::string q_out;
  CLI::App* qdump = app.add_subcommand("questionnaire", "print the built-in questionnaire document");
  qdump->add_option("--out,-o", q_out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rai::kExitError;
  }

  try {
    if (gen->parsed()) return generate(seed, rows, gen_out);
    if (qdump->parsed()) {
      const std::string doc = rai::questionnaire_document(rai::builtin_questionnaire());
      if (q_out.empty()) {
        std::cout << doc;
      } else {
        write_file(q_out, doc);
      }
      return rai::kExitPass;
    }
    for (const auto& [name, sub] : stage_apps) {
      if (sub->parsed()) return run(name, opt);
    }
  } catch (const rai::StageError& e) {
    std::cerr << "raiaudit: error in stage '" << e.stage() << "': "
              << std::string_view(e.what()).substr(e.stage().size() + 2) << "\n";
    return rai::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "raiaudit: error: " << e.what() << "\n";
    return rai::kExitError;
  }
  return rai::kExitError;
}
