#include "rai/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "rai/error.hpp"
#include "rai/proxy.hpp"

namespace rai {

namespace {

constexpr std::pair<Stage, const char*> kStageNames[] = {
    {Stage::metrics, "metrics"}, {Stage::proxy, "proxy"},       {Stage::privacy, "privacy"},
    {Stage::explain, "explain"}, {Stage::mitigate, "mitigate"}, {Stage::assess, "assess"},
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void require_range(double value, double lo, double hi, const char* what) {
  if (!(value >= lo && value <= hi)) {
    throw Error(ErrorKind::argument, std::string(what) + " must lie in [" + format_number(lo) +
                                         ", " + format_number(hi) + "]");
  }
}

void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::parse, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    if (!ok) throw Error(ErrorKind::parse, "unknown key '" + key + "' in " + where);
  }
}

DisparateImpactBand parse_band(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::parse, "di_band must be a two-element array [low, high]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

const char* to_string(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "?";
}

Stage parse_stage(std::string_view text) {
  for (const auto& [s, name] : kStageNames) {
    if (text == name) return s;
  }
  throw Error(ErrorKind::parse, "unknown stage '" + std::string(text) + "'");
}

std::filesystem::path AuditConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

AuditConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::parse, std::string("config: ") + e.what());
  }
  AuditConfig cfg;
  cfg.base_dir = base_dir;
  cfg.echo = doc;
  try {
    reject_unknown_keys(doc,
                        {"dataset", "schema", "threshold", "metrics", "proxy", "mitigation",
                         "surrogate", "privacy", "profile", "questionnaire", "answers", "stages",
                         "output_dir"},
                        "config");

    const Json& ds = doc.at("dataset");
    reject_unknown_keys(ds, {"path", "format", "delimiter", "invert_label"}, "dataset");
    cfg.dataset_path = ds.at("path").get<std::string>();
    cfg.load.format = parse_format(ds.value("format", "csv"));
    const std::string delim = ds.value("delimiter", ",");
    if (delim.size() != 1) throw Error(ErrorKind::parse, "delimiter must be a single character");
    cfg.load.delimiter = delim == "\\t" ? '\t' : delim[0];
    cfg.schema.invert_label = ds.value("invert_label", false);

    const Json& schema = doc.at("schema");
    reject_unknown_keys(schema, {"columns", "privileged", "types"}, "schema");
    for (const auto& [name, role] : schema.at("columns").items()) {
      cfg.schema.roles[name] = parse_role(role.get<std::string>());
    }
    if (schema.contains("privileged")) {
      for (const auto& [name, value] : schema["privileged"].items()) {
        cfg.schema.privileged[name] = value.get<std::string>();
      }
    }
    if (schema.contains("types")) {
      for (const auto& [name, type] : schema["types"].items()) {
        const auto t = type.get<std::string>();
        if (t != "numeric" && t != "categorical") {
          throw Error(ErrorKind::parse, "column type must be 'numeric' or 'categorical'");
        }
        cfg.schema.types[name] = t == "numeric" ? ColumnType::numeric : ColumnType::categorical;
      }
    }

    cfg.threshold = doc.value("threshold", 0.5);
    require_range(cfg.threshold, 0.0, 1.0, "threshold");

    if (doc.contains("metrics")) {
      const Json& m = doc["metrics"];
      reject_unknown_keys(m, {"epsilon", "alpha", "di_band"}, "metrics");
      cfg.metrics.epsilon = m.value("epsilon", cfg.metrics.epsilon);
      cfg.metrics.alpha = m.value("alpha", cfg.metrics.alpha);
      if (m.contains("di_band")) cfg.metrics.di_band = parse_band(m["di_band"]);
    }
    cfg.metrics.validate();

    if (doc.contains("proxy")) {
      reject_unknown_keys(doc["proxy"], {"threshold"}, "proxy");
      cfg.proxy_threshold = doc["proxy"].value("threshold", 0.5);
    }
    require_range(cfg.proxy_threshold, 0.0, 1.0, "proxy threshold");

    if (doc.contains("mitigation")) {
      const Json& m = doc["mitigation"];
      reject_unknown_keys(m, {"sensitive", "objective", "performance", "epsilon", "grid", "reweigh"},
                          "mitigation");
      cfg.mitigation.sensitive = m.value("sensitive", "");
      cfg.mitigation.optimizer.objective = parse_objective(m.value("objective", "equal_opportunity"));
      cfg.mitigation.optimizer.performance = parse_performance(m.value("performance", "accuracy"));
      cfg.mitigation.optimizer.epsilon = m.value("epsilon", 0.10);
      if (m.contains("grid")) {
        const Json& g = m["grid"];
        if (g.is_array()) {
          cfg.mitigation.optimizer.grid = g.get<std::vector<double>>();
        } else {
          reject_unknown_keys(g, {"points"}, "mitigation.grid");
          cfg.mitigation.optimizer.grid = uniform_grid(g.value("points", std::size_t{101}));
        }
      }
      cfg.mitigation.reweigh = m.value("reweigh", true);
    }
    cfg.mitigation.optimizer.validate();

    if (doc.contains("surrogate")) {
      const Json& s = doc["surrogate"];
      reject_unknown_keys(s, {"max_depth", "min_leaf"}, "surrogate");
      cfg.surrogate.max_depth = s.value("max_depth", cfg.surrogate.max_depth);
      cfg.surrogate.min_leaf = s.value("min_leaf", cfg.surrogate.min_leaf);
    }
    cfg.surrogate.validate();

    if (doc.contains("privacy")) {
      const Json& p = doc["privacy"];
      reject_unknown_keys(p, {"quasi_identifiers", "k", "binning", "include_values"}, "privacy");
      cfg.privacy.quasi_identifiers =
          p.value("quasi_identifiers", std::vector<std::string>{});
      cfg.privacy.k = p.value("k", std::size_t{5});
      cfg.privacy.include_values = p.value("include_values", false);
      if (p.contains("binning")) {
        for (const auto& [name, spec] : p["binning"].items()) {
          reject_unknown_keys(spec, {"edges", "merge"}, "binning for '" + name + "'");
          BinSpec bin;
          bin.edges = spec.value("edges", std::vector<double>{});
          bin.merge = spec.value("merge", std::map<std::string, std::string>{});
          cfg.privacy.binning[name] = std::move(bin);
        }
      }
    }
    if (cfg.privacy.k < 1) throw Error(ErrorKind::argument, "privacy k must be >= 1");

    if (doc.contains("profile")) {
      const Json& p = doc["profile"];
      reject_unknown_keys(p, {"epsilon", "di_band", "k", "min_fidelity"}, "profile");
      cfg.profile.epsilon = p.value("epsilon", cfg.profile.epsilon);
      if (p.contains("di_band")) cfg.profile.di_band = parse_band(p["di_band"]);
      cfg.profile.k = p.value("k", cfg.profile.k);
      cfg.profile.min_fidelity = p.value("min_fidelity", cfg.profile.min_fidelity);
    }
    if (!(cfg.profile.epsilon >= 0.0)) throw Error(ErrorKind::argument, "profile epsilon must be >= 0");
    require_range(cfg.profile.min_fidelity, 0.0, 1.0, "profile min_fidelity");
    if (cfg.profile.k < 1) throw Error(ErrorKind::argument, "profile k must be >= 1");

    cfg.questionnaire = doc.value("questionnaire", "builtin");
    cfg.answers_path = doc.value("answers", "");
    for (const auto& s : doc.value("stages", std::vector<std::string>{})) {
      cfg.stages.push_back(parse_stage(s));
    }
    cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::parse, std::string("config: ") + e.what());
  }
  return cfg;
}

AuditConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return parse_config(text, path.parent_path());
}

int exit_code_for(PrincipleVerdict verdict) {
  switch (verdict) {
    case PrincipleVerdict::pass: return kExitPass;
    case PrincipleVerdict::attention: return kExitAttention;
    case PrincipleVerdict::blocked: return kExitBlocked;
  }
  return kExitError;
}

namespace {

Maybe max_abs_eod(const FairnessReport& report) {
  double worst = 0.0;
  for (const auto& g : report.groups) {
    if (!g.eod) return std::nullopt;
    worst = std::max(worst, std::fabs(*g.eod));
  }
  return worst;
}

// Runs `body`, rethrowing any failure as a StageError naming `stage`.
template <typename F>
auto in_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

AuditOutcome run_audit(const AuditConfig& config, const RunOptions& options) {
  AuditOutcome outcome;
  InputDigests inputs;
  if (!options.config_sha256.empty()) inputs["config"] = {{"sha256", options.config_sha256}};

  const AuditTable table = in_stage("load", [&] {
    const std::string bytes = read_file(config.resolve(config.dataset_path));
    inputs["dataset"] = {{"path", config.dataset_path}, {"sha256", sha256_hex(bytes)}};
    std::istringstream in(bytes);
    return load_table(in, config.schema, config.load);
  });

  const std::vector<Stage>& requested =
      options.stages ? *options.stages : config.stages;
  const bool explicit_stages = !requested.empty();
  auto wants = [&](Stage s) {
    return !explicit_stages || std::find(requested.begin(), requested.end(), s) != requested.end();
  };

  SectionSet sections;
  // A stage without its inputs is an error when asked for by name, a skip otherwise.
  auto unavailable = [&](Stage stage, Section section, const std::string& reason) {
    if (explicit_stages) throw StageError(to_string(stage), reason);
    sections.skip_reasons[section] = reason;
  };

  const auto sensitives = table.columns_with_role(ColumnRole::sensitive);
  std::optional<AuditTable> predicted;
  std::string prediction_source;
  if (table.prediction_column()) {
    predicted = table;
    prediction_source = "column '" + *table.prediction_column() + "'";
  } else if (table.score_column()) {
    predicted = binarize(table, config.threshold);
    prediction_source = "score >= " + display_number(config.threshold);
  }

  std::vector<FairnessReport> fairness_reports;
  std::optional<ProxyScan> proxy_result;
  std::optional<RiskScan> privacy_result;
  std::optional<double> fidelity;

  if (wants(Stage::metrics)) {
    if (!predicted) {
      unavailable(Stage::metrics, Section::metrics, "no score or prediction column");
    } else if (sensitives.empty()) {
      unavailable(Stage::metrics, Section::metrics, "no sensitive column");
    } else {
      sections.present[Section::metrics] = in_stage("metrics", [&] {
        Json m;
        m["prediction_source"] = prediction_source;
        m["alpha"] = number_json(config.metrics.alpha);
        const auto labels = predicted->labels();
        const auto preds = predicted->predictions();
        m["theil_index"] = number_json(theil_index(labels, preds, config.metrics));
        m["sensitive"] = Json::object();
        const auto pred_codes = as_codes(preds);
        for (const auto& s : sensitives) {
          const auto confusions = confusion_by_group(*predicted, s);
          auto report = fairness_report(confusions, predicted->privileged(s), config.metrics);
          Json entry;
          entry["privileged"] = report.privileged;
          entry["groups"] = Json::object();
          for (const auto& [g, c] : confusions) entry["groups"][g] = to_json(c);
          entry["fairness"] = to_json(report);
          entry["mutual_information"] =
              number_json(mutual_information(pred_codes, predicted->column(s).codes));
          m["sensitive"][s] = std::move(entry);
          fairness_reports.push_back(std::move(report));
        }
        return m;
      });
    }
  }

  if (wants(Stage::proxy)) {
    sections.present[Section::proxies] = in_stage("proxy", [&] {
      proxy_result = proxy_scan(table, config.proxy_threshold);
      return to_json(*proxy_result);
    });
  }

  if (wants(Stage::privacy)) {
    auto qis = config.privacy.quasi_identifiers;
    if (qis.empty()) qis = table.columns_with_role(ColumnRole::quasi_identifier);
    if (qis.empty()) {
      unavailable(Stage::privacy, Section::privacy, "no quasi-identifier columns configured");
    } else {
      sections.present[Section::privacy] = in_stage("privacy", [&] {
        privacy_result = reidentification_scan(table, qis, config.privacy.k, config.privacy.binning);
        return to_json(*privacy_result, config.privacy.include_values);
      });
    }
  }

  if (wants(Stage::explain)) {
    const auto features = feature_columns(table);
    if (!predicted) {
      unavailable(Stage::explain, Section::explanation, "no score or prediction column");
    } else if (features.empty()) {
      unavailable(Stage::explain, Section::explanation, "no feature columns");
    } else {
      sections.present[Section::explanation] = in_stage("explain", [&] {
        const auto preds = predicted->predictions();
        const auto tree = fit_surrogate(features, preds, config.surrogate);
        fidelity = surrogate_fidelity(tree, features, preds);
        Json e;
        e["config"] = {{"max_depth", config.surrogate.max_depth},
                       {"min_leaf", config.surrogate.min_leaf}};
        e["target"] = prediction_source;
        e["fidelity"] = number_json(*fidelity);
        e["depth"] = tree.depth();
        e["leaves"] = tree.leaf_count();
        e["importance"] = Json::array();
        for (const auto& fi : feature_importance(tree)) {
          e["importance"].push_back({{"feature", fi.feature}, {"importance", number_json(fi.importance)}});
        }
        e["rules"] = rule_lines(tree);
        e["tree"] = to_json(tree);
        return e;
      });
    }
  }

  if (wants(Stage::mitigate)) {
    if (!table.score_column()) {
      unavailable(Stage::mitigate, Section::mitigation, "no score column to re-threshold");
    } else if (sensitives.empty()) {
      unavailable(Stage::mitigate, Section::mitigation, "no sensitive column");
    } else {
      sections.present[Section::mitigation] = in_stage("mitigate", [&] {
        const std::string sensitive =
            config.mitigation.sensitive.empty() ? sensitives.front() : config.mitigation.sensitive;
        Json m;
        m["sensitive"] = sensitive;
        if (config.mitigation.reweigh) {
          const auto weights = reweigh(table, sensitive);
          Json r = to_json(weights);
          const auto labels = table.labels();
          r["weighted_mutual_information"] = number_json(weighted_mutual_information(
              table.column(sensitive).codes, as_codes(labels), weights.row_weights));
          m["reweighing"] = std::move(r);
          outcome.weighted_table = with_weights(table, weights);
          for (const auto& w : weights.warnings) outcome.warnings.push_back(w);
        }
        const auto policy = optimize_thresholds(table, sensitive, config.mitigation.optimizer);
        m["policy"] = to_json(policy);

        MetricConfig eo = config.metrics;
        eo.epsilon = config.mitigation.optimizer.epsilon;
        const AuditTable before_table = binarize(table, config.threshold);
        const auto before = fairness_report(confusion_by_group(before_table, sensitive),
                                            table.privileged(sensitive), eo);
        const AuditTable after_table = apply_policy(table, policy);
        const auto after = fairness_report(confusion_by_group(after_table, sensitive),
                                           table.privileged(sensitive), eo);
        m["before"] = {{"prediction_source", "score >= " + display_number(config.threshold)},
                       {"fairness", to_json(before)},
                       {"max_abs_eod", number_json(max_abs_eod(before))}};
        m["after"] = {{"prediction_source", "per-group thresholds"},
                      {"fairness", to_json(after)},
                      {"max_abs_eod", number_json(max_abs_eod(after))}};
        outcome.policy = policy;
        return m;
      });
    }
  }

  if (wants(Stage::assess)) {
    std::optional<AnswerSheet> sheet = options.answers;
    if (!sheet && !config.answers_path.empty()) {
      sheet = in_stage("assess", [&] {
        const auto path = config.resolve(config.answers_path);
        const std::string text = read_file(path);
        inputs["answers"] = {{"path", config.answers_path}, {"sha256", sha256_hex(text)}};
        return parse_answers(text);
      });
    } else if (sheet) {
      inputs["answers"] = {{"sha256", sha256_hex(answers_document(*sheet))}};
    }
    if (!sheet) {
      unavailable(Stage::assess, Section::assessment, "no answers supplied");
    } else {
      sections.present[Section::assessment] = in_stage("assess", [&] {
        QuestionnaireDef def = load_questionnaire(config.questionnaire == "builtin"
                                                      ? "builtin"
                                                      : config.resolve(config.questionnaire).string());
        if (config.questionnaire != "builtin") {
          inputs["questionnaire"] = {
              {"path", config.questionnaire},
              {"sha256", sha256_hex(read_file(config.resolve(config.questionnaire)))}};
        }
        Assessment a = evaluate_answers(def, *sheet, config.profile);
        if (!fairness_reports.empty()) {
          a = attach_evidence(a, FairnessEvidence{fairness_reports}, config.profile, &outcome.warnings);
        }
        if (proxy_result) a = attach_evidence(a, *proxy_result, config.profile, &outcome.warnings);
        if (privacy_result) a = attach_evidence(a, *privacy_result, config.profile, &outcome.warnings);
        if (fidelity) {
          a = attach_evidence(a, SurrogateEvidence{*fidelity}, config.profile, &outcome.warnings);
        }
        outcome.assessment = a;
        return to_json(a, def);
      });
    }
  }

  if (sections.present.empty()) {
    throw StageError("report", "no stage produced a section");
  }
  outcome.report = assemble(sections, config.echo, inputs, options.generated_at);
  outcome.exit_code =
      outcome.assessment ? exit_code_for(outcome.assessment->overall()) : kExitPass;
  return outcome;
}

std::optional<AnswerSheet> prompt_answers(const QuestionnaireDef& def, std::istream& in,
                                          std::ostream& out) {
  AnswerSheet sheet;
  sheet.questionnaire = def.id;
  sheet.version = def.version;
  const std::size_t total = def.questions.size();
  for (std::size_t i = 0; i < total; ++i) {
    const Question& q = def.questions[i];
    while (true) {
      out << "[" << title(q.principle) << "] (" << (i + 1) << "/" << total << ") " << q.text
          << "\n  answer [yes/no/na, quit]: " << std::flush;
      std::string line;
      if (!std::getline(in, line)) return std::nullopt;
      for (auto& c : line) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.erase(0, 1);
      if (line == "quit" || line == "q") return std::nullopt;
      if (line == "y" || line == "yes") {
        sheet.answers[q.id] = Answer::yes;
      } else if (line == "n" || line == "no") {
        sheet.answers[q.id] = Answer::no;
      } else if (line == "na" || line == "n/a" || line == "not_applicable") {
        sheet.answers[q.id] = Answer::not_applicable;
      } else {
        out << "  please answer yes, no or na\n";
        continue;
      }
      break;
    }
  }
  return sheet;
}

SyntheticBundle generate_synthetic(std::uint64_t seed, std::size_t rows) {
  // mt19937_64 output is fully specified; the conversions below avoid the
  // implementation-defined standard distributions so files match across platforms.
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
  static const char* kRegions[] = {"north", "south", "east", "west"};
  static const char* kAgeBands[] = {"18-29", "30-44", "45-64", "65+"};

  std::ostringstream csv;
  csv << "id,gender,age_band,zip3,region,income,tenure,label,score\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const bool female = uniform() < 0.45;
    const int age = static_cast<int>(uniform() * 4.0);
    const int zip = 100 + static_cast<int>(uniform() * 12.0);
    // region leans on gender, making it a moderate proxy
    const int region = female ? (uniform() < 0.6 ? 0 : 1 + static_cast<int>(uniform() * 3.0))
                              : static_cast<int>(uniform() * 4.0);
    const double income = round2(20.0 + 60.0 * uniform() + (female ? -5.0 : 5.0));
    const double tenure = round2(10.0 * uniform());
    const double p_pos = 0.25 + 0.004 * (income - 20.0) + 0.02 * tenure;
    const int label = uniform() < std::min(0.95, p_pos) ? 1 : 0;
    double score = 0.55 * label + 0.45 * uniform() - (female ? 0.08 : 0.0);
    score = round2(std::clamp(score, 0.0, 1.0));
    csv << i << ',' << (female ? "female" : "male") << ',' << kAgeBands[age] << ',' << zip << ','
        << kRegions[region] << ',' << format_number(income) << ',' << format_number(tenure) << ','
        << label << ',' << format_number(score) << '\n';
  }

  Json config = {
      {"dataset", {{"path", "data.csv"}, {"format", "csv"}}},
      {"schema",
       {{"columns",
         {{"id", "ignore"},
          {"gender", "sensitive"},
          {"age_band", "quasi_identifier"},
          {"zip3", "quasi_identifier"},
          {"region", "feature"},
          {"income", "feature"},
          {"tenure", "feature"},
          {"label", "label"},
          {"score", "score"}}},
        {"privileged", {{"gender", "male"}}},
        {"types", {{"zip3", "categorical"}}}}},
      {"threshold", 0.5},
      {"metrics", {{"epsilon", 0.1}}},
      {"mitigation", {{"epsilon", 0.05}, {"grid", {{"points", 101}}}}},
      {"surrogate", {{"max_depth", 3}, {"min_leaf", 10}}},
      {"privacy", {{"k", 5}}},
      {"answers", "answers.json"},
      {"output_dir", "out"},
  };

  AnswerSheet sheet;
  const auto def = builtin_questionnaire();
  sheet.questionnaire = def.id;
  sheet.version = def.version;
  for (const auto& q : def.questions) {
    const Answer safe = q.risk_answer == Answer::yes ? Answer::no : Answer::yes;
    sheet.answers[q.id] = q.backing == Backing::technical_tool ? q.risk_answer : safe;
  }
  sheet.answers["ps.attack_robustness"] = Answer::yes;

  return {csv.str(), config.dump(2) + "\n", answers_document(sheet)};
}

}  // namespace rai
