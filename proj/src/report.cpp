#include "rai/report.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <sstream>

#include <openssl/evp.h>

#include "rai/error.hpp"

namespace rai {

std::string display_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

Json number_json(double value) {
  Json j;
  j["display"] = display_number(value);
  if (std::isfinite(value)) {
    j["value"] = value == 0.0 ? 0.0 : value;
  } else {
    j["value"] = display_number(value);
  }
  return j;
}

Json number_json(const Maybe& value) {
  if (!value) return Json(std::string(kUndefined));
  return number_json(*value);
}

Json to_json(const GroupConfusion& c) {
  Json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  j["n"] = c.n;
  j["base_rate"] = number_json(c.base_rate);
  j["selection_rate"] = number_json(c.selection_rate);
  j["tpr"] = number_json(c.tpr);
  j["fpr"] = number_json(c.fpr);
  j["ppv"] = number_json(c.ppv);
  return j;
}

Json to_json(const FairnessReport& r) {
  Json j;
  j["privileged"] = r.privileged;
  j["epsilon"] = number_json(r.epsilon);
  j["groups"] = Json::object();
  for (const auto& g : r.groups) {
    Json d;
    d["spd"] = number_json(g.spd);
    d["di"] = number_json(g.di);
    d["eod"] = number_json(g.eod);
    d["aod"] = number_json(g.aod);
    d["ppd"] = number_json(g.ppd);
    d["fpr_diff"] = number_json(g.fpr_diff);
    j["groups"][g.group] = std::move(d);
  }
  j["verdicts"] = {{"independence", to_string(r.independence)},
                   {"separation", to_string(r.separation)},
                   {"sufficiency", to_string(r.sufficiency)}};
  j["summary"] = {{"spd", number_json(r.summary.spd)},
                  {"di", number_json(r.summary.di)},
                  {"eod", number_json(r.summary.eod)},
                  {"aod", number_json(r.summary.aod)},
                  {"ppd", number_json(r.summary.ppd)}};
  return j;
}

Json to_json(const ProxyScan& scan) {
  Json j;
  j["threshold"] = number_json(scan.threshold);
  j["findings"] = Json::array();
  for (const auto& f : scan.findings) {
    j["findings"].push_back({{"feature", f.feature},
                             {"sensitive", f.sensitive},
                             {"score", number_json(f.score)},
                             {"method", to_string(f.method)},
                             {"flagged", f.flagged}});
  }
  j["flagged"] = scan.flagged_count();
  j["warnings"] = scan.warnings;
  return j;
}

Json to_json(const WeightAssignment& w) {
  Json j;
  j["sensitive"] = w.sensitive;
  j["cells"] = Json::array();
  for (const auto& c : w.cells) {
    j["cells"].push_back({{"group", c.group},
                          {"label", c.label},
                          {"count", c.count},
                          {"weight", number_json(c.weight)}});
  }
  double total = 0.0;
  for (double x : w.row_weights) total += x;
  j["weight_sum"] = number_json(total);
  j["warnings"] = w.warnings;
  return j;
}

Json to_json(const ThresholdPolicy& p) {
  Json j;
  j["sensitive"] = p.sensitive;
  j["objective"] = to_string(p.objective);
  j["performance"] = to_string(p.performance);
  j["epsilon"] = number_json(p.epsilon);
  j["accuracy"] = number_json(p.accuracy);
  j["balanced_accuracy"] = number_json(p.balanced_accuracy);
  j["max_tpr_gap"] = number_json(p.max_tpr_gap);
  j["groups"] = Json::object();
  for (const auto& g : p.groups) {
    j["groups"][g.group] = {{"threshold", number_json(g.threshold)},
                            {"tpr", number_json(g.tpr)},
                            {"n", g.n},
                            {"positives", g.positives},
                            {"true_positives", g.true_positives},
                            {"correct", g.correct}};
  }
  return j;
}

Json to_json(const SurrogateTree& tree) {
  std::function<Json(std::size_t)> node_json = [&](std::size_t at) {
    const TreeNode& n = tree.nodes[at];
    Json j;
    j["samples"] = n.samples;
    j["class_counts"] = {n.class_counts[0], n.class_counts[1]};
    j["impurity"] = number_json(n.impurity);
    if (n.leaf) {
      j["leaf"] = true;
      j["prediction"] = n.prediction;
      return j;
    }
    j["leaf"] = false;
    const FeatureSpec& f = tree.features[n.feature];
    j["feature"] = f.name;
    j["rule"] = tree.condition(n, true);
    if (n.kind == SplitKind::numeric) {
      j["threshold"] = number_json(n.threshold);
    } else {
      j["category"] = n.category < 0 ? std::string(kMissingLabel)
                                     : f.levels[static_cast<std::size_t>(n.category)];
    }
    j["impurity_decrease"] = number_json(n.impurity_decrease);
    j["left"] = node_json(n.left);
    j["right"] = node_json(n.right);
    return j;
  };
  return node_json(0);
}

Json to_json(const RiskScan& scan, bool include_values) {
  Json j;
  j["quasi_identifiers"] = scan.quasi_identifiers;
  j["k"] = scan.k;
  j["n_rows"] = scan.n_rows;
  j["class_count"] = scan.classes.size();
  j["unique_rate"] = number_json(scan.unique_rate);
  j["violating_rows"] = scan.violating_rows;
  j["violation_count"] = scan.violating_rows.size();
  Json sizes = Json::array();
  for (const auto& c : scan.classes) sizes.push_back(c.size());
  j["class_sizes"] = std::move(sizes);
  j["values_included"] = include_values;
  if (include_values) {
    j["classes"] = Json::array();
    for (const auto& c : scan.classes) {
      j["classes"].push_back({{"key", c.key}, {"size", c.size()}, {"rows", c.rows}});
    }
  }
  return j;
}

Json to_json(const Assessment& a, const QuestionnaireDef& def) {
  Json j;
  j["questionnaire"] = a.questionnaire;
  j["version"] = a.version;
  j["profile"] = {{"epsilon", number_json(a.profile.epsilon)},
                  {"di_band", {number_json(a.profile.di_band.low), number_json(a.profile.di_band.high)}},
                  {"k", a.profile.k},
                  {"min_fidelity", number_json(a.profile.min_fidelity)}};
  j["answers"] = Json::object();
  for (const auto& [qid, answer] : a.answers) j["answers"][qid] = to_string(answer);
  j["items"] = Json::array();
  for (const auto& item : a.items) {
    j["items"].push_back({{"question", item.question},
                          {"principle", to_string(item.principle)},
                          {"kind", to_string(item.kind)},
                          {"check", to_string(item.check)},
                          {"status", to_string(item.status)},
                          {"note", item.note}});
  }
  j["verdicts"] = Json::object();
  j["principles"] = Json::array();
  for (Principle p : kPrinciples) {
    auto it = a.verdicts.find(p);
    j["verdicts"][to_string(p)] =
        to_string(it == a.verdicts.end() ? PrincipleVerdict::pass : it->second);
    Json questions = Json::array();
    for (const auto& q : def.questions) {
      if (q.principle == p) {
        questions.push_back({{"id", q.id},
                             {"text", q.text},
                             {"backing", to_string(q.backing)},
                             {"check", to_string(q.check)}});
      }
    }
    j["principles"].push_back(
        {{"principle", to_string(p)}, {"title", title(p)}, {"questions", std::move(questions)}});
  }
  j["overall"] = to_string(a.overall());
  return j;
}

const char* to_string(Section section) {
  switch (section) {
    case Section::metrics: return "metrics";
    case Section::proxies: return "proxies";
    case Section::mitigation: return "mitigation";
    case Section::explanation: return "explanation";
    case Section::privacy: return "privacy";
    case Section::assessment: return "assessment";
  }
  return "?";
}

std::string AuditReport::canonical_text() const { return body.dump(2) + "\n"; }

std::string AuditReport::digest() const { return sha256_hex(canonical_text()); }

std::string AuditReport::document() const {
  Json doc = body;
  doc["generated_at"] = generated_at;
  doc["canonical_digest"] = digest();
  return doc.dump(2) + "\n";
}

AuditReport assemble(const SectionSet& sections, const Json& config_echo,
                     const InputDigests& inputs, std::string generated_at) {
  if (sections.present.empty()) {
    throw Error(ErrorKind::argument, "a report needs at least one section");
  }
  AuditReport report;
  report.body["tool"] = "raiaudit";
  report.body["version"] = RAI_VERSION;
  report.body["config"] = config_echo;
  report.body["inputs"] = Json::object();
  for (const auto& [name, digest] : inputs) report.body["inputs"][name] = digest;
  report.body["sections"] = Json::object();
  for (Section s : kSections) {
    auto it = sections.present.find(s);
    if (it != sections.present.end()) {
      report.body["sections"][to_string(s)] = it->second;
      continue;
    }
    auto reason = sections.skip_reasons.find(s);
    report.body["sections"][to_string(s)] =
        "skipped: " + (reason == sections.skip_reasons.end() ? std::string("not requested")
                                                             : reason->second);
  }
  report.generated_at = generated_at.empty() ? utc_timestamp() : std::move(generated_at);
  return report;
}

// ---------------------------------------------------------------------------
// Markdown

namespace {

std::string show(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_object() && value.contains("display")) return value["display"].get<std::string>();
  if (value.is_null()) return std::string(kUndefined);
  return value.dump();
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

void render_fairness(std::ostringstream& md, const Json& f) {
  md << "| group vs " << show(f["privileged"]) << " | SPD | DI | EOD | AOD | PPD |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& [group, d] : f["groups"].items()) {
    md << "| " << group << " | " << show(d["spd"]) << " | " << show(d["di"]) << " | "
       << show(d["eod"]) << " | " << show(d["aod"]) << " | " << show(d["ppd"]) << " |\n";
  }
  md << "\nCriteria at epsilon " << show(f["epsilon"]) << ": independence "
     << show(f["verdicts"]["independence"]) << ", separation " << show(f["verdicts"]["separation"])
     << ", sufficiency " << show(f["verdicts"]["sufficiency"]) << ".\n\n";
}

void render_metrics(std::ostringstream& md, const Json& m) {
  md << "Predictions: " << show(m["prediction_source"]) << ". Theil index (GE alpha="
     << show(m["alpha"]) << "): " << show(m["theil_index"]) << ".\n\n";
  for (const auto& [column, s] : m["sensitive"].items()) {
    md << "### Sensitive attribute `" << column << "`\n\n";
    md << "| group | n | selection rate | TPR | FPR | PPV |\n|---|---|---|---|---|---|\n";
    for (const auto& [group, c] : s["groups"].items()) {
      md << "| " << group << " | " << show(c["n"]) << " | " << show(c["selection_rate"]) << " | "
         << show(c["tpr"]) << " | " << show(c["fpr"]) << " | " << show(c["ppv"]) << " |\n";
    }
    md << "\n";
    render_fairness(md, s["fairness"]);
    md << "Mutual information I(prediction; " << column
       << "): " << show(s["mutual_information"]) << " nats.\n\n";
  }
}

void render_proxies(std::ostringstream& md, const Json& p) {
  if (p["findings"].empty()) {
    md << "no proxy findings\n\n";
  } else {
    md << "| feature | sensitive | score | method | flagged |\n|---|---|---|---|---|\n";
    for (const auto& f : p["findings"]) {
      md << "| " << show(f["feature"]) << " | " << show(f["sensitive"]) << " | " << show(f["score"])
         << " | " << show(f["method"]) << " | " << (f["flagged"].get<bool>() ? "yes" : "no")
         << " |\n";
    }
    md << "\nFlag threshold " << show(p["threshold"]) << ".\n\n";
  }
  for (const auto& w : p["warnings"]) md << "- warning: " << show(w) << "\n";
  if (!p["warnings"].empty()) md << "\n";
}

void render_mitigation(std::ostringstream& md, const Json& m) {
  if (m.contains("reweighing")) {
    const auto& r = m["reweighing"];
    md << "### Reweighing on `" << show(r["sensitive"]) << "`\n\n";
    md << "| group | label | count | weight |\n|---|---|---|---|\n";
    for (const auto& c : r["cells"]) {
      md << "| " << show(c["group"]) << " | " << show(c["label"]) << " | " << show(c["count"])
         << " | " << show(c["weight"]) << " |\n";
    }
    md << "\nWeight sum " << show(r["weight_sum"]) << "; weighted I(S;Y) "
       << show(r["weighted_mutual_information"]) << ".\n\n";
  }
  if (m.contains("policy")) {
    const auto& p = m["policy"];
    md << "### Threshold policy on `" << show(p["sensitive"]) << "`\n\n";
    md << "| group | threshold | TPR |\n|---|---|---|\n";
    for (const auto& [group, g] : p["groups"].items()) {
      md << "| " << group << " | " << show(g["threshold"]) << " | " << show(g["tpr"]) << " |\n";
    }
    md << "\nObjective " << show(p["objective"]) << " at epsilon " << show(p["epsilon"])
       << "; " << show(p["performance"]) << " " << show(p["accuracy"]) << "; max TPR gap "
       << show(p["max_tpr_gap"]) << ".\n\n";
    md << "Max |EOD| before: " << show(m["before"]["max_abs_eod"])
       << ", after: " << show(m["after"]["max_abs_eod"]) << ".\n\n";
  }
}

void render_explanation(std::ostringstream& md, const Json& e) {
  md << "Surrogate fidelity " << show(e["fidelity"]) << " (depth " << show(e["depth"]) << ", "
     << show(e["leaves"]) << " leaves).\n\n";
  if (e["importance"].empty()) {
    md << "No splits: the black box is constant on this data.\n\n";
  } else {
    md << "| feature | importance |\n|---|---|\n";
    for (const auto& f : e["importance"]) {
      md << "| " << show(f["feature"]) << " | " << show(f["importance"]) << " |\n";
    }
    md << "\n";
  }
  md << "Rules:\n\n";
  for (const auto& rule : e["rules"]) md << "- " << show(rule) << "\n";
  md << "\n";
}

void render_privacy(std::ostringstream& md, const Json& p) {
  md << "Quasi-identifiers: ";
  bool first = true;
  for (const auto& q : p["quasi_identifiers"]) {
    md << (first ? "" : ", ") << "`" << show(q) << "`";
    first = false;
  }
  md << ". " << show(p["class_count"]) << " equivalence classes over " << show(p["n_rows"])
     << " rows; unique rate " << show(p["unique_rate"]) << "; " << show(p["violation_count"])
     << " row(s) in classes smaller than k=" << show(p["k"]) << ".\n\n";
  if (!p["violating_rows"].empty()) {
    md << "Violating rows: ";
    first = true;
    for (const auto& r : p["violating_rows"]) {
      md << (first ? "" : ", ") << r.dump();
      first = false;
    }
    md << "\n\n";
  }
}

void render_assessment(std::ostringstream& md, const Json& a) {
  for (const auto& principle : a["principles"]) {
    const std::string key = principle["principle"].get<std::string>();
    md << "### " << show(principle["title"]) << " - " << upper(show(a["verdicts"][key])) << "\n\n";
    for (const auto& q : principle["questions"]) {
      const std::string qid = q["id"].get<std::string>();
      const std::string answer = a["answers"].contains(qid) ? show(a["answers"][qid]) : "unanswered";
      md << "- `" << qid << "` " << show(q["text"]) << " **" << answer << "**";
      for (const auto& item : a["items"]) {
        if (item["question"] == qid) {
          md << " -> " << show(item["kind"]) << " (" << show(item["status"]) << "): "
             << show(item["note"]);
        }
      }
      md << "\n";
    }
    md << "\n";
  }
}

}  // namespace

std::string render_markdown(const AuditReport& report) {
  const Json& body = report.body;
  const Json& sections = body["sections"];
  std::ostringstream md;
  md << "# Responsible-AI audit report\n\n";
  md << "Generated by " << show(body["tool"]) << " " << show(body["version"]) << " at "
     << report.generated_at << ". Canonical digest `" << report.digest() << "`.\n\n";

  md << "## Principle summary\n\n| Principle | Verdict | Open items |\n|---|---|---|\n";
  const Json& assessment = sections["assessment"];
  for (Principle p : kPrinciples) {
    md << "| " << title(p) << " | ";
    if (!assessment.is_object()) {
      md << "NOT ASSESSED | - |\n";
      continue;
    }
    int open = 0;
    for (const auto& item : assessment["items"]) {
      if (item["principle"] == to_string(p) && item["status"] != "satisfied") ++open;
    }
    md << upper(show(assessment["verdicts"][to_string(p)])) << " | " << open << " |\n";
  }
  md << "\n";
  if (!assessment.is_object()) md << "Assessment " << show(assessment) << ".\n\n";

  const std::pair<Section, void (*)(std::ostringstream&, const Json&)> parts[] = {
      {Section::metrics, render_metrics},         {Section::proxies, render_proxies},
      {Section::mitigation, render_mitigation},   {Section::explanation, render_explanation},
      {Section::privacy, render_privacy},         {Section::assessment, render_assessment},
  };
  for (const auto& [section, render] : parts) {
    std::string name = to_string(section);
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    md << "## " << name << "\n\n";
    const Json& s = sections[to_string(section)];
    if (s.is_string()) {
      md << show(s) << "\n\n";
    } else {
      render(md, s);
    }
  }
  return md.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rai
