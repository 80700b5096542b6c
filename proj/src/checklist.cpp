#include "rai/checklist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rai/error.hpp"

namespace rai {

namespace {

template <typename Enum, std::size_t N>
const char* name_of(Enum value, const std::pair<Enum, const char*> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
Enum value_of(std::string_view text, const std::pair<Enum, const char*> (&table)[N],
              const char* what) {
  for (const auto& [v, name] : table) {
    if (text == name) return v;
  }
  throw Error(ErrorKind::parse, std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr std::pair<Principle, const char*> kPrincipleNames[] = {
    {Principle::fair, "fair"},
    {Principle::transparent_explainable, "transparent_explainable"},
    {Principle::human_centric, "human_centric"},
    {Principle::privacy_security, "privacy_security"},
    {Principle::third_parties, "third_parties"},
};
constexpr std::pair<Principle, const char*> kPrincipleTitles[] = {
    {Principle::fair, "Fair AI"},
    {Principle::transparent_explainable, "Transparent & Explainable AI"},
    {Principle::human_centric, "Human-centric AI"},
    {Principle::privacy_security, "Privacy & Security by Design"},
    {Principle::third_parties, "Third parties"},
};
constexpr std::pair<Answer, const char*> kAnswerNames[] = {
    {Answer::yes, "yes"}, {Answer::no, "no"}, {Answer::not_applicable, "not_applicable"}};
constexpr std::pair<Backing, const char*> kBackingNames[] = {
    {Backing::training, "training"}, {Backing::technical_tool, "technical_tool"}};
constexpr std::pair<CheckKind, const char*> kCheckNames[] = {
    {CheckKind::none, "none"},
    {CheckKind::proxy_scan, "proxy_scan"},
    {CheckKind::fairness_metrics, "fairness_metrics"},
    {CheckKind::reidentification_scan, "reidentification_scan"},
    {CheckKind::surrogate_fidelity, "surrogate_fidelity"},
    {CheckKind::adversarial_robustness, "adversarial_robustness"},
};
constexpr std::pair<ItemKind, const char*> kItemKindNames[] = {
    {ItemKind::human_review, "human_review"}, {ItemKind::required_check, "required_check"}};
constexpr std::pair<ItemStatus, const char*> kItemStatusNames[] = {
    {ItemStatus::open, "open"}, {ItemStatus::satisfied, "satisfied"}, {ItemStatus::failed, "failed"}};
constexpr std::pair<PrincipleVerdict, const char*> kVerdictNames[] = {
    {PrincipleVerdict::pass, "pass"},
    {PrincipleVerdict::attention, "attention"},
    {PrincipleVerdict::blocked, "blocked"}};

void validate(const QuestionnaireDef& def) {
  if (def.questions.empty()) throw Error(ErrorKind::invariant, "questionnaire has no questions");
  std::set<std::string> ids;
  for (const auto& q : def.questions) {
    if (q.id.empty()) throw Error(ErrorKind::invariant, "question with an empty id");
    if (!ids.insert(q.id).second) {
      throw Error(ErrorKind::invariant, "duplicate question id '" + q.id + "'");
    }
    if (q.risk_answer == Answer::not_applicable) {
      throw Error(ErrorKind::invariant,
                  "question '" + q.id + "': risk answer must be yes or no");
    }
    if (q.backing == Backing::technical_tool && q.check == CheckKind::none) {
      throw Error(ErrorKind::invariant,
                  "technical_tool question '" + q.id + "' has no linked check");
    }
  }
}

void recompute_verdicts(Assessment& a) {
  for (Principle p : kPrinciples) a.verdicts[p] = PrincipleVerdict::pass;
  for (const auto& item : a.items) {
    auto& v = a.verdicts[item.principle];
    if (item.status == ItemStatus::failed) {
      v = PrincipleVerdict::blocked;
    } else if (item.status == ItemStatus::open && v == PrincipleVerdict::pass) {
      v = PrincipleVerdict::attention;
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Judgement {
  ItemStatus status = ItemStatus::open;
  std::string note;
};

Judgement judge(const FairnessEvidence& ev, const ThresholdProfile& profile) {
  if (ev.reports.empty()) return {ItemStatus::open, "no fairness report supplied"};
  std::vector<std::string> problems;
  for (const auto& report : ev.reports) {
    for (const auto& g : report.groups) {
      const std::string who = "group '" + g.group + "' vs '" + report.privileged + "'";
      if (!g.di || !g.spd || !g.eod || !g.aod) {
        return {ItemStatus::open, who + ": a required metric is undefined"};
      }
      if (*g.di < profile.di_band.low || *g.di > profile.di_band.high) {
        problems.push_back(who + ": DI=" + fmt(*g.di) + " outside [" + fmt(profile.di_band.low) +
                           ", " + fmt(profile.di_band.high) + "]");
      }
      const std::pair<const char*, double> diffs[] = {{"SPD", *g.spd}, {"EOD", *g.eod}, {"AOD", *g.aod}};
      for (const auto& [name, value] : diffs) {
        if (!within(std::fabs(value), profile.epsilon)) {
          problems.push_back(who + ": |" + name + "|=" + fmt(std::fabs(value)) + " > " +
                             fmt(profile.epsilon));
        }
      }
    }
  }
  if (problems.empty()) return {ItemStatus::satisfied, "all disparities within the profile"};
  std::string note;
  for (std::size_t i = 0; i < problems.size(); ++i) note += (i ? "; " : "") + problems[i];
  return {ItemStatus::failed, note};
}

Judgement judge(const ProxyScan& scan, const ThresholdProfile&) {
  const auto flagged = scan.flagged_count();
  if (flagged == 0) return {ItemStatus::satisfied, "no flagged proxy findings"};
  const auto& top = scan.findings.front();
  return {ItemStatus::failed, std::to_string(flagged) + " flagged proxy finding(s); strongest '" +
                                  top.feature + "' ~ '" + top.sensitive + "' = " + fmt(top.score)};
}

Judgement judge(const RiskScan& scan, const ThresholdProfile& profile) {
  const auto violations = scan.violations_at(profile.k);
  if (violations.empty()) {
    return {ItemStatus::satisfied, "every equivalence class has at least k=" +
                                       std::to_string(profile.k) + " rows"};
  }
  return {ItemStatus::failed, std::to_string(violations.size()) + " row(s) in classes smaller than k=" +
                                  std::to_string(profile.k)};
}

Judgement judge(const SurrogateEvidence& ev, const ThresholdProfile& profile) {
  if (ev.fidelity >= profile.min_fidelity) {
    return {ItemStatus::satisfied, "surrogate fidelity " + fmt(ev.fidelity)};
  }
  return {ItemStatus::failed, "surrogate fidelity " + fmt(ev.fidelity) + " below " +
                                  fmt(profile.min_fidelity)};
}

nlohmann::ordered_json to_json(const Question& q) {
  nlohmann::ordered_json j;
  j["id"] = q.id;
  j["principle"] = to_string(q.principle);
  j["text"] = q.text;
  j["risk_answer"] = to_string(q.risk_answer);
  j["backing"] = to_string(q.backing);
  j["check"] = to_string(q.check);
  return j;
}

}  // namespace

const char* to_string(Principle p) { return name_of(p, kPrincipleNames); }
const char* to_string(Answer a) { return name_of(a, kAnswerNames); }
const char* to_string(Backing b) { return name_of(b, kBackingNames); }
const char* to_string(CheckKind c) { return name_of(c, kCheckNames); }
const char* to_string(ItemKind k) { return name_of(k, kItemKindNames); }
const char* to_string(ItemStatus s) { return name_of(s, kItemStatusNames); }
const char* to_string(PrincipleVerdict v) { return name_of(v, kVerdictNames); }
const char* title(Principle p) { return name_of(p, kPrincipleTitles); }
Principle parse_principle(std::string_view t) { return value_of(t, kPrincipleNames, "principle"); }
Answer parse_answer(std::string_view t) { return value_of(t, kAnswerNames, "answer"); }
Backing parse_backing(std::string_view t) { return value_of(t, kBackingNames, "backing"); }
CheckKind parse_check(std::string_view t) { return value_of(t, kCheckNames, "check"); }

const Question& QuestionnaireDef::question(std::string_view qid) const {
  for (const auto& q : questions) {
    if (q.id == qid) return q;
  }
  throw Error(ErrorKind::argument, "unknown question id '" + std::string(qid) + "'");
}

QuestionnaireDef builtin_questionnaire() {
  using P = Principle;
  using A = Answer;
  using B = Backing;
  using C = CheckKind;
  QuestionnaireDef def;
  def.id = "responsible-ai-by-design";
  def.version = "1";
  def.questions = {
      {"fair.sensitive_variables", P::fair,
       "Does your data set contain sensitive variables?", A::yes, B::training, C::none},
      {"fair.correlated_variables", P::fair,
       "Does any of the variables strongly correlate with sensitive variables?", A::yes,
       B::technical_tool, C::proxy_scan},
      {"fair.biased_training_data", P::fair,
       "Is/are your training data set(s) biased with respect to the target groups in case those "
       "include “protected groups”?",
       A::yes, B::technical_tool, C::fairness_metrics},
      {"fair.fp_fn_impact", P::fair,
       "Is there an important impact in the specific domain of false positives (FP) and/or false "
       "negatives (FN)?",
       A::yes, B::training, C::none},
      // Listed under the transparency heading in the source table; judged with
      // the group metrics, so it belongs to the fairness principle here.
      {"fair.fp_fn_distribution", P::fair,
       "Are FP and FN unequally distributed across different (protected) groups?", A::yes,
       B::technical_tool, C::fairness_metrics},
      {"te.person_impersonation", P::transparent_explainable,
       "Could the user think that s/he interacts with a person rather than with your system?",
       A::yes, B::training, C::none},
      {"te.significant_impact", P::transparent_explainable,
       "Is the AI system’s outcome significantly affecting people’s lives?", A::yes,
       B::training, C::none},
      {"te.understanding_gap", P::transparent_explainable,
       "Do you lack sufficient understanding of how the AI-generated decisions are constructed for "
       "the domain at hand?",
       A::yes, B::training, C::none},
      {"te.explanation_request", P::transparent_explainable,
       "Could the user request an explanation for the AI-generated conclusion?", A::yes,
       B::training, C::none},
      {"te.data_purpose", P::transparent_explainable,
       "Is it difficult to be explicit about whether the data used is personal or non-personal, "
       "and about the purpose the AI system uses the data for?",
       A::yes, B::training, C::none},
      {"te.understand_conclusions", P::transparent_explainable,
       "Is it possible to understand how the algorithm has reached its conclusions? For example, "
       "what variables have influenced the result of the algorithm and how much?",
       A::no, B::technical_tool, C::surrogate_fidelity},
      {"hc.human_rights", P::human_centric,
       "Is there a possibility that your P&S has a negative impact on Human Rights?", A::yes,
       B::training, C::none},
      {"hc.sdgs", P::human_centric, "Does your P&S negatively impact the UN’s SDGs?", A::yes,
       B::training, C::none},
      {"ps.personal_data", P::privacy_security, "Does your AI system use personal data?", A::yes,
       B::training, C::none},
      {"ps.privacy_impact", P::privacy_security,
       "Has your Privacy Impact Assessment revealed any important concerns?", A::yes, B::training,
       C::none},
      {"ps.reidentification", P::privacy_security,
       "In case your P&S uses anonymized data, is there an unreasonable risk of re-identification?",
       A::yes, B::technical_tool, C::reidentification_scan},
      {"ps.security_assessment", P::privacy_security,
       "Has your Security Assessment revealed any important concerns?", A::yes, B::training,
       C::none},
      {"ps.attack_robustness", P::privacy_security,
       "Is the system robust against attacks that seek to exploit weaknesses in it and manipulate "
       "the outputs?",
       A::no, B::technical_tool, C::adversarial_robustness},
      {"tp.supplier_information", P::third_parties,
       "Do you need more information from your supplier to understand whether the AI module is "
       "consistent with the Principles?",
       A::yes, B::training, C::none},
  };
  validate(def);
  return def;
}

QuestionnaireDef parse_questionnaire(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("questionnaire: ") + e.what());
  }
  QuestionnaireDef def;
  try {
    def.id = doc.at("id").get<std::string>();
    def.version = doc.value("version", "1");
    for (const auto& jq : doc.at("questions")) {
      Question q;
      q.id = jq.at("id").get<std::string>();
      q.principle = parse_principle(jq.at("principle").get<std::string>());
      q.text = jq.at("text").get<std::string>();
      q.risk_answer = parse_answer(jq.value("risk_answer", "yes"));
      q.backing = parse_backing(jq.at("backing").get<std::string>());
      q.check = parse_check(jq.value("check", "none"));
      def.questions.push_back(std::move(q));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("questionnaire: ") + e.what());
  }
  validate(def);
  return def;
}

QuestionnaireDef load_questionnaire(const std::string& source) {
  if (source.empty() || source == "builtin") return builtin_questionnaire();
  std::ifstream in(source);
  if (!in) throw Error(ErrorKind::io, "cannot open questionnaire '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_questionnaire(buf.str());
}

std::string questionnaire_document(const QuestionnaireDef& def) {
  nlohmann::ordered_json doc;
  doc["id"] = def.id;
  doc["version"] = def.version;
  doc["questions"] = nlohmann::ordered_json::array();
  for (const auto& q : def.questions) doc["questions"].push_back(to_json(q));
  return doc.dump(2) + "\n";
}

AnswerSheet parse_answers(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("answers: ") + e.what());
  }
  AnswerSheet sheet;
  try {
    sheet.questionnaire = doc.value("questionnaire", "");
    sheet.version = doc.value("version", "");
    for (const auto& [qid, answer] : doc.at("answers").items()) {
      sheet.answers[qid] = parse_answer(answer.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("answers: ") + e.what());
  }
  return sheet;
}

std::string answers_document(const AnswerSheet& sheet) {
  nlohmann::json doc;
  doc["questionnaire"] = sheet.questionnaire;
  doc["version"] = sheet.version;
  doc["answers"] = nlohmann::json::object();
  for (const auto& [qid, answer] : sheet.answers) doc["answers"][qid] = to_string(answer);
  return doc.dump(2) + "\n";
}

PrincipleVerdict Assessment::overall() const {
  PrincipleVerdict worst = PrincipleVerdict::pass;
  for (const auto& [p, v] : verdicts) worst = std::max(worst, v);
  return worst;
}

Assessment evaluate_answers(const QuestionnaireDef& def, const AnswerSheet& sheet,
                            const ThresholdProfile& profile) {
  if (!sheet.questionnaire.empty() && sheet.questionnaire != def.id) {
    throw Error(ErrorKind::argument, "answers were recorded for questionnaire '" +
                                         sheet.questionnaire + "', not '" + def.id + "'");
  }
  for (const auto& [qid, answer] : sheet.answers) {
    (void)def.question(qid);  // throws on unknown ids
  }
  Assessment a;
  a.questionnaire = def.id;
  a.version = def.version;
  a.profile = profile;
  for (const auto& q : def.questions) {
    auto it = sheet.answers.find(q.id);
    if (it == sheet.answers.end()) {
      throw Error(ErrorKind::argument, "question '" + q.id + "' is unanswered");
    }
    a.answers[q.id] = it->second;
    if (it->second != q.risk_answer) continue;
    OpenItem item;
    item.question = q.id;
    item.principle = q.principle;
    if (q.backing == Backing::technical_tool) {
      item.kind = ItemKind::required_check;
      item.check = q.check;
      item.note = q.check == CheckKind::adversarial_robustness
                      ? "no automated check available; reviewer sign-off required"
                      : std::string("awaiting ") + to_string(q.check) + " evidence";
    } else {
      item.kind = ItemKind::human_review;
      item.note = "review with the training material for this principle";
    }
    a.items.push_back(std::move(item));
  }
  recompute_verdicts(a);
  return a;
}

CheckKind check_of(const Evidence& evidence) {
  struct Visitor {
    CheckKind operator()(const FairnessEvidence&) const { return CheckKind::fairness_metrics; }
    CheckKind operator()(const ProxyScan&) const { return CheckKind::proxy_scan; }
    CheckKind operator()(const RiskScan&) const { return CheckKind::reidentification_scan; }
    CheckKind operator()(const SurrogateEvidence&) const { return CheckKind::surrogate_fidelity; }
  };
  return std::visit(Visitor{}, evidence);
}

Assessment attach_evidence(const Assessment& assessment, const Evidence& evidence,
                           const ThresholdProfile& profile, std::vector<std::string>* warnings) {
  const CheckKind check = check_of(evidence);
  Assessment out = assessment;
  const bool any_open = std::any_of(out.items.begin(), out.items.end(), [&](const OpenItem& i) {
    return i.kind == ItemKind::required_check && i.check == check && i.status == ItemStatus::open;
  });
  if (!any_open) {
    if (warnings) {
      warnings->push_back(std::string(to_string(check)) +
                          " evidence ignored: no open item requires it");
    }
    return out;
  }
  const Judgement verdict = std::visit([&](const auto& ev) { return judge(ev, profile); }, evidence);
  for (auto& item : out.items) {
    if (item.kind != ItemKind::required_check || item.check != check ||
        item.status != ItemStatus::open) {
      continue;
    }
    item.status = verdict.status;
    item.note = verdict.note;
  }
  out.profile = profile;
  recompute_verdicts(out);
  return out;
}

}  // namespace rai
