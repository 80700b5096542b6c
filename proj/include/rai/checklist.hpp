#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rai/metrics.hpp"
#include "rai/privacy.hpp"
#include "rai/proxy.hpp"

namespace rai {

enum class Principle {
  fair,
  transparent_explainable,
  human_centric,
  privacy_security,
  third_parties,
};

enum class Answer { yes, no, not_applicable };
enum class Backing { training, technical_tool };

/// Technical check a question can require. adversarial_robustness has no
/// computable evidence in this toolkit; its items stay open for a reviewer.
enum class CheckKind {
  none,
  proxy_scan,
  fairness_metrics,
  reidentification_scan,
  surrogate_fidelity,
  adversarial_robustness,
};

inline constexpr Principle kPrinciples[] = {
    Principle::fair, Principle::transparent_explainable, Principle::human_centric,
    Principle::privacy_security, Principle::third_parties};

const char* to_string(Principle p);
const char* to_string(Answer a);
const char* to_string(Backing b);
const char* to_string(CheckKind c);
/// Heading used in rendered reports, e.g. "Fair AI".
const char* title(Principle p);
Principle parse_principle(std::string_view text);
Answer parse_answer(std::string_view text);
Backing parse_backing(std::string_view text);
CheckKind parse_check(std::string_view text);

struct Question {
  std::string id;
  Principle principle = Principle::fair;
  std::string text;
  Answer risk_answer = Answer::yes;
  Backing backing = Backing::training;
  CheckKind check = CheckKind::none;
};

struct QuestionnaireDef {
  std::string id;
  std::string version;
  std::vector<Question> questions;

  const Question& question(std::string_view id) const;
};

/// The built-in Responsible-AI questionnaire: 19 questions over the five principles.
QuestionnaireDef builtin_questionnaire();
QuestionnaireDef parse_questionnaire(std::string_view json_text);
/// "builtin" selects the built-in definition; anything else is a file path.
QuestionnaireDef load_questionnaire(const std::string& source);
std::string questionnaire_document(const QuestionnaireDef& def);

/// Answers document: questionnaire id + version and one answer per question id.
struct AnswerSheet {
  std::string questionnaire;
  std::string version;
  std::map<std::string, Answer> answers;
};

AnswerSheet parse_answers(std::string_view json_text);
std::string answers_document(const AnswerSheet& sheet);

struct ThresholdProfile {
  double epsilon = 0.10;
  DisparateImpactBand di_band;
  std::size_t k = 5;
  double min_fidelity = 0.8;

  friend bool operator==(const ThresholdProfile&, const ThresholdProfile&) = default;
};

enum class ItemKind { human_review, required_check };
enum class ItemStatus { open, satisfied, failed };
enum class PrincipleVerdict { pass, attention, blocked };

const char* to_string(ItemKind k);
const char* to_string(ItemStatus s);
const char* to_string(PrincipleVerdict v);

struct OpenItem {
  std::string question;
  Principle principle = Principle::fair;
  ItemKind kind = ItemKind::human_review;
  CheckKind check = CheckKind::none;
  ItemStatus status = ItemStatus::open;
  std::string note;

  friend bool operator==(const OpenItem&, const OpenItem&) = default;
};

struct Assessment {
  std::string questionnaire;
  std::string version;
  std::map<std::string, Answer> answers;
  std::vector<OpenItem> items;  // questionnaire order
  std::map<Principle, PrincipleVerdict> verdicts;
  ThresholdProfile profile;

  /// Worst verdict over all principles.
  PrincipleVerdict overall() const;

  friend bool operator==(const Assessment&, const Assessment&) = default;
};

Assessment evaluate_answers(const QuestionnaireDef& def, const AnswerSheet& sheet,
                            const ThresholdProfile& profile = {});

struct FairnessEvidence {
  std::vector<FairnessReport> reports;  // one per sensitive column; all must pass
};

struct SurrogateEvidence {
  double fidelity = 0.0;
};

using Evidence = std::variant<FairnessEvidence, ProxyScan, RiskScan, SurrogateEvidence>;

CheckKind check_of(const Evidence& evidence);

/// Judges `evidence` against `profile` and resolves every open
/// required_check item linked to its check. Evidence matching no open item
/// is ignored (a warning is appended when `warnings` is given).
Assessment attach_evidence(const Assessment& assessment, const Evidence& evidence,
                           const ThresholdProfile& profile,
                           std::vector<std::string>* warnings = nullptr);

}  // namespace rai
