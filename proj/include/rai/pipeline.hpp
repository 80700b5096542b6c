#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rai/checklist.hpp"
#include "rai/dataset.hpp"
#include "rai/explain.hpp"
#include "rai/metrics.hpp"
#include "rai/mitigate.hpp"
#include "rai/privacy.hpp"
#include "rai/report.hpp"

namespace rai {

/// Pipeline stages, in execution order.
enum class Stage { metrics, proxy, privacy, explain, mitigate, assess };
inline constexpr Stage kStages[] = {Stage::metrics, Stage::proxy,    Stage::privacy,
                                    Stage::explain, Stage::mitigate, Stage::assess};
const char* to_string(Stage stage);
Stage parse_stage(std::string_view text);

struct AuditConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this

  std::string dataset_path;
  LoadOptions load;
  Schema schema;
  double threshold = 0.5;  // binarization threshold when the table has scores only

  MetricConfig metrics;
  double proxy_threshold = 0.5;

  struct Mitigation {
    std::string sensitive;  // defaults to the first sensitive column
    OptimizerConfig optimizer;
    bool reweigh = true;
  } mitigation;

  SurrogateConfig surrogate;

  struct Privacy {
    std::vector<std::string> quasi_identifiers;  // defaults to quasi_identifier columns
    std::size_t k = 5;
    BinningSpec binning;
    bool include_values = false;
  } privacy;

  ThresholdProfile profile;
  std::string questionnaire = "builtin";
  std::string answers_path;

  /// Explicitly requested stages; empty means "every stage whose inputs are configured".
  std::vector<Stage> stages;
  std::string output_dir = "audit-out";

  Json echo;  // the config document as read, for the report

  std::filesystem::path resolve(const std::string& path) const;
};

AuditConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
AuditConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::vector<Stage>> stages;  // overrides the config's stage list
  std::optional<AnswerSheet> answers;        // takes precedence over answers_path
  std::string generated_at;                  // empty: current UTC time
  std::string config_sha256;                 // digest of the config file, if any
};

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitAttention = 2, kExitBlocked = 3 };
int exit_code_for(PrincipleVerdict verdict);

struct AuditOutcome {
  AuditReport report;
  int exit_code = kExitPass;
  std::optional<Assessment> assessment;
  std::optional<ThresholdPolicy> policy;
  std::optional<AuditTable> weighted_table;
  std::vector<std::string> warnings;
};

/// Runs load -> metrics -> proxy -> privacy -> explain -> mitigate
/// (re-measuring on mitigated predictions) -> assessment -> report.
/// Module errors propagate as StageError naming the stage.
AuditOutcome run_audit(const AuditConfig& config, const RunOptions& options = {});

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Asks every question in order on `out`, reading answers from `in`.
/// Returns nullopt if the session is aborted (end of input or "quit").
std::optional<AnswerSheet> prompt_answers(const QuestionnaireDef& def, std::istream& in,
                                          std::ostream& out);

/// Seeded synthetic audit inputs: a CSV data file, a config and an answers file.
struct SyntheticBundle {
  std::string data_csv;
  std::string config_json;
  std::string answers_json;
};
SyntheticBundle generate_synthetic(std::uint64_t seed, std::size_t rows = 1000);

}  // namespace rai
