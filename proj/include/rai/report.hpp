#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rai/checklist.hpp"
#include "rai/explain.hpp"
#include "rai/metrics.hpp"
#include "rai/mitigate.hpp"
#include "rai/privacy.hpp"
#include "rai/proxy.hpp"

namespace rai {

using Json = nlohmann::json;

inline constexpr std::string_view kUndefined = "undefined";

/// At most 6 significant digits, trailing zeros dropped ("0.6", "-0.133333").
std::string display_number(double value);

/// {"display": <6 significant digits>, "value": <full precision>}.
Json number_json(double value);
/// number_json, or the "undefined" marker.
Json number_json(const Maybe& value);

Json to_json(const GroupConfusion& confusion);
Json to_json(const FairnessReport& report);
Json to_json(const ProxyScan& scan);
Json to_json(const WeightAssignment& weights);
Json to_json(const ThresholdPolicy& policy);
Json to_json(const SurrogateTree& tree);
/// Raw quasi-identifier values are left out unless `include_values`.
Json to_json(const RiskScan& scan, bool include_values = false);
Json to_json(const Assessment& assessment, const QuestionnaireDef& def);

enum class Section { metrics, proxies, mitigation, explanation, privacy, assessment };
inline constexpr Section kSections[] = {Section::metrics,     Section::proxies,
                                        Section::mitigation,  Section::explanation,
                                        Section::privacy,     Section::assessment};
const char* to_string(Section section);

/// Section documents by name; a missing section is reported with its skip reason.
struct SectionSet {
  std::map<Section, Json> present;
  std::map<Section, std::string> skip_reasons;
};

struct AuditReport {
  Json body;                 // canonical content; excludes the timestamp
  std::string generated_at;  // UTC, ISO 8601

  /// Canonical serialization of `body`: sorted keys, two-space indent.
  std::string canonical_text() const;
  /// SHA-256 of canonical_text().
  std::string digest() const;
  /// body + generated_at + canonical_digest, for writing to disk.
  std::string document() const;
};

/// Input name -> {"path", "sha256"}.
using InputDigests = std::map<std::string, Json>;

AuditReport assemble(const SectionSet& sections, const Json& config_echo,
                     const InputDigests& inputs, std::string generated_at = {});

/// Per-principle summary table first, then one part per section.
std::string render_markdown(const AuditReport& report);

std::string sha256_hex(std::string_view data);
std::string utc_timestamp();

}  // namespace rai
