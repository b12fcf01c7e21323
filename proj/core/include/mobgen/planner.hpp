#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mobgen/backend.hpp"
#include "mobgen/prompts.hpp"
#include "mobgen/types.hpp"

namespace mobgen {

/// First-person diary text produced by the narrative stage.
struct Narrative {
  std::string text;
  std::string profile_id;
  std::string backend_kind;
  double temperature = 1.0;
  std::string timestamp;  // ISO-8601 UTC
};

/// Outcome of turning a model reply into a validated plan, with an audit
/// trail of every normalization applied.
struct PlanParseReport {
  ActivityPlan plan;
  std::vector<std::string> repairs;  // "re-sorted", "snapped-to-grid", "injected-sleep", "category-coerced"
  bool reprompted = false;
  bool rejected = false;
  std::string reject_reason;
};

/// Prompt-facing serialization of a profile ({character_profile}).
std::string profile_text(const PersonProfile& profile);

/// Default {example_json} binding for the plan prompts.
std::string plan_example_json();

/// Runs the diary-writer prompt for a profile. Throws on backend failure
/// after retries; callers fall back to an occupation-default plan.
Narrative generate_narrative(const PersonProfile& profile, Backend& backend,
                             const TemplateLibrary& templates, const GenerationParams& params);

/// Runs the extraction prompt over a narrative and validates the JSON reply.
/// An invalid reply earns exactly one repair round-trip (re-prompt with the
/// validator's error appended); a second failure yields a rejected report.
/// Extraction runs at temperature 0 regardless of the configured value.
PlanParseReport parse_plan(const Narrative& narrative, const ActivityVocabulary& vocab,
                           const ActivityPoiMap& poi_map, Backend& backend,
                           const TemplateLibrary& templates, const GenerationParams& params);

/// Ablation plan source: one prompt for a JSON plan, no narrative stage.
/// Same validation and repair policy as parse_plan.
PlanParseReport direct_plan(const PersonProfile& profile, const ActivityVocabulary& vocab,
                            const ActivityPoiMap& poi_map, Backend& backend,
                            const TemplateLibrary& templates, const GenerationParams& params);

/// Validation core, exposed for fixture corpora: extraction, schema check,
/// category coercion, grid snapping, stable re-sort, leading-sleep injection.
PlanParseReport validate_plan_reply(const std::string& reply, const ActivityVocabulary& vocab,
                                    const ActivityPoiMap& poi_map);

/// Occupation-default plan used when parsing fails twice, so population runs
/// always complete.
ActivityPlan fallback_plan(const PersonProfile& profile, const ActivityVocabulary& vocab,
                           const ActivityPoiMap& poi_map);

struct TimedActivity {
  PlannedActivity activity;
  TimeOfDay start;
  TimeOfDay end;
  bool zero_length() const { return start == end; }
};

/// Turns start times into intervals: each activity ends where the next
/// begins, the last at day_end. Equal consecutive starts yield zero-length
/// intervals rather than a rejection.
std::vector<TimedActivity> plan_durations(const ActivityPlan& plan, TimeOfDay day_end);

}  // namespace mobgen
