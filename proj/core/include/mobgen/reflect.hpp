#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "mobgen/backend.hpp"
#include "mobgen/prompts.hpp"
#include "mobgen/rng.hpp"
#include "mobgen/types.hpp"

namespace mobgen {

enum class RethinkAction { follow, change };

std::string_view to_string(RethinkAction a);

struct RethinkDecision {
  RethinkAction action = RethinkAction::follow;
  std::optional<std::string> new_activity;   // present iff action == change
  std::optional<int> duration_minutes;       // grid-snapped, within [15, 480]
  std::string reasoning;
};

/// One Bernoulli draw with p = MEO(occupation) from the agent's stream.
/// Unknown occupations are a configuration error; population setup validates
/// them before any draw happens.
bool should_rethink(const std::string& occupation, const MeoTable& meo, RngStream& rng);

/// Asks the backend whether to follow or change the next planned activity.
/// Replies naming an activity outside the vocabulary coerce to follow
/// (reason "invalid-category"); backend or extraction failures are fail-safe
/// follows (reason "rethink-failed").
RethinkDecision rethink(const AgentState& state, const PlannedActivity& next,
                        const PersonProfile& profile, const ActivityVocabulary& vocab,
                        Backend& backend, const TemplateLibrary& templates,
                        const GenerationParams& params);

/// Applies a decision at plan position `cursor`. follow leaves the plan
/// unchanged. change replaces the node's intention, gives it the requested
/// duration by pushing later starts to (start + duration) when they would
/// overlap, and drops nodes pushed past the end of the day.
ActivityPlan apply_decision(const ActivityPlan& plan, std::size_t cursor,
                            const RethinkDecision& decision, const ActivityPoiMap& poi_map);

/// Rounds a requested duration to the 15-minute grid and clamps to [15, 480].
int snap_duration_minutes(double requested);

}  // namespace mobgen
