#include "mobgen/reflect.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "mobgen/errors.hpp"
#include "mobgen/planner.hpp"  // profile_text

namespace mobgen {

std::string_view to_string(RethinkAction a) {
  return a == RethinkAction::follow ? "follow" : "change";
}

bool should_rethink(const std::string& occupation, const MeoTable& meo, RngStream& rng) {
  const double p = meo.at(occupation);
  // A zero band consumes no draw, so all-zero MEO runs are stream-identical
  // to runs with rethinking disabled.
  if (p <= 0.0) return false;
  return rng.bernoulli(p);
}

int snap_duration_minutes(double requested) {
  const int grid = TimeOfDay::kMinutesPerSlot;
  int snapped = static_cast<int>(std::llround(requested / grid)) * grid;
  return std::clamp(snapped, 15, 480);
}

namespace {

RethinkDecision follow(std::string reasoning) {
  RethinkDecision d;
  d.action = RethinkAction::follow;
  d.reasoning = std::move(reasoning);
  return d;
}

}  // namespace

RethinkDecision rethink(const AgentState& state, const PlannedActivity& next,
                        const PersonProfile& profile, const ActivityVocabulary& vocab,
                        Backend& backend, const TemplateLibrary& templates,
                        const GenerationParams& params) {
  const Bindings bindings = {
      {"character_profile", profile_text(profile)},
      {"formatted_time", state.now.to_string()},
      {"memory_context",
       state.memory_context() + "\nNext planned activity: " + next.intention + " at " +
           next.start.to_string()},
      {"activity_categories", vocab.joined()},
  };

  std::string reply;
  nlohmann::json j;
  try {
    const RenderedPrompt prompt = render(templates.get(templates::kRethink), bindings);
    reply = backend.complete(prompt.system_text, prompt.user_text, params, templates::kRethink);
    j = nlohmann::json::parse(extract_json_block(reply));
  } catch (const Error&) {
    return follow("rethink-failed");
  } catch (const nlohmann::json::exception&) {
    return follow("rethink-failed");
  }

  const std::string action = j.value("action", std::string{});
  const std::string reasoning = j.value("reasoning", std::string{});
  if (action == "follow") return follow(reasoning);
  if (action != "change") return follow("invalid-action");

  if (!j.contains("new_activity") || !j["new_activity"].is_string()) {
    return follow("invalid-category");
  }
  const auto category = vocab.coerce(j["new_activity"].get<std::string>());
  if (!category) return follow("invalid-category");

  if (!j.contains("duration_minutes") || !j["duration_minutes"].is_number() ||
      j["duration_minutes"].get<double>() <= 0) {
    return follow("invalid-duration");
  }

  RethinkDecision d;
  d.action = RethinkAction::change;
  d.new_activity = *category;
  d.duration_minutes = snap_duration_minutes(j["duration_minutes"].get<double>());
  d.reasoning = reasoning;
  return d;
}

ActivityPlan apply_decision(const ActivityPlan& plan, std::size_t cursor,
                            const RethinkDecision& decision, const ActivityPoiMap& poi_map) {
  if (decision.action == RethinkAction::follow) return plan;
  if (cursor >= plan.activities.size()) {
    throw Error("apply_decision: cursor " + std::to_string(cursor) + " out of range");
  }

  ActivityPlan out;
  out.activities.assign(plan.activities.begin(), plan.activities.begin() + cursor + 1);
  PlannedActivity& node = out.activities.back();
  node.intention = *decision.new_activity;
  node.location_category = poi_map.poi_category_for(node.intention);
  if (!decision.reasoning.empty()) node.description = decision.reasoning;

  const int push_to = node.start.minutes() + *decision.duration_minutes;
  const int last_minute = TimeOfDay::kLastSlot * TimeOfDay::kMinutesPerSlot;
  for (std::size_t j = cursor + 1; j < plan.activities.size(); ++j) {
    PlannedActivity a = plan.activities[j];
    if (a.start.minutes() < push_to) {
      if (push_to > last_minute) continue;  // pushed past day end: dropped
      a.start = TimeOfDay::from_minutes(push_to);
    }
    out.activities.push_back(std::move(a));
  }
  return out;
}

}  // namespace mobgen
