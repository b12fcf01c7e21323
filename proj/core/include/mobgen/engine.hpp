#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobgen/backend.hpp"
#include "mobgen/planner.hpp"
#include "mobgen/prompts.hpp"
#include "mobgen/reflect.hpp"
#include "mobgen/rng.hpp"
#include "mobgen/spatial.hpp"
#include "mobgen/types.hpp"

namespace mobgen {

enum class PlanSource { narrative_parsing, direct_llm, random };
enum class ModeChoiceSource { llm, random };

std::string_view to_string(PlanSource s);
std::string_view to_string(ModeChoiceSource s);
std::optional<PlanSource> plan_source_from_string(std::string_view);
std::optional<ModeChoiceSource> mode_choice_from_string(std::string_view);

struct SimulationConfig {
  std::uint64_t seed = 0;
  int day_count = 1;
  MeoTable meo = MeoTable::defaults();
  GravityParams gravity;
  ModeSpeedTable speeds = ModeSpeedTable::defaults();
  ActivityVocabulary vocabulary = ActivityVocabulary::defaults();
  ActivityPoiMap activity_poi_map = ActivityPoiMap::defaults();
  GenerationParams generation;
  bool rethinking_enabled = true;
  PlanSource plan_source = PlanSource::narrative_parsing;
  ModeChoiceSource mode_choice = ModeChoiceSource::llm;
  std::size_t memory_cap = 10;
  int threads = 0;  // 0: hardware concurrency
};

/// Stable digest of every behavior-relevant config field, so ablation runs
/// are distinguishable in their manifests.
std::string config_digest(const SimulationConfig& config);

struct Environment {
  const PoiDatabase& db;
  const SimulationConfig& config;
  Backend& backend;
  const TemplateLibrary& templates;
};

struct DecisionLogEntry {
  std::string agent_id;
  int day_index = 0;
  TimeOfDay time;
  RethinkAction action = RethinkAction::follow;
  std::optional<std::string> new_activity;
  std::optional<int> duration_minutes;
  std::string reasoning;
};

struct AgentDayResult {
  std::string agent_id;
  int day_index = 0;
  Trajectory trajectory;
  ActivityPlan plan;  // post-parse, pre-rethink
  std::optional<Narrative> narrative;
  std::optional<PlanParseReport> parse_report;
  bool used_fallback_plan = false;
  std::vector<DecisionLogEntry> decisions;
  std::vector<std::string> notes;  // grounding failures, prism stretches, day-end clamps
};

struct BackendCallCounts {
  long narrative = 0;
  long plan = 0;
  long rethink = 0;
  long mode = 0;
  long other = 0;
};

struct RunManifest {
  std::uint64_t seed = 0;
  std::string config_digest;
  int agent_count = 0;
  int trajectory_count = 0;
  int fallback_plan_count = 0;
  std::vector<std::string> failures;  // per agent-day problems; never abort the run
  BackendCallCounts backend_calls;
  double wall_seconds = 0.0;
};

struct RunArtifacts {
  std::vector<AgentDayResult> results;  // ordered by (agent_id, day_index)
  RunManifest manifest;
};

/// Drives one agent through plan -> (rethink -> ground -> move) per node for
/// one day. Backend failures in planning fall back to the occupation-default
/// plan; grounding failures keep the agent in place for that node. The
/// resulting records tile slots 0..95.
AgentDayResult simulate_agent_day(const PersonProfile& profile, const Environment& env,
                                  int day_index);

Trajectory simulate_agent(const PersonProfile& profile, const Environment& env, int day_index = 0);

/// Independent per-agent simulations over the configured day count; results
/// are ordered by agent id regardless of completion order, and individual
/// failures are recorded in the manifest rather than aborting the run.
RunArtifacts simulate_population(std::span<const PersonProfile> profiles, const Environment& env);

/// Planning stage only (narratives and validated plans, no execution), with
/// the same ordering and failure-handling contract as simulate_population.
RunArtifacts plan_population(std::span<const PersonProfile> profiles, const Environment& env);

/// Ablation plan source: leading sleep plus 3..8 uniformly drawn activities
/// at uniformly drawn grid times, sorted.
ActivityPlan random_plan(RngStream& rng, const ActivityVocabulary& vocab,
                         const ActivityPoiMap& poi_map);

/// Ablation mode source: uniform draw among the available modes.
TransportMode random_mode(std::span<const TransportMode> available, RngStream& rng);

}  // namespace mobgen
