#include "mobgen/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "mobgen/errors.hpp"

namespace mobgen {

std::string_view to_string(PlanSource s) {
  switch (s) {
    case PlanSource::narrative_parsing: return "narrative_parsing";
    case PlanSource::direct_llm: return "direct_llm";
    case PlanSource::random: return "random";
  }
  return "narrative_parsing";
}

std::string_view to_string(ModeChoiceSource s) {
  return s == ModeChoiceSource::llm ? "llm" : "random";
}

std::optional<PlanSource> plan_source_from_string(std::string_view s) {
  if (s == "narrative_parsing") return PlanSource::narrative_parsing;
  if (s == "direct_llm") return PlanSource::direct_llm;
  if (s == "random") return PlanSource::random;
  return std::nullopt;
}

std::optional<ModeChoiceSource> mode_choice_from_string(std::string_view s) {
  if (s == "llm") return ModeChoiceSource::llm;
  if (s == "random") return ModeChoiceSource::random;
  return std::nullopt;
}

std::string config_digest(const SimulationConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["day_count"] = c.day_count;
  j["meo"] = c.meo.values();
  j["gravity"] = {{"alpha", c.gravity.alpha},
                  {"beta", c.gravity.beta},
                  {"candidate_cap", c.gravity.candidate_cap},
                  {"search_radius_m", c.gravity.search_radius_m}};
  nlohmann::json speeds;
  for (TransportMode m : kAllModes) speeds[std::string(to_string(m))] = c.speeds.speed(m);
  j["speeds"] = speeds;
  j["vocabulary"] = c.vocabulary.names();
  j["activity_poi_map"] = c.activity_poi_map.mapping;
  j["generation"] = {{"temperature", c.generation.temperature},
                     {"max_tokens", c.generation.max_tokens},
                     {"timeout_s", c.generation.timeout_s},
                     {"max_retries", c.generation.max_retries}};
  j["rethinking_enabled"] = c.rethinking_enabled;
  j["plan_source"] = std::string(to_string(c.plan_source));
  j["mode_choice"] = std::string(to_string(c.mode_choice));
  j["memory_cap"] = c.memory_cap;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

namespace {

/// Tags every backend call with its purpose so manifests can prove which
/// stages ran (e.g. random-mode runs never touch the mode counter).
class CountingBackend final : public Backend {
public:
  explicit CountingBackend(Backend& inner) : inner_(inner) {}

  std::string complete(const std::string& system_text, const std::string& user_text,
                       const GenerationParams& params, std::string_view template_name) override {
    {
      std::lock_guard lock(mu_);
      if (template_name == templates::kNarrative) ++counts_.narrative;
      else if (template_name == templates::kPlanExtract || template_name == templates::kDirectPlan)
        ++counts_.plan;
      else if (template_name == templates::kRethink) ++counts_.rethink;
      else if (template_name == templates::kModeChoice) ++counts_.mode;
      else ++counts_.other;
    }
    return inner_.complete(system_text, user_text, params, template_name);
  }

  std::string kind() const override { return inner_.kind(); }

  BackendCallCounts counts() const {
    std::lock_guard lock(mu_);
    return counts_;
  }

private:
  Backend& inner_;
  mutable std::mutex mu_;
  BackendCallCounts counts_;
};

struct PlanOutcome {
  ActivityPlan plan;
  std::optional<Narrative> narrative;
  std::optional<PlanParseReport> report;
  bool used_fallback = false;
  std::vector<std::string> notes;
};

PlanOutcome obtain_plan(const PersonProfile& profile, const Environment& env, Backend& backend,
                        RngStream& rng) {
  const SimulationConfig& cfg = env.config;
  PlanOutcome out;
  switch (cfg.plan_source) {
    case PlanSource::random:
      out.plan = random_plan(rng, cfg.vocabulary, cfg.activity_poi_map);
      return out;
    case PlanSource::direct_llm: {
      try {
        PlanParseReport report = direct_plan(profile, cfg.vocabulary, cfg.activity_poi_map,
                                             backend, env.templates, cfg.generation);
        out.report = report;
        if (report.rejected) {
          out.notes.push_back("direct plan rejected: " + report.reject_reason);
        } else {
          out.plan = std::move(report.plan);
          return out;
        }
      } catch (const Error& e) {
        out.notes.push_back(std::string("direct plan backend failure: ") + e.what());
      }
      break;
    }
    case PlanSource::narrative_parsing: {
      try {
        Narrative narrative =
            generate_narrative(profile, backend, env.templates, cfg.generation);
        out.narrative = narrative;
        PlanParseReport report = parse_plan(narrative, cfg.vocabulary, cfg.activity_poi_map,
                                            backend, env.templates, cfg.generation);
        out.report = report;
        if (report.rejected) {
          out.notes.push_back("plan rejected: " + report.reject_reason);
        } else {
          out.plan = std::move(report.plan);
          return out;
        }
      } catch (const Error& e) {
        out.notes.push_back(std::string("planner backend failure: ") + e.what());
      }
      break;
    }
  }
  out.plan = fallback_plan(profile, cfg.vocabulary, cfg.activity_poi_map);
  out.used_fallback = true;
  return out;
}

const Poi* resolve_location(const PlannedActivity& act, const PersonProfile& profile,
                            const Poi* current, int clock_slot, int deadline_slot,
                            const Environment& env, RngStream& rng,
                            std::vector<std::string>& notes) {
  const SimulationConfig& cfg = env.config;
  // Anchors bypass gravity: home for sleep/household, the workplace for
  // work_study when the profile has one.
  if (act.intention == "sleep" || act.intention == "household") {
    return &env.db.at(profile.home_poi);
  }
  if (act.intention == "work_study" && profile.work_poi.has_value()) {
    return &env.db.at(*profile.work_poi);
  }

  const std::string& category =
      act.location_category.empty() ? cfg.activity_poi_map.poi_category_for(act.intention)
                                    : act.location_category;
  try {
    std::vector<Candidate> candidates =
        candidate_pois(env.db, category, current->location, cfg.gravity);

    // Keep only destinations reachable inside the node's window; fall back to
    // the unfiltered set when that empties (the trip will then stretch).
    const auto permitted = permitted_modes(profile);
    std::vector<Candidate> reachable;
    for (const Candidate& c : candidates) {
      if (prism_feasible(current->location, c.poi->location, TimeOfDay::from_slot(clock_slot),
                         TimeOfDay::from_slot(deadline_slot), cfg.speeds, permitted)) {
        reachable.push_back(c);
      }
    }
    if (!reachable.empty()) {
      candidates = std::move(reachable);
    } else {
      notes.push_back("prism filter left no candidates for " + act.intention + " at " +
                      TimeOfDay::from_slot(clock_slot).to_string() + "; using unfiltered set");
    }

    const std::vector<double> probs = gravity_probabilities(candidates, cfg.gravity);
    return &sample_destination(probs, candidates, rng);
  } catch (const GroundingError& e) {
    notes.push_back("grounding failed for " + act.intention + ": " + e.what() +
                    "; staying at " + current->id);
    return current;
  }
}

}  // namespace

ActivityPlan random_plan(RngStream& rng, const ActivityVocabulary& vocab,
                         const ActivityPoiMap& poi_map) {
  ActivityPlan plan;
  PlannedActivity sleep;
  sleep.intention = vocab.contains("sleep") ? "sleep" : vocab.names().front();
  sleep.start = TimeOfDay::from_slot(0);
  sleep.location_category = poi_map.poi_category_for(sleep.intention);
  sleep.description = "(random plan)";
  plan.activities.push_back(sleep);

  const int extra = rng.uniform_int(3, 8);
  std::vector<PlannedActivity> drawn;
  for (int i = 0; i < extra; ++i) {
    PlannedActivity a;
    a.intention = vocab.names()[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(vocab.size()) - 1))];
    a.start = TimeOfDay::from_slot(rng.uniform_int(1, TimeOfDay::kLastSlot));
    a.location_category = poi_map.poi_category_for(a.intention);
    a.description = "(random plan)";
    drawn.push_back(std::move(a));
  }
  std::stable_sort(drawn.begin(), drawn.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (auto& a : drawn) plan.activities.push_back(std::move(a));
  return plan;
}

TransportMode random_mode(std::span<const TransportMode> available, RngStream& rng) {
  if (available.empty()) throw FeasibilityError("random_mode over an empty mode set");
  return available[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(available.size()) - 1))];
}

AgentDayResult simulate_agent_day(const PersonProfile& profile, const Environment& env,
                                  int day_index) {
  const SimulationConfig& cfg = env.config;
  RngStream rng(cfg.seed, profile.id, day_index);

  AgentDayResult result;
  result.agent_id = profile.id;
  result.day_index = day_index;

  PlanOutcome planned = obtain_plan(profile, env, env.backend, rng);
  result.narrative = std::move(planned.narrative);
  result.parse_report = std::move(planned.report);
  result.used_fallback_plan = planned.used_fallback;
  result.notes = std::move(planned.notes);

  ActivityPlan plan = std::move(planned.plan);
  if (plan.activities.empty()) {
    plan = fallback_plan(profile, cfg.vocabulary, cfg.activity_poi_map);
    result.used_fallback_plan = true;
  }
  result.plan = plan;

  const Poi* home = &env.db.at(profile.home_poi);
  const Poi* current = home;

  AgentState state;
  state.now = TimeOfDay::from_slot(0);
  state.current_poi = current->id;
  state.current_point = current->location;
  state.memory_cap = cfg.memory_cap;

  Trajectory& traj = result.trajectory;
  traj.agent_id = profile.id;
  traj.day_index = day_index;

  const auto permitted = permitted_modes(profile);
  int clock = 0;

  for (std::size_t t = 0; t < plan.activities.size(); ++t) {
    int planned_end =
        (t + 1 < plan.activities.size()) ? plan.activities[t + 1].start.slot() : TimeOfDay::kLastSlot;

    // (a) Follow-or-change gate; the first node has no completed predecessor.
    if (cfg.rethinking_enabled && t >= 1 &&
        should_rethink(profile.occupation, cfg.meo, rng)) {
      const RethinkDecision decision = rethink(state, plan.activities[t], profile, cfg.vocabulary,
                                               env.backend, env.templates, cfg.generation);
      DecisionLogEntry entry;
      entry.agent_id = profile.id;
      entry.day_index = day_index;
      entry.time = state.now;
      entry.action = decision.action;
      entry.new_activity = decision.new_activity;
      entry.duration_minutes = decision.duration_minutes;
      entry.reasoning = decision.reasoning;
      result.decisions.push_back(entry);
      state.remember({state.now, MemoryKind::rethought,
                      std::string(to_string(decision.action)) +
                          (decision.new_activity ? " -> " + *decision.new_activity : "") +
                          (decision.reasoning.empty() ? "" : " (" + decision.reasoning + ")")});
      if (decision.action == RethinkAction::change) {
        plan = apply_decision(plan, t, decision, cfg.activity_poi_map);
        planned_end = (t + 1 < plan.activities.size()) ? plan.activities[t + 1].start.slot()
                                                       : TimeOfDay::kLastSlot;
      }
    }

    const PlannedActivity& act = plan.activities[t];

    // (b) Ground the semantic activity to a POI.
    const Poi* dest =
        resolve_location(act, profile, current, clock, planned_end, env, rng, result.notes);

    // (c) Insert travel when the location changes, carved from the head of
    // the destination activity.
    std::optional<TransportMode> mode;
    int arrival = clock;
    if (dest->id != current->id) {
      const double distance = haversine_m(current->location, dest->location);
      std::vector<TransportMode> options =
          feasible_modes(current->location, dest->location, TimeOfDay::from_slot(clock),
                         TimeOfDay::from_slot(planned_end), cfg.speeds, permitted);
      TransportMode m;
      if (!options.empty()) {
        if (cfg.mode_choice == ModeChoiceSource::random) {
          m = random_mode(options, rng);
        } else {
          m = choose_mode(*current, *dest, act, profile, state, options, cfg.speeds, env.backend,
                          env.templates, cfg.generation)
                  .mode;
        }
      } else {
        // Nothing fits the planned window: ride the fastest permitted mode
        // and stretch the activity start to the arrival.
        m = fastest_mode(permitted, cfg.speeds);
        result.notes.push_back("prism violation at " + TimeOfDay::from_slot(clock).to_string() +
                               ": stretched " + act.intention + " (trip to " + dest->id + ")");
      }
      const double travel_s = distance / cfg.speeds.speed(m);
      const int travel_slots =
          std::max(1, static_cast<int>(std::ceil(travel_s / (TimeOfDay::kMinutesPerSlot * 60.0))));
      if (clock + travel_slots > TimeOfDay::kLastSlot) {
        result.notes.push_back("day end: trip to " + dest->id + " cannot complete; staying at " +
                               current->id);
        dest = current;
      } else {
        mode = m;
        arrival = clock + travel_slots;
        state.remember({TimeOfDay::from_slot(clock), MemoryKind::traveled,
                        "to " + dest->name + " by " + std::string(to_string(m))});
      }
    }

    if (arrival > planned_end) {
      result.notes.push_back("late arrival at " + TimeOfDay::from_slot(arrival).to_string() +
                             " squeezed " + act.intention + " to zero duration");
    }
    int end_slot = std::max(planned_end, arrival);
    if (t + 1 == plan.activities.size()) end_slot = TimeOfDay::kLastSlot;

    TrajectoryRecord record;
    record.activity = act;
    record.poi_id = dest->id;
    record.location = dest->location;
    record.mode = mode;
    record.start = TimeOfDay::from_slot(clock);
    record.end = TimeOfDay::from_slot(end_slot);
    traj.records.push_back(record);

    state.remember({TimeOfDay::from_slot(end_slot), MemoryKind::executed,
                    act.intention + " at " + dest->name});
    state.now = TimeOfDay::from_slot(end_slot);
    state.current_poi = dest->id;
    state.current_point = dest->location;
    state.plan_cursor = t + 1;
    state.last_activity = act;
    current = dest;
    clock = end_slot;

    if (clock >= TimeOfDay::kLastSlot && t + 1 < plan.activities.size()) {
      result.notes.push_back("day exhausted; dropped " +
                             std::to_string(plan.activities.size() - t - 1) + " remaining nodes");
      break;
    }
  }

  traj.records.back().end = TimeOfDay::from_slot(TimeOfDay::kLastSlot);
  return result;
}

Trajectory simulate_agent(const PersonProfile& profile, const Environment& env, int day_index) {
  return simulate_agent_day(profile, env, day_index).trajectory;
}

namespace {

AgentDayResult plan_agent_day(const PersonProfile& profile, const Environment& env, int day_index) {
  RngStream rng(env.config.seed, profile.id, day_index);
  AgentDayResult result;
  result.agent_id = profile.id;
  result.day_index = day_index;
  PlanOutcome planned = obtain_plan(profile, env, env.backend, rng);
  result.plan = std::move(planned.plan);
  result.narrative = std::move(planned.narrative);
  result.parse_report = std::move(planned.report);
  result.used_fallback_plan = planned.used_fallback;
  result.notes = std::move(planned.notes);
  return result;
}

RunArtifacts run_population(std::span<const PersonProfile> profiles, const Environment& env,
                            bool execute) {
  const auto start_time = std::chrono::steady_clock::now();
  const SimulationConfig& cfg = env.config;
  if (profiles.empty()) throw ConfigError("simulate_population needs at least one profile");
  if (cfg.day_count < 1) throw ConfigError("day_count must be >= 1");

  // Fail loudly at load time: MEO entries and anchor POIs for every agent.
  for (const auto& p : profiles) {
    if (!cfg.meo.contains(p.occupation)) {
      throw ConfigError("profile " + p.id + " has occupation \"" + p.occupation +
                        "\" with no MEO entry");
    }
    env.db.at(p.home_poi);
    if (p.work_poi) env.db.at(*p.work_poi);
  }
  cfg.activity_poi_map.validate_covers(cfg.vocabulary);

  CountingBackend counting(env.backend);
  const Environment counted_env{env.db, env.config, counting, env.templates};

  struct Slot {
    std::optional<AgentDayResult> result;
    std::string failure;
  };
  std::vector<Slot> slots(profiles.size() * static_cast<std::size_t>(cfg.day_count));

  const auto run_task = [&](std::size_t task) {
    const std::size_t agent_idx = task / static_cast<std::size_t>(cfg.day_count);
    const int day = static_cast<int>(task % static_cast<std::size_t>(cfg.day_count));
    try {
      slots[task].result = execute ? simulate_agent_day(profiles[agent_idx], counted_env, day)
                                   : plan_agent_day(profiles[agent_idx], counted_env, day);
    } catch (const std::exception& e) {
      slots[task].failure =
          "agent " + profiles[agent_idx].id + " day " + std::to_string(day) + ": " + e.what();
    }
  };

  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(slots.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < slots.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < slots.size(); i = next.fetch_add(1)) {
          run_task(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  RunArtifacts artifacts;
  artifacts.manifest.seed = cfg.seed;
  artifacts.manifest.config_digest = config_digest(cfg);
  artifacts.manifest.agent_count = static_cast<int>(profiles.size());

  for (auto& slot : slots) {
    if (slot.result) {
      artifacts.results.push_back(std::move(*slot.result));
    } else {
      artifacts.manifest.failures.push_back(slot.failure);
    }
  }
  std::sort(artifacts.results.begin(), artifacts.results.end(), [](const auto& a, const auto& b) {
    if (a.agent_id != b.agent_id) return a.agent_id < b.agent_id;
    return a.day_index < b.day_index;
  });

  for (const auto& r : artifacts.results) {
    ++artifacts.manifest.trajectory_count;
    if (r.used_fallback_plan) {
      ++artifacts.manifest.fallback_plan_count;
      artifacts.manifest.failures.push_back("agent " + r.agent_id + " day " +
                                            std::to_string(r.day_index) + ": fallback plan used");
    }
  }
  artifacts.manifest.backend_calls = counting.counts();
  artifacts.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return artifacts;
}

}  // namespace

RunArtifacts simulate_population(std::span<const PersonProfile> profiles, const Environment& env) {
  return run_population(profiles, env, /*execute=*/true);
}

RunArtifacts plan_population(std::span<const PersonProfile> profiles, const Environment& env) {
  return run_population(profiles, env, /*execute=*/false);
}

}  // namespace mobgen
