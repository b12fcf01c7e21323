#include "mobgen/planner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mobgen/errors.hpp"

namespace mobgen {

namespace {

std::string now_utc_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[24];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_repair(std::vector<std::string>& repairs, const std::string& kind) {
  if (std::find(repairs.begin(), repairs.end(), kind) == repairs.end()) repairs.push_back(kind);
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

PlanParseReport rejected(std::string reason) {
  PlanParseReport r;
  r.rejected = true;
  r.reject_reason = std::move(reason);
  return r;
}

/// One validated reply -> report, or a rejected report carrying the reason
/// used for the repair round-trip.
PlanParseReport validate_once(const std::string& reply, const ActivityVocabulary& vocab,
                              const ActivityPoiMap& poi_map) {
  std::string block;
  try {
    block = extract_json_block(reply);
  } catch (const ExtractError& e) {
    return rejected(e.what());
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(block);
  } catch (const nlohmann::json::exception& e) {
    return rejected(std::string("extracted block is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("plan")) {
    return rejected("reply must be a JSON object with a \"plan\" key");
  }
  const auto& plan_node = j["plan"];
  if (!plan_node.is_array() || plan_node.empty()) {
    return rejected("\"plan\" must be a non-empty array of activities");
  }

  PlanParseReport report;
  for (std::size_t i = 0; i < plan_node.size(); ++i) {
    const auto& item = plan_node[i];
    if (!item.is_object() || !item.contains("activity") || !item.contains("start_time") ||
        !item["activity"].is_string() || !item["start_time"].is_string()) {
      return rejected("plan item " + std::to_string(i) +
                      " must be an object with string \"activity\" and \"start_time\"");
    }
    const std::string raw_activity = item["activity"].get<std::string>();
    const auto coerced = vocab.coerce(raw_activity);
    if (!coerced) {
      return rejected("activity \"" + raw_activity + "\" is not one of: " + vocab.joined());
    }
    if (*coerced != raw_activity) add_repair(report.repairs, "category-coerced");

    const std::string raw_time = item["start_time"].get<std::string>();
    TimeOfDay start;
    try {
      start = TimeOfDay::parse(trimmed(raw_time));
    } catch (const ParseError& e) {
      return rejected(std::string("plan item ") + std::to_string(i) + ": " + e.what());
    }
    // Snapping repair only when the stated minute was off the grid.
    {
      const std::string t = trimmed(raw_time);
      const std::size_t colon = t.find(':');
      const int stated = std::stoi(t.substr(0, colon)) * 60 + std::stoi(t.substr(colon + 1));
      if (stated != start.minutes()) add_repair(report.repairs, "snapped-to-grid");
    }

    PlannedActivity a;
    a.intention = *coerced;
    a.start = start;
    a.location_category = poi_map.poi_category_for(a.intention);
    a.description = item.value("description", std::string{});
    report.plan.activities.push_back(std::move(a));
  }

  auto& acts = report.plan.activities;
  const bool sorted = std::is_sorted(acts.begin(), acts.end(),
                                     [](const auto& a, const auto& b) { return a.start < b.start; });
  if (!sorted) {
    std::stable_sort(acts.begin(), acts.end(),
                     [](const auto& a, const auto& b) { return a.start < b.start; });
    add_repair(report.repairs, "re-sorted");
  }

  if (acts.front().intention != "sleep") {
    PlannedActivity sleep;
    sleep.intention = "sleep";
    sleep.start = TimeOfDay::from_slot(0);
    sleep.location_category = poi_map.poi_category_for("sleep");
    sleep.description = "(injected leading sleep)";
    acts.insert(acts.begin(), std::move(sleep));
    add_repair(report.repairs, "injected-sleep");
  } else if (acts.front().start.slot() != 0) {
    acts.front().start = TimeOfDay::from_slot(0);
    add_repair(report.repairs, "injected-sleep");
  }

  if (acts.size() < 2) {
    return rejected("plan must contain at least 2 activities");
  }
  if (auto violation = report.plan.invariant_violation(vocab)) {
    return rejected("plan violates invariants after normalization: " + *violation);
  }
  return report;
}

PlanParseReport run_with_repair(Backend& backend, const RenderedPrompt& prompt,
                                const GenerationParams& params, std::string_view template_name,
                                const ActivityVocabulary& vocab, const ActivityPoiMap& poi_map) {
  const std::string reply =
      backend.complete(prompt.system_text, prompt.user_text, params, template_name);
  PlanParseReport report = validate_plan_reply(reply, vocab, poi_map);
  if (!report.rejected) return report;

  const std::string correction = prompt.user_text +
                                 "\n\n**Correction Required:**\nYour previous reply could not be "
                                 "used: " +
                                 report.reject_reason +
                                 "\nRespond again with only the corrected JSON object.";
  const std::string retry = backend.complete(prompt.system_text, correction, params, template_name);
  PlanParseReport second = validate_plan_reply(retry, vocab, poi_map);
  second.reprompted = true;
  return second;
}

}  // namespace

std::string profile_text(const PersonProfile& p) {
  std::ostringstream out;
  out << "**Character Profile:**\n";
  out << "- Age: " << p.age << "\n";
  out << "- Gender: " << to_string(p.gender) << "\n";
  out << "- Occupation: " << p.occupation << "\n";
  out << "- Income: " << to_string(p.income_band) << "\n";
  out << "- Education: " << to_string(p.education) << "\n";
  out << "- Owns a car: " << (p.owns_car ? "yes" : "no") << "\n";
  out << "- Owns an e-bike: " << (p.owns_ebike ? "yes" : "no") << "\n";
  out << "- Work status: "
      << (p.work_poi.has_value() ? "employed (has a regular workplace)"
                                 : "no fixed workplace");
  return out.str();
}

std::string plan_example_json() {
  return R"({"plan": [{"activity": "sleep", "start_time": "00:00", "description": "Sleeping at home."}, {"activity": "work_study", "start_time": "09:00", "description": "Working at the office."}, {"activity": "sleep", "start_time": "22:30", "description": "Going to bed."}]})";
}

Narrative generate_narrative(const PersonProfile& profile, Backend& backend,
                             const TemplateLibrary& templates, const GenerationParams& params) {
  const Bindings bindings = {{"character_profile", profile_text(profile)}};
  const RenderedPrompt prompt = render(templates.get(templates::kNarrative), bindings);
  const std::string text =
      backend.complete(prompt.system_text, prompt.user_text, params, templates::kNarrative);
  if (trimmed(text).empty()) {
    throw BackendError("narrative backend returned empty text for agent " + profile.id);
  }
  Narrative n;
  n.text = text;
  n.profile_id = profile.id;
  n.backend_kind = backend.kind();
  n.temperature = params.temperature;
  n.timestamp = now_utc_iso8601();
  return n;
}

PlanParseReport validate_plan_reply(const std::string& reply, const ActivityVocabulary& vocab,
                                    const ActivityPoiMap& poi_map) {
  return validate_once(reply, vocab, poi_map);
}

PlanParseReport parse_plan(const Narrative& narrative, const ActivityVocabulary& vocab,
                           const ActivityPoiMap& poi_map, Backend& backend,
                           const TemplateLibrary& templates, const GenerationParams& params) {
  if (trimmed(narrative.text).empty()) {
    return rejected("narrative is empty");
  }
  const Bindings bindings = {
      {"activity_categories", vocab.joined()},
      {"narrative", narrative.text},
      {"example_json", plan_example_json()},
  };
  const RenderedPrompt prompt = render(templates.get(templates::kPlanExtract), bindings);
  GenerationParams extraction = params;
  extraction.temperature = 0.0;  // determinism for extraction
  return run_with_repair(backend, prompt, extraction, templates::kPlanExtract, vocab, poi_map);
}

PlanParseReport direct_plan(const PersonProfile& profile, const ActivityVocabulary& vocab,
                            const ActivityPoiMap& poi_map, Backend& backend,
                            const TemplateLibrary& templates, const GenerationParams& params) {
  const Bindings bindings = {
      {"character_profile", profile_text(profile)},
      {"activity_categories", vocab.joined()},
      {"example_json", plan_example_json()},
  };
  const RenderedPrompt prompt = render(templates.get(templates::kDirectPlan), bindings);
  return run_with_repair(backend, prompt, params, templates::kDirectPlan, vocab, poi_map);
}

ActivityPlan fallback_plan(const PersonProfile& profile, const ActivityVocabulary& vocab,
                           const ActivityPoiMap& poi_map) {
  const auto pick = [&](std::string_view preferred) -> std::string {
    if (vocab.contains(preferred)) return std::string(preferred);
    return vocab.names().front();
  };
  const bool works = profile.work_poi.has_value();
  struct Node {
    std::string intention;
    const char* time;
    const char* what;
  };
  const std::vector<Node> nodes = {
      {pick("sleep"), "00:00", "Sleeping at home."},
      {works ? pick("work_study") : pick("leisure"), works ? "08:00" : "09:00",
       works ? "At the usual workplace." : "A quiet morning."},
      {pick("eating"), "12:00", "Lunch."},
      {pick("leisure"), "18:00", "Evening leisure."},
      {pick("sleep"), "22:00", "Going to bed."},
  };
  ActivityPlan plan;
  for (const auto& n : nodes) {
    PlannedActivity a;
    a.intention = n.intention;
    a.start = TimeOfDay::parse(n.time);
    a.location_category = poi_map.poi_category_for(a.intention);
    a.description = n.what;
    plan.activities.push_back(std::move(a));
  }
  return plan;
}

std::vector<TimedActivity> plan_durations(const ActivityPlan& plan, TimeOfDay day_end) {
  std::vector<TimedActivity> out;
  out.reserve(plan.activities.size());
  for (std::size_t i = 0; i < plan.activities.size(); ++i) {
    TimedActivity t;
    t.activity = plan.activities[i];
    t.start = plan.activities[i].start;
    t.end = (i + 1 < plan.activities.size()) ? plan.activities[i + 1].start : day_end;
    if (t.end < t.start) t.end = t.start;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace mobgen
