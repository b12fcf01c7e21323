#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "mobgen/backend.hpp"
#include "mobgen/errors.hpp"
#include "mobgen/planner.hpp"
#include "testutil.hpp"

using namespace mobgen;
namespace tu = mobgen::testutil;

namespace {

const ActivityVocabulary kVocab = ActivityVocabulary::defaults();
const ActivityPoiMap kMap = ActivityPoiMap::defaults();

bool has_repair(const PlanParseReport& r, const std::string& kind) {
  return std::find(r.repairs.begin(), r.repairs.end(), kind) != r.repairs.end();
}

}  // namespace

TEST_CASE("generate_narrative returns the scripted diary verbatim") {
  MockBackend mock({{"narrative", "Occupation: Retired", tu::diary_home_day()},
                    {"narrative", "", tu::generic_diary()}});
  const auto retiree = tu::make_retiree();
  const Narrative n =
      generate_narrative(retiree, mock, TemplateLibrary::builtin(), GenerationParams{});
  CHECK(n.text == tu::diary_home_day());
  CHECK(n.profile_id == retiree.id);
  CHECK(n.backend_kind == "mock");
}

TEST_CASE("generate_narrative renders the writer prompt with the profile") {
  // Capture the rendered prompt through a recording backend.
  struct Recorder final : Backend {
    std::string last_system, last_user;
    std::string complete(const std::string& s, const std::string& u, const GenerationParams&,
                         std::string_view) override {
      last_system = s;
      last_user = u;
      return "a fine day";
    }
    std::string kind() const override { return "mock"; }
  } recorder;

  auto profile = tu::make_lecturer();
  profile.owns_car = true;
  generate_narrative(profile, recorder, TemplateLibrary::builtin(), GenerationParams{});
  CHECK(recorder.last_system.find("first-person daily log") != std::string::npos);
  CHECK(recorder.last_user.find("Owns a car: yes") != std::string::npos);
}

TEST_CASE("parse_plan accepts a clean reply with zero repairs") {
  const std::string reply =
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":"slept"},)"
      R"({"activity":"work_study","start_time":"08:00","description":"office"}]})";
  MockBackend mock({{"plan_extract", "", reply}});
  const Narrative n{"some narrative", "a1", "mock", 1.0, ""};
  const PlanParseReport report =
      parse_plan(n, kVocab, kMap, mock, TemplateLibrary::builtin(), GenerationParams{});
  REQUIRE_FALSE(report.rejected);
  CHECK(report.repairs.empty());
  CHECK_FALSE(report.reprompted);
  REQUIRE(report.plan.activities.size() == 2);
  CHECK(report.plan.activities[0].intention == "sleep");
  CHECK(report.plan.activities[1].intention == "work_study");
  CHECK(report.plan.activities[1].start.to_string() == "08:00");
  CHECK(report.plan.activities[1].location_category == "office");
  CHECK_FALSE(report.plan.invariant_violation(kVocab).has_value());
}

TEST_CASE("parse_plan on the lecturer diary lands the documented anchors") {
  MockBackend mock({{"plan_extract", "the commute began in a reliable car",
                     tu::lecturer_parse_plan_json()},
                    {"plan_extract", "", tu::generic_plan_json()}});
  const Narrative n{tu::diary_lecturer_day(), "lect", "mock", 1.0, ""};
  const PlanParseReport report =
      parse_plan(n, kVocab, kMap, mock, TemplateLibrary::builtin(), GenerationParams{});
  REQUIRE_FALSE(report.rejected);
  bool work_at_8 = false, eating_at_noon = false;
  for (const auto& a : report.plan.activities) {
    if (a.intention == "work_study" && a.start.to_string() == "08:00") work_at_8 = true;
    if (a.intention == "eating" && a.start.to_string() == "12:00") eating_at_noon = true;
  }
  CHECK(work_at_8);
  CHECK(eating_at_noon);
}

TEST_CASE("parse_plan re-sorts out-of-order activities and records the repair") {
  const std::string reply =
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"eating","start_time":"09:00","description":"brunch"},)"
      R"({"activity":"household","start_time":"07:00","description":"chores"}]})";
  const PlanParseReport report = validate_plan_reply(reply, kVocab, kMap);
  REQUIRE_FALSE(report.rejected);
  CHECK(has_repair(report, "re-sorted"));
  CHECK(std::is_sorted(report.plan.activities.begin(), report.plan.activities.end(),
                       [](const auto& a, const auto& b) { return a.start < b.start; }));
}

TEST_CASE("parse_plan injects a missing leading sleep and snaps off-grid times") {
  const std::string reply =
      R"({"plan":[{"activity":"household","start_time":"07:10","description":"chores"},)"
      R"({"activity":"work_study","start_time":"09:00","description":"work"}]})";
  const PlanParseReport report = validate_plan_reply(reply, kVocab, kMap);
  REQUIRE_FALSE(report.rejected);
  CHECK(has_repair(report, "injected-sleep"));
  CHECK(has_repair(report, "snapped-to-grid"));
  CHECK(report.plan.activities.front().intention == "sleep");
  CHECK(report.plan.activities.front().start.slot() == 0);
  CHECK(report.plan.activities[1].start.to_string() == "07:15");
}

TEST_CASE("parse_plan coerces category case and rejects unknown categories") {
  const std::string mixed =
      R"({"plan":[{"activity":"Sleep","start_time":"00:00","description":""},)"
      R"({"activity":"EATING","start_time":"12:00","description":""}]})";
  const PlanParseReport ok = validate_plan_reply(mixed, kVocab, kMap);
  REQUIRE_FALSE(ok.rejected);
  CHECK(has_repair(ok, "category-coerced"));
  CHECK(ok.plan.activities[1].intention == "eating");

  const std::string alien =
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"skydiving","start_time":"12:00","description":""}]})";
  const PlanParseReport bad = validate_plan_reply(alien, kVocab, kMap);
  CHECK(bad.rejected);
  CHECK(bad.reject_reason.find("skydiving") != std::string::npos);
}

TEST_CASE("parse_plan runs one repair round-trip, then rejects") {
  // A backend that always replies with garbage: the first failure re-prompts
  // once (with the validator's error appended), the second failure rejects.
  struct Counting final : Backend {
    int calls = 0;
    std::string last_user;
    std::string complete(const std::string&, const std::string& u, const GenerationParams&,
                         std::string_view) override {
      ++calls;
      last_user = u;
      return "no json at all";
    }
    std::string kind() const override { return "mock"; }
  } counting;

  const Narrative n{"text", "a1", "mock", 1.0, ""};
  const PlanParseReport report =
      parse_plan(n, kVocab, kMap, counting, TemplateLibrary::builtin(), GenerationParams{});
  CHECK(report.rejected);
  CHECK(report.reprompted);
  CHECK(counting.calls == 2);
  CHECK(counting.last_user.find("Correction Required") != std::string::npos);
  CHECK(counting.last_user.find("no balanced JSON object") != std::string::npos);
}

TEST_CASE("parse_plan recovers when the repair round-trip succeeds") {
  struct Flaky final : Backend {
    int calls = 0;
    std::string complete(const std::string&, const std::string&, const GenerationParams&,
                         std::string_view) override {
      ++calls;
      if (calls == 1) return "still thinking...";
      return R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
             R"({"activity":"leisure","start_time":"10:00","description":""}]})";
    }
    std::string kind() const override { return "mock"; }
  } flaky;
  const Narrative n{"text", "a1", "mock", 1.0, ""};
  const PlanParseReport report =
      parse_plan(n, kVocab, kMap, flaky, TemplateLibrary::builtin(), GenerationParams{});
  CHECK_FALSE(report.rejected);
  CHECK(report.reprompted);
  CHECK(flaky.calls == 2);
}

TEST_CASE("parse_plan extraction runs at temperature zero") {
  struct TempProbe final : Backend {
    double seen = -1;
    std::string complete(const std::string&, const std::string&, const GenerationParams& p,
                         std::string_view) override {
      seen = p.temperature;
      return R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
             R"({"activity":"leisure","start_time":"10:00","description":""}]})";
    }
    std::string kind() const override { return "mock"; }
  } probe;
  GenerationParams params;
  params.temperature = 1.0;
  const Narrative n{"text", "a1", "mock", 1.0, ""};
  parse_plan(n, kVocab, kMap, probe, TemplateLibrary::builtin(), params);
  CHECK(probe.seen == 0.0);
}

TEST_CASE("parse_plan is deterministic under the mock backend") {
  MockBackend mock({{"plan_extract", "", tu::generic_plan_json()}});
  const Narrative n{"same narrative", "a1", "mock", 1.0, ""};
  const auto a = parse_plan(n, kVocab, kMap, mock, TemplateLibrary::builtin(), GenerationParams{});
  const auto b = parse_plan(n, kVocab, kMap, mock, TemplateLibrary::builtin(), GenerationParams{});
  REQUIRE(a.plan.activities.size() == b.plan.activities.size());
  for (std::size_t i = 0; i < a.plan.activities.size(); ++i) {
    CHECK(a.plan.activities[i].intention == b.plan.activities[i].intention);
    CHECK(a.plan.activities[i].start == b.plan.activities[i].start);
  }
}

TEST_CASE("direct_plan prompts once without a narrative stage") {
  struct TemplateProbe final : Backend {
    std::vector<std::string> templates_seen;
    std::string complete(const std::string&, const std::string&, const GenerationParams&,
                         std::string_view tpl) override {
      templates_seen.emplace_back(tpl);
      return tu::direct_plan_json();
    }
    std::string kind() const override { return "mock"; }
  } probe;
  const PlanParseReport report = direct_plan(tu::make_lecturer(), kVocab, kMap, probe,
                                             TemplateLibrary::builtin(), GenerationParams{});
  CHECK_FALSE(report.rejected);
  REQUIRE(probe.templates_seen.size() == 1);
  CHECK(probe.templates_seen[0] == "direct_plan");
}

TEST_CASE("fallback plan is valid for working and non-working profiles") {
  const auto lecturer_plan = fallback_plan(tu::make_lecturer(), kVocab, kMap);
  CHECK_FALSE(lecturer_plan.invariant_violation(kVocab).has_value());
  CHECK(lecturer_plan.activities[1].intention == "work_study");

  const auto retiree_plan = fallback_plan(tu::make_retiree(), kVocab, kMap);
  CHECK_FALSE(retiree_plan.invariant_violation(kVocab).has_value());
  CHECK(retiree_plan.activities[1].intention == "leisure");
}

TEST_CASE("plan_durations chains intervals and flags zero-length nodes") {
  const auto mk = [](const char* intent, const char* time) {
    PlannedActivity a;
    a.intention = intent;
    a.start = TimeOfDay::parse(time);
    return a;
  };
  SUBCASE("two activities") {
    ActivityPlan plan{{mk("sleep", "00:00"), mk("work_study", "08:00")}};
    const auto spans = plan_durations(plan, day_end());
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].start.to_string() == "00:00");
    CHECK(spans[0].end.to_string() == "08:00");
    CHECK(spans[1].end.to_string() == "23:45");
    CHECK_FALSE(spans[0].zero_length());
  }
  SUBCASE("single sleep spans the whole day") {
    ActivityPlan plan{{mk("sleep", "00:00")}};
    const auto spans = plan_durations(plan, day_end());
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].start.slot() == 0);
    CHECK(spans[0].end.slot() == 95);
  }
  SUBCASE("equal consecutive starts give a zero-length first interval") {
    ActivityPlan plan{{mk("sleep", "00:00"), mk("household", "08:00"), mk("errand", "08:00")}};
    const auto spans = plan_durations(plan, day_end());
    REQUIRE(spans.size() == 3);
    CHECK(spans[1].zero_length());
    CHECK_FALSE(spans[2].zero_length());
  }
  SUBCASE("exhaustive small plans never produce end < start") {
    // Oracle: all plans of 3 activities over a coarse slot lattice.
    for (int s1 = 0; s1 <= 95; s1 += 19) {
      for (int s2 = s1; s2 <= 95; s2 += 19) {
        ActivityPlan plan{{mk("sleep", "00:00"),
                           {"eating", TimeOfDay::from_slot(s1), "", ""},
                           {"leisure", TimeOfDay::from_slot(s2), "", ""}}};
        for (const auto& span : plan_durations(plan, day_end())) {
          CHECK(span.end >= span.start);
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Fixture corpus: wrapped/fenced/noisy replies must all parse; malformed
// ones must reject without crashing.
// ---------------------------------------------------------------------------

TEST_CASE("plan reply corpus: every valid fixture is accepted") {
  int count = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(tu::data_dir() / "plan_replies")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("valid_", 0) != 0) continue;
    ++count;
    const PlanParseReport report =
        validate_plan_reply(tu::read_file(entry.path()), kVocab, kMap);
    CAPTURE(name);
    CHECK_FALSE(report.rejected);
    CHECK_FALSE(report.plan.invariant_violation(kVocab).has_value());
  }
  CHECK(count == 25);
}

TEST_CASE("plan reply corpus: malformed fixtures reject with a reason") {
  int count = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(tu::data_dir() / "plan_replies")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("malformed_", 0) != 0) continue;
    ++count;
    const PlanParseReport report =
        validate_plan_reply(tu::read_file(entry.path()), kVocab, kMap);
    CAPTURE(name);
    CHECK(report.rejected);
    CHECK_FALSE(report.reject_reason.empty());
  }
  CHECK(count == 6);
}
