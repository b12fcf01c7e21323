#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "mobgen/engine.hpp"
#include "mobgen/spatial.hpp"
#include "testutil.hpp"

using namespace mobgen;
namespace tu = mobgen::testutil;

// Tight-window and end-of-day trips: the paths where a plan's schedule and
// physical reachability collide.

namespace {

std::vector<Poi> sparse_city(double restaurant_km_east) {
  const double deg_per_km = 1000.0 / (kEarthRadiusM * 3.14159265358979323846 / 180.0);
  return {
      {"home_0", "home_0", "home", {0.0, 0.0}, 1.0},
      {"park_0", "park_0", "park", {0.0005, 0.0}, 1.0},
      {"diner_0", "diner_0", "restaurant", {0.0, restaurant_km_east * deg_per_km}, 1.0},
  };
}

PersonProfile carless_profile() {
  PersonProfile p;
  p.id = "walker_1";
  p.age = 30;
  p.occupation = "Office Worker";
  p.owns_car = false;
  p.owns_ebike = false;
  p.home_poi = "home_0";
  return p;
}

MockBackend scripted_plan(const std::string& plan_json) {
  return MockBackend({
      {"narrative", "", "a short day"},
      {"plan_extract", "", plan_json},
      {"mode_choice", "", R"({"choice": "Walking", "reasoning": "default"})"},
      {"", "", "OK"},
  });
}

}  // namespace

TEST_CASE("a window too small for any mode stretches the activity to the arrival") {
  // Lunch 10 km east with a single 15-minute slot before the next node: even
  // the fastest permitted mode (subway, 11 m/s -> 909 s) needs two slots.
  PoiDatabase db(sparse_city(10.0));
  SimulationConfig config = tu::make_config(1);
  config.rethinking_enabled = false;
  MockBackend mock = scripted_plan(
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"eating","start_time":"12:00","description":"far lunch"},)"
      R"({"activity":"leisure","start_time":"12:15","description":"walk"},)"
      R"({"activity":"sleep","start_time":"14:00","description":""}]})");
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, mock, templates};

  const AgentDayResult result = simulate_agent_day(carless_profile(), env, 0);
  CHECK_FALSE(trajectory_structural_violation(result.trajectory).has_value());
  CHECK_FALSE(prism_violation(result.trajectory, config.speeds).has_value());

  // The eating record rides the fastest permitted mode past its planned end.
  const auto& records = result.trajectory.records;
  REQUIRE(records.size() >= 3);
  const auto& eating = records[1];
  CHECK(eating.activity.intention == "eating");
  CHECK(eating.poi_id == "diner_0");
  CHECK(eating.mode == TransportMode::subway);
  CHECK(eating.start == TimeOfDay::parse("12:00"));
  CHECK(eating.end == TimeOfDay::parse("12:30"));  // stretched past the 12:15 plan
  // The successor starts late but the day stays consistent.
  CHECK(records[2].start == TimeOfDay::parse("12:30"));
  bool noted = false;
  for (const auto& n : result.notes) noted = noted || n.find("prism violation") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("a trip that cannot finish before day end keeps the agent in place") {
  // 40 km east at 23:30: nothing reaches it before 23:45.
  PoiDatabase db(sparse_city(40.0));
  SimulationConfig config = tu::make_config(1);
  config.rethinking_enabled = false;
  MockBackend mock = scripted_plan(
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"eating","start_time":"23:30","description":"midnight snack"}]})");
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, mock, templates};

  const AgentDayResult result = simulate_agent_day(carless_profile(), env, 0);
  CHECK_FALSE(trajectory_structural_violation(result.trajectory).has_value());
  CHECK_FALSE(prism_violation(result.trajectory, config.speeds).has_value());
  const auto& last = result.trajectory.records.back();
  CHECK(last.poi_id == "home_0");
  CHECK_FALSE(last.mode.has_value());
  bool noted = false;
  for (const auto& n : result.notes) noted = noted || n.find("day end") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("an empty prism filter falls back to the unfiltered candidate set") {
  // The only restaurant is 10 km out and the eating node has one slot, so
  // the feasibility filter strikes every candidate; grounding must still
  // resolve (and the trip then stretches).
  PoiDatabase db(sparse_city(10.0));
  SimulationConfig config = tu::make_config(1);
  config.rethinking_enabled = false;
  MockBackend mock = scripted_plan(
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"eating","start_time":"12:00","description":""},)"
      R"({"activity":"leisure","start_time":"12:15","description":""},)"
      R"({"activity":"sleep","start_time":"14:00","description":""}]})");
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, mock, templates};

  const AgentDayResult result = simulate_agent_day(carless_profile(), env, 0);
  bool filter_note = false;
  for (const auto& n : result.notes) {
    filter_note = filter_note || n.find("prism filter left no candidates") != std::string::npos;
  }
  CHECK(filter_note);
  CHECK(result.trajectory.records[1].poi_id == "diner_0");
}

TEST_CASE("a missing POI category grounds in place and the run continues") {
  // No shop anywhere: the shopping node stays wherever the agent is.
  PoiDatabase db(sparse_city(2.0));
  SimulationConfig config = tu::make_config(1);
  config.rethinking_enabled = false;
  MockBackend mock = scripted_plan(
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"shopping","start_time":"10:00","description":"no shops exist"},)"
      R"({"activity":"sleep","start_time":"20:00","description":""}]})");
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, mock, templates};

  const AgentDayResult result = simulate_agent_day(carless_profile(), env, 0);
  CHECK_FALSE(trajectory_structural_violation(result.trajectory).has_value());
  REQUIRE(result.trajectory.records.size() == 3);
  CHECK(result.trajectory.records[1].poi_id == "home_0");
  CHECK_FALSE(result.trajectory.records[1].mode.has_value());
  bool noted = false;
  for (const auto& n : result.notes) noted = noted || n.find("grounding failed") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("zero-budget nodes behind schedule collapse without breaking the tiling") {
  // Three nodes share 12:00; the middle ones execute as zero-length records.
  PoiDatabase db(sparse_city(0.3));
  SimulationConfig config = tu::make_config(1);
  config.rethinking_enabled = false;
  MockBackend mock = scripted_plan(
      R"({"plan":[{"activity":"sleep","start_time":"00:00","description":""},)"
      R"({"activity":"household","start_time":"12:00","description":""},)"
      R"({"activity":"household","start_time":"12:00","description":""},)"
      R"({"activity":"sleep","start_time":"12:00","description":""}]})");
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, mock, templates};

  const AgentDayResult result = simulate_agent_day(carless_profile(), env, 0);
  CHECK_FALSE(trajectory_structural_violation(result.trajectory).has_value());
  REQUIRE(result.trajectory.records.size() == 4);
  CHECK(result.trajectory.records[1].start == result.trajectory.records[1].end);
  CHECK(result.trajectory.records.back().end.slot() == 95);
}
