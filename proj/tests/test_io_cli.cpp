#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "mobgen/errors.hpp"
#include "mobgen/io.hpp"
#include "testutil.hpp"

using namespace mobgen;
namespace tu = mobgen::testutil;
using nlohmann::json;

namespace {

int run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"mobgen"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

TEST_CASE("profile ingestion: CSV happy path with synonym normalization") {
  const auto dir = tu::make_temp_dir("profiles");
  tu::write_file(dir / "p.csv",
                 "id,age,gender,occupation,income_band,education,owns_car,owns_ebike,home_poi,work_poi\n"
                 "a1,34,female,factory worker,low,secondary,true,false,home_00,office_00\n"
                 "a2,61,male,Retired,middle,primary,false,false,home_01,\n"
                 "a3,29,other,freelancer,high,master,true,true,home_02,office_01\n");
  const ProfilesIngest ingest = ingest_profiles(dir / "p.csv");
  REQUIRE(ingest.profiles.size() == 3);
  CHECK(ingest.report.accepted == 3);
  CHECK(ingest.profiles[0].occupation == "Factory Worker");
  CHECK(ingest.profiles[2].occupation == "Business Owner");
  CHECK(ingest.profiles[0].owns_car);
  CHECK_FALSE(ingest.profiles[1].work_poi.has_value());
  CHECK(ingest.warnings.empty());

  MeoTable meo = MeoTable::defaults();
  CHECK(apply_profile_occupations(meo, ingest.profiles).empty());
  CHECK(meo.at(ingest.profiles[0].occupation) == 0.30);
}

TEST_CASE("profile ingestion: unmapped occupations register at the 0.50 band with a warning") {
  const auto dir = tu::make_temp_dir("profiles");
  tu::write_file(dir / "p.csv",
                 "id,age,gender,occupation,income_band,education,owns_car,owns_ebike,home_poi\n"
                 "a1,40,female,Street Artist,low,other,false,false,home_00\n");
  const ProfilesIngest ingest = ingest_profiles(dir / "p.csv");
  REQUIRE(ingest.profiles.size() == 1);
  CHECK(ingest.profiles[0].occupation == "Street Artist");
  REQUIRE(ingest.warnings.size() == 1);
  CHECK(ingest.warnings[0].find("Street Artist") != std::string::npos);

  MeoTable meo = MeoTable::defaults();
  const auto added = apply_profile_occupations(meo, ingest.profiles);
  REQUIRE(added.size() == 1);
  CHECK(meo.at("Street Artist") == 0.50);
}

TEST_CASE("profile ingestion: rejects bad rows with reasons, never silently drops") {
  const auto dir = tu::make_temp_dir("profiles");
  tu::write_file(dir / "p.csv",
                 "id,age,gender,occupation,income_band,education,owns_car,owns_ebike,home_poi\n"
                 "a1,40,female,Retired,low,other,false,false,\n"       // missing home_poi
                 "a2,-3,male,Student,low,secondary,false,false,home_0\n"  // bad age
                 ",40,male,Student,low,secondary,false,false,home_0\n"    // missing id
                 "ok,40,male,Student,low,secondary,false,false,home_0\n");
  const ProfilesIngest ingest = ingest_profiles(dir / "p.csv");
  CHECK(ingest.profiles.size() == 1);
  CHECK(ingest.report.accepted == 1);
  REQUIRE(ingest.report.rejected.size() == 3);
  CHECK(ingest.report.rejected[0].id == "a1");
  CHECK(ingest.report.rejected[0].reason.find("home_poi") != std::string::npos);
}

TEST_CASE("profile ingestion: empty files and missing columns are errors") {
  const auto dir = tu::make_temp_dir("profiles");
  tu::write_file(dir / "empty.csv", "");
  CHECK_THROWS_AS(ingest_profiles(dir / "empty.csv"), ParseError);
  tu::write_file(dir / "header_only.csv",
                 "id,age,gender,occupation,income_band,education,owns_car,owns_ebike,home_poi\n");
  CHECK_THROWS_AS(ingest_profiles(dir / "header_only.csv"), ParseError);
  tu::write_file(dir / "no_occ.csv", "id,age\n1,2\n");
  CHECK_THROWS_AS(ingest_profiles(dir / "no_occ.csv"), ParseError);
  CHECK_THROWS_AS(ingest_profiles(dir / "missing.csv"), ParseError);
}

TEST_CASE("profile ingestion: JSONL records work and re-ingesting output is stable") {
  const auto dir = tu::make_temp_dir("profiles");
  tu::write_file(dir / "p.jsonl",
                 R"({"id":"a1","age":30,"gender":"female","occupation":"engineer","income_band":"middle","education":"bachelor","owns_car":true,"owns_ebike":false,"home_poi":"home_00","work_poi":"office_00"})"
                 "\n");
  const ProfilesIngest first = ingest_profiles(dir / "p.jsonl");
  REQUIRE(first.profiles.size() == 1);
  CHECK(first.profiles[0].occupation == "Engineer");

  // Idempotence: write the accepted profile back out, ingest again.
  const auto& p = first.profiles[0];
  tu::write_file(dir / "round.jsonl",
                 json{{"id", p.id},
                      {"age", p.age},
                      {"gender", std::string(to_string(p.gender))},
                      {"occupation", p.occupation},
                      {"income_band", std::string(to_string(p.income_band))},
                      {"education", std::string(to_string(p.education))},
                      {"owns_car", p.owns_car},
                      {"owns_ebike", p.owns_ebike},
                      {"home_poi", p.home_poi},
                      {"work_poi", *p.work_poi}}
                     .dump() +
                     "\n");
  const ProfilesIngest second = ingest_profiles(dir / "round.jsonl");
  REQUIRE(second.profiles.size() == 1);
  CHECK(second.profiles[0].id == p.id);
  CHECK(second.profiles[0].occupation == p.occupation);
  CHECK(second.profiles[0].age == p.age);
}

// ---------------------------------------------------------------------------
// Diaries
// ---------------------------------------------------------------------------

namespace {

std::string diary_line(const std::string& agent, std::vector<json> entries) {
  return json{{"agent_id", agent}, {"day", 0}, {"entries", entries}}.dump() + "\n";
}

json entry(const char* intent, const char* start, double lat, double lon,
           const char* mode = nullptr) {
  json e{{"intention", intent}, {"start", start}, {"lat", lat}, {"lon", lon}};
  if (mode) e["mode"] = mode;
  return e;
}

}  // namespace

TEST_CASE("diary ingestion: clean diaries land on the grid and convert to trajectories") {
  const auto dir = tu::make_temp_dir("diaries");
  tu::write_file(dir / "d.jsonl",
                 diary_line("g1", {entry("sleep", "00:00", 30.0, 120.0),
                                   entry("Work_Study", "08:07", 30.0, 120.04, "bus"),
                                   entry("sleep", "21:00", 30.0, 120.0, "bus")}));
  const DiariesIngest ingest = ingest_diaries(dir / "d.jsonl", ActivityVocabulary::defaults());
  CHECK(ingest.report.accepted == 1);
  REQUIRE(ingest.diaries.size() == 1);
  const auto& d = ingest.diaries[0];
  CHECK(d.entries[1].intention == "work_study");
  CHECK(d.entries[1].start.to_string() == "08:00");  // snapped
  CHECK(d.entries[0].poi_id.rfind("ll:", 0) == 0);   // synthesized id

  const Trajectory t = to_trajectory(d);
  CHECK_FALSE(trajectory_structural_violation(t).has_value());
  CHECK(t.records.front().start.slot() == 0);
  CHECK(t.records.back().end.slot() == 95);
}

TEST_CASE("diary ingestion is idempotent on its own accepted output") {
  const auto dir = tu::make_temp_dir("diaries");
  tu::write_file(dir / "d.jsonl",
                 diary_line("g1", {entry("sleep", "00:02", 30.0, 120.0),
                                   entry("work_STUDY", "08:07", 30.0, 120.04, "bus"),
                                   entry("sleep", "21:00", 30.0, 120.0, "bus")}));
  const DiariesIngest first = ingest_diaries(dir / "d.jsonl", ActivityVocabulary::defaults());
  REQUIRE(first.diaries.size() == 1);

  // Serialize the accepted diary back out and ingest again.
  std::vector<json> entries;
  for (const auto& e : first.diaries[0].entries) {
    json je{{"intention", e.intention},
            {"start", e.start.to_string()},
            {"lat", e.location.lat},
            {"lon", e.location.lon},
            {"poi_id", e.poi_id}};
    if (e.mode) je["mode"] = std::string(to_string(*e.mode));
    entries.push_back(je);
  }
  tu::write_file(dir / "round.jsonl", diary_line("g1", entries));
  const DiariesIngest second = ingest_diaries(dir / "round.jsonl", ActivityVocabulary::defaults());
  REQUIRE(second.diaries.size() == 1);
  REQUIRE(second.diaries[0].entries.size() == first.diaries[0].entries.size());
  for (std::size_t i = 0; i < first.diaries[0].entries.size(); ++i) {
    const auto& a = first.diaries[0].entries[i];
    const auto& b = second.diaries[0].entries[i];
    CHECK(a.intention == b.intention);
    CHECK(a.start == b.start);
    CHECK(a.poi_id == b.poi_id);
    CHECK(a.mode == b.mode);
  }
}

TEST_CASE("diary ingestion: outlier legs reject the whole diary") {
  const auto dir = tu::make_temp_dir("diaries");
  // 100 km in one 15-minute slot: ~111 m/s, far above the 40 m/s gate.
  tu::write_file(dir / "d.jsonl",
                 diary_line("fast", {entry("sleep", "00:00", 30.0, 120.0),
                                     entry("work_study", "08:00", 30.9, 120.0, "car"),
                                     entry("sleep", "08:15", 30.0, 120.0, "car")}));
  const DiariesIngest ingest = ingest_diaries(dir / "d.jsonl", ActivityVocabulary::defaults());
  CHECK(ingest.report.accepted == 0);
  REQUIRE(ingest.report.rejected.size() == 1);
  CHECK(ingest.report.rejected[0].reason.find("outlier") != std::string::npos);
}

TEST_CASE("diary ingestion: unknown categories and disorder are inconsistent") {
  const auto dir = tu::make_temp_dir("diaries");
  tu::write_file(dir / "d.jsonl",
                 diary_line("weird", {entry("sleep", "00:00", 30.0, 120.0),
                                      entry("quantum yoga", "10:00", 30.0, 120.0)}) +
                     diary_line("unordered", {entry("sleep", "08:00", 30.0, 120.0),
                                              entry("eating", "07:00", 30.0, 120.0)}) +
                     diary_line("fine", {entry("sleep", "00:00", 30.0, 120.0),
                                         entry("eating", "12:00", 30.001, 120.0, "walk")}));
  const DiariesIngest ingest = ingest_diaries(dir / "d.jsonl", ActivityVocabulary::defaults());
  CHECK(ingest.report.accepted == 1);
  REQUIRE(ingest.report.rejected.size() == 2);
  CHECK(ingest.report.rejected[0].reason.find("quantum yoga") != std::string::npos);
  CHECK(ingest.report.rejected[1].reason.find("chronological") != std::string::npos);
}

// ---------------------------------------------------------------------------
// POIs and trajectories on disk
// ---------------------------------------------------------------------------

TEST_CASE("poi files load from CSV and JSON lines with default attractiveness") {
  const auto dir = tu::make_temp_dir("pois");
  tu::write_file(dir / "pois.csv",
                 "id,name,category,lat,lon,attractiveness\n"
                 "a,Cafe A,cafe,30.0,120.0,2.5\n"
                 "b,Cafe B,cafe,30.1,120.1,\n");
  const auto from_csv = load_pois(dir / "pois.csv");
  REQUIRE(from_csv.size() == 2);
  CHECK(from_csv[0].attractiveness == 2.5);
  CHECK(from_csv[1].attractiveness == 1.0);

  tu::write_file(dir / "pois.jsonl",
                 R"({"id":"x","name":"X","category":"park","lat":30.0,"lon":120.0})"
                 "\n"
                 R"({"id":"y","name":"Y","category":"park","lat":30.2,"lon":120.2,"attractiveness":4})"
                 "\n");
  const auto from_jsonl = load_pois(dir / "pois.jsonl");
  REQUIRE(from_jsonl.size() == 2);
  CHECK(from_jsonl[0].attractiveness == 1.0);
  CHECK(from_jsonl[1].attractiveness == 4.0);

  tu::write_file(dir / "pois.json", R"([{"id":"z","category":"gym","lat":1,"lon":2}])");
  CHECK(load_pois(dir / "pois.json").size() == 1);

  tu::write_file(dir / "empty.csv", "id,name,category,lat,lon\n");
  CHECK_THROWS_AS(load_pois(dir / "empty.csv"), ParseError);
}

TEST_CASE("trajectory JSONL round-trips exactly") {
  const auto fixture = read_trajectories(tu::data_dir() / "trajectories" / "lecturer_day.jsonl");
  REQUIRE(fixture.size() == 1);
  const auto dir = tu::make_temp_dir("traj");
  write_trajectories(dir / "t.jsonl", fixture);
  const auto again = read_trajectories(dir / "t.jsonl");
  REQUIRE(again.size() == 1);
  REQUIRE(again[0].records.size() == fixture[0].records.size());
  for (std::size_t i = 0; i < again[0].records.size(); ++i) {
    CHECK(again[0].records[i].poi_id == fixture[0].records[i].poi_id);
    CHECK(again[0].records[i].mode == fixture[0].records[i].mode);
    CHECK(again[0].records[i].start == fixture[0].records[i].start);
    CHECK(again[0].records[i].end == fixture[0].records[i].end);
  }
  // Byte-stable on rewrite.
  write_trajectories(dir / "t2.jsonl", again);
  CHECK(tu::read_file(dir / "t.jsonl") == tu::read_file(dir / "t2.jsonl"));
}

TEST_CASE("read_population accepts diaries and trajectories interchangeably") {
  const auto dir = tu::make_temp_dir("pop");
  tu::write_file(dir / "diaries.jsonl",
                 diary_line("g1", {entry("sleep", "00:00", 30.0, 120.0),
                                   entry("eating", "12:00", 30.001, 120.0, "walk")}));
  const auto pop = read_population(dir / "diaries.jsonl", ActivityVocabulary::defaults());
  REQUIRE(pop.size() == 1);
  CHECK(pop[0].records.size() == 2);

  const auto traj = read_population(tu::data_dir() / "trajectories" / "lecturer_day.jsonl",
                                    ActivityVocabulary::defaults());
  REQUIRE(traj.size() == 1);
  CHECK(traj[0].agent_id == "lecturer_1");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

TEST_CASE("config loading resolves paths, applies overrides, validates") {
  const auto dir = tu::make_temp_dir("config");
  tu::write_cli_fixture(dir, 5, 7);
  const CliConfig cfg = load_config(dir / "config.json");
  CHECK(cfg.sim.seed == 7);
  CHECK(cfg.profiles_path == dir / "profiles.csv");
  CHECK(cfg.backend.kind == "mock");
  CHECK(cfg.eval.vocabulary.size() == 10);

  tu::write_file(dir / "bad.json", "{not json");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);

  tu::write_file(dir / "missing_paths.json", R"({"seed": 1})");
  CHECK_THROWS_AS(load_config(dir / "missing_paths.json"), ConfigError);

  tu::write_file(dir / "ghost.json",
                 R"({"profiles_path": "nope.csv", "pois_path": "city.jsonl",
                     "backend": {"kind": "mock", "script_path": "mock_script.json"}})");
  CHECK_THROWS_AS(load_config(dir / "ghost.json"), ConfigError);

  tu::write_file(dir / "bad_map.json",
                 R"({"profiles_path": "profiles.csv", "pois_path": "city.jsonl",
                     "backend": {"kind": "mock", "script_path": "mock_script.json"},
                     "activity_categories": ["sleep", "floating"]})");
  CHECK_THROWS_AS(load_config(dir / "bad_map.json"), ConfigError);
}

// ---------------------------------------------------------------------------
// CLI end to end (mock backend)
// ---------------------------------------------------------------------------

TEST_CASE("cli simulate: deterministic files, valid manifest, evaluate self-score") {
  const auto dir = tu::make_temp_dir("cli");
  const auto config = tu::write_cli_fixture(dir, 12, 42);

  const auto out1 = (dir / "run1").string();
  const auto out2 = (dir / "run2").string();
  CHECK(run_cli({"simulate", "--config", config.string(), "--seed", "42", "--out-dir", out1}) == 0);
  CHECK(run_cli({"simulate", "--config", config.string(), "--seed", "42", "--out-dir", out2}) == 0);

  CHECK(tu::read_file(dir / "run1" / "trajectories.jsonl") ==
        tu::read_file(dir / "run2" / "trajectories.jsonl"));

  const json manifest = json::parse(tu::read_file(dir / "run1" / "manifest.json"));
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["trajectory_count"] == 12);
  CHECK(manifest["ablation"] == "full");
  CHECK(manifest["rethinking_enabled"] == true);
  CHECK(manifest.contains("config_digest"));
  CHECK(manifest["input_digests"].contains("profiles"));

  const json m2 = json::parse(tu::read_file(dir / "run2" / "manifest.json"));
  CHECK(manifest["config_digest"] == m2["config_digest"]);

  // evaluate generated against itself: perfect score.
  const auto report_path = (dir / "self_report.json").string();
  CHECK(run_cli({"evaluate", "--generated", out1 + "/trajectories.jsonl", "--reference",
                 out2 + "/trajectories.jsonl", "--out", report_path}) == 0);
  const json report = json::parse(tu::read_file(report_path));
  CHECK(report["final_score"].get<double>() >= 0.999999);
  CHECK(report["jsd_intention"].get<double>() <= 1e-6);

  // report: one CSV per metric.
  const auto csv_dir = (dir / "csv").string();
  CHECK(run_cli({"report", "--generated", out1 + "/trajectories.jsonl", "--reference",
                 out2 + "/trajectories.jsonl", "--out-dir", csv_dir}) == 0);
  for (const char* name :
       {"intention_sequence.csv", "daily_unique_locations.csv", "mode.csv",
        "radius_of_gyration.csv"}) {
    CHECK(std::filesystem::exists(dir / "csv" / name));
  }
  const std::string mode_csv = tu::read_file(dir / "csv" / "mode.csv");
  CHECK(mode_csv.find("label,p_generated,p_reference") == 0);
  CHECK(mode_csv.find("\"walk\"") != std::string::npos);
}

TEST_CASE("cli plan writes narratives and plans without trajectories") {
  const auto dir = tu::make_temp_dir("cli_plan");
  const auto config = tu::write_cli_fixture(dir, 9);
  const auto out = (dir / "plan_out").string();
  CHECK(run_cli({"plan", "--config", config.string(), "--out-dir", out, "--agents", "4"}) == 0);
  CHECK(std::filesystem::exists(dir / "plan_out" / "narratives.jsonl"));
  CHECK(std::filesystem::exists(dir / "plan_out" / "plans.jsonl"));
  CHECK_FALSE(std::filesystem::exists(dir / "plan_out" / "trajectories.jsonl"));

  // Plans are valid JSON lines with grid-time strings.
  std::ifstream plans(dir / "plan_out" / "plans.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(plans, line)) {
    const json j = json::parse(line);
    CHECK(j.contains("plan"));
    ++lines;
  }
  CHECK(lines == 4);
}

TEST_CASE("cli ablation flags change the manifest and the executed pipeline") {
  const auto dir = tu::make_temp_dir("cli_ablation");
  const auto config = tu::write_cli_fixture(dir, 8);

  const auto out_nr = (dir / "no_rethink").string();
  CHECK(run_cli({"simulate", "--config", config.string(), "--ablation", "no-rethinking",
                 "--out-dir", out_nr}) == 0);
  const json m = json::parse(tu::read_file(dir / "no_rethink" / "manifest.json"));
  CHECK(m["ablation"] == "no-rethinking");
  CHECK(m["rethinking_enabled"] == false);
  CHECK(m["backend_calls"]["rethink"] == 0);
  CHECK(tu::read_file(dir / "no_rethink" / "decisions.jsonl").empty());

  const auto out_rm = (dir / "random_mode").string();
  CHECK(run_cli({"simulate", "--config", config.string(), "--ablation", "random-mode",
                 "--out-dir", out_rm}) == 0);
  const json m2 = json::parse(tu::read_file(dir / "random_mode" / "manifest.json"));
  CHECK(m2["backend_calls"]["mode"] == 0);
  CHECK(m2["mode_choice"] == "random");
}

TEST_CASE("malformed population files are input errors, not crashes") {
  const auto dir = tu::make_temp_dir("bad_pop");
  tu::write_file(dir / "broken.jsonl", "{\"agent_id\": \"x\", \"records\": [  \n");
  CHECK_THROWS_AS(read_trajectories(dir / "broken.jsonl"), ParseError);
  CHECK(run_cli({"evaluate", "--generated", (dir / "broken.jsonl").string(), "--reference",
                 (dir / "broken.jsonl").string()}) == 1);
}

TEST_CASE("JSONL profiles tolerate a null work_poi") {
  const auto dir = tu::make_temp_dir("null_work");
  tu::write_file(dir / "p.jsonl",
                 R"({"id":"a1","age":70,"gender":"male","occupation":"Retired","income_band":"low","education":"primary","owns_car":false,"owns_ebike":false,"home_poi":"home_00","work_poi":null})"
                 "\n");
  const ProfilesIngest ingest = ingest_profiles(dir / "p.jsonl");
  REQUIRE(ingest.profiles.size() == 1);
  CHECK_FALSE(ingest.profiles[0].work_poi.has_value());
}

TEST_CASE("make_backend builds both kinds and validates the remote spec") {
  const auto dir = tu::make_temp_dir("mk_backend");
  tu::write_file(dir / "script.json", R"([{"response": "hi"}])");
  BackendSpec mock_spec;
  mock_spec.kind = "mock";
  mock_spec.script_path = dir / "script.json";
  CHECK(make_backend(mock_spec)->kind() == "mock");

  BackendSpec remote_spec;
  remote_spec.kind = "remote";
  remote_spec.endpoint_url = "http://localhost:1/v1/chat/completions";
  remote_spec.model_name = "m";
  CHECK(make_backend(remote_spec)->kind() == "remote");

  remote_spec.api_key_env_var = "MOBGEN_DEFINITELY_UNSET_KEY";
  CHECK_THROWS_AS(make_backend(remote_spec), ConfigError);
}

TEST_CASE("cli honors template_dir overrides from the config") {
  const auto dir = tu::make_temp_dir("cli_tpl");
  tu::write_cli_fixture(dir, 2);
  // Override the narrative prompt with a marker and script a reply for it.
  std::filesystem::create_directories(dir / "templates");
  tu::write_file(dir / "templates" / "narrative.txt",
                 "[system]\nwrite a diary\n[user]\nOVERRIDE MARKER {character_profile}\n");
  tu::write_file(dir / "mock_script.json",
                 R"([{"match": "OVERRIDE MARKER", "response": "the override diary"},)"
                 R"({"template": "plan_extract", "response": )" +
                     json(tu::generic_plan_json()).dump() + R"(},)"
                 R"({"response": "{\"action\": \"follow\", \"reasoning\": \"ok\"}"}])");
  tu::write_file(dir / "config.json", R"({
    "seed": 1,
    "profiles_path": "profiles.csv",
    "pois_path": "city.jsonl",
    "template_dir": "templates",
    "backend": {"kind": "mock", "script_path": "mock_script.json"}
  })");

  const auto out = (dir / "out").string();
  REQUIRE(run_cli({"plan", "--config", (dir / "config.json").string(), "--out-dir", out}) == 0);
  const std::string narratives = tu::read_file(dir / "out" / "narratives.jsonl");
  CHECK(narratives.find("the override diary") != std::string::npos);
}

TEST_CASE("cli exit codes: usage errors and bad configs return 1") {
  CHECK(run_cli({"simulate"}) == 1);                       // missing --config
  CHECK(run_cli({"frobnicate"}) == 1);                     // unknown subcommand
  CHECK(run_cli({"simulate", "--config", "/nonexistent/c.json"}) == 1);
  const auto dir = tu::make_temp_dir("cli_err");
  tu::write_file(dir / "broken.json", "{");
  CHECK(run_cli({"simulate", "--config", (dir / "broken.json").string()}) == 1);
  CHECK(run_cli({"evaluate", "--generated", "/nope.jsonl", "--reference", "/nope.jsonl"}) == 1);
}
