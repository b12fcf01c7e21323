#include "mobgen/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mobgen/errors.hpp"
#include "mobgen/rng.hpp"

namespace mobgen {

namespace {

using nlohmann::json;

std::string trimmed(std::string s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

bool parse_bool(const std::string& raw) {
  const std::string v = trimmed(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "y") return true;
  if (v == "false" || v == "0" || v == "no" || v == "n" || v.empty()) return false;
  throw ParseError("cannot interpret \"" + raw + "\" as a boolean");
}

/// Header-indexed access into a delimited row.
struct Columns {
  std::vector<std::string> names;
  char sep = ',';

  static Columns from_header(const std::string& header) {
    Columns c;
    c.sep = header.find('\t') != std::string::npos ? '\t' : ',';
    for (auto& name : split(header, c.sep)) c.names.push_back(trimmed(name));
    return c;
  }

  std::optional<std::size_t> index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t require(std::string_view name) const {
    auto idx = index(name);
    if (!idx) throw ParseError("missing required column \"" + std::string(name) + "\"");
    return *idx;
  }
};

std::string cell(const std::vector<std::string>& row, std::size_t idx) {
  return idx < row.size() ? trimmed(row[idx]) : std::string{};
}

bool is_json_file(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".json" || ext == ".jsonl" || ext == ".ndjson";
}

std::string synth_poi_id(const GeoPoint& p) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "ll:%.6f,%.6f", p.lat, p.lon);
  return buf;
}

json record_to_json(const TrajectoryRecord& r) {
  json j;
  j["intention"] = r.activity.intention;
  j["poi_id"] = r.poi_id;
  j["lat"] = r.location.lat;
  j["lon"] = r.location.lon;
  if (r.mode) j["mode"] = std::string(to_string(*r.mode));
  j["start"] = r.start.to_string();
  j["end"] = r.end.to_string();
  return j;
}

TrajectoryRecord record_from_json(const json& j) {
  TrajectoryRecord r;
  r.activity.intention = j.at("intention").get<std::string>();
  r.poi_id = j.at("poi_id").get<std::string>();
  r.location.lat = j.at("lat").get<double>();
  r.location.lon = j.at("lon").get<double>();
  if (j.contains("mode") && !j["mode"].is_null()) {
    const auto mode = mode_from_string(j["mode"].get<std::string>());
    if (!mode) throw ParseError("unknown transport mode \"" + j["mode"].get<std::string>() + "\"");
    r.mode = mode;
  }
  r.start = TimeOfDay::parse(j.at("start").get<std::string>());
  r.end = TimeOfDay::parse(j.at("end").get<std::string>());
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

namespace {

PersonProfile profile_from_fields(const std::string& id, const std::string& age,
                                  const std::string& gender, const std::string& occupation,
                                  const std::string& income, const std::string& education,
                                  const std::string& owns_car, const std::string& owns_ebike,
                                  const std::string& home_poi, const std::string& work_poi,
                                  std::vector<std::string>& warnings) {
  PersonProfile p;
  p.id = id;
  if (p.id.empty()) throw ParseError("missing id");
  try {
    p.age = std::stoi(age);
  } catch (...) {
    throw ParseError("bad age \"" + age + "\"");
  }
  if (p.age < 0) throw ParseError("bad age \"" + age + "\"");
  const auto g = gender_from_string(gender);
  if (!g) throw ParseError("bad gender \"" + gender + "\"");
  p.gender = *g;
  const std::string occ = trimmed(occupation);
  if (occ.empty()) throw ParseError("missing occupation");
  if (auto canonical = canonical_occupation(occ)) {
    p.occupation = *canonical;
  } else {
    p.occupation = occ;
    warnings.push_back("occupation \"" + occ + "\" (agent " + p.id +
                       ") is not in the canonical vocabulary; defaults to MEO 0.50");
  }
  const auto inc = income_from_string(income);
  if (!inc) throw ParseError("bad income_band \"" + income + "\"");
  p.income_band = *inc;
  const auto edu = education_from_string(education);
  if (!edu) throw ParseError("bad education \"" + education + "\"");
  p.education = *edu;
  p.owns_car = parse_bool(owns_car);
  p.owns_ebike = parse_bool(owns_ebike);
  p.home_poi = trimmed(home_poi);
  if (p.home_poi.empty()) throw ParseError("missing home_poi");
  const std::string work = trimmed(work_poi);
  if (!work.empty()) p.work_poi = work;
  return p;
}

}  // namespace

ProfilesIngest ingest_profiles(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  ProfilesIngest out;
  std::string line;
  std::size_t line_no = 0;

  if (is_json_file(path)) {
    while (std::getline(in, line)) {
      ++line_no;
      if (trimmed(line).empty()) continue;
      std::string id = "line " + std::to_string(line_no);
      try {
        const json j = json::parse(line);
        id = j.value("id", id);
        std::string work_poi;
        if (j.contains("work_poi") && j["work_poi"].is_string()) {
          work_poi = j["work_poi"].get<std::string>();
        }
        PersonProfile p = profile_from_fields(
            j.value("id", std::string{}), std::to_string(j.value("age", -1)),
            j.value("gender", std::string{}), j.value("occupation", std::string{}),
            j.value("income_band", std::string{}), j.value("education", std::string{}),
            j.value("owns_car", false) ? "true" : "false",
            j.value("owns_ebike", false) ? "true" : "false", j.value("home_poi", std::string{}),
            work_poi, out.warnings);
        out.profiles.push_back(std::move(p));
        ++out.report.accepted;
      } catch (const std::exception& e) {
        out.report.rejected.push_back({id, e.what()});
      }
    }
  } else {
    if (!std::getline(in, line)) throw ParseError("profile file " + path.string() + " is empty");
    const Columns cols = Columns::from_header(line);
    const std::size_t c_id = cols.require("id");
    const std::size_t c_age = cols.require("age");
    const std::size_t c_gender = cols.require("gender");
    const std::size_t c_occ = cols.require("occupation");
    const std::size_t c_income = cols.require("income_band");
    const std::size_t c_edu = cols.require("education");
    const std::size_t c_car = cols.require("owns_car");
    const std::size_t c_ebike = cols.require("owns_ebike");
    const std::size_t c_home = cols.require("home_poi");
    const auto c_work = cols.index("work_poi");

    while (std::getline(in, line)) {
      ++line_no;
      if (trimmed(line).empty()) continue;
      const auto row = split(line, cols.sep);
      const std::string id = cell(row, c_id);
      try {
        PersonProfile p = profile_from_fields(
            id, cell(row, c_age), cell(row, c_gender), cell(row, c_occ), cell(row, c_income),
            cell(row, c_edu), cell(row, c_car), cell(row, c_ebike), cell(row, c_home),
            c_work ? cell(row, *c_work) : std::string{}, out.warnings);
        out.profiles.push_back(std::move(p));
        ++out.report.accepted;
      } catch (const std::exception& e) {
        out.report.rejected.push_back({id.empty() ? "row " + std::to_string(line_no) : id,
                                       e.what()});
      }
    }
  }

  if (out.report.accepted == 0 && out.report.rejected.empty()) {
    throw ParseError("profile file " + path.string() + " contains no records");
  }
  return out;
}

std::vector<std::string> apply_profile_occupations(MeoTable& meo,
                                                   std::span<const PersonProfile> profiles) {
  std::vector<std::string> warnings;
  for (const auto& p : profiles) {
    if (meo.ensure(p.occupation, 0.50)) {
      warnings.push_back("occupation \"" + p.occupation + "\" registered at MEO 0.50");
    }
  }
  return warnings;
}

// ---------------------------------------------------------------------------
// Diaries
// ---------------------------------------------------------------------------

DiariesIngest ingest_diaries(const std::filesystem::path& path, const ActivityVocabulary& vocab,
                             double max_speed_mps) {
  auto in = open_or_throw(path);
  DiariesIngest out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    std::string id = "line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      GroundTruthDiary d;
      d.agent_id = j.at("agent_id").get<std::string>();
      id = d.agent_id;
      d.day_index = j.value("day", 0);
      const auto& entries = j.at("entries");
      if (!entries.is_array() || entries.empty()) {
        throw ParseError("incomplete: no entries");
      }
      for (const auto& e : entries) {
        DiaryEntry entry;
        const std::string raw_cat = e.at("intention").get<std::string>();
        const auto coerced = vocab.coerce(raw_cat);
        if (!coerced) throw ParseError("inconsistent: unknown category \"" + raw_cat + "\"");
        entry.intention = *coerced;
        entry.start = TimeOfDay::parse(e.at("start").get<std::string>());
        if (!e.contains("lat") || !e.contains("lon")) {
          throw ParseError("incomplete: entry without coordinates");
        }
        entry.location = {e["lat"].get<double>(), e["lon"].get<double>()};
        if (!valid_coordinates(entry.location)) throw ParseError("inconsistent: bad coordinates");
        entry.poi_id = e.value("poi_id", synth_poi_id(entry.location));
        if (e.contains("mode") && !e["mode"].is_null()) {
          const auto mode = mode_from_string(e["mode"].get<std::string>());
          if (!mode) throw ParseError("inconsistent: unknown mode \"" +
                                      e["mode"].get<std::string>() + "\"");
          entry.mode = mode;
        }
        d.entries.push_back(std::move(entry));
      }
      for (std::size_t i = 1; i < d.entries.size(); ++i) {
        if (d.entries[i].start < d.entries[i - 1].start) {
          throw ParseError("inconsistent: entries out of chronological order");
        }
        const double dist = haversine_m(d.entries[i - 1].location, d.entries[i].location);
        if (dist < 1.0) continue;
        const double gap_s =
            (d.entries[i].start.minutes() - d.entries[i - 1].start.minutes()) * 60.0;
        if (gap_s <= 0.0 || dist / gap_s > max_speed_mps) {
          throw ParseError("outlier: leg of " + std::to_string(dist) + " m implies > " +
                           std::to_string(max_speed_mps) + " m/s");
        }
      }
      out.diaries.push_back(std::move(d));
      ++out.report.accepted;
    } catch (const std::exception& e) {
      out.report.rejected.push_back({id, e.what()});
    }
  }
  return out;
}

Trajectory to_trajectory(const GroundTruthDiary& diary) {
  Trajectory t;
  t.agent_id = diary.agent_id;
  t.day_index = diary.day_index;
  for (std::size_t i = 0; i < diary.entries.size(); ++i) {
    const auto& e = diary.entries[i];
    TrajectoryRecord r;
    r.activity.intention = e.intention;
    r.poi_id = e.poi_id;
    r.location = e.location;
    r.mode = e.mode;
    r.start = (i == 0) ? TimeOfDay::from_slot(0) : e.start;  // cover from midnight
    r.end = (i + 1 < diary.entries.size()) ? diary.entries[i + 1].start : day_end();
    if (r.end < r.start) r.end = r.start;
    t.records.push_back(std::move(r));
  }
  return t;
}

// ---------------------------------------------------------------------------
// POIs
// ---------------------------------------------------------------------------

std::vector<Poi> load_pois(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<Poi> out;

  const auto from_json = [](const json& j) {
    Poi p;
    p.id = j.at("id").get<std::string>();
    p.name = j.value("name", p.id);
    p.category = j.at("category").get<std::string>();
    p.location = {j.at("lat").get<double>(), j.at("lon").get<double>()};
    p.attractiveness = j.value("attractiveness", 1.0);
    return p;
  };

  if (is_json_file(path)) {
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = trimmed(buf.str());
    if (content.empty()) throw ParseError("POI file " + path.string() + " is empty");
    try {
      if (content.front() == '[') {
        const json arr = json::parse(content);
        for (const auto& j : arr) out.push_back(from_json(j));
      } else {
        std::istringstream lines(content);
        std::string line;
        while (std::getline(lines, line)) {
          if (trimmed(line).empty()) continue;
          out.push_back(from_json(json::parse(line)));
        }
      }
    } catch (const json::exception& e) {
      throw ParseError("POI file " + path.string() + ": " + e.what());
    }
  } else {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("POI file " + path.string() + " is empty");
    const Columns cols = Columns::from_header(line);
    const std::size_t c_id = cols.require("id");
    const std::size_t c_name = cols.require("name");
    const std::size_t c_cat = cols.require("category");
    const std::size_t c_lat = cols.require("lat");
    const std::size_t c_lon = cols.require("lon");
    const auto c_attr = cols.index("attractiveness");
    while (std::getline(in, line)) {
      if (trimmed(line).empty()) continue;
      const auto row = split(line, cols.sep);
      Poi p;
      p.id = cell(row, c_id);
      p.name = cell(row, c_name);
      p.category = cell(row, c_cat);
      try {
        p.location = {std::stod(cell(row, c_lat)), std::stod(cell(row, c_lon))};
        const std::string attr = c_attr ? cell(row, *c_attr) : std::string{};
        p.attractiveness = attr.empty() ? 1.0 : std::stod(attr);
      } catch (const std::exception&) {
        throw ParseError("POI \"" + p.id + "\": bad numeric field");
      }
      out.push_back(std::move(p));
    }
  }
  if (out.empty()) throw ParseError("POI file " + path.string() + " contains no records");
  return out;
}

// ---------------------------------------------------------------------------
// Run artifacts
// ---------------------------------------------------------------------------

void write_trajectories(const std::filesystem::path& path,
                        std::span<const Trajectory> trajectories) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write " + path.string());
  for (const auto& t : trajectories) {
    json j;
    j["agent_id"] = t.agent_id;
    j["day"] = t.day_index;
    j["records"] = json::array();
    for (const auto& r : t.records) j["records"].push_back(record_to_json(r));
    outf << j.dump() << "\n";
  }
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<Trajectory> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    try {
      const json j = json::parse(line);
      Trajectory t;
      t.agent_id = j.at("agent_id").get<std::string>();
      t.day_index = j.value("day", 0);
      for (const auto& r : j.at("records")) t.records.push_back(record_from_json(r));
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Trajectory> read_population(const std::filesystem::path& path,
                                        const ActivityVocabulary& vocab) {
  // Sniff the first non-empty line: trajectories carry "records", diaries
  // carry "entries".
  {
    auto in = open_or_throw(path);
    std::string line;
    while (std::getline(in, line)) {
      if (trimmed(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw ParseError(path.string() + ": not JSON lines: " + e.what());
      }
      if (j.contains("entries")) {
        DiariesIngest ingest = ingest_diaries(path, vocab);
        std::vector<Trajectory> out;
        out.reserve(ingest.diaries.size());
        for (const auto& d : ingest.diaries) out.push_back(to_trajectory(d));
        return out;
      }
      break;
    }
  }
  return read_trajectories(path);
}

void write_narratives(const std::filesystem::path& path,
                      std::span<const AgentDayResult> results) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write " + path.string());
  for (const auto& r : results) {
    if (!r.narrative) continue;
    json j;
    j["agent_id"] = r.agent_id;
    j["day"] = r.day_index;
    j["text"] = r.narrative->text;
    j["backend"] = r.narrative->backend_kind;
    j["temperature"] = r.narrative->temperature;
    j["timestamp"] = r.narrative->timestamp;
    outf << j.dump() << "\n";
  }
}

void write_plans(const std::filesystem::path& path, std::span<const AgentDayResult> results) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write " + path.string());
  for (const auto& r : results) {
    json j;
    j["agent_id"] = r.agent_id;
    j["day"] = r.day_index;
    j["plan"] = json::array();
    for (const auto& a : r.plan.activities) {
      j["plan"].push_back({{"activity", a.intention},
                           {"start_time", a.start.to_string()},
                           {"location_category", a.location_category},
                           {"description", a.description}});
    }
    if (r.parse_report) {
      j["repairs"] = r.parse_report->repairs;
      j["reprompted"] = r.parse_report->reprompted;
      j["rejected"] = r.parse_report->rejected;
      if (r.parse_report->rejected) j["reject_reason"] = r.parse_report->reject_reason;
    }
    j["fallback"] = r.used_fallback_plan;
    outf << j.dump() << "\n";
  }
}

void write_decisions(const std::filesystem::path& path, std::span<const AgentDayResult> results) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write " + path.string());
  for (const auto& r : results) {
    for (const auto& d : r.decisions) {
      json j;
      j["agent_id"] = d.agent_id;
      j["day"] = d.day_index;
      j["time"] = d.time.to_string();
      j["action"] = std::string(to_string(d.action));
      if (d.new_activity) j["new_activity"] = *d.new_activity;
      if (d.duration_minutes) j["duration_minutes"] = *d.duration_minutes;
      j["reasoning"] = d.reasoning;
      outf << j.dump() << "\n";
    }
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest,
                    const std::string& extra_json) {
  json j;
  j["seed"] = manifest.seed;
  j["config_digest"] = manifest.config_digest;
  j["agent_count"] = manifest.agent_count;
  j["trajectory_count"] = manifest.trajectory_count;
  j["fallback_plan_count"] = manifest.fallback_plan_count;
  j["failures"] = manifest.failures;
  j["backend_calls"] = {{"narrative", manifest.backend_calls.narrative},
                        {"plan", manifest.backend_calls.plan},
                        {"rethink", manifest.backend_calls.rethink},
                        {"mode", manifest.backend_calls.mode},
                        {"other", manifest.backend_calls.other}};
  j["wall_seconds"] = manifest.wall_seconds;
  if (!extra_json.empty()) {
    const json extra = json::parse(extra_json);
    for (const auto& [k, v] : extra.items()) j[k] = v;
  }
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write " + path.string());
  outf << j.dump(2) << "\n";
}

namespace {

json distribution_to_json(const Distribution& d) {
  json j;
  j["labels"] = d.labels;
  if (!d.edges.empty()) j["edges"] = d.edges;
  j["probs"] = d.probs;
  return j;
}

}  // namespace

void write_report(const std::filesystem::path& path, const EvaluationReport& report,
                  const std::string& generated_digest, const std::string& reference_digest) {
  json j;
  j["jsd_intention"] = report.jsd_intention;
  j["jsd_locations"] = report.jsd_locations;
  j["jsd_mode"] = report.jsd_mode;
  j["jsd_radius"] = report.jsd_radius;
  j["final_score"] = report.final_score;
  j["inputs"] = {{"generated_digest", generated_digest}, {"reference_digest", reference_digest}};
  j["distributions"] = json::object();
  for (const auto& s : report.snapshots) {
    j["distributions"][s.metric] = {{"generated", distribution_to_json(s.generated)},
                                    {"reference", distribution_to_json(s.reference)}};
  }
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write " + path.string());
  outf << j.dump(2) << "\n";
}

void write_distribution_csvs(const std::filesystem::path& dir, const EvaluationReport& report) {
  std::filesystem::create_directories(dir);
  for (const auto& s : report.snapshots) {
    std::ofstream outf(dir / (s.metric + ".csv"));
    if (!outf) throw ParseError("cannot write CSV for " + s.metric);
    const bool has_edges = !s.generated.edges.empty();
    outf << (has_edges ? "label,edge_lo,edge_hi,p_generated,p_reference\n"
                       : "label,p_generated,p_reference\n");
    for (std::size_t i = 0; i < s.generated.labels.size(); ++i) {
      outf << '"' << s.generated.labels[i] << '"';
      if (has_edges) outf << ',' << s.generated.edges[i] << ',' << s.generated.edges[i + 1];
      outf << ',' << s.generated.probs[i] << ',' << s.reference.probs[i] << "\n";
    }
  }
}

std::string file_digest(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::stringstream buf;
  buf << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

CliConfig load_config(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }

  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
  const auto resolve = [&](const std::string& p) -> std::filesystem::path {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  CliConfig cfg;
  try {
    cfg.sim.seed = j.value("seed", 0ull);
    cfg.sim.day_count = j.value("day_count", 1);
    if (j.contains("activity_categories")) {
      cfg.sim.vocabulary = ActivityVocabulary(j["activity_categories"].get<std::vector<std::string>>());
    }
    if (j.contains("activity_poi_map")) {
      cfg.sim.activity_poi_map.mapping =
          j["activity_poi_map"].get<std::map<std::string, std::string>>();
    }
    if (j.contains("meo_overrides")) {
      for (auto& [occ, v] : j["meo_overrides"].items()) {
        cfg.sim.meo.set(occ, v.get<double>());
      }
    }
    if (j.contains("gravity")) {
      const auto& g = j["gravity"];
      cfg.sim.gravity.alpha = g.value("alpha", cfg.sim.gravity.alpha);
      cfg.sim.gravity.beta = g.value("beta", cfg.sim.gravity.beta);
      cfg.sim.gravity.candidate_cap = g.value("candidate_cap", cfg.sim.gravity.candidate_cap);
      cfg.sim.gravity.search_radius_m = g.value("search_radius_m", cfg.sim.gravity.search_radius_m);
    }
    if (j.contains("mode_speeds_mps")) {
      for (auto& [name, v] : j["mode_speeds_mps"].items()) {
        const auto mode = mode_from_string(name);
        if (!mode) throw ConfigError("unknown mode \"" + name + "\" in mode_speeds_mps");
        cfg.sim.speeds.set(*mode, v.get<double>());
      }
    }
    if (j.contains("generation")) {
      const auto& g = j["generation"];
      cfg.sim.generation.temperature = g.value("temperature", cfg.sim.generation.temperature);
      cfg.sim.generation.max_tokens = g.value("max_tokens", cfg.sim.generation.max_tokens);
      cfg.sim.generation.timeout_s = g.value("timeout_s", cfg.sim.generation.timeout_s);
      cfg.sim.generation.max_retries = g.value("max_retries", cfg.sim.generation.max_retries);
    }
    cfg.sim.rethinking_enabled = j.value("rethinking_enabled", true);
    if (j.contains("plan_source")) {
      const auto src = plan_source_from_string(j["plan_source"].get<std::string>());
      if (!src) throw ConfigError("unknown plan_source \"" + j["plan_source"].get<std::string>() + "\"");
      cfg.sim.plan_source = *src;
    }
    if (j.contains("mode_choice")) {
      const auto src = mode_choice_from_string(j["mode_choice"].get<std::string>());
      if (!src) throw ConfigError("unknown mode_choice \"" + j["mode_choice"].get<std::string>() + "\"");
      cfg.sim.mode_choice = *src;
    }
    cfg.sim.memory_cap = j.value("memory_cap", cfg.sim.memory_cap);
    cfg.sim.threads = j.value("threads", 0);

    if (!j.contains("profiles_path") || !j.contains("pois_path")) {
      throw ConfigError("config must name profiles_path and pois_path");
    }
    cfg.profiles_path = resolve(j["profiles_path"].get<std::string>());
    cfg.pois_path = resolve(j["pois_path"].get<std::string>());
    if (j.contains("out_dir")) cfg.out_dir = resolve(j["out_dir"].get<std::string>());
    if (j.contains("template_dir")) cfg.template_dir = resolve(j["template_dir"].get<std::string>());
    cfg.agents_limit = j.value("agents", 0);

    if (j.contains("backend")) {
      const auto& b = j["backend"];
      cfg.backend.kind = b.value("kind", std::string("mock"));
      if (b.contains("script_path")) cfg.backend.script_path = resolve(b["script_path"].get<std::string>());
      cfg.backend.endpoint_url = b.value("endpoint_url", std::string{});
      cfg.backend.model_name = b.value("model_name", std::string{});
      cfg.backend.api_key_env_var = b.value("api_key_env_var", std::string{});
      cfg.backend.max_inflight = b.value("max_inflight", 8);
    }

    if (j.contains("eval")) {
      const auto& e = j["eval"];
      cfg.eval.radius_bins = e.value("radius_bins", cfg.eval.radius_bins);
      cfg.eval.radius_min_m = e.value("radius_min_m", cfg.eval.radius_min_m);
      cfg.eval.radius_max_m = e.value("radius_max_m", cfg.eval.radius_max_m);
      cfg.eval.locations_pool_at = e.value("locations_pool_at", cfg.eval.locations_pool_at);
      cfg.eval.epsilon = e.value("epsilon", cfg.eval.epsilon);
    }
    cfg.eval.vocabulary = cfg.sim.vocabulary;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }

  // Validation: referenced files exist, the map covers the vocabulary.
  if (!std::filesystem::exists(cfg.profiles_path)) {
    throw ConfigError("profiles_path does not exist: " + cfg.profiles_path.string());
  }
  if (!std::filesystem::exists(cfg.pois_path)) {
    throw ConfigError("pois_path does not exist: " + cfg.pois_path.string());
  }
  if (cfg.backend.kind == "mock") {
    if (cfg.backend.script_path.empty() || !std::filesystem::exists(cfg.backend.script_path)) {
      throw ConfigError("mock backend needs an existing script_path");
    }
  } else if (cfg.backend.kind == "remote") {
    if (cfg.backend.endpoint_url.empty() || cfg.backend.model_name.empty()) {
      throw ConfigError("remote backend needs endpoint_url and model_name");
    }
  } else {
    throw ConfigError("backend kind must be \"mock\" or \"remote\"");
  }
  cfg.sim.activity_poi_map.validate_covers(cfg.sim.vocabulary);
  if (cfg.sim.day_count < 1) throw ConfigError("day_count must be >= 1");
  return cfg;
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (spec.kind == "mock") return make_mock_backend(spec.script_path);
  RemoteConfig rc;
  rc.endpoint_url = spec.endpoint_url;
  rc.model_name = spec.model_name;
  rc.api_key_env_var = spec.api_key_env_var;
  rc.max_inflight = spec.max_inflight;
  return std::make_unique<RemoteBackend>(std::move(rc));
}

}  // namespace mobgen
