#include "mobgen/types.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "mobgen/errors.hpp"

namespace mobgen {

namespace {

std::string lower_trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Transport modes
// ---------------------------------------------------------------------------

std::string_view to_string(TransportMode m) {
  switch (m) {
    case TransportMode::walk: return "walk";
    case TransportMode::bike: return "bike";
    case TransportMode::ebike: return "ebike";
    case TransportMode::car: return "car";
    case TransportMode::bus: return "bus";
    case TransportMode::subway: return "subway";
  }
  return "walk";
}

std::optional<TransportMode> mode_from_string(std::string_view name) {
  for (TransportMode m : kAllModes) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<TransportMode> mode_from_synonym(std::string_view name) {
  const std::string n = lower_trim(name);
  if (n == "walk" || n == "walking" || n == "on foot" || n == "foot") return TransportMode::walk;
  if (n == "bike" || n == "bicycle" || n == "cycling" || n == "biking" || n == "cycle") return TransportMode::bike;
  if (n == "ebike" || n == "e-bike" || n == "e bike" || n == "electric bike") return TransportMode::ebike;
  if (n == "car" || n == "driving" || n == "drive" || n == "auto") return TransportMode::car;
  if (n == "bus") return TransportMode::bus;
  if (n == "subway" || n == "metro") return TransportMode::subway;
  return std::nullopt;
}

std::string_view mode_display_name(TransportMode m) {
  switch (m) {
    case TransportMode::walk: return "Walking";
    case TransportMode::bike: return "Cycling";
    case TransportMode::ebike: return "E-bike";
    case TransportMode::car: return "Driving";
    case TransportMode::bus: return "Bus";
    case TransportMode::subway: return "Subway";
  }
  return "Walking";
}

// ---------------------------------------------------------------------------
// Activity vocabulary
// ---------------------------------------------------------------------------

ActivityVocabulary::ActivityVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("activity vocabulary must not be empty");
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("activity vocabulary entries must be non-empty");
  }
}

ActivityVocabulary ActivityVocabulary::defaults() {
  return ActivityVocabulary({"sleep", "work_study", "shopping", "eating", "leisure", "household",
                             "social", "errand", "exercise", "other"});
}

bool ActivityVocabulary::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::optional<std::string> ActivityVocabulary::coerce(std::string_view raw) const {
  const std::string key = lower_trim(raw);
  for (const auto& n : names_) {
    if (lower_trim(n) == key) return n;
  }
  return std::nullopt;
}

std::size_t ActivityVocabulary::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw MetricError("unknown activity category \"" + std::string(name) + "\"");
  return static_cast<std::size_t>(it - names_.begin());
}

std::string ActivityVocabulary::joined(std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i) out += sep;
    out += names_[i];
  }
  return out;
}

ActivityPoiMap ActivityPoiMap::defaults() {
  ActivityPoiMap m;
  m.mapping = {
      {"sleep", "home"},      {"work_study", "office"}, {"shopping", "shop"},
      {"eating", "restaurant"}, {"leisure", "park"},    {"household", "home"},
      {"social", "cafe"},     {"errand", "services"},   {"exercise", "gym"},
      {"other", "misc"},
  };
  return m;
}

const std::string& ActivityPoiMap::poi_category_for(const std::string& activity) const {
  auto it = mapping.find(activity);
  if (it == mapping.end()) {
    throw ConfigError("activity category \"" + activity + "\" has no POI category mapping");
  }
  return it->second;
}

void ActivityPoiMap::validate_covers(const ActivityVocabulary& vocab) const {
  for (const auto& name : vocab.names()) {
    if (mapping.find(name) == mapping.end()) {
      throw ConfigError("activity->POI map is missing vocabulary entry \"" + name + "\"");
    }
  }
}

// ---------------------------------------------------------------------------
// MEO
// ---------------------------------------------------------------------------

MeoTable MeoTable::defaults() {
  MeoTable t;
  for (const char* occ : {"Factory Worker", "Clerical Staff", "Delivery Worker", "Technician",
                          "Low-income Worker"}) {
    t.values_[occ] = 0.30;
  }
  for (const char* occ : {"University Lecturer", "Civil Servant", "Engineer", "Office Worker",
                          "Student"}) {
    t.values_[occ] = 0.50;
  }
  for (const char* occ : {"Small Shopkeeper", "Business Owner", "Manager", "Senior Manager",
                          "Corporate Staff"}) {
    t.values_[occ] = 0.70;
  }
  for (const char* occ : {"Unemployed", "Retired"}) {
    t.values_[occ] = 0.20;
  }
  return t;
}

bool MeoTable::contains(std::string_view occupation) const {
  return values_.find(std::string(occupation)) != values_.end();
}

double MeoTable::at(const std::string& occupation) const {
  auto it = values_.find(occupation);
  if (it == values_.end()) {
    throw ConfigError("occupation \"" + occupation + "\" has no MEO entry");
  }
  return it->second;
}

void MeoTable::set(std::string occupation, double meo) {
  if (!(meo >= 0.0 && meo <= 1.0)) {
    throw ConfigError("MEO for \"" + occupation + "\" must lie in [0, 1]");
  }
  values_[std::move(occupation)] = meo;
}

bool MeoTable::ensure(const std::string& occupation, double meo) {
  if (contains(occupation)) return false;
  set(occupation, meo);
  return true;
}

std::optional<std::string> canonical_occupation(std::string_view raw) {
  static const std::map<std::string, std::string> synonyms = {
      {"freelancer", "Business Owner"},
      {"teacher", "University Lecturer"},
      {"lecturer", "University Lecturer"},
      {"professor", "University Lecturer"},
      {"courier", "Delivery Worker"},
      {"driver", "Delivery Worker"},
      {"clerk", "Clerical Staff"},
      {"shopkeeper", "Small Shopkeeper"},
      {"pensioner", "Retired"},
      {"jobless", "Unemployed"},
  };
  static const MeoTable canonical = MeoTable::defaults();
  const std::string key = lower_trim(raw);
  for (const auto& [name, _] : canonical.values()) {
    if (lower_trim(name) == key) return name;
  }
  auto it = synonyms.find(key);
  if (it != synonyms.end()) return it->second;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Profiles / misc enums
// ---------------------------------------------------------------------------

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::other: return "other";
  }
  return "other";
}

std::string_view to_string(IncomeBand b) {
  switch (b) {
    case IncomeBand::low: return "low";
    case IncomeBand::middle: return "middle";
    case IncomeBand::high: return "high";
  }
  return "middle";
}

std::string_view to_string(Education e) {
  switch (e) {
    case Education::primary: return "primary";
    case Education::secondary: return "secondary";
    case Education::vocational: return "vocational";
    case Education::bachelor: return "bachelor";
    case Education::master: return "master";
    case Education::doctorate: return "doctorate";
    case Education::other: return "other";
  }
  return "other";
}

std::optional<Gender> gender_from_string(std::string_view s) {
  const std::string n = lower_trim(s);
  if (n == "female" || n == "f" || n == "woman") return Gender::female;
  if (n == "male" || n == "m" || n == "man") return Gender::male;
  if (n == "other" || n == "unspecified" || n.empty()) return Gender::other;
  return std::nullopt;
}

std::optional<IncomeBand> income_from_string(std::string_view s) {
  const std::string n = lower_trim(s);
  if (n == "low") return IncomeBand::low;
  if (n == "middle" || n == "mid" || n == "medium" || n.empty()) return IncomeBand::middle;
  if (n == "high") return IncomeBand::high;
  return std::nullopt;
}

std::optional<Education> education_from_string(std::string_view s) {
  const std::string n = lower_trim(s);
  if (n == "primary") return Education::primary;
  if (n == "secondary" || n == "high school" || n.empty()) return Education::secondary;
  if (n == "vocational") return Education::vocational;
  if (n == "bachelor" || n == "undergraduate") return Education::bachelor;
  if (n == "master" || n == "graduate") return Education::master;
  if (n == "doctorate" || n == "phd") return Education::doctorate;
  if (n == "other") return Education::other;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

std::optional<std::string> ActivityPlan::invariant_violation(const ActivityVocabulary& vocab) const {
  if (activities.size() < 2) return "plan must contain at least 2 activities";
  if (activities.front().intention != "sleep") return "first activity must be sleep";
  if (activities.front().start.slot() != 0) return "first activity must start at 00:00";
  for (std::size_t i = 0; i < activities.size(); ++i) {
    if (!vocab.contains(activities[i].intention)) {
      return "activity \"" + activities[i].intention + "\" is outside the vocabulary";
    }
    if (i > 0 && activities[i].start < activities[i - 1].start) {
      return "start times must be non-decreasing (position " + std::to_string(i) + ")";
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Agent state / trajectories
// ---------------------------------------------------------------------------

std::string_view to_string(MemoryKind k) {
  switch (k) {
    case MemoryKind::executed: return "executed";
    case MemoryKind::rethought: return "rethought";
    case MemoryKind::traveled: return "traveled";
  }
  return "executed";
}

void AgentState::remember(MemoryEvent event) {
  memory.push_front(std::move(event));
  while (memory.size() > memory_cap) memory.pop_back();
}

std::string AgentState::memory_context() const {
  if (memory.empty()) return "No notable recent events yet.";
  std::ostringstream out;
  out << "Recent events (most recent first):";
  for (const auto& e : memory) {
    out << "\n- " << e.time.to_string() << " " << to_string(e.kind) << ": " << e.summary;
  }
  return out.str();
}

std::optional<std::string> trajectory_structural_violation(const Trajectory& t) {
  if (t.records.empty()) return "trajectory has no records";
  if (t.records.front().start.slot() != 0) return "first record must start at 00:00";
  if (t.records.back().end.slot() != TimeOfDay::kLastSlot) return "last record must end at 23:45";
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const auto& r = t.records[i];
    if (r.end < r.start) {
      return "record " + std::to_string(i) + " ends before it starts";
    }
    if (i == 0) {
      if (r.mode.has_value()) return "first record must not carry a transport mode";
      continue;
    }
    const auto& prev = t.records[i - 1];
    if (r.start != prev.end) {
      return "record " + std::to_string(i) + " does not tile with its predecessor";
    }
    const bool moved = r.poi_id != prev.poi_id;
    if (moved && !r.mode.has_value()) {
      return "record " + std::to_string(i) + " changes location without a mode";
    }
    if (!moved && r.mode.has_value()) {
      return "record " + std::to_string(i) + " carries a mode without a location change";
    }
  }
  return std::nullopt;
}

}  // namespace mobgen
