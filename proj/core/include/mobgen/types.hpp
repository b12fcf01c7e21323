#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mobgen/geo.hpp"
#include "mobgen/time_grid.hpp"

namespace mobgen {

// ---------------------------------------------------------------------------
// Transport modes
// ---------------------------------------------------------------------------

enum class TransportMode { walk, bike, ebike, car, bus, subway };

inline constexpr std::array<TransportMode, 6> kAllModes = {
    TransportMode::walk, TransportMode::bike, TransportMode::ebike,
    TransportMode::car,  TransportMode::bus,  TransportMode::subway};

std::string_view to_string(TransportMode m);

/// Canonical names only ("walk", "bike", ...).
std::optional<TransportMode> mode_from_string(std::string_view name);

/// Forgiving lookup for model replies: "Walking", "Driving", "Cycling",
/// "metro", ... (case-insensitive, trimmed).
std::optional<TransportMode> mode_from_synonym(std::string_view name);

/// Human-readable option names used in prompts: Walking, Cycling, E-bike,
/// Driving, Bus, Subway.
std::string_view mode_display_name(TransportMode m);

// ---------------------------------------------------------------------------
// Activity vocabulary
// ---------------------------------------------------------------------------

/// Closed per-run set of activity category names. Everything a plan or diary
/// mentions must coerce into this vocabulary.
class ActivityVocabulary {
public:
  ActivityVocabulary() = default;
  explicit ActivityVocabulary(std::vector<std::string> names);

  static ActivityVocabulary defaults();

  bool contains(std::string_view name) const;

  /// Case-insensitive, whitespace-trimmed match to a canonical name.
  std::optional<std::string> coerce(std::string_view raw) const;

  /// Position in canonical order; throws MetricError on unknown names.
  std::size_t index_of(std::string_view name) const;

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::string joined(std::string_view sep = ", ") const;

private:
  std::vector<std::string> names_;
};

/// Maps activity categories to the POI category sampled for them.
struct ActivityPoiMap {
  std::map<std::string, std::string> mapping;

  static ActivityPoiMap defaults();

  const std::string& poi_category_for(const std::string& activity) const;  // throws ConfigError

  /// Every vocabulary entry must have a POI category.
  void validate_covers(const ActivityVocabulary& vocab) const;  // throws ConfigError
};

// ---------------------------------------------------------------------------
// Occupations and MEO
// ---------------------------------------------------------------------------

/// Occupation -> probability of reconsidering the plan at a completed node.
class MeoTable {
public:
  /// The survey-derived default bands: 0.30 for rigid-schedule occupations,
  /// 0.50 for regular employment, 0.70 for self-directed work, 0.20 for
  /// people outside the workforce.
  static MeoTable defaults();

  bool contains(std::string_view occupation) const;
  double at(const std::string& occupation) const;  // throws ConfigError on unknown
  void set(std::string occupation, double meo);    // throws ConfigError outside [0,1]

  /// Registers `occupation` at `meo` when absent; returns true if added.
  bool ensure(const std::string& occupation, double meo);

  const std::map<std::string, double>& values() const { return values_; }

private:
  std::map<std::string, double> values_;
};

/// Canonical occupation name for free-text survey strings, when recognized.
std::optional<std::string> canonical_occupation(std::string_view raw);

// ---------------------------------------------------------------------------
// People and places
// ---------------------------------------------------------------------------

enum class Gender { female, male, other };
enum class IncomeBand { low, middle, high };
enum class Education { primary, secondary, vocational, bachelor, master, doctorate, other };

std::string_view to_string(Gender g);
std::string_view to_string(IncomeBand b);
std::string_view to_string(Education e);
std::optional<Gender> gender_from_string(std::string_view);
std::optional<IncomeBand> income_from_string(std::string_view);
std::optional<Education> education_from_string(std::string_view);

struct PersonProfile {
  std::string id;
  int age = 0;
  Gender gender = Gender::other;
  std::string occupation;  // must resolve in the run's MeoTable
  IncomeBand income_band = IncomeBand::middle;
  Education education = Education::secondary;
  bool owns_car = false;
  bool owns_ebike = false;
  std::string home_poi;                  // must resolve in the POI database
  std::optional<std::string> work_poi;
};

struct Poi {
  std::string id;
  std::string name;
  std::string category;
  GeoPoint location;
  double attractiveness = 1.0;  // > 0
};

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

struct PlannedActivity {
  std::string intention;          // activity category (i_t)
  TimeOfDay start;                // on the 15-minute grid (t_t)
  std::string location_category;  // semantic POI category (d_t)
  std::string description;
};

struct ActivityPlan {
  std::vector<PlannedActivity> activities;

  /// nullopt when the plan satisfies all invariants: non-decreasing start
  /// times, leading sleep at 00:00, at least two activities, and every
  /// intention inside the vocabulary.
  std::optional<std::string> invariant_violation(const ActivityVocabulary& vocab) const;
};

// ---------------------------------------------------------------------------
// Agent state and trajectories
// ---------------------------------------------------------------------------

enum class MemoryKind { executed, rethought, traveled };

std::string_view to_string(MemoryKind k);

struct MemoryEvent {
  TimeOfDay time;
  MemoryKind kind = MemoryKind::executed;
  std::string summary;
};

struct AgentState {
  TimeOfDay now;
  std::string current_poi;
  GeoPoint current_point;
  std::deque<MemoryEvent> memory;  // most-recent-first
  std::size_t memory_cap = 10;
  std::size_t plan_cursor = 0;
  std::optional<PlannedActivity> last_activity;

  void remember(MemoryEvent event);      // FIFO eviction beyond memory_cap
  std::string memory_context() const;    // prompt-facing rendering
};

struct TrajectoryRecord {
  PlannedActivity activity;             // as executed (a'_t)
  std::string poi_id;                   // l_t
  GeoPoint location;
  std::optional<TransportMode> mode;    // present iff the location changed (m_t)
  TimeOfDay start;
  TimeOfDay end;                        // >= start; equals the next record's start
};

struct Trajectory {
  std::string agent_id;
  int day_index = 0;
  std::vector<TrajectoryRecord> records;
};

/// Structural checker: records must tile [slot 0, slot 95] with no gaps or
/// overlaps, ends never precede starts, and a mode is present exactly when
/// the location differs from the previous record's. Returns nullopt when
/// everything holds, else a description of the first violation.
std::optional<std::string> trajectory_structural_violation(const Trajectory& t);

}  // namespace mobgen
