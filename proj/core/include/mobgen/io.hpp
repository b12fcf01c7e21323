#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobgen/engine.hpp"
#include "mobgen/eval.hpp"
#include "mobgen/types.hpp"

namespace mobgen {

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

struct IngestReport {
  struct Rejection {
    std::string id;
    std::string reason;  // incomplete, inconsistent, outlier, ...
  };
  int accepted = 0;
  std::vector<Rejection> rejected;
};

struct ProfilesIngest {
  std::vector<PersonProfile> profiles;
  IngestReport report;
  std::vector<std::string> warnings;  // e.g. unmapped occupations
};

/// Reads profiles from CSV (header: id,age,gender,occupation,income_band,
/// education,owns_car,owns_ebike,home_poi[,work_poi]) or JSON-lines records
/// with the same fields. Occupation strings normalize to the canonical
/// vocabulary through a synonym map; unmapped ones are kept verbatim with a
/// warning (they later register at MEO 0.50). An empty file is an error.
ProfilesIngest ingest_profiles(const std::filesystem::path& path);

/// Registers a 0.50 MEO entry for every occupation that lacks one; returns a
/// warning per addition.
std::vector<std::string> apply_profile_occupations(MeoTable& meo,
                                                   std::span<const PersonProfile> profiles);

struct DiaryEntry {
  std::string intention;
  TimeOfDay start;
  std::string poi_id;  // synthesized from coordinates when absent in the file
  GeoPoint location;
  std::optional<TransportMode> mode;
};

struct GroundTruthDiary {
  std::string agent_id;
  int day_index = 0;
  std::vector<DiaryEntry> entries;
};

struct DiariesIngest {
  std::vector<GroundTruthDiary> diaries;
  IngestReport report;
};

inline constexpr double kOutlierSpeedMps = 40.0;  // ~144 km/h over ground

/// Reads ground-truth diaries from JSON lines ({"agent_id", "day",
/// "entries": [{"intention", "start", "lat", "lon", "poi_id"?, "mode"?}]}).
/// Times snap to the grid; unknown categories and unordered entries reject
/// the diary as inconsistent; any leg implying more than 40 m/s rejects it
/// as an outlier.
DiariesIngest ingest_diaries(const std::filesystem::path& path, const ActivityVocabulary& vocab,
                             double max_speed_mps = kOutlierSpeedMps);

Trajectory to_trajectory(const GroundTruthDiary& diary);

/// POI records from CSV (header: id,name,category,lat,lon[,attractiveness])
/// or JSON (array or one object per line); missing attractiveness is 1.0.
std::vector<Poi> load_pois(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run artifacts on disk
// ---------------------------------------------------------------------------

void write_trajectories(const std::filesystem::path& path, std::span<const Trajectory> trajectories);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

/// Reads a population for evaluation: trajectory lines pass through, diary
/// lines ("entries" key) are ingested with the standard filters and converted.
std::vector<Trajectory> read_population(const std::filesystem::path& path,
                                        const ActivityVocabulary& vocab);

void write_narratives(const std::filesystem::path& path, std::span<const AgentDayResult> results);
void write_plans(const std::filesystem::path& path, std::span<const AgentDayResult> results);
void write_decisions(const std::filesystem::path& path, std::span<const AgentDayResult> results);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest,
                    const std::string& extra_json = {});

void write_report(const std::filesystem::path& path, const EvaluationReport& report,
                  const std::string& generated_digest, const std::string& reference_digest);

/// One CSV per metric: label[,edge_lo,edge_hi],p_generated,p_reference.
void write_distribution_csvs(const std::filesystem::path& dir, const EvaluationReport& report);

std::string file_digest(const std::filesystem::path& path);  // fnv1a64 hex of the bytes

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct BackendSpec {
  std::string kind = "mock";  // "mock" | "remote"
  std::filesystem::path script_path;
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env_var;
  int max_inflight = 8;
};

struct CliConfig {
  SimulationConfig sim;
  std::filesystem::path profiles_path;
  std::filesystem::path pois_path;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> template_dir;
  BackendSpec backend;
  int agents_limit = 0;  // 0: all profiles
  EvalConfig eval;
};

/// Loads and validates the run configuration; relative paths resolve against
/// the config file's directory.
CliConfig load_config(const std::filesystem::path& path);

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);

}  // namespace mobgen
