#include "mobgen/spatial.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "mobgen/errors.hpp"
#include "mobgen/planner.hpp"  // profile_text

namespace mobgen {

namespace {
constexpr double kMetersPerDegLat = kEarthRadiusM * 3.14159265358979323846 / 180.0;
}

ModeSpeedTable ModeSpeedTable::defaults() {
  ModeSpeedTable t;
  t.set(TransportMode::walk, 1.4);
  t.set(TransportMode::bike, 4.0);
  t.set(TransportMode::ebike, 6.0);
  t.set(TransportMode::car, 8.3);
  t.set(TransportMode::bus, 5.5);
  t.set(TransportMode::subway, 11.0);
  return t;
}

void ModeSpeedTable::set(TransportMode m, double mps) {
  if (!(mps > 0.0)) {
    throw ConfigError("mode speed for " + std::string(to_string(m)) + " must be > 0");
  }
  speed_mps[static_cast<std::size_t>(m)] = mps;
}

// ---------------------------------------------------------------------------
// PoiDatabase
// ---------------------------------------------------------------------------

PoiDatabase::PoiDatabase(std::vector<Poi> pois, double cell_deg)
    : pois_(std::move(pois)), cell_deg_(cell_deg) {
  if (!(cell_deg_ > 0)) throw ConfigError("grid cell size must be > 0");
  for (std::size_t i = 0; i < pois_.size(); ++i) {
    const Poi& p = pois_[i];
    if (p.id.empty()) throw ConfigError("POI at position " + std::to_string(i) + " has no id");
    if (!valid_coordinates(p.location)) {
      throw ConfigError("POI \"" + p.id + "\" has invalid coordinates");
    }
    if (!(p.attractiveness > 0)) {
      throw ConfigError("POI \"" + p.id + "\" must have attractiveness > 0");
    }
    if (!by_id_.emplace(p.id, i).second) {
      throw ConfigError("duplicate POI id \"" + p.id + "\"");
    }
    by_category_[p.category].push_back(i);
    const int ix = static_cast<int>(std::floor(p.location.lon / cell_deg_));
    const int iy = static_cast<int>(std::floor(p.location.lat / cell_deg_));
    grid_[cell_key(ix, iy)].push_back(i);
  }
}

std::uint64_t PoiDatabase::cell_key(int ix, int iy) const {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
}

const Poi* PoiDatabase::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &pois_[it->second];
}

const Poi& PoiDatabase::at(std::string_view id) const {
  const Poi* p = find(id);
  if (!p) throw GroundingError("POI id \"" + std::string(id) + "\" does not resolve");
  return *p;
}

bool PoiDatabase::has_category(std::string_view category) const {
  return by_category_.find(std::string(category)) != by_category_.end();
}

std::vector<std::string> PoiDatabase::categories() const {
  std::vector<std::string> out;
  out.reserve(by_category_.size());
  for (const auto& [cat, _] : by_category_) out.push_back(cat);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> PoiDatabase::category_in_radius(std::string_view category,
                                                         const GeoPoint& origin,
                                                         double radius_m) const {
  std::vector<std::size_t> out;
  auto cat_it = by_category_.find(std::string(category));
  if (cat_it == by_category_.end()) return out;

  const double dlat = radius_m / kMetersPerDegLat;
  const double cos_lat = std::max(std::cos(origin.lat * 3.14159265358979323846 / 180.0), 1e-2);
  const double dlon = radius_m / (kMetersPerDegLat * cos_lat);
  const int ix_lo = static_cast<int>(std::floor((origin.lon - dlon) / cell_deg_));
  const int ix_hi = static_cast<int>(std::floor((origin.lon + dlon) / cell_deg_));
  const int iy_lo = static_cast<int>(std::floor((origin.lat - dlat) / cell_deg_));
  const int iy_hi = static_cast<int>(std::floor((origin.lat + dlat) / cell_deg_));

  // For wide boxes a category scan beats touching every cell.
  const long long box_cells =
      (static_cast<long long>(ix_hi) - ix_lo + 1) * (static_cast<long long>(iy_hi) - iy_lo + 1);
  if (box_cells > static_cast<long long>(cat_it->second.size())) {
    for (std::size_t idx : cat_it->second) {
      if (haversine_m(origin, pois_[idx].location) <= radius_m) out.push_back(idx);
    }
    return out;
  }

  for (int ix = ix_lo; ix <= ix_hi; ++ix) {
    for (int iy = iy_lo; iy <= iy_hi; ++iy) {
      auto cell = grid_.find(cell_key(ix, iy));
      if (cell == grid_.end()) continue;
      for (std::size_t idx : cell->second) {
        const Poi& p = pois_[idx];
        if (p.category != category) continue;
        if (haversine_m(origin, p.location) <= radius_m) out.push_back(idx);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gravity grounding
// ---------------------------------------------------------------------------

std::vector<Candidate> candidate_pois(const PoiDatabase& db, const std::string& category,
                                      const GeoPoint& origin, const GravityParams& params) {
  if (!db.has_category(category)) {
    throw GroundingError("no POIs of category \"" + category + "\" anywhere in the city");
  }
  if (params.candidate_cap < 1) throw ConfigError("candidate_cap must be >= 1");
  if (!(params.search_radius_m > 0)) throw ConfigError("search_radius_m must be > 0");

  // Half the Earth's circumference reaches everything.
  constexpr double kExhausted = 2.1e7;
  std::vector<std::size_t> found;
  for (double radius = params.search_radius_m; found.empty(); radius *= 2.0) {
    found = db.category_in_radius(category, origin, radius);
    if (found.empty() && radius > kExhausted) break;
  }
  if (found.empty()) {
    throw GroundingError("no POIs of category \"" + category + "\" reachable from query origin");
  }

  std::vector<Candidate> candidates;
  candidates.reserve(found.size());
  for (std::size_t idx : found) {
    const Poi& p = db.pois()[idx];
    candidates.push_back({&p, std::max(haversine_m(origin, p.location), kDistanceFloorM)});
  }
  // Ties broken by id so candidate order never depends on index layout.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.poi->id < b.poi->id;
  });
  if (candidates.size() > static_cast<std::size_t>(params.candidate_cap)) {
    candidates.resize(static_cast<std::size_t>(params.candidate_cap));
  }
  return candidates;
}

std::vector<double> gravity_probabilities(std::span<const Candidate> candidates,
                                          const GravityParams& params) {
  if (candidates.empty()) throw GroundingError("gravity weighting needs at least one candidate");
  std::vector<double> log_w(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (!(c.distance_m > 0) || !(c.poi->attractiveness > 0)) {
      throw NumericError("candidate \"" + c.poi->id + "\" has non-positive distance or attractiveness");
    }
    log_w[i] = params.beta * std::log(c.distance_m) + params.alpha * std::log(c.poi->attractiveness);
    if (!std::isfinite(log_w[i])) {
      throw NumericError("non-finite gravity weight for candidate \"" + c.poi->id + "\"");
    }
  }
  const double max_log = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  std::vector<double> probs(candidates.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::exp(log_w[i] - max_log);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

const Poi& sample_destination(std::span<const double> probabilities,
                              std::span<const Candidate> candidates, RngStream& rng) {
  if (probabilities.size() != candidates.size() || candidates.empty()) {
    throw GroundingError("sample_destination: probability/candidate size mismatch");
  }
  return *candidates[rng.categorical(probabilities)].poi;
}

// ---------------------------------------------------------------------------
// Modes and the space-time prism
// ---------------------------------------------------------------------------

std::vector<TransportMode> permitted_modes(const PersonProfile& profile) {
  std::vector<TransportMode> out;
  for (TransportMode m : kAllModes) {
    if (m == TransportMode::car && !profile.owns_car) continue;
    if (m == TransportMode::ebike && !profile.owns_ebike) continue;
    out.push_back(m);
  }
  return out;
}

std::vector<TransportMode> feasible_modes(const GeoPoint& origin, const GeoPoint& dest,
                                          TimeOfDay depart, TimeOfDay deadline,
                                          const ModeSpeedTable& speeds,
                                          std::span<const TransportMode> available) {
  const double distance = haversine_m(origin, dest);
  const double budget_s = (deadline.minutes() - depart.minutes()) * 60.0;
  std::vector<TransportMode> out;
  for (TransportMode m : available) {
    if (distance / speeds.speed(m) <= budget_s) out.push_back(m);
  }
  return out;
}

bool prism_feasible(const GeoPoint& origin, const GeoPoint& dest, TimeOfDay depart,
                    TimeOfDay deadline, const ModeSpeedTable& speeds,
                    std::span<const TransportMode> available) {
  if (origin == dest) return true;
  return !feasible_modes(origin, dest, depart, deadline, speeds, available).empty();
}

TransportMode fastest_mode(std::span<const TransportMode> modes, const ModeSpeedTable& speeds) {
  if (modes.empty()) throw FeasibilityError("fastest_mode over an empty mode set");
  TransportMode best = modes.front();
  for (TransportMode m : modes) {
    if (speeds.speed(m) > speeds.speed(best)) best = m;
  }
  return best;
}

ModeChoice choose_mode(const Poi& from, const Poi& to, const PlannedActivity& activity,
                       const PersonProfile& profile, const AgentState& state,
                       std::span<const TransportMode> options, const ModeSpeedTable& speeds,
                       Backend& backend, const TemplateLibrary& templates,
                       const GenerationParams& params) {
  if (options.empty()) throw FeasibilityError("choose_mode needs a non-empty option set");

  const double distance = haversine_m(from.location, to.location);
  std::string option_names;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) option_names += ", ";
    option_names += mode_display_name(options[i]);
  }
  const Bindings bindings = {
      {"character_profile", profile_text(profile)},
      {"destination_poi_name", to.name},
      {"destination_poi_type", to.category},
      {"activity_type", activity.intention},
      {"distance", std::to_string(static_cast<long long>(std::llround(distance)))},
      {"formatted_time", state.now.to_string()},
      {"available_options", option_names},
  };

  const auto fallback = [&]() {
    ModeChoice c;
    c.mode = fastest_mode(options, speeds);
    c.reasoning = "fallback: fastest feasible mode";
    c.fallback = true;
    return c;
  };

  try {
    const RenderedPrompt prompt = render(templates.get(templates::kModeChoice), bindings);
    const std::string reply =
        backend.complete(prompt.system_text, prompt.user_text, params, templates::kModeChoice);
    const nlohmann::json j = nlohmann::json::parse(extract_json_block(reply));
    if (!j.contains("choice") || !j["choice"].is_string()) return fallback();
    const auto mode = mode_from_synonym(j["choice"].get<std::string>());
    if (!mode) return fallback();
    if (std::find(options.begin(), options.end(), *mode) == options.end()) return fallback();
    ModeChoice c;
    c.mode = *mode;
    c.reasoning = j.value("reasoning", std::string{});
    return c;
  } catch (const Error&) {
    return fallback();
  } catch (const nlohmann::json::exception&) {
    return fallback();
  }
}

std::optional<std::string> prism_violation(const Trajectory& t, const ModeSpeedTable& speeds) {
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    const auto& r = t.records[i];
    if (!r.mode.has_value()) continue;
    const auto& prev = t.records[i - 1];
    const double distance = haversine_m(prev.location, r.location);
    const double granted_s = (r.end.minutes() - r.start.minutes()) * 60.0;
    const double needed_s = distance / speeds.speed(*r.mode);
    if (needed_s > granted_s + 1e-9) {
      return "record " + std::to_string(i) + " rides " + std::string(to_string(*r.mode)) + " " +
             std::to_string(distance) + " m in " + std::to_string(granted_s) + " s";
    }
  }
  return std::nullopt;
}

}  // namespace mobgen
