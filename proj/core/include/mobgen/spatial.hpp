#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mobgen/backend.hpp"
#include "mobgen/prompts.hpp"
#include "mobgen/rng.hpp"
#include "mobgen/types.hpp"

namespace mobgen {

struct GravityParams {
  double alpha = 1.0;             // attractiveness exponent
  double beta = -1.5;             // travel-cost exponent; negative makes cost deterrent
  int candidate_cap = 50;
  double search_radius_m = 5000;  // doubles until a candidate appears
};

struct ModeSpeedTable {
  std::array<double, 6> speed_mps{};  // indexed by TransportMode order

  static ModeSpeedTable defaults();  // walk 1.4, bike 4.0, ebike 6.0, car 8.3, bus 5.5, subway 11.0
  double speed(TransportMode m) const { return speed_mps[static_cast<std::size_t>(m)]; }
  void set(TransportMode m, double mps);
};

/// Read-only POI store with id, category, and uniform-grid spatial indexes.
class PoiDatabase {
public:
  explicit PoiDatabase(std::vector<Poi> pois, double cell_deg = 0.02);

  std::size_t size() const { return pois_.size(); }
  const std::vector<Poi>& pois() const { return pois_; }
  const Poi* find(std::string_view id) const;
  const Poi& at(std::string_view id) const;  // throws GroundingError
  bool has_category(std::string_view category) const;
  std::vector<std::string> categories() const;

  /// Indices of POIs of `category` within `radius_m` of `origin` (unsorted).
  std::vector<std::size_t> category_in_radius(std::string_view category, const GeoPoint& origin,
                                              double radius_m) const;

private:
  std::vector<Poi> pois_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_category_;
  double cell_deg_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;

  std::uint64_t cell_key(int ix, int iy) const;
};

struct Candidate {
  const Poi* poi = nullptr;
  double distance_m = 0.0;  // haversine from the query origin, floored at 10 m
};

inline constexpr double kDistanceFloorM = 10.0;

/// Candidate set for grounding one activity: POIs of the category within the
/// search radius (doubling until non-empty), nearest first, capped. Distances
/// are floored at 10 m to avoid the zero-distance singularity. Throws
/// GroundingError when the whole city lacks the category.
std::vector<Candidate> candidate_pois(const PoiDatabase& db, const std::string& category,
                                      const GeoPoint& origin, const GravityParams& params);

/// P_j = D_j^beta * A_j^alpha, normalized. Weights are computed in log space
/// so extreme exponents cannot overflow. The result sums to 1 within 1e-12.
std::vector<double> gravity_probabilities(std::span<const Candidate> candidates,
                                          const GravityParams& params);

const Poi& sample_destination(std::span<const double> probabilities,
                              std::span<const Candidate> candidates, RngStream& rng);

/// Modes a profile can use at all: walk, bike, bus and subway are always
/// available; car and ebike require ownership.
std::vector<TransportMode> permitted_modes(const PersonProfile& profile);

/// True when some available mode covers origin->dest inside [depart, deadline]
/// at straight-line distance over the mode's speed.
bool prism_feasible(const GeoPoint& origin, const GeoPoint& dest, TimeOfDay depart,
                    TimeOfDay deadline, const ModeSpeedTable& speeds,
                    std::span<const TransportMode> available);

std::vector<TransportMode> feasible_modes(const GeoPoint& origin, const GeoPoint& dest,
                                          TimeOfDay depart, TimeOfDay deadline,
                                          const ModeSpeedTable& speeds,
                                          std::span<const TransportMode> available);

TransportMode fastest_mode(std::span<const TransportMode> modes, const ModeSpeedTable& speeds);

struct ModeChoice {
  TransportMode mode = TransportMode::walk;
  std::string reasoning;
  bool fallback = false;  // reply was unusable; fastest option chosen instead
};

/// Delegates the mode decision to the backend over the trip prompt. `options`
/// is the already-computed set of resource-permitted, prism-feasible modes
/// (non-empty). Replies are matched case-insensitively through a synonym map
/// ("Walking" -> walk, "Driving" -> car, ...); anything unusable falls back
/// deterministically to the fastest option.
ModeChoice choose_mode(const Poi& from, const Poi& to, const PlannedActivity& activity,
                       const PersonProfile& profile, const AgentState& state,
                       std::span<const TransportMode> options, const ModeSpeedTable& speeds,
                       Backend& backend, const TemplateLibrary& templates,
                       const GenerationParams& params);

/// Post-hoc check over an executed trajectory: every moved record must grant
/// its mode enough time for the straight-line trip. Returns nullopt when all
/// trips fit, else the first violation.
std::optional<std::string> prism_violation(const Trajectory& t, const ModeSpeedTable& speeds);

}  // namespace mobgen
