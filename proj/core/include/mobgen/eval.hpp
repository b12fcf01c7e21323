#pragma once

#include <span>
#include <string>
#include <vector>

#include "mobgen/types.hpp"

namespace mobgen {

/// A probability vector over named cells, optionally carrying histogram
/// edges. Two distributions are comparable only on identical supports.
struct Distribution {
  std::vector<std::string> labels;
  std::vector<double> edges;  // empty for categorical supports; size probs+1 otherwise
  std::vector<double> probs;  // >= 0, sums to 1 within 1e-9
};

/// Counts -> probabilities with additive epsilon smoothing, renormalized.
Distribution make_distribution(std::vector<std::string> labels, std::vector<double> edges,
                               std::span<const double> counts, double epsilon);

/// Jensen-Shannon divergence with base-2 logarithms, so the value lies in
/// [0, 1]; 0*log 0 counts as 0. Throws MetricError on support mismatch.
double jsd(const Distribution& p, const Distribution& q);

/// Raw-vector overload for equal-length probability vectors.
double jsd(std::span<const double> p, std::span<const double> q);

/// Root-mean-square distance of a day's visited points from their centroid,
/// in meters. Each record contributes one point (repeat visits count per
/// record); the centroid lives in a local planar projection around the mean
/// coordinate.
double radius_of_gyration(const Trajectory& t);

/// Number of distinct POI ids visited in the day.
int daily_unique_locations(const Trajectory& t);

/// The intention active in each of the 96 slots (fill-forward over records).
std::vector<std::string> intention_slots(const Trajectory& t);

struct EvalConfig {
  ActivityVocabulary vocabulary = ActivityVocabulary::defaults();
  int radius_bins = 40;
  double radius_min_m = 10.0;
  double radius_max_m = 50'000.0;
  int locations_pool_at = 21;  // counts >= this share one pooled bin
  double epsilon = 1e-9;
};

std::vector<double> log_spaced_edges(double lo, double hi, int bins);

/// Empirical mode shares over all trips (records carrying a mode), in the
/// fixed order walk, bike, ebike, car, bus, subway. With no trips at all the
/// smoothed result is uniform.
Distribution mode_distribution(std::span<const Trajectory> trajectories, double epsilon);

/// Population distribution over the flattened (slot x category) cells of the
/// 96-slot intention sequences.
Distribution intention_sequence_distribution(std::span<const Trajectory> trajectories,
                                             const ActivityVocabulary& vocab, double epsilon);

/// Histogram of per-trajectory radius of gyration over fixed shared edges;
/// out-of-range values clamp into the boundary bins.
Distribution radius_distribution(std::span<const Trajectory> trajectories,
                                 std::span<const double> edges, double epsilon);

/// Histogram of daily unique-location counts over unit bins 1..pool_at-1,
/// pooled at pool_at and above.
Distribution locations_distribution(std::span<const Trajectory> trajectories, int pool_at,
                                    double epsilon);

/// Mean of (1 - jsd_i) over the four metrics; inputs must lie in [0, 1].
double final_score(double jsd_intention, double jsd_locations, double jsd_mode, double jsd_radius);

struct EvaluationReport {
  double jsd_intention = 0;
  double jsd_locations = 0;
  double jsd_mode = 0;
  double jsd_radius = 0;
  double final_score = 0;

  struct Snapshot {
    std::string metric;
    Distribution generated;
    Distribution reference;
  };
  std::vector<Snapshot> snapshots;
};

/// Runs the four JSD metrics on shared supports plus the final score.
EvaluationReport evaluate(std::span<const Trajectory> generated,
                          std::span<const Trajectory> reference, const EvalConfig& config);

}  // namespace mobgen
