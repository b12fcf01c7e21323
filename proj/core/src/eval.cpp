#include "mobgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mobgen/errors.hpp"
#include "mobgen/geo.hpp"

namespace mobgen {

namespace {

void check_probability_vector(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw MetricError("probabilities must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw MetricError("probability vector sums to " + std::to_string(sum) + ", expected 1");
  }
}

std::string format_edge(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

Distribution make_distribution(std::vector<std::string> labels, std::vector<double> edges,
                               std::span<const double> counts, double epsilon) {
  if (labels.size() != counts.size()) throw MetricError("label/count size mismatch");
  if (!edges.empty() && edges.size() != counts.size() + 1) {
    throw MetricError("edge vector must have one more entry than the bins");
  }
  Distribution d;
  d.labels = std::move(labels);
  d.edges = std::move(edges);
  d.probs.resize(counts.size());
  double total = 0.0;
  for (double c : counts) {
    if (c < 0) throw MetricError("negative count");
    total += c + epsilon;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d.probs[i] = (counts[i] + epsilon) / total;
  }
  return d;
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw MetricError("jsd: vectors differ in length");
  if (p.empty()) throw MetricError("jsd: empty vectors");
  check_probability_vector(p);
  check_probability_vector(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    // One commutative addition per cell keeps jsd(P,Q) == jsd(Q,P) bit-exact.
    const double p_term = p[i] > 0.0 ? p[i] * std::log2(p[i] / m) : 0.0;
    const double q_term = q[i] > 0.0 ? q[i] * std::log2(q[i] / m) : 0.0;
    acc += 0.5 * (p_term + q_term);
  }
  // The math keeps this inside [0, 1]; trim float dust at the borders.
  return std::clamp(acc, 0.0, 1.0);
}

double jsd(const Distribution& p, const Distribution& q) {
  if (p.labels != q.labels || p.edges != q.edges) {
    throw MetricError("jsd: distributions have mismatched supports");
  }
  return jsd(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

double radius_of_gyration(const Trajectory& t) {
  if (t.records.empty()) throw MetricError("radius_of_gyration over an empty trajectory");
  GeoPoint mean{};
  for (const auto& r : t.records) {
    mean.lat += r.location.lat;
    mean.lon += r.location.lon;
  }
  const double n = static_cast<double>(t.records.size());
  mean.lat /= n;
  mean.lon /= n;

  const LocalProjection proj(mean);
  double cx = 0.0, cy = 0.0;
  std::vector<std::pair<double, double>> xy;
  xy.reserve(t.records.size());
  for (const auto& r : t.records) {
    xy.push_back(proj.to_xy_m(r.location));
    cx += xy.back().first;
    cy += xy.back().second;
  }
  cx /= n;
  cy /= n;

  double acc = 0.0;
  for (const auto& [x, y] : xy) {
    acc += (x - cx) * (x - cx) + (y - cy) * (y - cy);
  }
  return std::sqrt(acc / n);
}

int daily_unique_locations(const Trajectory& t) {
  std::set<std::string> ids;
  for (const auto& r : t.records) ids.insert(r.poi_id);
  return static_cast<int>(ids.size());
}

std::vector<std::string> intention_slots(const Trajectory& t) {
  if (t.records.empty()) throw MetricError("intention_slots over an empty trajectory");
  std::vector<std::string> slots(TimeOfDay::kSlotsPerDay, t.records.front().activity.intention);
  for (const auto& r : t.records) {
    for (int s = r.start.slot(); s < r.end.slot(); ++s) {
      slots[static_cast<std::size_t>(s)] = r.activity.intention;
    }
  }
  // The final slot belongs to whichever record reaches the end of the day.
  slots[TimeOfDay::kLastSlot] = t.records.back().activity.intention;
  return slots;
}

std::vector<double> log_spaced_edges(double lo, double hi, int bins) {
  if (!(lo > 0) || !(hi > lo) || bins < 1) throw MetricError("bad histogram edge parameters");
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / bins;
  for (int i = 0; i <= bins; ++i) {
    edges[static_cast<std::size_t>(i)] = std::exp(log_lo + step * i);
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

Distribution mode_distribution(std::span<const Trajectory> trajectories, double epsilon) {
  std::vector<double> counts(kAllModes.size(), 0.0);
  for (const auto& t : trajectories) {
    for (const auto& r : t.records) {
      if (r.mode) counts[static_cast<std::size_t>(*r.mode)] += 1.0;
    }
  }
  std::vector<std::string> labels;
  for (TransportMode m : kAllModes) labels.emplace_back(to_string(m));
  return make_distribution(std::move(labels), {}, counts, epsilon);
}

Distribution intention_sequence_distribution(std::span<const Trajectory> trajectories,
                                             const ActivityVocabulary& vocab, double epsilon) {
  const std::size_t k = vocab.size();
  std::vector<double> counts(static_cast<std::size_t>(TimeOfDay::kSlotsPerDay) * k, 0.0);
  for (const auto& t : trajectories) {
    const auto slots = intention_slots(t);
    for (int s = 0; s < TimeOfDay::kSlotsPerDay; ++s) {
      const std::size_t cat = vocab.index_of(slots[static_cast<std::size_t>(s)]);
      counts[static_cast<std::size_t>(s) * k + cat] += 1.0;
    }
  }
  std::vector<std::string> labels;
  labels.reserve(counts.size());
  for (int s = 0; s < TimeOfDay::kSlotsPerDay; ++s) {
    for (std::size_t c = 0; c < k; ++c) {
      labels.push_back(TimeOfDay::from_slot(s).to_string() + "|" + vocab.names()[c]);
    }
  }
  return make_distribution(std::move(labels), {}, counts, epsilon);
}

Distribution radius_distribution(std::span<const Trajectory> trajectories,
                                 std::span<const double> edges, double epsilon) {
  if (edges.size() < 2) throw MetricError("radius histogram needs at least one bin");
  const std::size_t bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  for (const auto& t : trajectories) {
    const double rg = radius_of_gyration(t);
    std::size_t bin;
    if (rg < edges[1]) {
      bin = 0;
    } else if (rg >= edges[bins - 1]) {
      bin = bins - 1;
    } else {
      bin = static_cast<std::size_t>(
                std::upper_bound(edges.begin(), edges.end(), rg) - edges.begin()) -
            1;
    }
    counts[bin] += 1.0;
  }
  std::vector<std::string> labels;
  labels.reserve(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    labels.push_back(format_edge(edges[i]) + ".." + format_edge(edges[i + 1]));
  }
  return make_distribution(std::move(labels), std::vector<double>(edges.begin(), edges.end()),
                           counts, epsilon);
}

Distribution locations_distribution(std::span<const Trajectory> trajectories, int pool_at,
                                    double epsilon) {
  if (pool_at < 2) throw MetricError("locations_pool_at must be >= 2");
  const std::size_t bins = static_cast<std::size_t>(pool_at);  // values 1..pool_at-1 plus pooled
  std::vector<double> counts(bins, 0.0);
  for (const auto& t : trajectories) {
    const int l = daily_unique_locations(t);
    if (l < 1) throw MetricError("trajectory " + t.agent_id + " visits no locations");
    const std::size_t bin = (l >= pool_at) ? bins - 1 : static_cast<std::size_t>(l - 1);
    counts[bin] += 1.0;
  }
  std::vector<std::string> labels;
  for (int v = 1; v < pool_at; ++v) labels.push_back(std::to_string(v));
  labels.push_back(std::to_string(pool_at) + "+");
  return make_distribution(std::move(labels), {}, counts, epsilon);
}

double final_score(double jsd_intention, double jsd_locations, double jsd_mode, double jsd_radius) {
  for (double v : {jsd_intention, jsd_locations, jsd_mode, jsd_radius}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw MetricError("final_score inputs must lie in [0, 1]; got " + std::to_string(v));
    }
  }
  return ((1.0 - jsd_intention) + (1.0 - jsd_locations) + (1.0 - jsd_mode) + (1.0 - jsd_radius)) /
         4.0;
}

EvaluationReport evaluate(std::span<const Trajectory> generated,
                          std::span<const Trajectory> reference, const EvalConfig& config) {
  if (generated.empty() || reference.empty()) {
    throw MetricError("evaluate needs non-empty generated and reference populations");
  }
  const auto edges = log_spaced_edges(config.radius_min_m, config.radius_max_m, config.radius_bins);

  EvaluationReport report;
  const auto add = [&](const std::string& metric, Distribution gen, Distribution ref) {
    const double value = jsd(gen, ref);
    report.snapshots.push_back({metric, std::move(gen), std::move(ref)});
    return value;
  };

  report.jsd_intention =
      add("intention_sequence",
          intention_sequence_distribution(generated, config.vocabulary, config.epsilon),
          intention_sequence_distribution(reference, config.vocabulary, config.epsilon));
  report.jsd_locations =
      add("daily_unique_locations",
          locations_distribution(generated, config.locations_pool_at, config.epsilon),
          locations_distribution(reference, config.locations_pool_at, config.epsilon));
  report.jsd_mode = add("mode", mode_distribution(generated, config.epsilon),
                        mode_distribution(reference, config.epsilon));
  report.jsd_radius = add("radius_of_gyration", radius_distribution(generated, edges, config.epsilon),
                          radius_distribution(reference, edges, config.epsilon));
  report.final_score =
      final_score(report.jsd_intention, report.jsd_locations, report.jsd_mode, report.jsd_radius);
  return report;
}

}  // namespace mobgen
