// Microbenchmarks for the hot paths: gravity grounding, the JSD metric
// suite, and a full mock-backend agent-day.

#include <benchmark/benchmark.h>

#include <vector>

#include "mobgen/engine.hpp"
#include "mobgen/eval.hpp"
#include "mobgen/rng.hpp"
#include "mobgen/spatial.hpp"
#include "testutil.hpp"

using namespace mobgen;
namespace tu = mobgen::testutil;

namespace {

std::vector<Candidate> make_candidates(int n, std::vector<Poi>& storage) {
  RngStream rng(1, "bench_candidates", 0);
  storage.clear();
  storage.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    storage.push_back(Poi{"p" + std::to_string(i), "", "c", {0, 0}, 0.5 + rng.uniform() * 9.5});
  }
  std::vector<Candidate> out;
  out.reserve(storage.size());
  for (auto& p : storage) out.push_back({&p, 10.0 + rng.uniform() * 4990.0});
  return out;
}

void bm_gravity_probabilities(benchmark::State& state) {
  std::vector<Poi> storage;
  const auto cands = make_candidates(static_cast<int>(state.range(0)), storage);
  GravityParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gravity_probabilities(cands, params));
  }
}
BENCHMARK(bm_gravity_probabilities)->Arg(10)->Arg(50)->Arg(200);

void bm_candidate_query(benchmark::State& state) {
  PoiDatabase db = tu::make_db();
  GravityParams params;
  const GeoPoint origin{30.001, 120.001};
  for (auto _ : state) {
    benchmark::DoNotOptimize(candidate_pois(db, "restaurant", origin, params));
  }
}
BENCHMARK(bm_candidate_query);

void bm_destination_sampling(benchmark::State& state) {
  std::vector<Poi> storage;
  const auto cands = make_candidates(50, storage);
  const auto probs = gravity_probabilities(cands, GravityParams{});
  RngStream rng(7, "bench_sampling", 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(&sample_destination(probs, cands, rng));
  }
}
BENCHMARK(bm_destination_sampling);

std::vector<Trajectory> bench_population(int n) {
  PoiDatabase db = tu::make_db();
  SimulationConfig config = tu::make_config(5);
  MockBackend backend(tu::demo_rules());
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, backend, templates};
  std::vector<Trajectory> out;
  for (const auto& p : tu::make_profiles(n)) out.push_back(simulate_agent(p, env, 0));
  return out;
}

void bm_jsd(benchmark::State& state) {
  RngStream rng(11, "bench_jsd", 0);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> p(static_cast<std::size_t>(n)), q(static_cast<std::size_t>(n));
  double sp = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    p[static_cast<std::size_t>(i)] = rng.uniform() + 1e-12;
    q[static_cast<std::size_t>(i)] = rng.uniform() + 1e-12;
    sp += p[static_cast<std::size_t>(i)];
    sq += q[static_cast<std::size_t>(i)];
  }
  for (auto& x : p) x /= sp;
  for (auto& x : q) x /= sq;
  for (auto _ : state) {
    benchmark::DoNotOptimize(jsd(p, q));
  }
}
BENCHMARK(bm_jsd)->Arg(96)->Arg(960);

void bm_intention_distribution(benchmark::State& state) {
  const auto pop = bench_population(30);
  const ActivityVocabulary vocab = ActivityVocabulary::defaults();
  for (auto _ : state) {
    benchmark::DoNotOptimize(intention_sequence_distribution(pop, vocab, 1e-9));
  }
}
BENCHMARK(bm_intention_distribution);

void bm_evaluate(benchmark::State& state) {
  const auto pop = bench_population(30);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(pop, pop, EvalConfig{}));
  }
}
BENCHMARK(bm_evaluate);

void bm_simulate_agent_day(benchmark::State& state) {
  PoiDatabase db = tu::make_db();
  SimulationConfig config = tu::make_config(5);
  MockBackend backend(tu::demo_rules());
  TemplateLibrary templates = TemplateLibrary::builtin();
  const Environment env{db, config, backend, templates};
  const auto profile = tu::make_lecturer();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_agent_day(profile, env, 0));
  }
}
BENCHMARK(bm_simulate_agent_day);

}  // namespace

BENCHMARK_MAIN();
