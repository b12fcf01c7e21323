#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mobgen/engine.hpp"
#include "mobgen/errors.hpp"
#include "mobgen/eval.hpp"
#include "mobgen/io.hpp"

namespace mobgen::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string backend_kind;
  std::string ablation;  // empty: take the axes from the config
  std::uint64_t seed = 0;
  bool seed_set = false;
  int agents = 0;
};

void add_run_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Run configuration JSON")->required();
  cmd->add_option("--seed", flags.seed, "Override the configured seed")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--out-dir", flags.out_dir, "Output directory (overrides config)");
  cmd->add_option("--backend", flags.backend_kind, "Backend kind override")
      ->check(CLI::IsMember({"remote", "mock"}));
  cmd->add_option("--ablation", flags.ablation, "System configuration under test")
      ->check(CLI::IsMember({"full", "random-plan", "direct-plan", "random-mode", "no-rethinking"}));
  cmd->add_option("--agents", flags.agents, "Limit to the first N profiles");
}

void apply_ablation(SimulationConfig& sim, const std::string& ablation) {
  if (ablation.empty()) return;  // axes come from the config file
  sim.plan_source = PlanSource::narrative_parsing;
  sim.mode_choice = ModeChoiceSource::llm;
  sim.rethinking_enabled = true;
  if (ablation == "random-plan") sim.plan_source = PlanSource::random;
  else if (ablation == "direct-plan") sim.plan_source = PlanSource::direct_llm;
  else if (ablation == "random-mode") sim.mode_choice = ModeChoiceSource::random;
  else if (ablation == "no-rethinking") sim.rethinking_enabled = false;
}

std::string ablation_label(const SimulationConfig& sim) {
  if (sim.plan_source == PlanSource::random) return "random-plan";
  if (sim.plan_source == PlanSource::direct_llm) return "direct-plan";
  if (sim.mode_choice == ModeChoiceSource::random) return "random-mode";
  if (!sim.rethinking_enabled) return "no-rethinking";
  return "full";
}

struct LoadedRun {
  CliConfig config;
  std::vector<PersonProfile> profiles;
  std::vector<std::string> warnings;
};

LoadedRun load_run(const CommonFlags& flags) {
  LoadedRun run;
  run.config = load_config(flags.config_path);
  if (flags.seed_set) run.config.sim.seed = flags.seed;
  if (!flags.out_dir.empty()) run.config.out_dir = flags.out_dir;
  if (!flags.backend_kind.empty()) run.config.backend.kind = flags.backend_kind;
  if (flags.agents > 0) run.config.agents_limit = flags.agents;
  apply_ablation(run.config.sim, flags.ablation);

  ProfilesIngest ingest = ingest_profiles(run.config.profiles_path);
  run.warnings = ingest.warnings;
  run.profiles = std::move(ingest.profiles);
  if (run.config.agents_limit > 0 &&
      run.profiles.size() > static_cast<std::size_t>(run.config.agents_limit)) {
    run.profiles.resize(static_cast<std::size_t>(run.config.agents_limit));
  }
  if (run.profiles.empty()) throw ConfigError("no usable profiles after ingestion");
  for (const auto& w : apply_profile_occupations(run.config.sim.meo, run.profiles)) {
    run.warnings.push_back(w);
  }
  for (const auto& r : ingest.report.rejected) {
    run.warnings.push_back("profile " + r.id + " rejected: " + r.reason);
  }
  return run;
}

std::string run_extras(const CommonFlags& flags, const CliConfig& cfg) {
  json j;
  j["ablation"] = flags.ablation.empty() ? ablation_label(cfg.sim) : flags.ablation;
  j["plan_source"] = std::string(to_string(cfg.sim.plan_source));
  j["mode_choice"] = std::string(to_string(cfg.sim.mode_choice));
  j["rethinking_enabled"] = cfg.sim.rethinking_enabled;
  j["input_digests"] = {{"profiles", file_digest(cfg.profiles_path)},
                        {"pois", file_digest(cfg.pois_path)}};
  j["backend_kind"] = cfg.backend.kind;
  return j.dump();
}

int cmd_simulate(const CommonFlags& flags, bool plans_only) {
  LoadedRun run = load_run(flags);
  const CliConfig& cfg = run.config;
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";

  PoiDatabase db(load_pois(cfg.pois_path));
  for (const auto& [activity, category] : cfg.sim.activity_poi_map.mapping) {
    if (!db.has_category(category)) {
      std::cerr << "warning: no POIs of category \"" << category << "\" (mapped from \""
                << activity << "\"); affected activities will keep agents in place\n";
    }
  }
  const TemplateLibrary templates = cfg.template_dir
                                        ? TemplateLibrary::with_overrides(*cfg.template_dir)
                                        : TemplateLibrary::builtin();
  std::unique_ptr<Backend> backend = make_backend(cfg.backend);
  const Environment env{db, cfg.sim, *backend, templates};

  RunArtifacts artifacts =
      plans_only ? plan_population(run.profiles, env) : simulate_population(run.profiles, env);

  fs::create_directories(cfg.out_dir);
  write_narratives(cfg.out_dir / "narratives.jsonl", artifacts.results);
  write_plans(cfg.out_dir / "plans.jsonl", artifacts.results);
  if (!plans_only) {
    std::vector<Trajectory> trajectories;
    trajectories.reserve(artifacts.results.size());
    for (const auto& r : artifacts.results) trajectories.push_back(r.trajectory);
    write_trajectories(cfg.out_dir / "trajectories.jsonl", trajectories);
    write_decisions(cfg.out_dir / "decisions.jsonl", artifacts.results);
  }
  write_manifest(cfg.out_dir / "manifest.json", artifacts.manifest, run_extras(flags, cfg));

  std::cout << (plans_only ? "planned " : "simulated ") << artifacts.manifest.trajectory_count
            << " agent-days into " << cfg.out_dir.string() << " (config digest "
            << artifacts.manifest.config_digest << ")\n";
  if (!artifacts.manifest.failures.empty()) {
    std::cout << artifacts.manifest.failures.size() << " agent-level issues recorded in the manifest\n";
  }
  return 0;
}

EvalConfig eval_config_for(const std::string& config_path) {
  if (config_path.empty()) return EvalConfig{};
  return load_config(config_path).eval;
}

int cmd_evaluate(const std::string& generated_path, const std::string& reference_path,
                 const std::string& config_path, const std::string& out_path) {
  const EvalConfig eval_cfg = eval_config_for(config_path);
  const auto generated = read_population(generated_path, eval_cfg.vocabulary);
  const auto reference = read_population(reference_path, eval_cfg.vocabulary);
  const EvaluationReport report = evaluate(generated, reference, eval_cfg);

  const fs::path out = out_path.empty() ? fs::path("report.json") : fs::path(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_report(out, report, file_digest(generated_path), file_digest(reference_path));

  std::cout << "jsd_intention " << report.jsd_intention << "\n"
            << "jsd_locations " << report.jsd_locations << "\n"
            << "jsd_mode      " << report.jsd_mode << "\n"
            << "jsd_radius    " << report.jsd_radius << "\n"
            << "final_score   " << report.final_score << "\n"
            << "report written to " << out.string() << "\n";
  return 0;
}

int cmd_report(const std::string& generated_path, const std::string& reference_path,
               const std::string& config_path, const std::string& out_dir) {
  const EvalConfig eval_cfg = eval_config_for(config_path);
  const auto generated = read_population(generated_path, eval_cfg.vocabulary);
  const auto reference = read_population(reference_path, eval_cfg.vocabulary);
  const EvaluationReport report = evaluate(generated, reference, eval_cfg);

  const fs::path dir = out_dir.empty() ? fs::path("report_csv") : fs::path(out_dir);
  write_distribution_csvs(dir, report);

  json manifest;
  manifest["input_digests"] = {{"generated", file_digest(generated_path)},
                               {"reference", file_digest(reference_path)}};
  manifest["final_score"] = report.final_score;
  std::ofstream mf(dir / "manifest.json");
  mf << manifest.dump(2) << "\n";

  std::cout << "distribution CSVs written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Hierarchical narrative-to-action mobility generator"};
  app.require_subcommand(1);

  CommonFlags plan_flags, sim_flags;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Generate narratives and parsed plans");
  add_run_flags(plan_cmd, plan_flags);
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run the full pipeline to trajectories");
  add_run_flags(sim_cmd, sim_flags);

  std::string gen_path, ref_path, eval_config, eval_out;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score generated against reference data");
  eval_cmd->add_option("--generated", gen_path, "Generated trajectories (JSON lines)")->required();
  eval_cmd->add_option("--reference", ref_path, "Reference trajectories or diaries (JSON lines)")
      ->required();
  eval_cmd->add_option("--config", eval_config, "Config JSON for vocabulary and binning");
  eval_cmd->add_option("--out", eval_out, "Report path (default report.json)");

  std::string rep_gen, rep_ref, rep_config, rep_out;
  CLI::App* report_cmd = app.add_subcommand("report", "Dump plot-ready distribution CSVs");
  report_cmd->add_option("--generated", rep_gen, "Generated trajectories (JSON lines)")->required();
  report_cmd->add_option("--reference", rep_ref, "Reference trajectories or diaries (JSON lines)")
      ->required();
  report_cmd->add_option("--config", rep_config, "Config JSON for vocabulary and binning");
  report_cmd->add_option("--out-dir", rep_out, "CSV output directory (default report_csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << json{{"error", e.what()}, {"kind", "usage"}}.dump() << "\n";
    }
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (plan_cmd->parsed()) return cmd_simulate(plan_flags, /*plans_only=*/true);
    if (sim_cmd->parsed()) return cmd_simulate(sim_flags, /*plans_only=*/false);
    if (eval_cmd->parsed()) return cmd_evaluate(gen_path, ref_path, eval_config, eval_out);
    if (report_cmd->parsed()) return cmd_report(rep_gen, rep_ref, rep_config, rep_out);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "config"}}.dump() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "input"}}.dump() << "\n";
    return 1;
  } catch (const MetricError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "input"}}.dump() << "\n";
    return 1;
  } catch (const GroundingError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "input"}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "internal"}}.dump() << "\n";
    return 2;
  }
}

}  // namespace mobgen::cli
