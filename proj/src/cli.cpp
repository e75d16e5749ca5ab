#include "asense/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "asense/dataset_io.hpp"
#include "asense/errors.hpp"
#include "asense/eval.hpp"
#include "json.hpp"

namespace asense {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) out.push_back(std::stod(item));
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  for (const std::string& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

// Output directory resolution: an explicit path wins; otherwise fall back to
// the ASENSE_OUT_ROOT environment variable, then the working directory.
fs::path resolve_out_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* root = std::getenv("ASENSE_OUT_ROOT"); root && *root) return root;
  return ".";
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  ordered_json j = ordered_json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw SchemaMismatch("cannot parse config '" + path + "'");
  if (j.contains("task")) cfg.task = j["task"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("actuator_id")) cfg.actuator_id = j["actuator_id"].get<std::string>();
  if (j.contains("model_seed")) cfg.model_seed = j["model_seed"].get<std::uint64_t>();
  if (j.contains("model_path")) cfg.model = read_model_params(j["model_path"].get<std::string>());
  if (j.contains("mode")) cfg.mode = sense_mode_from_string(j["mode"].get<std::string>());
  if (j.contains("split_ratio")) cfg.split_ratio = j["split_ratio"].get<double>();
  if (j.contains("repeats")) cfg.repeats = j["repeats"].get<int>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("insulation_db")) cfg.insulation_db = j["insulation_db"].get<double>();
  if (j.contains("levels_db")) cfg.levels_db = j["levels_db"].get<std::vector<double>>();
  if (j.contains("volume_fractions")) {
    cfg.volume_fractions = j["volume_fractions"].get<std::vector<double>>();
  }
  if (j.contains("n_poses")) cfg.n_poses = j["n_poses"].get<int>();
  if (j.contains("combo_sizes")) cfg.combo_sizes = j["combo_sizes"].get<std::vector<int>>();
  if (j.contains("actuator_ids")) {
    cfg.actuator_ids = j["actuator_ids"].get<std::vector<std::string>>();
  }
  if (j.contains("ablation_kinds")) {
    cfg.ablation_kinds.clear();
    for (const auto& k : j["ablation_kinds"]) {
      cfg.ablation_kinds.push_back(sound_kind_from_string(k.get<std::string>()));
    }
  }
  if (j.contains("ablation_durations_s")) {
    cfg.ablation_durations_s = j["ablation_durations_s"].get<std::vector<double>>();
  }
  if (j.contains("stimulus")) {
    SoundSpec spec;
    const auto& s = j["stimulus"];
    if (s.contains("kind")) spec.kind = sound_kind_from_string(s["kind"].get<std::string>());
    if (s.contains("duration_s")) spec.duration_s = s["duration_s"].get<double>();
    if (s.contains("sample_rate_hz")) spec.sample_rate_hz = s["sample_rate_hz"].get<double>();
    if (s.contains("volume")) spec.volume = s["volume"].get<double>();
    if (s.contains("seed")) spec.seed = s["seed"].get<std::uint64_t>();
    if (s.contains("f_start_hz")) spec.f_start_hz = s["f_start_hz"].get<double>();
    if (s.contains("f_end_hz")) spec.f_end_hz = s["f_end_hz"].get<double>();
    if (s.contains("band_low_hz")) spec.band_low_hz = s["band_low_hz"].get<double>();
    if (s.contains("band_high_hz")) spec.band_high_hz = s["band_high_hz"].get<double>();
    if (s.contains("sine_freq_hz")) spec.sine_freq_hz = s["sine_freq_hz"].get<double>();
    cfg.stimulus = spec;
  }
  if (j.contains("learner")) {
    const auto& l = j["learner"];
    if (l.contains("kind")) cfg.learner.kind = learner_kind_from_string(l["kind"].get<std::string>());
    if (l.contains("k")) cfg.learner.k = l["k"].get<int>();
    if (l.contains("metric")) cfg.learner.metric = metric_from_string(l["metric"].get<std::string>());
    if (l.contains("c")) cfg.learner.c = l["c"].get<double>();
  }
}

// Shared experiment flags; returns a callback that folds parsed flags into
// the config after the config file (flags win).
struct ExperimentFlags {
  std::string config_path, task, mode, actuator_id, model_path, out_dir;
  std::uint64_t seed = 0;
  std::uint64_t model_seed = 1;
  double split_ratio = 0.6;
  int repeats = 25;
  int jobs = 1;
  double insulation = 40.0;
  std::string stim_kind;
  double stim_dur = 0.0;
  double stim_volume = 0.0;
  std::uint64_t stim_seed = 0;
  std::string learner, metric, levels, fractions, combo_sizes, actuators, kinds, durations;
  int k = 5;
  double c = 100.0;
  int n_poses = 6;

  CLI::App* app = nullptr;

  void attach(CLI::App* sub, bool seed_required) {
    app = sub;
    sub->add_option("--config", config_path, "experiment config file (JSON)");
    auto* seed_opt = sub->add_option("--seed", seed, "master experiment seed");
    if (seed_required) seed_opt->required();
    sub->add_option("--task", task, "task selector");
    sub->add_option("--mode", mode, "sensing mode: passive|dynamic|active");
    sub->add_option("--actuator", actuator_id, "actuator id");
    sub->add_option("--model-seed", model_seed, "seed for the default actuator model");
    sub->add_option("--model-params", model_path, "actuator model parameter file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--split-ratio", split_ratio, "train fraction");
    sub->add_option("--repeats", repeats, "repeats per condition");
    sub->add_option("--jobs", jobs, "worker parallelism bound");
    sub->add_option("--insulation", insulation, "insulation override (dB)");
    sub->add_option("--stim-kind", stim_kind, "stimulus kind");
    sub->add_option("--stim-dur", stim_dur, "stimulus duration (s)");
    sub->add_option("--stim-volume", stim_volume, "stimulus volume fraction");
    sub->add_option("--stim-seed", stim_seed, "stimulus noise seed");
    sub->add_option("--learner", learner, "learner kind: knn|knn_regressor|svc");
    sub->add_option("--k", k, "KNN neighbor count");
    sub->add_option("--metric", metric, "KNN metric: l1|l2");
    sub->add_option("--c", c, "SVC regularization C");
    sub->add_option("--levels", levels, "comma list of external noise levels (dB)");
    sub->add_option("--fractions", fractions, "comma list of volume fractions");
    sub->add_option("--n-poses", n_poses, "number of workspace poses");
    sub->add_option("--combo-sizes", combo_sizes, "comma list of training combination sizes");
    sub->add_option("--actuators", actuators, "comma list of actuator ids");
    sub->add_option("--kinds", kinds, "comma list of sound kinds");
    sub->add_option("--durations", durations, "comma list of durations (s)");
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    auto passed = [&](const std::string& name) { return app->count(name) > 0; };
    if (passed("--seed")) cfg.seed = seed;
    if (passed("--task")) cfg.task = task;
    if (passed("--mode")) cfg.mode = sense_mode_from_string(mode);
    if (passed("--actuator")) cfg.actuator_id = actuator_id;
    if (passed("--model-seed")) cfg.model_seed = model_seed;
    if (passed("--model-params")) cfg.model = read_model_params(model_path);
    if (passed("--out")) cfg.out_dir = out_dir;
    if (passed("--split-ratio")) cfg.split_ratio = split_ratio;
    if (passed("--repeats")) cfg.repeats = repeats;
    if (passed("--jobs")) cfg.jobs = jobs;
    if (passed("--insulation")) cfg.insulation_db = insulation;
    if (passed("--stim-kind") || passed("--stim-dur") || passed("--stim-volume") ||
        passed("--stim-seed")) {
      SoundSpec spec = cfg.stimulus ? *cfg.stimulus : cfg.resolve_stimulus(cfg.task);
      if (passed("--stim-kind")) spec.kind = sound_kind_from_string(stim_kind);
      if (passed("--stim-dur")) spec.duration_s = stim_dur;
      if (passed("--stim-volume")) spec.volume = stim_volume;
      if (passed("--stim-seed")) spec.seed = stim_seed;
      cfg.stimulus = spec;
    }
    if (passed("--learner")) cfg.learner.kind = learner_kind_from_string(learner);
    if (passed("--k")) cfg.learner.k = k;
    if (passed("--metric")) cfg.learner.metric = metric_from_string(metric);
    if (passed("--c")) cfg.learner.c = c;
    if (passed("--levels")) cfg.levels_db = split_doubles(levels);
    if (passed("--fractions")) cfg.volume_fractions = split_doubles(fractions);
    if (passed("--n-poses")) cfg.n_poses = n_poses;
    if (passed("--combo-sizes")) cfg.combo_sizes = split_ints(combo_sizes);
    if (passed("--actuators")) cfg.actuator_ids = split_list(actuators);
    if (passed("--kinds")) {
      cfg.ablation_kinds.clear();
      for (const std::string& kname : split_list(kinds)) {
        cfg.ablation_kinds.push_back(sound_kind_from_string(kname));
      }
    }
    if (passed("--durations")) cfg.ablation_durations_s = split_doubles(durations);
    return cfg;
  }
};

void write_report_files(const EvalReport& report, const fs::path& dir,
                        const std::string& stem) {
  fs::create_directories(dir);
  write_text_file(dir / (stem + ".txt"), report.to_text());
  write_text_file(dir / (stem + ".json"), report.to_json_string());
}

int run_gen_sound(const SoundSpec& spec, const std::string& out) {
  write_wav(out, synthesize(spec));
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_experiment_command(const ExperimentConfig& cfg) {
  const fs::path out_dir = resolve_out_dir(cfg.out_dir);
  if (cfg.task == "simultaneous700") {
    SimultaneousReports reports = run_simultaneous_experiment(cfg);
    write_report_files(reports.location, out_dir, "report_location");
    write_report_files(reports.force, out_dir, "report_force");
    write_report_files(reports.inflation, out_dir, "report_inflation");
    std::cout << reports.location.to_text() << reports.force.to_text()
              << reports.inflation.to_text();
    return 0;
  }
  EvalReport report;
  if (cfg.task == "location6") {
    report = run_location_experiment(cfg, cfg.mode);
  } else if (cfg.task == "regression30") {
    report = run_regression_experiment(cfg, cfg.mode);
  } else if (cfg.task == "force3") {
    report = run_force_experiment(cfg);
  } else if (cfg.task == "material3") {
    report = run_material_experiment(cfg);
  } else if (cfg.task == "temperature") {
    report = run_temperature_experiment(cfg, cfg.mode);
  } else {
    throw InvalidSpec("unknown experiment task '" + cfg.task + "'");
  }
  write_report_files(report, out_dir, "report");
  std::cout << report.to_text();
  return 0;
}

int run_ablate_command(const ExperimentConfig& cfg) {
  AblationResult result;
  if (cfg.task == "noise") {
    result = run_noise_robustness(cfg, cfg.levels_db);
  } else if (cfg.task == "pose") {
    result = run_pose_transfer(cfg);
  } else if (cfg.task == "sound-grid") {
    result = run_sound_ablation(cfg);
  } else if (cfg.task == "volume") {
    result = run_volume_ablation(cfg, cfg.volume_fractions);
  } else if (cfg.task == "transfer") {
    result = run_actuator_transfer(cfg);
  } else {
    throw InvalidSpec("unknown ablation task '" + cfg.task + "'");
  }
  const fs::path out_dir = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "ablation.csv", result.to_csv());
  std::cout << result.to_csv();
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"acoustic sensing toolkit"};
  app.require_subcommand(1);

  // gen-sound
  auto* gen = app.add_subcommand("gen-sound", "synthesize a stimulus waveform");
  std::string gen_kind = "sine", gen_out;
  SoundSpec gen_spec;
  gen_spec.kind = SoundKind::Sine;
  gen->add_option("--kind", gen_kind, "sine|white_noise|band_noise|log_sweep");
  gen->add_option("--dur", gen_spec.duration_s, "duration (s)");
  gen->add_option("--rate", gen_spec.sample_rate_hz, "sample rate (Hz)");
  gen->add_option("--volume", gen_spec.volume, "volume fraction (0,1]");
  gen->add_option("--seed", gen_spec.seed, "noise seed");
  gen->add_option("--freq", gen_spec.sine_freq_hz, "sine frequency (Hz)");
  gen->add_option("--f-start", gen_spec.f_start_hz, "sweep start (Hz)");
  gen->add_option("--f-end", gen_spec.f_end_hz, "sweep end (Hz)");
  gen->add_option("--band-low", gen_spec.band_low_hz, "band noise low edge (Hz)");
  gen->add_option("--band-high", gen_spec.band_high_hz, "band noise high edge (Hz)");
  gen->add_option("--out", gen_out, "output WAV path")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a labeled synthetic dataset");
  ExperimentFlags sim_flags;
  sim_flags.attach(sim, /*seed_required=*/true);

  // featurize
  auto* feat = app.add_subcommand("featurize", "convert a dataset to spectrum features");
  std::string feat_data, feat_out;
  std::size_t feat_target_len = 0;
  feat->add_option("--data", feat_data, "dataset directory")->required();
  feat->add_option("--out", feat_out, "output feature container")->required();
  feat->add_option("--target-len", feat_target_len, "trim length in samples");
  bool feat_normalize = false;
  feat->add_flag("--normalize", feat_normalize, "scale each spectrum to unit L2 norm");

  // train
  auto* train = app.add_subcommand("train", "train a sensor model on features");
  std::string train_features, train_target = "location", train_learner = "knn",
              train_metric = "l2", train_out;
  int train_k = 5;
  double train_c = 100.0;
  train->add_option("--features", train_features, "feature container")->required();
  train->add_option("--target", train_target, "label field to predict");
  train->add_option("--learner", train_learner, "knn|knn_regressor|svc");
  train->add_option("--k", train_k, "KNN neighbor count");
  train->add_option("--metric", train_metric, "KNN metric: l1|l2");
  train->add_option("--c", train_c, "SVC regularization C");
  train->add_option("--out", train_out, "output model path")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "predict with a trained model");
  std::string pred_model, pred_features, pred_out;
  pred->add_option("--model", pred_model, "model path")->required();
  pred->add_option("--features", pred_features, "feature container")->required();
  pred->add_option("--out", pred_out, "output CSV path")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "evaluate a model on features, or run a named experiment end-to-end");
  std::string eval_model, eval_features;
  eval_cmd->add_option("--model", eval_model, "model path (file mode)");
  eval_cmd->add_option("--features", eval_features, "feature container (file mode)");
  ExperimentFlags eval_flags;
  eval_flags.attach(eval_cmd, /*seed_required=*/false);

  // ablate
  auto* ablate = app.add_subcommand("ablate", "run an ablation grid");
  ExperimentFlags ablate_flags;
  ablate_flags.attach(ablate, /*seed_required=*/true);

  // grid-search
  auto* grid = app.add_subcommand("grid-search", "cross-validated hyperparameter search");
  std::string gs_features, gs_target = "material", gs_learner = "knn", gs_ks = "1,2,3,5,10",
              gs_metrics = "l1,l2", gs_cs, gs_out;
  int gs_folds = 5;
  std::uint64_t gs_seed = 0;
  grid->add_option("--features", gs_features, "feature container")->required();
  grid->add_option("--target", gs_target, "label field to predict");
  grid->add_option("--learner", gs_learner, "knn|svc");
  grid->add_option("--ks", gs_ks, "comma list of k values");
  grid->add_option("--metrics", gs_metrics, "comma list of metrics");
  grid->add_option("--cs", gs_cs, "comma list of C values (svc)");
  grid->add_option("--folds", gs_folds, "cross-validation folds");
  grid->add_option("--seed", gs_seed, "fold shuffle seed");
  int gs_jobs = 1;
  grid->add_option("--jobs", gs_jobs, "worker parallelism bound");
  grid->add_option("--out", gs_out, "output CSV path");

  // snr
  auto* snr = app.add_subcommand("snr", "signal-to-noise ratio of an active/passive pair");
  std::string snr_active, snr_passive;
  snr->add_option("--active", snr_active, "active recording WAV")->required();
  snr->add_option("--passive", snr_passive, "passive recording WAV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      gen_spec.kind = sound_kind_from_string(gen_kind);
      return run_gen_sound(gen_spec, gen_out);
    }
    if (sim->parsed()) {
      ExperimentConfig cfg = sim_flags.build();
      const fs::path data_dir = cfg.out_dir.empty()
                                    ? resolve_out_dir("") / ("dataset-" + cfg.task)
                                    : fs::path(cfg.out_dir);
      std::vector<Recording> recs = build_recordings(cfg, cfg.task, cfg.mode);
      write_dataset(recs, data_dir);
      write_model_params(data_dir / "model.json", cfg.resolve_model());
      std::cout << "wrote " << recs.size() << " recordings to " << data_dir.string() << "\n";
      return 0;
    }
    if (feat->parsed()) {
      std::vector<Recording> recs = read_dataset(feat_data);
      std::optional<std::size_t> target_len;
      if (feat->count("--target-len") > 0) target_len = feat_target_len;
      write_featureset(feat_out, featurize(recs, target_len, feat_normalize));
      std::cout << "wrote " << feat_out << "\n";
      return 0;
    }
    if (train->parsed()) {
      FeatureSet data = read_featureset(train_features);
      Target target = target_from_string(train_target);
      LearnerKind kind = learner_kind_from_string(train_learner);
      SensorModel model;
      if (kind == LearnerKind::LinearSvc) {
        model = svc_train(data, target, train_c);
        if (const SvcModel* svc_model = model.svc(); svc_model && !svc_model->converged) {
          std::cerr << "warning: NotConverged after " << svc_model->epochs_used
                    << " epochs; model returned with diagnostics\n";
        }
      } else {
        model = knn_train(data, target, train_k, metric_from_string(train_metric),
                          kind == LearnerKind::KnnRegressor ? KnnMode::Regress
                                                            : KnnMode::Classify);
      }
      write_sensor_model(train_out, model);
      std::cout << "wrote " << train_out << "\n";
      return 0;
    }
    if (pred->parsed()) {
      SensorModel model = read_sensor_model(pred_model);
      FeatureSet data = read_featureset(pred_features);
      std::ostringstream os;
      os << "index,prediction\n";
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (model.is_classifier()) {
          os << i << "," << model.predict_label(data.features[i]).to_string() << "\n";
        } else {
          os << i << "," << Label::number(model.predict_value(data.features[i])).to_string()
             << "\n";
        }
      }
      write_text_file(pred_out, os.str());
      std::cout << "wrote " << pred_out << "\n";
      return 0;
    }
    if (eval_cmd->parsed()) {
      if (!eval_model.empty()) {
        if (eval_features.empty()) throw IoFailure("evaluate --model requires --features");
        SensorModel model = read_sensor_model(eval_model);
        FeatureSet data = read_featureset(eval_features);
        EvalReport report = evaluate(model, data);
        report.task = "file-mode";
        report.learner = to_string(model.kind());
        ExperimentConfig cfg = eval_flags.build();
        if (!cfg.out_dir.empty()) write_report_files(report, cfg.out_dir, "report");
        std::cout << report.to_text();
        return 0;
      }
      return run_experiment_command(eval_flags.build());
    }
    if (ablate->parsed()) {
      return run_ablate_command(ablate_flags.build());
    }
    if (grid->parsed()) {
      FeatureSet data = read_featureset(gs_features);
      Target target = target_from_string(gs_target);
      ParamGrid pg;
      if (learner_kind_from_string(gs_learner) == LearnerKind::LinearSvc) {
        if (gs_cs.empty()) {
          for (int e = -2; e <= 10; ++e) pg.cs.push_back(std::pow(10.0, e));
          pg.kind = LearnerKind::LinearSvc;
          pg.ks.clear();
          pg.metrics.clear();
        } else {
          pg = ParamGrid::svc(split_doubles(gs_cs));
        }
      } else {
        pg.ks = split_ints(gs_ks);
        pg.metrics.clear();
        for (const std::string& mname : split_list(gs_metrics)) {
          pg.metrics.push_back(metric_from_string(mname));
        }
      }
      GridSearchResult result = grid_search(data, target, pg, gs_folds, gs_seed, gs_jobs);
      std::ostringstream os;
      os << "params,cv_acr\n";
      for (const auto& [point, score] : result.table) {
        os << "\"" << point.describe() << "\"," << score << "\n";
      }
      if (!gs_out.empty()) write_text_file(gs_out, os.str());
      std::cout << os.str();
      std::cout << "best: " << result.best.describe() << " cv_acr=" << result.best_score << "\n";
      return 0;
    }
    if (snr->parsed()) {
      Recording active, passive;
      active.waveform = read_wav(snr_active);
      passive.waveform = read_wav(snr_passive);
      std::cout << snr_estimate(active, passive) << " dB\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace asense
