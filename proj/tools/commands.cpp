#include "commands.hpp"

#include "json_io.hpp"
#include "svg_plot.hpp"

#include "f0priv/error.hpp"
#include "f0priv/eval.hpp"
#include "f0priv/f0_csv.hpp"
#include "f0priv/modifiers.hpp"
#include "f0priv/pitch.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

namespace f0priv::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = F0PRIV_VERSION;

struct CommonFlags {
  std::string config_path;
  std::string out;
};

struct ModifierFlags {
  std::string kind, role;
  std::uint64_t seed = 0;
  int strength = 0;
  double f1 = 0.0, f2 = 0.0;
  double target_mean = 0.0, target_std = 0.0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* kind_opt = nullptr;
  CLI::Option* role_opt = nullptr;
  CLI::Option* strength_opt = nullptr;
  CLI::Option* f1_opt = nullptr;
  CLI::Option* f2_opt = nullptr;
  CLI::Option* mean_opt = nullptr;
  CLI::Option* std_opt = nullptr;

  void attach(CLI::App* app) {
    kind_opt = app->add_option("--kind", kind, "modifier kind, e.g. voiced-flat, random-walk-strong");
    role_opt = app->add_option("--role", role, "dataset role for modulated-different: enrollment|trial");
    seed_opt = app->add_option("--seed", seed, "seed for random-walk kinds (fallback: F0PRIV_SEED)");
    strength_opt = app->add_option("--strength", strength, "random-walk strength M (1 weak, 2 strong)");
    f1_opt = app->add_option("--f1", f1, "first carrier frequency in Hz (modulated-same-*)");
    f2_opt = app->add_option("--f2", f2, "second carrier frequency in Hz (modulated-same-*)");
    mean_opt = app->add_option("--target-mean", target_mean, "shift-and-scale target mean (Hz)");
    std_opt = app->add_option("--target-std", target_std, "shift-and-scale target std (Hz)");
  }

  ModifierOptions options() const {
    ModifierOptions o;
    if (kind_opt->count()) o.kind = kind;
    if (role_opt->count()) o.role = role;
    if (seed_opt->count()) o.seed = seed;
    if (strength_opt->count()) o.strength = strength;
    if (f1_opt->count()) o.f1 = f1;
    if (f2_opt->count()) o.f2 = f2;
    if (mean_opt->count()) o.target_mean_hz = target_mean;
    if (std_opt->count()) o.target_std_hz = target_std;
    return o;
  }
};

struct PitchFlags {
  double frame_len = 0, frame_hop = 0, f_min = 0, f_max = 0, threshold = 0;
  CLI::Option *len_opt = nullptr, *hop_opt = nullptr, *min_opt = nullptr, *max_opt = nullptr,
              *thr_opt = nullptr;

  void attach(CLI::App* app) {
    len_opt = app->add_option("--frame-len", frame_len, "analysis frame length in seconds (0.025)");
    hop_opt = app->add_option("--frame-hop", frame_hop, "frame hop in seconds (0.010)");
    min_opt = app->add_option("--f-min", f_min, "lowest pitch in Hz (60)");
    max_opt = app->add_option("--f-max", f_max, "highest pitch in Hz (400)");
    thr_opt = app->add_option("--voicing-threshold", threshold, "voicing threshold (0.45)");
  }

  PitchOptions options() const {
    PitchOptions o;
    if (len_opt->count()) o.frame_len = frame_len;
    if (hop_opt->count()) o.frame_hop = frame_hop;
    if (min_opt->count()) o.f_min = f_min;
    if (max_opt->count()) o.f_max = f_max;
    if (thr_opt->count()) o.voicing_threshold = threshold;
    return o;
  }
};

RunConfig load_config(const CommonFlags& common) {
  return common.config_path.empty() ? RunConfig{} : load_run_config(common.config_path);
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("F0PRIV_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const char* end = raw + std::char_traits<char>::length(raw);
  const auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::kInvalidArgument, "F0PRIV_SEED is not an unsigned integer");
  }
  return value;
}

ModifierSpec modifier_from(const ModifierFlags& flags, const RunConfig& cfg, std::ostream& err,
                           bool role_from_scenario = false) {
  ModifierOptions options = flags.options();
  merge(options, cfg.modifier);
  // eval assigns the role per side itself.
  if (role_from_scenario && !options.role) options.role = "trial";
  std::optional<std::uint64_t> fallback = cfg.seed;
  if (!fallback) fallback = env_seed();
  ModifierSpec spec = resolve_modifier(options, fallback);
  if (spec.frequencies) {
    const double f1 = spec.frequencies->f1;
    const double f2 = spec.frequencies->f2;
    for (const double f : {f1, f2, f1 + f2, std::abs(f1 - f2)}) {
      if (f < 3.0 || f > 50.0) {
        err << "warning: carrier frequencies, their sum and difference are expected within "
               "[3, 50] Hz (got "
            << f << " Hz)\n";
        break;
      }
    }
  }
  return spec;
}

std::vector<fs::path> resolve_inputs(const std::vector<std::string>& positional,
                                     const RunConfig& cfg, const char* extension) {
  std::vector<fs::path> out;
  for (const std::string& p : positional) out.emplace_back(p);
  if (out.empty() && cfg.input_dir) {
    for (const auto& entry : fs::directory_iterator(*cfg.input_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == extension) {
        out.push_back(entry.path());
      }
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

fs::path output_dir(const CommonFlags& common, const RunConfig& cfg) {
  if (!common.out.empty()) return common.out;
  if (cfg.output_dir) return *cfg.output_dir;
  throw Error(ErrorKind::kInvalidArgument, "--out is required");
}

bool is_wav(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav";
}

F0Trajectory load_trajectory(const fs::path& path, const PitchConfig& pitch,
                             const std::string& recording_id) {
  F0Trajectory t;
  if (is_wav(path)) {
    t = extract_f0(read_wav(path), pitch, recording_id);
  } else {
    t = read_f0_csv(path, pitch.frame_hop);
    t.recording_id = recording_id;
  }
  return t;
}

void report_violations(const std::string& where, const std::vector<Violation>& v,
                       std::ostream& err) {
  for (const Violation& x : v) err << "error: " << where << ": " << x.message << "\n";
}

// ---------------------------------------------------------------------------

int cmd_extract(const std::vector<std::string>& inputs, const std::string& manifest,
                const CommonFlags& common, const PitchFlags& pitch_flags, std::ostream& err) {
  const RunConfig cfg = load_config(common);
  PitchOptions options = pitch_flags.options();
  merge(options, cfg.pitch);
  const PitchConfig pitch = options.resolve();
  const fs::path out_dir = output_dir(common, cfg);

  struct Job {
    fs::path input;
    std::string id;
  };
  std::vector<Job> jobs;
  int status = kExitOk;
  if (!manifest.empty()) {
    std::vector<std::string> problems;
    for (auto& e : load_manifest(manifest, problems)) jobs.push_back({e.path, e.recording_id});
    for (const auto& p : problems) err << "warning: " << manifest << ": " << p << "\n";
  }
  for (const fs::path& p : resolve_inputs(inputs, cfg, ".wav")) {
    jobs.push_back({p, p.stem().string()});
  }
  if (jobs.empty()) throw Error(ErrorKind::kInvalidArgument, "no input WAV files");
  fs::create_directories(out_dir);

  for (const Job& job : jobs) {
    try {
      const AudioBuffer audio = read_wav(job.input);
      const F0Trajectory traj = extract_f0(audio, pitch, job.id);
      write_f0_csv(traj, out_dir / (job.id + ".csv"));
    } catch (const Error& e) {
      err << "error: " << job.input.string() << ": " << e.what() << "\n";
      status = kExitUsage;
    }
  }
  return status;
}

int cmd_modify(const std::vector<std::string>& inputs, const CommonFlags& common,
               const ModifierFlags& modifier_flags, int threads_flag, std::ostream& err) {
  const RunConfig cfg = load_config(common);
  // The spec is fully validated before any file is read or written.
  const ModifierSpec spec = modifier_from(modifier_flags, cfg, err);
  const fs::path out_dir = output_dir(common, cfg);
  const std::vector<fs::path> files = resolve_inputs(inputs, cfg, ".csv");
  if (files.empty()) throw Error(ErrorKind::kInvalidArgument, "no input CSV files");
  const int threads = std::max(1, threads_flag > 0 ? threads_flag : cfg.threads.value_or(1));
  fs::create_directories(out_dir);

  struct Outcome {
    int status = kExitOk;
    std::string log;
  };
  std::vector<Outcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};

  auto process = [&](std::size_t index) {
    const fs::path& input = files[index];
    Outcome& outcome = outcomes[index];
    std::ostringstream log;
    try {
      const fs::path target = out_dir / input.filename();
      if (fs::exists(target) && fs::equivalent(target, input)) {
        throw Error(ErrorKind::kInvalidArgument, "refusing to overwrite the input file");
      }
      const F0Trajectory traj = read_f0_csv(input);
      const auto problems = validate(traj);
      if (!problems.empty()) {
        report_violations(input.string(), problems, log);
        outcome.status = kExitUsage;
      } else {
        const F0Trajectory modified = apply(spec, traj);
        const auto bad = validate(modified);
        if (!bad.empty()) {
          report_violations(input.string() + " (output)", bad, log);
          outcome.status = kExitInternal;
        } else {
          write_f0_csv(modified, target);
          json sidecar;
          sidecar["tool"] = "f0priv";
          sidecar["version"] = kVersion;
          sidecar["input"] = input.filename().string();
          sidecar["output"] = target.filename().string();
          sidecar["modifier"] = to_json(spec);
          write_file_atomic(out_dir / (input.stem().string() + ".json"), sidecar.dump(2) + "\n");
        }
      }
    } catch (const Error& e) {
      log << "error: " << input.string() << ": " << e.what() << "\n";
      outcome.status = kExitUsage;
    } catch (const std::exception& e) {
      log << "error: " << input.string() << ": " << e.what() << "\n";
      outcome.status = kExitInternal;
    }
    outcome.log = log.str();
  };

  {
    std::vector<std::jthread> workers;
    const int n = std::min<int>(threads, static_cast<int>(files.size()));
    for (int w = 0; w < n; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < files.size(); i = next++) process(i);
      });
    }
  }

  int status = kExitOk;
  for (const Outcome& o : outcomes) {
    err << o.log;
    status = std::max(status, o.status);
  }
  // Validation failures outrank internal ones.
  if (std::any_of(outcomes.begin(), outcomes.end(),
                  [](const Outcome& o) { return o.status == kExitUsage; })) {
    status = kExitUsage;
  }
  return status;
}

int cmd_stats(const std::vector<std::string>& inputs, const CommonFlags& common,
              std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(common);
  const std::vector<fs::path> files = resolve_inputs(inputs, cfg, ".csv");
  if (files.empty()) throw Error(ErrorKind::kInvalidArgument, "no input CSV files");
  int status = kExitOk;
  json doc = json::array();
  for (const fs::path& p : files) {
    try {
      const F0Trajectory t = read_f0_csv(p);
      const auto problems = validate(t);
      if (!problems.empty()) {
        report_violations(p.string(), problems, err);
        status = kExitUsage;
        continue;
      }
      doc.push_back(to_json(stats(t), t.recording_id));
    } catch (const Error& e) {
      err << "error: " << p.string() << ": " << e.what() << "\n";
      status = kExitUsage;
    }
  }
  const std::string text = doc.dump(2) + "\n";
  if (common.out.empty()) {
    out << text;
  } else {
    write_file_atomic(common.out, text);
  }
  return status;
}

int cmd_eval(const std::string& manifest_flag, const std::string& scenario_flag,
             const CommonFlags& common, const ModifierFlags& modifier_flags,
             const PitchFlags& pitch_flags, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(common);
  const std::string scenario_name = !scenario_flag.empty() ? scenario_flag : cfg.scenario.value_or("");
  const auto scenario = parse_scenario(scenario_name);
  if (!scenario) {
    throw Error(ErrorKind::kInvalidArgument, "--scenario must be one of OO, OA, AA");
  }
  ModifierSpec spec;
  const bool has_kind = modifier_flags.kind_opt->count() > 0 || cfg.modifier.kind.has_value();
  if (*scenario != Scenario::kOO || has_kind) {
    spec = modifier_from(modifier_flags, cfg, err, true);
  }
  if (manifest_flag.empty()) throw Error(ErrorKind::kInvalidArgument, "--manifest is required");
  PitchOptions pitch_options = pitch_flags.options();
  merge(pitch_options, cfg.pitch);
  const PitchConfig pitch = pitch_options.resolve();

  std::vector<std::string> problems;
  const std::vector<ManifestEntry> entries = load_manifest(manifest_flag, problems);
  SpeakerCorpus corpus;
  if (problems.empty()) {
    for (const ManifestEntry& e : entries) {
      try {
        F0Trajectory t = load_trajectory(e.path, pitch, e.recording_id);
        for (const Violation& v : validate(t)) problems.push_back(e.recording_id + ": " + v.message);
        corpus.recordings.push_back({e.speaker_id, e.split, std::move(t)});
      } catch (const Error& ex) {
        problems.push_back(e.recording_id + ": " + ex.what());
      }
    }
    for (const std::string& v : corpus.violations()) problems.push_back(v);
  }
  if (!problems.empty()) {
    for (const std::string& p : problems) err << "error: " << p << "\n";
    return kExitUsage;
  }

  const ScenarioReport report = run_scenario(corpus, spec, *scenario);
  json doc = to_json(report);
  if (*scenario != Scenario::kOO || has_kind) {
    doc["modifier"] = to_json(spec);
    if (spec.kind == ModifierKind::kModulatedDifferent) doc["modifier"]["role"] = nullptr;
  }
  const std::string text = doc.dump(2) + "\n";
  if (common.out.empty()) {
    out << text;
  } else {
    write_file_atomic(common.out, text);
  }
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& inputs, const CommonFlags& common,
             std::ostream& err) {
  const RunConfig cfg = load_config(common);
  const std::vector<fs::path> files = resolve_inputs(inputs, cfg, ".csv");
  if (files.empty()) throw Error(ErrorKind::kInvalidArgument, "plot needs at least one CSV");
  if (common.out.empty()) throw Error(ErrorKind::kInvalidArgument, "--out is required");
  std::vector<PlotSeries> series;
  for (const fs::path& p : files) series.push_back({p.stem().string(), read_f0_csv(p)});
  for (const PlotSeries& s : series) {
    if (std::abs(s.trajectory.frame_hop - series.front().trajectory.frame_hop) > 1e-9) {
      err << "warning: frame hops differ between inputs; plotting on a common time axis\n";
      break;
    }
  }
  write_file_atomic(common.out, render_svg(series));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"F0 trajectory anonymization and linkability evaluation", "f0priv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonFlags extract_common, modify_common, stats_common, eval_common, plot_common;
  std::vector<std::string> extract_inputs, modify_inputs, stats_inputs, plot_inputs;
  std::string extract_manifest, eval_manifest, eval_scenario;
  ModifierFlags modify_flags, eval_flags;
  PitchFlags extract_pitch, eval_pitch;
  int threads = 0;

  auto add_common = [](CLI::App* sub, CommonFlags& c, const char* out_help) {
    sub->add_option("--config", c.config_path, "RunConfig JSON file");
    sub->add_option("--out", c.out, out_help);
  };

  CLI::App* extract = app.add_subcommand("extract", "WAV -> F0 CSV");
  extract->add_option("inputs", extract_inputs, "WAV files");
  extract->add_option("--manifest", extract_manifest, "corpus manifest JSON");
  add_common(extract, extract_common, "output directory");
  extract_pitch.attach(extract);

  CLI::App* modify = app.add_subcommand("modify", "apply an F0 modification to CSV files");
  modify->add_option("inputs", modify_inputs, "F0 CSV files");
  add_common(modify, modify_common, "output directory");
  modify_flags.attach(modify);
  modify->add_option("--threads", threads, "worker threads (outputs do not depend on it)");

  CLI::App* stats_cmd = app.add_subcommand("stats", "speaker-identifying F0 statistics as JSON");
  stats_cmd->add_option("inputs", stats_inputs, "F0 CSV files");
  add_common(stats_cmd, stats_common, "output JSON file (default: stdout)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "EER / Cllr report for an OO, OA or AA scenario");
  eval_cmd->add_option("--manifest", eval_manifest, "corpus manifest JSON");
  eval_cmd->add_option("--scenario", eval_scenario, "OO, OA or AA");
  add_common(eval_cmd, eval_common, "output JSON file (default: stdout)");
  eval_flags.attach(eval_cmd);
  eval_pitch.attach(eval_cmd);

  CLI::App* plot = app.add_subcommand("plot", "overlay F0 CSVs into an SVG");
  plot->add_option("inputs", plot_inputs, "F0 CSV files");
  add_common(plot, plot_common, "output SVG file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (extract->parsed()) {
      return cmd_extract(extract_inputs, extract_manifest, extract_common, extract_pitch, err);
    }
    if (modify->parsed()) return cmd_modify(modify_inputs, modify_common, modify_flags, threads, err);
    if (stats_cmd->parsed()) return cmd_stats(stats_inputs, stats_common, out, err);
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_manifest, eval_scenario, eval_common, eval_flags, eval_pitch, out, err);
    }
    if (plot->parsed()) return cmd_plot(plot_inputs, plot_common, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace f0priv::cli
