#pragma once

#include "f0priv/eval.hpp"
#include "f0priv/modifiers.hpp"
#include "f0priv/pitch.hpp"
#include "f0priv/trajectory.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace f0priv::cli {

using nlohmann::json;

/// Modifier block of a run config. `strength` is accepted as an alternative
/// way to pick the random-walk variant.
struct ModifierOptions {
  std::optional<std::string> kind;
  std::optional<std::string> role;
  std::optional<std::uint64_t> seed;
  std::optional<int> strength;
  std::optional<double> f1;
  std::optional<double> f2;
  std::optional<double> target_mean_hz;
  std::optional<double> target_std_hz;
};

struct PitchOptions {
  std::optional<double> frame_len;
  std::optional<double> frame_hop;
  std::optional<double> f_min;
  std::optional<double> f_max;
  std::optional<double> voicing_threshold;

  PitchConfig resolve() const;
};

/// Everything a command line can say, as JSON. Unknown keys are rejected.
struct RunConfig {
  ModifierOptions modifier;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> input_dir;
  std::optional<std::string> output_dir;
  std::optional<std::string> scenario;
  std::optional<int> threads;
  PitchOptions pitch;
};

RunConfig parse_run_config(const json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Flags override config values; config values override nothing else.
void merge(ModifierOptions& flags, const ModifierOptions& config);
void merge(PitchOptions& flags, const PitchOptions& config);

/// Builds and checks a ModifierSpec. `seed_fallback` is used for random-walk
/// kinds when no explicit seed is present. Throws kInvalidArgument.
ModifierSpec resolve_modifier(const ModifierOptions& options,
                              std::optional<std::uint64_t> seed_fallback);

json to_json(const ModifierSpec& spec);
json to_json(const F0Stats& stats, const std::string& recording_id);
json to_json(const ScenarioReport& report);

struct ManifestEntry {
  std::string speaker_id;
  std::string recording_id;
  Split split = Split::kEnrollment;
  std::filesystem::path path;  // resolved against the manifest directory
};

/// Parses a corpus manifest; `problems` collects every invariant violation
/// (missing files, duplicate ids, bad splits) instead of stopping at the
/// first one.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path,
                                         std::vector<std::string>& problems);

}  // namespace f0priv::cli
