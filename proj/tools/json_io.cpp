#include "json_io.hpp"

#include "f0priv/error.hpp"

#include <fstream>
#include <set>

namespace f0priv::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::kInvalidArgument, "config: " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
std::optional<T> get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("wrong type for '" + std::string(key) + "' in " + where);
  }
}

std::optional<std::uint64_t> get_seed(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    config_error("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

PitchConfig PitchOptions::resolve() const {
  PitchConfig cfg;
  if (frame_len) cfg.frame_len = *frame_len;
  if (frame_hop) cfg.frame_hop = *frame_hop;
  if (f_min) cfg.f_min = *f_min;
  if (f_max) cfg.f_max = *f_max;
  if (voicing_threshold) cfg.voicing_threshold = *voicing_threshold;
  return cfg;
}

RunConfig parse_run_config(const json& doc) {
  reject_unknown(doc,
                 {"modifier", "seed", "input_dir", "output_dir", "scenario", "threads", "pitch"},
                 "config");
  RunConfig cfg;
  if (doc.contains("modifier")) {
    const json& m = doc.at("modifier");
    const std::string where = "modifier";
    reject_unknown(m,
                   {"kind", "role", "seed", "strength", "f1", "f2", "target_mean_hz",
                    "target_std_hz"},
                   where);
    cfg.modifier.kind = get<std::string>(m, "kind", where);
    cfg.modifier.role = get<std::string>(m, "role", where);
    cfg.modifier.seed = get_seed(m, "seed", where);
    cfg.modifier.strength = get<int>(m, "strength", where);
    cfg.modifier.f1 = get<double>(m, "f1", where);
    cfg.modifier.f2 = get<double>(m, "f2", where);
    cfg.modifier.target_mean_hz = get<double>(m, "target_mean_hz", where);
    cfg.modifier.target_std_hz = get<double>(m, "target_std_hz", where);
  }
  if (doc.contains("pitch")) {
    const json& p = doc.at("pitch");
    const std::string where = "pitch";
    reject_unknown(p, {"frame_len", "frame_hop", "f_min", "f_max", "voicing_threshold"}, where);
    cfg.pitch.frame_len = get<double>(p, "frame_len", where);
    cfg.pitch.frame_hop = get<double>(p, "frame_hop", where);
    cfg.pitch.f_min = get<double>(p, "f_min", where);
    cfg.pitch.f_max = get<double>(p, "f_max", where);
    cfg.pitch.voicing_threshold = get<double>(p, "voicing_threshold", where);
  }
  cfg.seed = get_seed(doc, "seed", "config");
  cfg.input_dir = get<std::string>(doc, "input_dir", "config");
  cfg.output_dir = get<std::string>(doc, "output_dir", "config");
  cfg.scenario = get<std::string>(doc, "scenario", "config");
  cfg.threads = get<int>(doc, "threads", "config");
  if (cfg.threads && *cfg.threads < 1) config_error("threads must be >= 1");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "config '" + path.string() + "': " + e.what());
  }
  return parse_run_config(doc);
}

void merge(ModifierOptions& flags, const ModifierOptions& config) {
  if (!flags.kind) flags.kind = config.kind;
  if (!flags.role) flags.role = config.role;
  if (!flags.seed) flags.seed = config.seed;
  if (!flags.strength) flags.strength = config.strength;
  if (!flags.f1) flags.f1 = config.f1;
  if (!flags.f2) flags.f2 = config.f2;
  if (!flags.target_mean_hz) flags.target_mean_hz = config.target_mean_hz;
  if (!flags.target_std_hz) flags.target_std_hz = config.target_std_hz;
}

void merge(PitchOptions& flags, const PitchOptions& config) {
  if (!flags.frame_len) flags.frame_len = config.frame_len;
  if (!flags.frame_hop) flags.frame_hop = config.frame_hop;
  if (!flags.f_min) flags.f_min = config.f_min;
  if (!flags.f_max) flags.f_max = config.f_max;
  if (!flags.voicing_threshold) flags.voicing_threshold = config.voicing_threshold;
}

ModifierSpec resolve_modifier(const ModifierOptions& o,
                              std::optional<std::uint64_t> seed_fallback) {
  auto invalid = [](const std::string& what) {
    throw Error(ErrorKind::kInvalidArgument, what);
  };
  if (!o.kind) invalid("--kind is required");

  ModifierSpec spec;
  if (*o.kind == "random-walk") {
    if (!o.strength) invalid("--kind random-walk needs --strength 1 or 2");
    spec.kind = ModifierKind::kRandomWalkWeak;
  } else if (const auto kind = parse_modifier_kind(*o.kind)) {
    spec.kind = *kind;
  } else {
    invalid("unknown modifier kind '" + *o.kind + "'");
  }

  if (o.strength) {
    if (!is_random_walk(spec.kind)) invalid("--strength only applies to random-walk kinds");
    if (*o.strength != 1 && *o.strength != 2) invalid("--strength must be 1 or 2");
    const ModifierKind wanted =
        *o.strength == 1 ? ModifierKind::kRandomWalkWeak : ModifierKind::kRandomWalkStrong;
    if (*o.kind != "random-walk" && wanted != spec.kind) {
      invalid("--strength " + std::to_string(*o.strength) + " contradicts --kind " + *o.kind);
    }
    spec.kind = wanted;
  }

  if (o.role) {
    const auto role = parse_role(*o.role);
    if (!role) invalid("unknown role '" + *o.role + "' (expected enrollment or trial)");
    spec.role = role;
  }
  if (spec.kind == ModifierKind::kModulatedDifferent && !spec.role) {
    invalid("modulated-different requires --role enrollment|trial");
  }

  if (is_random_walk(spec.kind)) {
    spec.seed = o.seed ? o.seed : seed_fallback;
    if (!spec.seed) invalid(std::string(to_string(spec.kind)) + " requires --seed or F0PRIV_SEED");
  } else if (o.seed) {
    spec.seed = o.seed;
  }

  if (o.f1.has_value() != o.f2.has_value()) invalid("--f1 and --f2 must be given together");
  if (o.f1) spec.frequencies = ModulationPair{*o.f1, *o.f2};

  if (o.target_mean_hz || o.target_std_hz) {
    if (spec.kind != ModifierKind::kShiftAndScale) {
      invalid("--target-mean/--target-std only apply to shift-and-scale");
    }
    spec.target_mean_hz = o.target_mean_hz;
    spec.target_std_hz = o.target_std_hz;
  }
  spec.check();
  return spec;
}

json to_json(const ModifierSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["role"] = spec.role ? json(std::string(to_string(*spec.role))) : json(nullptr);
  j["seed"] = spec.seed ? json(*spec.seed) : json(nullptr);
  if (is_modulation(spec.kind)) {
    const ModulationPair pair = spec.modulation_pair();
    j["f1"] = pair.f1;
    j["f2"] = pair.f2;
  }
  if (spec.kind == ModifierKind::kShiftAndScale) {
    j["target_mean_hz"] = optional_number(spec.target_mean_hz);
    j["target_std_hz"] = optional_number(spec.target_std_hz);
  }
  return j;
}

json to_json(const F0Stats& s, const std::string& recording_id) {
  json j;
  j["recording_id"] = recording_id;
  j["voiced_mean_hz"] = optional_number(s.voiced_mean_hz);
  j["log_f0_mean"] = optional_number(s.log_f0_mean);
  j["log_f0_var"] = optional_number(s.log_f0_var);
  j["log_f0_skew"] = optional_number(s.log_f0_skew);
  j["rise_rate_hz_s"] = optional_number(s.rise_rate_hz_s);
  j["voiced_fraction"] = s.voiced_fraction;
  return j;
}

json to_json(const ScenarioReport& r) {
  json j;
  j["scenario"] = std::string(to_string(r.scenario));
  j["eer_percent"] = r.eer_percent;
  j["cllr_bits"] = r.cllr_bits;
  j["cllr_min_bits"] = r.cllr_min_bits;
  j["n_target"] = r.n_target;
  j["n_nontarget"] = r.n_nontarget;
  j["calibration"] = {
      {"cllr", "affine logistic calibration fitted on the evaluation scores"},
      {"cllr_min", "pool-adjacent-violators recalibration"},
      {"slope", r.calibration.slope},
      {"offset", r.calibration.offset},
  };
  return j;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path,
                                         std::vector<std::string>& problems) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "manifest '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc.at("entries").is_array()) {
    throw Error(ErrorKind::kParse, "manifest must be an object with an 'entries' array");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "entries") problems.push_back("unknown manifest key '" + key + "'");
  }

  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  std::size_t index = 0;
  for (const json& e : doc.at("entries")) {
    const std::string where = "entry " + std::to_string(index++);
    if (!e.is_object()) {
      problems.push_back(where + ": not an object");
      continue;
    }
    bool ok = true;
    for (const char* key : {"speaker_id", "recording_id", "split", "path"}) {
      if (!e.contains(key) || !e.at(key).is_string()) {
        problems.push_back(where + ": missing string field '" + key + "'");
        ok = false;
      }
    }
    for (const auto& [key, value] : e.items()) {
      if (key != "speaker_id" && key != "recording_id" && key != "split" && key != "path") {
        problems.push_back(where + ": unknown key '" + key + "'");
      }
    }
    if (!ok) continue;
    ManifestEntry entry;
    entry.speaker_id = e.at("speaker_id").get<std::string>();
    entry.recording_id = e.at("recording_id").get<std::string>();
    const auto split = parse_split(e.at("split").get<std::string>());
    if (!split) {
      problems.push_back(where + ": invalid split '" + e.at("split").get<std::string>() + "'");
      continue;
    }
    entry.split = *split;
    entry.path = e.at("path").get<std::string>();
    if (entry.path.is_relative()) entry.path = base / entry.path;
    if (!std::filesystem::exists(entry.path)) {
      problems.push_back(where + ": missing file '" + entry.path.string() + "'");
    }
    if (!ids.insert(entry.recording_id).second) {
      problems.push_back(where + ": duplicate recording_id '" + entry.recording_id + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace f0priv::cli
