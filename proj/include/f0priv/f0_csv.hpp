#pragma once

#include "f0priv/trajectory.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace f0priv {

/// Header line of the F0 CSV format.
inline constexpr const char* kF0CsvHeader = "time_s,f0_hz";

/// Serializes as `time_s,f0_hz` rows with six decimals and LF endings.
std::string format_f0_csv(const F0Trajectory& traj);

/// Parses CSV text. The frame hop is recovered from the time column (rounded
/// to the written 1e-6 s precision); single-row files fall back to
/// `default_hop`.
F0Trajectory parse_f0_csv(std::istream& in, const std::string& recording_id,
                          double default_hop = 0.01);

/// `recording_id` is taken from the file stem.
F0Trajectory read_f0_csv(const std::filesystem::path& path, double default_hop = 0.01);

/// Written atomically (temporary file + rename).
void write_f0_csv(const F0Trajectory& traj, const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace f0priv
