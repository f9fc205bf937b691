#include "f0priv/f0_csv.hpp"

#include "f0priv/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace f0priv {

namespace {

std::string parse_error(long line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

double parse_field(std::string_view field, long line, const char* name) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::kParse,
                parse_error(line, std::string("non-numeric ") + name + " '" +
                                      std::string(field) + "'"));
  }
  return value;
}

}  // namespace

std::string format_f0_csv(const F0Trajectory& traj) {
  std::string out = kF0CsvHeader;
  out += '\n';
  char buf[96];
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const int n = std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", traj.time(i), traj.values[i]);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

F0Trajectory parse_f0_csv(std::istream& in, const std::string& recording_id,
                          double default_hop) {
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    if (line != kF0CsvHeader) {
      throw Error(ErrorKind::kParse, parse_error(line_no, "missing header 'time_s,f0_hz'"));
    }
    have_header = true;
    break;
  }
  if (!have_header) {
    throw Error(ErrorKind::kParse, "missing header 'time_s,f0_hz'");
  }

  std::vector<double> times;
  std::vector<double> f0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorKind::kParse, parse_error(line_no, "expected 2 columns"));
    }
    const std::string_view view(line);
    times.push_back(parse_field(view.substr(0, comma), line_no, "time"));
    f0.push_back(parse_field(view.substr(comma + 1), line_no, "f0"));
  }
  if (f0.empty()) {
    throw Error(ErrorKind::kEmpty, "empty trajectory: no data rows");
  }

  double hop = default_hop;
  if (times.size() >= 2) {
    const double raw = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    hop = std::round(raw * 1e6) / 1e6;
    if (!(hop > 0.0)) {
      throw Error(ErrorKind::kParse, "time column is not increasing");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double expected = times.front() + static_cast<double>(i) * hop;
      if (std::abs(times[i] - expected) > 1.5e-6 + 1e-9 * std::abs(expected)) {
        throw Error(ErrorKind::kParse,
                    parse_error(static_cast<long>(i) + 2, "non-uniform time step"));
      }
    }
  }
  return F0Trajectory(hop, Eigen::Map<const Eigen::ArrayXd>(f0.data(), static_cast<Eigen::Index>(f0.size())),
                      recording_id);
}

F0Trajectory read_f0_csv(const std::filesystem::path& path, double default_hop) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  try {
    return parse_f0_csv(in, path.stem().string(), default_hop);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_f0_csv(const F0Trajectory& traj, const std::filesystem::path& path) {
  write_file_atomic(path, format_f0_csv(traj));
}

}  // namespace f0priv
