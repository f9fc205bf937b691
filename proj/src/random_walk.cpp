#include "f0priv/modifiers.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace f0priv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Box-Muller on raw engine output, so the stream is identical on every
// standard library (std::normal_distribution is implementation-defined).
double standard_normal(std::mt19937_64& engine) {
  constexpr double kScale = 0x1.0p-53;
  const double u1 = static_cast<double>((engine() >> 11) + 1) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(engine() >> 11) * kScale;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::uint64_t recording_seed(std::uint64_t user_seed, std::string_view recording_id) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const unsigned char c : recording_id) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return splitmix64(user_seed ^ splitmix64(hash));
}

WalkNoise normalize_walk(const Eigen::ArrayXd& raw) {
  WalkNoise out;
  if (raw.size() == 0) return out;
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) {
    out.values = Eigen::ArrayXd::Zero(raw.size());
    return out;
  }
  out.values = (raw - lo) / (hi - lo) - 0.5;
  return out;
}

WalkNoise generate_walk(Eigen::Index length, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  Eigen::ArrayXd raw(std::max<Eigen::Index>(length, 0));
  double position = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (i > 0) position += standard_normal(engine);
    raw[i] = position;
  }
  return normalize_walk(raw);
}

}  // namespace f0priv
