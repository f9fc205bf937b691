#include "support/synthetic.hpp"

#include "../tools/commands.hpp"
#include "../tools/json_io.hpp"

#include "f0priv/f0_csv.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <sstream>

using namespace f0priv;
namespace ft = f0priv::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "f0priv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_csv(const fs::path& dir, const std::string& name, std::vector<double> values,
                   double hop = 0.01) {
  const fs::path p = dir / name;
  write_f0_csv(F0Trajectory(hop, Eigen::Map<const Eigen::ArrayXd>(values.data(), values.size()),
                           fs::path(name).stem().string()),
               p);
  return p;
}

}  // namespace

TEST_CASE("modify voiced-flat on a small fixture") {
  const fs::path dir = ft::scratch_dir("cli_flat");
  const fs::path in = write_csv(dir, "a.csv", {0, 100, 120, 0, 110});
  const auto r = invoke({"modify", in.string(), "--kind", "voiced-flat", "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const F0Trajectory t = read_f0_csv(dir / "out" / "a.csv");
  REQUIRE(t.size() == 5);
  CHECK(t.values[0] == 0.0);
  CHECK(t.values[1] == doctest::Approx(110.0));
  CHECK(t.values[2] == doctest::Approx(110.0));
  CHECK(t.values[3] == 0.0);
  CHECK(t.values[4] == doctest::Approx(110.0));
  const json side = json::parse(ft::slurp(dir / "out" / "a.json"));
  CHECK(side.at("modifier").at("kind") == "voiced-flat");
}

TEST_CASE("modify rejects incomplete specs before touching files") {
  const fs::path dir = ft::scratch_dir("cli_bad_spec");
  const fs::path in = write_csv(dir, "a.csv", {100, 110, 120});
  auto r = invoke({"modify", in.string(), "--kind", "modulated-different", "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir / "o" / "a.csv"));
  r = invoke({"modify", in.string(), "--kind", "no-such-kind", "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  r = invoke({"modify", in.string(), "--kind", "voiced-flat"});
  CHECK(r.code == 2);
  r = invoke({"frobnicate"});
  CHECK(r.code == 2);
}

TEST_CASE("modify warns on carriers outside the usual band") {
  const fs::path dir = ft::scratch_dir("cli_carrier");
  const fs::path in = write_csv(dir, "a.csv", {100, 110, 120});
  const auto r = invoke({"modify", in.string(), "--kind", "modulated-same-1", "--f1", "40", "--f2", "30",
                         "--out", (dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("modify is byte-identical across runs and thread counts") {
  const fs::path dir = ft::scratch_dir("cli_determinism");
  std::mt19937_64 rng(5);
  std::vector<std::string> inputs;
  for (int i = 0; i < 8; ++i) {
    const fs::path p = dir / ("r" + std::to_string(i) + ".csv");
    write_f0_csv(ft::random_trajectory(rng, 300, 0.01, "r" + std::to_string(i)), p);
    inputs.push_back(p.string());
  }
  std::vector<std::string> outs;
  for (const auto& [tag, threads] : std::vector<std::pair<std::string, std::string>>{
           {"t1", "1"}, {"t4", "4"}, {"t1b", "1"}}) {
    std::vector<std::string> args{"modify"};
    args.insert(args.end(), inputs.begin(), inputs.end());
    for (const char* a : {"--kind", "random-walk-strong", "--seed", "42", "--threads"}) args.push_back(a);
    args.push_back(threads);
    args.push_back("--out");
    args.push_back((dir / tag).string());
    REQUIRE(invoke(args).code == 0);
    std::string all;
    for (int i = 0; i < 8; ++i) all += ft::slurp(dir / tag / ("r" + std::to_string(i) + ".csv"));
    outs.push_back(all);
  }
  CHECK(outs[0] == outs[1]);
  CHECK(outs[0] == outs[2]);
}

TEST_CASE("modify takes the seed from F0PRIV_SEED") {
  const fs::path dir = ft::scratch_dir("cli_env_seed");
  const fs::path in = write_csv(dir, "a.csv", {100, 110, 120, 130, 140, 150});
  ::unsetenv("F0PRIV_SEED");
  CHECK(invoke({"modify", in.string(), "--kind", "random-walk-weak", "--out", (dir / "x").string()}).code == 2);
  ::setenv("F0PRIV_SEED", "9", 1);
  REQUIRE(invoke({"modify", in.string(), "--kind", "random-walk-weak", "--out", (dir / "env").string()}).code == 0);
  ::unsetenv("F0PRIV_SEED");
  REQUIRE(invoke({"modify", in.string(), "--kind", "random-walk-weak", "--seed", "9", "--out",
                  (dir / "flag").string()}).code == 0);
  CHECK(ft::slurp(dir / "env" / "a.csv") == ft::slurp(dir / "flag" / "a.csv"));
}

TEST_CASE("modify reports bad inputs and continues") {
  const fs::path dir = ft::scratch_dir("cli_partial");
  const fs::path good = write_csv(dir, "good.csv", {100, 110, 120});
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "time_s,f0_hz\n0.0,100\n0.01,20\n";
  }
  const auto r = invoke({"modify", (dir / "bad.csv").string(), good.string(), (dir / "missing.csv").string(),
                         "--kind", "voiced-flat", "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(fs::exists(dir / "o" / "good.csv"));
  CHECK(r.err.find("frame 1") != std::string::npos);
  CHECK(r.err.find("missing.csv") != std::string::npos);
}

TEST_CASE("config file supplies the modifier; unknown keys are rejected") {
  const fs::path dir = ft::scratch_dir("cli_config");
  const fs::path in = write_csv(dir, "a.csv", {100, 0, 140});
  {
    std::ofstream c(dir / "ok.json");
    c << R"({"modifier": {"kind": "all-flat"}, "output_dir": ")" << (dir / "o").generic_string() << "\"}";
    std::ofstream b(dir / "bad.json");
    b << R"({"modifier": {"kind": "all-flat"}, "colour": "red"})";
  }
  REQUIRE(invoke({"modify", in.string(), "--config", (dir / "ok.json").string()}).code == 0);
  const F0Trajectory t = read_f0_csv(dir / "o" / "a.csv");
  CHECK(t.values[1] == doctest::Approx(120.0));
  const auto r = invoke({"modify", in.string(), "--config", (dir / "bad.json").string(), "--out",
                         (dir / "p").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("stats emits nulls for short contours") {
  const fs::path dir = ft::scratch_dir("cli_stats");
  const fs::path a = write_csv(dir, "short.csv", {0, 100, 0, 200});
  const fs::path b = write_csv(dir, "rise.csv", {100, 110, 120, 130});
  const fs::path c = write_csv(dir, "const.csv", {150, 150, 150, 150});
  const auto r = invoke({"stats", a.string(), b.string(), c.string()});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc.size() == 3);
  CHECK(doc[0].at("recording_id") == "short");
  CHECK(doc[0].at("log_f0_var").is_null());
  CHECK(doc[0].at("voiced_fraction").get<double>() == doctest::Approx(0.5));
  CHECK(doc[1].at("rise_rate_hz_s").get<double>() == doctest::Approx(1000.0));
  CHECK(doc[2].at("log_f0_var").get<double>() == 0.0);
  CHECK(doc[2].at("log_f0_skew").get<double>() == 0.0);
}

TEST_CASE("extract a single WAV and a manifest with a missing file") {
  const fs::path dir = ft::scratch_dir("cli_extract");
  ft::write_bytes(dir / "tone.wav", ft::wav_bytes({ft::sine(150.0, 16000, 0.5)}, 16000));
  auto r = invoke({"extract", (dir / "tone.wav").string(), "--out", (dir / "o").string()});
  REQUIRE(r.code == 0);
  const F0Trajectory t = read_f0_csv(dir / "o" / "tone.csv");
  CHECK(t.frame_hop == doctest::Approx(0.01));
  CHECK(t.voiced_count() > t.size() / 2);

  ft::write_bytes(dir / "b.wav", ft::wav_bytes({ft::sine(200.0, 16000, 0.3)}, 16000));
  const json manifest = {{"entries",
                          {{{"speaker_id", "s1"}, {"recording_id", "r1"}, {"split", "enrollment"}, {"path", "tone.wav"}},
                           {{"speaker_id", "s1"}, {"recording_id", "r2"}, {"split", "trial"}, {"path", "gone.wav"}},
                           {{"speaker_id", "s2"}, {"recording_id", "r3"}, {"split", "trial"}, {"path", "b.wav"}}}}};
  {
    std::ofstream m(dir / "m.json");
    m << manifest.dump();
  }
  r = invoke({"extract", "--manifest", (dir / "m.json").string(), "--out", (dir / "m").string()});
  CHECK(r.code != 0);
  CHECK(fs::exists(dir / "m" / "r1.csv"));
  CHECK(fs::exists(dir / "m" / "r3.csv"));
  CHECK_FALSE(fs::exists(dir / "m" / "r2.csv"));
}

TEST_CASE("eval end to end on CSV trajectories") {
  const fs::path dir = ft::scratch_dir("cli_eval");
  const SpeakerCorpus c = ft::synthetic_corpus(3, 4, 4, 300);
  json entries = json::array();
  for (const Recording& r : c.recordings) {
    write_f0_csv(r.trajectory, dir / (r.recording_id() + ".csv"));
    entries.push_back({{"speaker_id", r.speaker_id},
                       {"recording_id", r.recording_id()},
                       {"split", std::string(to_string(r.split))},
                       {"path", r.recording_id() + ".csv"}});
  }
  {
    std::ofstream m(dir / "m.json");
    m << json{{"entries", entries}}.dump(2);
  }
  auto r = invoke({"eval", "--manifest", (dir / "m.json").string(), "--scenario", "OO"});
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc.at("scenario") == "OO");
  CHECK(doc.at("n_target").get<long>() == 8);
  CHECK(doc.at("n_nontarget").get<long>() == 24);
  CHECK(doc.at("eer_percent").get<double>() >= 0.0);
  CHECK(doc.at("eer_percent").get<double>() <= 50.0);

  r = invoke({"eval", "--manifest", (dir / "m.json").string(), "--scenario", "AA", "--kind",
              "modulated-different"});
  REQUIRE(r.code == 0);
  doc = json::parse(r.out);
  CHECK(doc.at("modifier").at("kind") == "modulated-different");

  CHECK(invoke({"eval", "--manifest", (dir / "m.json").string(), "--scenario", "OA"}).code == 2);
  CHECK(invoke({"eval", "--manifest", (dir / "m.json").string(), "--scenario", "XY"}).code == 2);
}

TEST_CASE("plot draws one path per trajectory with gaps") {
  const fs::path dir = ft::scratch_dir("cli_plot");
  const fs::path a = write_csv(dir, "a.csv", {100, 110, 0, 0, 120, 125});
  const fs::path b = write_csv(dir, "b.csv", {200, 0, 210, 220});
  auto r = invoke({"plot", a.string(), b.string(), "--out", (dir / "p.svg").string()});
  REQUIRE(r.code == 0);
  const std::string svg = ft::slurp(dir / "p.svg");
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("class=\"f0-trace\"") == 2);
  CHECK(count(" M") + count("\"M") == 4);  // two voiced runs each

  REQUIRE(invoke({"plot", a.string(), "--out", (dir / "one.svg").string()}).code == 0);
  CHECK(ft::slurp(dir / "one.svg").find("f0-trace") != std::string::npos);

  const fs::path c = write_csv(dir, "c.csv", {150, 160, 170}, 0.005);
  r = invoke({"plot", a.string(), c.string(), "--out", (dir / "mixed.svg").string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}
