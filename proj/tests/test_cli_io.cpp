#include <gtest/gtest.h>

#include <sys/wait.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qprobe/io/config_io.hpp"
#include "qprobe/io/csv.hpp"

using namespace qprobe;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qprobe_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

// Runs the CLI and returns its exit status; stdout and stderr go to `log`.
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QPROBE_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> body_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

TEST(ParseConfig, MinimalPresetFile) {
  const RunManifest m = parse_config("preset=fig1\n");
  EXPECT_EQ(m.preset, "fig1");
  EXPECT_EQ(m.config.n_total, 500);
  EXPECT_EQ(m.config.l, 4);
  EXPECT_EQ(m.config.d, 100);
  EXPECT_EQ(m.config.t0, 10.0);
  EXPECT_EQ(m.config.tau_f, 11.76);
  EXPECT_EQ(m.config.mu_p, 0.0);
  EXPECT_EQ(m.t_max, 800.0);
  EXPECT_EQ(m.config.times.size(), 201u);
}

TEST(ParseConfig, KeysOverridePresetDefaults) {
  const RunManifest m = parse_config("preset=fig1\nmu_p = 11.76   # bulk trace\nmode=full\n");
  EXPECT_EQ(m.config.mu_p, 11.76);
  EXPECT_EQ(m.mode, RunMode::full);
  EXPECT_EQ(m.n_times, 801);
}

TEST(ParseConfig, DefaultsWithoutPreset) {
  const RunManifest m = parse_config("d=50\nmu_p=0\n");
  EXPECT_EQ(m.config.t0, 40.0);
  EXPECT_EQ(m.config.mu_p, 0.0);
  EXPECT_EQ(m.units, Units::log2);
  EXPECT_EQ(m.measures.size(), 5u);
  EXPECT_EQ(m.config.times.back(), m.t_max);
}

TEST(ParseConfig, SweepAxes) {
  const RunManifest m = parse_config("sweep.mu_f.values=0, 5,10\nsweep.delta_f.values=20\nsweep.measure=dI_final\n");
  ASSERT_EQ(m.sweep.size(), 2u);
  EXPECT_EQ(m.sweep[0].param, "mu_f");
  EXPECT_EQ(m.sweep[0].values, (std::vector<double>{0, 5, 10}));
  EXPECT_EQ(m.sweep_grid().size(), 3u);
}

TEST(ParseConfig, ErrorsCarryLineAndKey) {
  EXPECT_EQ(config_error("l=0\n"), "line 1: key 'l': l must be positive");
  EXPECT_NE(config_error("\n\nbogus=1\n").find("line 3: key 'bogus': unknown key"), std::string::npos);
  EXPECT_NE(config_error("mu_p=abc\n").find("line 1: key 'mu_p': expected a number"), std::string::npos);
  EXPECT_NE(config_error("d=2.5\n").find("key 'd': expected an integer"), std::string::npos);
  EXPECT_NE(config_error("d=5\nd=6\n").find("line 2: key 'd': duplicate key"), std::string::npos);
  EXPECT_NE(config_error("just text\n").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("measures=S_P,S_Z\n").find("key 'measures'"), std::string::npos);
  EXPECT_NE(config_error("preset=fig9\n").find("key 'preset'"), std::string::npos);
  EXPECT_NE(config_error("n_total=100\nl=50\nd=60\n").find("line 3: key 'd'"), std::string::npos);
  EXPECT_NE(config_error("t0=900\n").find("key 't0'"), std::string::npos);
  EXPECT_NE(config_error("sweep.bogus.values=1\n").find("unknown sweep parameter"), std::string::npos);
  EXPECT_NE(config_error("units=bits\n").find("key 'units'"), std::string::npos);
}

TEST(ParseConfig, ConfigErrorIsAValidationError) {
  try {
    parse_config("temperature=-1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.key(), "temperature");
  }
}

TEST(ParseConfig, LocaleIndependentNumbers) {
  const RunManifest m = parse_config("mu_p=1e-3\ntau_gg=0.00025\n");
  EXPECT_EQ(m.config.mu_p, 1e-3);
  EXPECT_EQ(m.config.tau_gg, 0.00025);
  EXPECT_FALSE(config_error("mu_p=0,5\n").empty());
}

TEST(RenderConfig, RoundTrip) {
  std::vector<std::string> texts = {
      "preset=fig1\n",
      "preset=fig2\nmode=full\n",
      "d=37\nmu_i=3.14159265358979\ntau_gg=1e-4\ntemperature=0.1\nmeasures=S_P,I2\nunits=nats\noutput=out.csv\n"
      "threads=3\n",
      "sweep.d.values=0,10\nsweep.t.values=0,1.5,3\nsweep.measure=I_t\nsweep.budget=50\n",
      "measures=\n"};
  for (const auto& text : texts) {
    const RunManifest m = parse_config(text);
    EXPECT_EQ(parse_config(render(m)), m) << text;
  }
}

TEST(RenderConfig, RoundTripOfRandomValues) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int k = 0; k < 20; ++k) {
    RunManifest m = parse_config("");
    m.config.mu_i = u(rng);
    m.config.mu_f = u(rng);
    m.config.tau_t = u(rng);
    m.config.mu_p = u(rng) * 1e-7;
    m.t_max = 1000.0 + std::abs(u(rng));
    m.config.times = linspace_times(m.t_max, m.n_times);
    EXPECT_EQ(parse_config(render(m)), m);
  }
}

TEST(LoadConfig, MissingFile) {
  try {
    load_config("/nonexistent/missing.cfg");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("file not found"), std::string::npos);
  }
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, ReparseWithinTwelveDigits) {
  // 12 significant digits bound the relative rounding error by 5e-12.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::pow(10.0, u(rng)) * (k % 2 ? 1.0 : -1.0);
    const double back = std::stod(format_number(v));
    EXPECT_LE(std::abs(back - v), 5e-12 * std::abs(v));
  }
}

namespace {

TimeSeriesRecord small_record(const MeasureSet& measures) {
  SetupConfig c;
  c.n_total = 60;
  c.l = 4;
  c.d = 10;
  c.t0 = 8.0;
  c.times = linspace_times(40.0, 21);
  return run_time_series(c, measures);
}

}  // namespace

TEST(Csv, SeriesLayout) {
  const TimeSeriesRecord r = small_record({Measure::S_P, Measure::I});
  std::ostringstream os;
  write_series_csv(os, r, Units::log2);
  const std::string csv = os.str();
  EXPECT_EQ(csv.find("\r"), std::string::npos);
  EXPECT_NE(csv.find("# units=log2\n"), std::string::npos);
  EXPECT_NE(csv.find("# n_total=60\n"), std::string::npos);
  EXPECT_NE(csv.find("# t0=8\n"), std::string::npos);
  EXPECT_NE(csv.find("# dS_P_plateau="), std::string::npos);
  const auto body = body_lines(csv);
  ASSERT_EQ(body.size(), 22u);
  EXPECT_EQ(body[0], "t,S_P,I,dS_P,dI");
  for (std::size_t i = 1; i < body.size(); ++i) {
    const auto row = split_numbers(body[i]);
    ASSERT_EQ(row.size(), 5u);
    const double sp = r.series.at("S_P")[i - 1] / std::numbers::ln2;
    EXPECT_LE(std::abs(row[1] - sp), 5e-12 * std::max(1.0, std::abs(sp)));
  }
}

TEST(Csv, NatsUnits) {
  const TimeSeriesRecord r = small_record({Measure::S_P});
  std::ostringstream os;
  write_series_csv(os, r, Units::nats);
  const auto body = body_lines(os.str());
  EXPECT_EQ(split_numbers(body.back())[1], std::stod(format_number(r.series.at("S_P").back())));
}

TEST(Csv, EmptyMeasureSetIsHeaderOnly) {
  const TimeSeriesRecord r = small_record({});
  std::ostringstream os;
  write_series_csv(os, r, Units::log2);
  EXPECT_TRUE(body_lines(os.str()).empty());
  EXPECT_NE(os.str().find("# mu_p="), std::string::npos);
}

TEST(Csv, ByteIdenticalAcrossRuns) {
  const fs::path dir = scratch("determinism");
  write_series_csv((dir / "a.csv").string(), small_record({Measure::S_Q, Measure::I}), Units::log2);
  write_series_csv((dir / "b.csv").string(), small_record({Measure::S_Q, Measure::I}), Units::log2);
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
}

TEST(Csv, SweepTableWithErrorRow) {
  SweepTable t;
  t.axes = {"l"};
  t.measure = SweepMeasure::dI_final;
  t.rows = {{{4.0}, std::numbers::ln2, ""}, {{0.0}, std::numeric_limits<double>::quiet_NaN(), "l must be positive, really"}};
  std::ostringstream os;
  write_sweep_csv(os, t, SetupConfig{}, Units::log2);
  const auto body = body_lines(os.str());
  ASSERT_EQ(body.size(), 3u);
  EXPECT_EQ(body[0], "l,dI_final,error");
  EXPECT_EQ(body[1], "4,1,");
  EXPECT_EQ(body[2], "0,nan,\"l must be positive, really\"");
}

TEST(Csv, UnwritablePathNamesThePath) {
  try {
    write_series_csv("/nonexistent/dir/x.csv", small_record({}), Units::log2);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/x.csv"), std::string::npos);
  }
}

TEST(Cli, MissingConfigExitsWithOne) {
  const fs::path dir = scratch("missing");
  EXPECT_EQ(run_cli("run " + (dir / "missing.cfg").string(), dir / "log"), 1);
  EXPECT_NE(read_file(dir / "log").find("file not found"), std::string::npos);
}

TEST(Cli, InvalidConfigExitsWithOne) {
  const fs::path dir = scratch("invalid");
  write_file(dir / "bad.cfg", "l=0\n");
  EXPECT_EQ(run_cli("run " + (dir / "bad.cfg").string(), dir / "log"), 1);
  EXPECT_NE(read_file(dir / "log").find("line 1: key 'l'"), std::string::npos);
  EXPECT_EQ(run_cli("frobnicate", dir / "log"), 1);
  EXPECT_EQ(run_cli("preset fig9", dir / "log"), 1);
}

TEST(Cli, RunWritesTheSeries) {
  const fs::path dir = scratch("run");
  write_file(dir / "a.cfg", "n_total=60\nl=4\nd=10\nt_max=40\nn_times=21\nmeasures=S_P,I\n");
  ASSERT_EQ(run_cli("run " + (dir / "a.cfg").string() + " -o " + (dir / "a.csv").string(), dir / "log"), 0);
  const auto body = body_lines(read_file(dir / "a.csv"));
  EXPECT_EQ(body.size(), 22u);
  EXPECT_EQ(body[0], "t,S_P,I,dS_P,dI");
}

TEST(Cli, SweepRowsIndependentOfWidth) {
  const fs::path dir = scratch("sweep");
  write_file(dir / "s.cfg",
             "n_total=60\nl=4\nd=10\nt_max=40\nn_times=2\nsweep.mu_f.values=0,5,10\nsweep.delta_f.values=10,20\n");
  ASSERT_EQ(run_cli("sweep " + (dir / "s.cfg").string() + " -j 1 -o " + (dir / "a.csv").string(), dir / "log"), 0);
  ASSERT_EQ(run_cli("sweep " + (dir / "s.cfg").string() + " -j 3 -o " + (dir / "b.csv").string(), dir / "log"), 0);
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
  const auto body = body_lines(read_file(dir / "a.csv"));
  ASSERT_EQ(body.size(), 7u);
  EXPECT_EQ(body[2].substr(0, 5), "0,20,");
  EXPECT_EQ(body[3].substr(0, 5), "5,10,");
}

TEST(Cli, SweepWithoutAxesIsInvalid) {
  const fs::path dir = scratch("noaxes");
  write_file(dir / "s.cfg", "n_total=60\n");
  EXPECT_EQ(run_cli("sweep " + (dir / "s.cfg").string(), dir / "log"), 1);
}

TEST(Cli, SpectrumSubcommand) {
  const fs::path dir = scratch("spectrum");
  write_file(dir / "s.cfg", "n_total=44\nl=4\nd=0\ntau_t=0\nmu_p=0.2\nt0=0\n");
  ASSERT_EQ(run_cli("spectrum " + (dir / "s.cfg").string(), dir / "out"), 0);
  const std::string out = read_file(dir / "out");
  EXPECT_NE(out.find("# mzm_splitting=0\n"), std::string::npos);
  EXPECT_NE(out.find("k,energy\n0,"), std::string::npos);
  EXPECT_EQ(run_cli("spectrum " + (dir / "s.cfg").string() + " --phase middle", dir / "out"), 1);
}

TEST(Cli, OracleSubcommand) {
  const fs::path dir = scratch("oracle");
  ASSERT_EQ(run_cli("oracle --n 6 --seeds 10", dir / "out"), 0);
  const std::string out = read_file(dir / "out");
  EXPECT_NE(out.find("rng=mt19937_64"), std::string::npos);
  const auto pos = out.find("max deviation = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(out.substr(pos + 16)), 1e-8);
  EXPECT_EQ(run_cli("oracle --n 12", dir / "out"), 1);
}

TEST(Cli, Fig1DeskPresetWritesTwoDeterministicTraces) {
  const fs::path a = scratch("fig1a"), b = scratch("fig1b");
  ASSERT_EQ(run_cli("preset fig1 --desk --out-dir " + a.string(), a / "log"), 0);
  ASSERT_EQ(run_cli("preset fig1 --out-dir " + b.string(), b / "log"), 0);
  for (const char* name : {"fig1_mzm.csv", "fig1_bulk.csv"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  }
  const auto body = body_lines(read_file(a / "fig1_mzm.csv"));
  ASSERT_EQ(body[0], "t,S_Q,S_X,S_P,S_QP,I,dS_P,dI");
  const double jump = split_numbers(body.back())[3] - split_numbers(body[1])[3];
  // Final-row S_P minus first-row S_P: the fractional jump of half a log 2.
  EXPECT_NEAR(jump, 0.5, 0.02);
}
