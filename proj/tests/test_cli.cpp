#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "oracle.hpp"
#include "sqnr/commands.hpp"

using namespace sqnr;

namespace {

RunConfig cfg(const std::string& text) { return parse_config_text(text); }

std::string run_cmd(int (*cmd)(const RunConfig&, int, std::ostream&, std::ostream&), const RunConfig& c,
                    int threads = 1) {
  std::ostringstream data, report;
  EXPECT_EQ(cmd(c, threads, data, report), kExitOk);
  return data.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    EXPECT_FALSE(line.empty());
    EXPECT_EQ(line.back(), '\r');
    line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sqnr_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

int cli(const std::string& args) {
  const std::string command = std::string(SQNR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, PresetsAndOverrides) {
  const RunConfig c = cfg(R"({"preset": "MRS", "overrides": {"J": 2.5, "alpha_in": [0.3, 0.1], "pump.g": 5.0,
                              "pulse.tau_p": 4.0, "pulse.t_end": 60, "pulse.dims": [2, 4, 4]}})");
  EXPECT_EQ(c.preset, "MRS");
  EXPECT_EQ(c.device.J, 2.5);
  EXPECT_EQ(c.device.Omega_p, 13.0);
  EXPECT_EQ(c.device.alpha_in, cplx(0.3, 0.1));
  EXPECT_EQ(c.pump.g, 5.0);
  EXPECT_EQ(c.pulse.tau_p, 4.0);
  EXPECT_EQ(c.pulse.dims[1], 4);
  EXPECT_EQ(parse_config_text(R"({"preset": "MRS"})", std::string("NMS")).device.J, 0.99);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(cfg(R"({"presett": "NMS"})"), ConfigError);
  EXPECT_THROW(cfg(R"({"overrides": {"Jay": 1}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"overrides": {"pump.gee": 1}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"sweep": {"axis": "Delta_a", "start": 0, "stop": 1, "step": 0.1, "extra": 1}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"preset": "XYZ"})"), ConfigError);
  EXPECT_THROW(cfg(R"({"solver": "magic"})"), ConfigError);
  EXPECT_THROW(cfg(R"({"overrides": {"J": "big"}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"overrides": {"kappa_ex1": 2.0}})"), ConfigError);
  EXPECT_THROW(cfg("{not json"), ConfigError);
  EXPECT_THROW(cfg("[1, 2]"), ConfigError);
}

TEST(Config, SweepInvariants) {
  EXPECT_THROW(cfg(R"({"sweep": {"axis": "nope", "start": 0, "stop": 1, "step": 0.1}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"sweep": {"axis": "Delta_a", "start": 0, "stop": 1, "step": 0}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"sweep": {"axis": "Delta_a", "start": 1, "stop": 1, "step": 0.1}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"sweep": {"axis": "Delta_a", "start": 2, "stop": 1, "step": 0.1}})"), ConfigError);
  const RunConfig c = cfg(R"({"sweep": {"axis": "Delta_a", "start": -1, "stop": 1, "step": 0.5}})");
  EXPECT_EQ(c.sweep->grid(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2.5e-9), "2.5e-09");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_THROW(format_number(std::nan("")), NumericalError);
}

TEST(SweepCommand, HeaderAndSpectrumShape) {
  const RunConfig c = cfg(R"({"preset": "NMS", "sweep": {"axis": "Delta_a", "start": -6, "stop": 6, "step": 0.01}})");
  const auto rows = parse_csv(run_cmd(cmd_sweep, c));
  ASSERT_EQ(rows.size(), 1202u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"delta_a", "T12", "T12_sv", "T21", "T23", "eta_db"}));
  std::vector<double> x, sv, bw;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (const auto& cell : rows[i]) EXPECT_TRUE(cell == "inf" || std::isfinite(std::stod(cell)));
    x.push_back(std::stod(rows[i][0]));
    sv.push_back(std::stod(rows[i][2]));
    bw.push_back(std::stod(rows[i][3]));
  }
  // every sample agrees with the amplitude oracle
  oracle::Device d;
  d.Omega = 10.0;
  for (std::size_t i = 0; i < x.size(); i += 50) {
    d.Da = d.Db = x[i];
    EXPECT_NEAR(sv[i], static_cast<double>(oracle::T12_sv(d)), 1e-9);
    EXPECT_NEAR(bw[i], static_cast<double>(oracle::T21(d)), 1e-9);
  }
  // backward: one dip at the common resonance, mirror-symmetric in Delta_a
  const auto argmin = [](const std::vector<double>& v) { return std::min_element(v.begin(), v.end()) - v.begin(); };
  EXPECT_NEAR(x[argmin(bw)], 0.0, 1e-9);
  for (std::size_t i = 0; i < bw.size(); ++i) EXPECT_NEAR(bw[i], bw[bw.size() - 1 - i], 1e-12);
  // forward: the squeezed mode sits far off resonance, so the dip is shallow and off-centre
  EXPECT_GT(sv[argmin(sv)], 0.5);
  EXPECT_GT(std::abs(x[argmin(sv)]), 0.05);
}

TEST(SweepCommand, MrsBackwardDoublet) {
  const RunConfig c = cfg(R"({"preset": "MRS", "sweep": {"axis": "Delta_a", "start": -6, "stop": 6, "step": 0.01}})");
  const auto rows = parse_csv(run_cmd(cmd_sweep, c));
  std::vector<double> x, bw;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    x.push_back(std::stod(rows[i][0]));
    bw.push_back(std::stod(rows[i][3]));
  }
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < bw.size(); ++i)
    if (bw[i] < bw[i - 1] && bw[i] < bw[i + 1]) minima.push_back(x[i]);
  ASSERT_EQ(minima.size(), 2u);
  // through numerator nearly vanishes where Delta^2 = J^2 + (kappa_a - 2 kappa_ex1) kappa_b
  const DeviceParams& p = c.device;
  const double root = std::sqrt(p.J * p.J + (p.kappa_a - 2.0 * p.kappa_ex1) * p.kappa_b);
  EXPECT_NEAR(minima[0], -root, 0.011);
  EXPECT_NEAR(minima[1], root, 0.011);
}

TEST(SweepCommand, DeterministicAcrossRunsAndThreads) {
  const RunConfig c = cfg(R"({"preset": "MRS", "solver": "moments",
                              "sweep": {"axis": "Delta_a", "start": 0, "stop": 5, "step": 0.05}})");
  const std::string a = run_cmd(cmd_sweep, c, 1), b = run_cmd(cmd_sweep, c, 1), d = run_cmd(cmd_sweep, c, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  const auto rows = parse_csv(a);
  EXPECT_EQ(rows[0].size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i)  // numeric columns mirror the analytic ones
    EXPECT_NEAR(std::stod(rows[i][8]) / std::stod(rows[i][3]), 1.0, 1e-9);
}

TEST(SweepCommand, FockColumns) {
  const RunConfig c = cfg(R"({"preset": "NMS", "solver": "fock", "overrides": {"alpha_in": 0.3},
                              "sweep": {"axis": "Delta_a", "start": -0.5, "stop": 0.5, "step": 0.5}})");
  const auto rows = parse_csv(run_cmd(cmd_sweep, c));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].back(), "T23_fock");
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_NEAR(std::stod(rows[i][6]), std::stod(rows[i][2]), 1e-3 * std::stod(rows[i][2]));
}

TEST(SweepCommand, ConfigErrors) {
  std::ostringstream o, r;
  EXPECT_THROW(cmd_sweep(cfg(R"({"preset": "NMS"})"), 1, o, r), ConfigError);
  EXPECT_THROW(cmd_sweep(cfg(R"({"preset": "NMS", "overrides": {"alpha_in": 0},
                                 "sweep": {"axis": "Delta_a", "start": 0, "stop": 1, "step": 0.5}})"),
                         1, o, r),
               ConfigError);
  EXPECT_THROW(cmd_sweep(cfg(R"({"preset": "NMS", "solver": "cascade",
                                 "sweep": {"axis": "Delta_a", "start": 0, "stop": 1, "step": 0.5}})"),
                         1, o, r),
               ConfigError);
}

TEST(SqueezeScanCommand, ReciprocalAtZeroAndFlattening) {
  const RunConfig c = cfg(R"({"preset": "NMS", "sweep": {"axis": "r_p", "start": 0, "stop": 2, "step": 0.05}})");
  const auto rows = parse_csv(run_cmd(cmd_squeeze_scan, c));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"r_p", "eta_db", "L_db"}));
  EXPECT_EQ(rows[1][1], "0");
  std::vector<double> r, eta, loss;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    r.push_back(std::stod(rows[i][0]));
    eta.push_back(std::stod(rows[i][1]));
    loss.push_back(std::stod(rows[i][2]));
  }
  // flatten for r_p > 0.6: eta varies little and L changes far slower than below 0.6
  double eta_min = 1e300, eta_max = -1e300, slope_hi = 0, slope_lo = 0;
  int n_hi = 0, n_lo = 0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double s = std::abs(loss[i] - loss[i - 1]) / (r[i] - r[i - 1]);
    if (r[i - 1] >= 0.6 - 1e-9) {
      eta_min = std::min(eta_min, eta[i]);
      eta_max = std::max(eta_max, eta[i]);
      slope_hi += s;
      ++n_hi;
    } else if (r[i - 1] >= 0.05 - 1e-9) {
      slope_lo += s;
      ++n_lo;
    }
  }
  EXPECT_LE((eta_max - eta_min) / eta_max, 0.03);
  EXPECT_LE(slope_hi / n_hi, 0.1 * slope_lo / n_lo);
}

TEST(SqueezeScanCommand, ChainConsistencyWithSweep) {
  // A squeeze-scan point is the same device as a sweep point with the derived pump.
  const double r = 1.05, coef = 10.0;
  const RunConfig scan = cfg(R"({"preset": "NMS", "sweep": {"axis": "r_p", "start": 1.05, "stop": 1.1, "step": 0.1}})");
  const auto srows = parse_csv(run_cmd(cmd_squeeze_scan, scan));
  std::ostringstream json;
  json.precision(17);
  json << R"({"preset": "NMS", "overrides": {"Delta_p_b": )" << coef * std::sinh(r) << R"(, "Omega_p": )"
       << std::tanh(2 * r) * coef * std::sinh(r) << R"(}, "sweep": {"axis": "Delta_a", "start": 0, "stop": 0.1, "step": 0.1}})";
  const auto wrows = parse_csv(run_cmd(cmd_sweep, cfg(json.str())));
  EXPECT_NEAR(std::stod(srows[1][1]), std::stod(wrows[1][5]), 1e-6);
  EXPECT_NEAR(std::stod(srows[1][2]), -10 * std::log10(std::stod(wrows[1][2])), 1e-6);
}

TEST(SqueezeScanCommand, CustomPresetNeedsRule) {
  std::ostringstream o, r;
  EXPECT_THROW(cmd_squeeze_scan(cfg(R"({"sweep": {"axis": "r_p", "start": 0, "stop": 1, "step": 0.5}})"), 1, o, r),
               ConfigError);
  EXPECT_EQ(cmd_squeeze_scan(cfg(R"({"squeeze_rule": 20, "sweep": {"axis": "r_p", "start": 0, "stop": 1, "step": 0.5}})"),
                             1, o, r),
            kExitOk);
}

TEST(TransistorCommand, ZeroPumpGivesZeroMap) {
  const RunConfig c = cfg(R"({"preset": "NMS", "overrides": {"Omega_p": 0},
                              "sweep": {"axis": "Delta_a", "start": -1, "stop": 1, "step": 0.5},
                              "transistor": {"flux_start": 1e6, "flux_stop": 1e8, "points_per_decade": 2}})");
  const auto rows = parse_csv(run_cmd(cmd_transistor, c, 2));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"delta_a", "photon_flux", "gain"}));
  ASSERT_EQ(rows.size(), 1u + 5u * 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][2], "0");
}

TEST(PulseCommand, ReportsFidelity) {
  const RunConfig c = cfg(R"({"preset": "NMS", "overrides": {"pulse.sample_step": 1.0}})");
  std::ostringstream data, report;
  ASSERT_EQ(cmd_pulse(c, 1, data, report), kExitOk);
  const auto rows = parse_csv(data.str());
  EXPECT_EQ(rows.size(), 56u);
  EXPECT_EQ(rows[0][0], "t");
  const std::string rep = report.str();
  const auto pos = rep.find("F=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GE(std::stod(rep.substr(pos + 2)), 0.987);
}

TEST(ValidateCommand, NmsPasses) {
  const RunConfig c = cfg(R"({"preset": "NMS", "overrides": {"alpha_in": 0.3}, "sv_cancelled": true})");
  const ValidationReport r = run_validation(c, 1);
  EXPECT_TRUE(r.pass());
  EXPECT_LE(r.fock_dev, 1e-3);
  EXPECT_LE(r.moment_dev, 1e-10);
}

TEST(ValidateCommand, ToleranceFailureExitsThree) {
  const RunConfig c = cfg(R"({"preset": "NMS", "overrides": {"alpha_in": 0.3}, "validate": {"fock_tol": 1e-14}})");
  std::ostringstream o, r;
  EXPECT_EQ(cmd_validate(c, 1, o, r), kExitNumerical);
  EXPECT_NE(o.str().find("FAIL"), std::string::npos);
}

TEST(CliBinary, ExitCodes) {
  TempDir dir;
  const std::string good = dir.write("good.json", R"({"preset": "NMS", "sweep": {"axis": "Delta_a", "start": -1, "stop": 1, "step": 0.5}})");
  const std::string empty = dir.write("empty.json", R"({"preset": "NMS", "sweep": {"axis": "Delta_a", "start": 1, "stop": 1, "step": 0.5}})");
  const std::string typo = dir.write("typo.json", R"({"preset": "NMS", "sweeep": {}})");
  const std::string unstable = dir.write("unstable.json", R"({"preset": "NMS", "overrides": {"Omega_p": 11},
      "sweep": {"axis": "Delta_a", "start": -1, "stop": 1, "step": 0.5}})");
  const std::string tight = dir.write("tight.json", R"({"preset": "NMS", "overrides": {"alpha_in": 0.3}, "validate": {"fock_tol": 1e-14}})");
  const std::string out = (dir.path / "o.csv").string();
  EXPECT_EQ(cli("sweep --config " + good + " --out " + out), 0);
  EXPECT_TRUE(std::filesystem::exists(out));
  EXPECT_EQ(cli("sweep --config " + empty), 2);
  EXPECT_EQ(cli("sweep --config " + typo), 2);
  EXPECT_EQ(cli("sweep --config " + unstable), 2);
  EXPECT_EQ(cli("sweep --config " + dir.path.string() + "/missing.json"), 2);
  EXPECT_EQ(cli("sweep"), 2);
  EXPECT_EQ(cli("bogus"), 2);
  EXPECT_EQ(cli("validate --config " + tight), 3);
}

TEST(CliBinary, ByteIdenticalOutputAndThreadFlag) {
  TempDir dir;
  const std::string c = dir.write("c.json", R"({"preset": "MRS", "sweep": {"axis": "Delta_a", "start": 0, "stop": 5, "step": 0.01}})");
  const std::string a = (dir.path / "a.csv").string(), b = (dir.path / "b.csv").string();
  ASSERT_EQ(cli("sweep --config " + c + " --out " + a + " --threads 1"), 0);
  ASSERT_EQ(cli("sweep --config " + c + " --out " + b + " --threads 3"), 0);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(cli("sweep --config " + c + " --threads 0"), 2);
}

TEST(Threads, Precedence) {
  ::setenv(kThreadsEnvVar, "3", 1);
  EXPECT_EQ(resolve_threads(5), 5);
  EXPECT_EQ(resolve_threads(0), 3);
  ::setenv(kThreadsEnvVar, "junk", 1);
  EXPECT_GE(resolve_threads(0), 1);
  ::unsetenv(kThreadsEnvVar);
  EXPECT_GE(resolve_threads(0), 1);
}
