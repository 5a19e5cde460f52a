#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "rabi/oracle.hpp"
#include "rabi/recurrence.hpp"

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rabicf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = rabicf::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Csv {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
  std::vector<double> reals(const std::string& name) const {
    std::vector<double> v;
    const int c = col(name);
    for (const auto& r : rows) v.push_back(std::stod(r[static_cast<std::size_t>(c)]));
    return v;
  }
  std::vector<std::string> strings(const std::string& name) const {
    std::vector<std::string> v;
    const int c = col(name);
    for (const auto& r : rows) v.push_back(r[static_cast<std::size_t>(c)]);
    return v;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      csv.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

const std::vector<std::string> kAc1 = {"--model", "two-photon", "--omega", "1", "--delta", "0.5",
                                       "--g", "0.2", "--q", "1/4", "--emin", "-0.5", "--emax", "8"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST(Cli, SpectrumMatchesOracle) {
  const CliRun s = cli(with({"spectrum"}, with(kAc1, {"--format", "csv"})));
  ASSERT_EQ(s.code, 0) << s.err;
  const CliRun o = cli(with({"oracle"}, kAc1));
  ASSERT_EQ(o.code, 0) << o.err;
  const auto roots = parse_csv(s.out).reals("energy");
  const auto ref = parse_csv(o.out).reals("energy");
  ASSERT_EQ(roots.size(), ref.size());
  ASSERT_GT(roots.size(), 3u);
  for (std::size_t i = 0; i < roots.size(); ++i) EXPECT_NEAR(roots[i], ref[i], 1e-7);
  for (const auto& f : parse_csv(s.out).strings("flagged")) EXPECT_EQ(f, "false");
}

TEST(Cli, MetadataHeader) {
  const auto csv = parse_csv(cli(with({"spectrum"}, kAc1)).out);
  EXPECT_EQ(csv.meta.at("model"), "two-photon");
  EXPECT_EQ(csv.meta.at("sector"), "1/4");
  EXPECT_EQ(csv.meta.at("g"), "0.20000000000000001");
  EXPECT_TRUE(csv.meta.count("poles"));
  EXPECT_TRUE(csv.meta.count("root_abs_tol"));
  EXPECT_EQ(csv.header, (std::vector<std::string>{"index", "energy", "residual", "flagged", "reason"}));
}

TEST(Cli, DrivenZeroCouplingPointsToClosedForm) {
  const CliRun r = cli({"spectrum", "--model", "driven", "--g", "0", "--delta", "0.4", "--emax", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: ZERO_COUPLING: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("--closed-form"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  const CliRun c = cli({"spectrum", "--closed-form", "--model", "driven", "--g", "0", "--delta", "0.3",
                     "--drive", "0.4", "--emin", "-1", "--emax", "1.6"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto e = parse_csv(c.out).reals("energy");
  // n +/- 0.5 for n = 0, 1, 2 clipped at 1.6
  ASSERT_EQ(e.size(), 5u);
  EXPECT_NEAR(e[0], -0.5, 1e-15);
  EXPECT_NEAR(e[4], 1.5, 1e-15);
}

TEST(Cli, TwoPhotonCollapsePointRejected) {
  const CliRun r = cli({"spectrum", "--model", "two-photon", "--g", "0.5", "--omega", "1", "--delta",
                     "0.5", "--emax", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: COUPLING_OUT_OF_RANGE: ", 0), 0u) << r.err;
}

TEST(Cli, InvalidConfigs) {
  CliRun r = cli({"spectrum", "--model", "driven", "--q", "1/4", "--g", "0.3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: SECTOR_MISMATCH: ", 0), 0u) << r.err;
  r = cli(with({"spectrum"}, with(kAc1, {"--emin", "9"})));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: EMPTY_WINDOW: ", 0), 0u) << r.err;
  r = cli({"spectrum", "--no-such-flag"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: INVALID_ARGUMENT: ", 0), 0u) << r.err;
  r = cli({"spectrum", "--model", "three-photon"});
  EXPECT_EQ(r.code, 1);
  r = cli(with({"spectrum"}, with(kAc1, {"--format", "xml"})));
  EXPECT_EQ(r.code, 1);
  r = cli(with({"curve"}, with(kAc1, {"--samples", "1"})));
  EXPECT_EQ(r.code, 1);
  r = cli(with({"spectrum"}, with(kAc1, {"--cf-rel-tol", "0"})));
  EXPECT_EQ(r.code, 1);
  r = cli(kAc1);
  EXPECT_EQ(r.code, 1);
  for (const CliRun& x : {r}) EXPECT_EQ(std::count(x.err.begin(), x.err.end(), '\n'), 1);
}

TEST(Cli, CurveSignChangesCountEigenvalues) {
  const rabi::ModelParams m{rabi::ModelKind::TwoPhoton, 1.0, 0.5, 0.2, 0.0};
  const rabi::RecurrenceModel rec(m, rabi::Sector::q(1));
  for (int k = 0; k < 3; ++k) {
    const double lo = rec.pole(k) + 1e-3;
    const double hi = rec.pole(k + 1) - 1e-3;
    const auto oracle = rabi::oracle_spectrum(m, rabi::Sector::q(1), {lo, hi});
    const CliRun r = cli({"curve", "--model", "two-photon", "--delta", "0.5", "--g", "0.2", "--q", "1/4",
                       "--emin", std::to_string(lo), "--emax", std::to_string(hi), "--samples",
                       "2000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    // F itself also has poles between the p_n (zeros of the minimal K_0), so
    // its raw sign flips overcount; the pole-cleared numerator does not
    const auto psi = csv.reals("numerator");
    const auto f = csv.reals("value");
    int changes = 0;
    int raw = 0;
    for (std::size_t i = 1; i < psi.size(); ++i) {
      if (std::signbit(psi[i]) != std::signbit(psi[i - 1])) ++changes;
      if (std::signbit(f[i]) != std::signbit(f[i - 1])) ++raw;
    }
    EXPECT_EQ(changes, static_cast<int>(oracle.eigenvalues.size())) << k;
    EXPECT_GE(raw, changes);
  }
}

TEST(Cli, CurveMarksPoleNeighbourhood) {
  const rabi::ModelParams m{rabi::ModelKind::TwoPhoton, 1.0, 0.5, 0.2, 0.0};
  const rabi::RecurrenceModel rec(m, rabi::Sector::q(1));
  const double p = rec.pole(2);
  char lo[64], hi[64];
  std::snprintf(lo, sizeof lo, "%.17g", p - 2e-6);
  std::snprintf(hi, sizeof hi, "%.17g", p + 2e-6);
  const CliRun r = cli({"curve", "--model", "two-photon", "--delta", "0.5", "--g", "0.2", "--emin", lo,
                     "--emax", hi, "--samples", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 11u);
  const auto e = csv.reals("energy");
  const auto near = csv.strings("near_pole");
  int marked = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const bool expect = std::abs(e[i] - p) < 1e-6;
    EXPECT_EQ(near[i], expect ? "true" : "false") << i;
    marked += expect;
  }
  EXPECT_EQ(marked, 5);
  // the centre sample sits on the pole: recorded, not dropped
  EXPECT_EQ(csv.strings("error")[5], "POLE_COLLISION");
  EXPECT_EQ(csv.strings("value")[5], "nan");
}

TEST(Cli, CurveWithoutEigenvaluesHasNoSignChange) {
  const rabi::ModelParams m{rabi::ModelKind::TwoPhoton, 1.0, 0.5, 0.2, 0.0};
  const rabi::RecurrenceModel rec(m, rabi::Sector::q(1));
  const auto all = rabi::oracle_spectrum(m, rabi::Sector::q(1), {-3.0, 3.0});
  const double hi = std::min(rec.pole(0), all.eigenvalues.front()) - 0.05;
  const CliRun r = cli({"curve", "--model", "two-photon", "--delta", "0.5", "--g", "0.2", "--emin", "-2",
                     "--emax", std::to_string(hi), "--samples", "300"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  const auto f = csv.reals("value");
  const auto near = csv.strings("near_pole");
  int changes = 0;
  double prev = NAN;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i]) || near[i] == "true") continue;
    if (std::isfinite(prev) && std::signbit(prev) != std::signbit(f[i])) ++changes;
    prev = f[i];
  }
  EXPECT_EQ(changes, 0);
}

TEST(Cli, OracleAtZeroCouplingIsClosedForm) {
  const std::vector<std::string> args = {"--model", "two-mode", "--kappa", "3/2", "--delta", "0.3",
                                         "--g", "0", "--emin", "-1", "--emax", "7.5"};
  const CliRun o = cli(with({"oracle"}, args));
  ASSERT_EQ(o.code, 0) << o.err;
  const CliRun c = cli(with({"spectrum", "--closed-form"}, args));
  ASSERT_EQ(c.code, 0) << c.err;
  const auto a = parse_csv(o.out).reals("energy");
  const auto b = parse_csv(c.out).reals("energy");
  ASSERT_EQ(a.size(), b.size());
  ASSERT_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Cli, OracleTruncationDoublingIsStable) {
  const std::vector<std::string> args = {"oracle", "--model", "driven", "--delta", "0.4", "--g",
                                         "0.7", "--drive", "0.2", "--emin", "-2", "--emax", "5"};
  const CliRun a = cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const auto csv = parse_csv(a.out);
  const int used = std::stoi(csv.meta.at("oracle_n_used"));
  const CliRun b = cli(with(args, {"--oracle-n", std::to_string(2 * used)}));
  ASSERT_EQ(b.code, 0) << b.err;
  const auto x = csv.reals("energy");
  const auto y = parse_csv(b.out).reals("energy");
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-9);
}

TEST(Cli, TwoModeSectorsAreDisjoint) {
  const std::vector<std::string> args = {"oracle", "--model", "two-mode", "--delta", "0.4", "--g",
                                         "0.3", "--emin", "-2", "--emax", "6"};
  const auto a = parse_csv(cli(with(args, {"--kappa", "1/2"})).out).reals("energy");
  const auto b = parse_csv(cli(with(args, {"--kappa", "1"})).out).reals("energy");
  ASSERT_FALSE(a.empty());
  ASSERT_FALSE(b.empty());
  for (double x : a)
    for (double y : b) EXPECT_GT(std::abs(x - y), 1e-9);
}

TEST(Cli, CompareAcceptancePointAllMatched) {
  const CliRun r = cli(with({"compare"}, kAc1));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_FALSE(csv.rows.empty());
  for (const auto& s : csv.strings("status")) EXPECT_EQ(s, "matched");
  for (double d : csv.reals("diff")) EXPECT_LT(d, 1e-7);
  EXPECT_EQ(csv.meta.at("oracle_only"), "0");
  EXPECT_EQ(csv.meta.at("cf_only"), "0");
}

TEST(Cli, ComparePoleEnergyIsExceptionalCandidate) {
  // tune delta until an eigenvalue crosses pole(k): there the pole energy is
  // itself an eigenvalue
  const double g = 0.2;
  for (int k = 0; k < 3; ++k) {
    auto below = [&](double delta) {
      const rabi::ModelParams m{rabi::ModelKind::TwoPhoton, 1.0, delta, g, 0.0};
      const double p = rabi::RecurrenceModel(m, rabi::Sector::q(1)).pole(k);
      return rabi::oracle_spectrum(m, rabi::Sector::q(1), {-3.0, p}).eigenvalues.size();
    };
    double lo = 0.05;
    double hi = -1.0;
    for (double d = 0.1; d <= 3.0; d += 0.05) {
      if (below(d) != below(lo)) {
        hi = d;
        break;
      }
      lo = d;
    }
    if (hi < 0) continue;
    const auto n_lo = below(lo);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (below(mid) == n_lo ? lo : hi) = mid;
    }
    const rabi::ModelParams m{rabi::ModelKind::TwoPhoton, 1.0, lo, g, 0.0};
    const double p = rabi::RecurrenceModel(m, rabi::Sector::q(1)).pole(k);
    char delta[64], emin[64], emax[64];
    std::snprintf(delta, sizeof delta, "%.17g", lo);
    std::snprintf(emin, sizeof emin, "%.17g", p - 0.3);
    std::snprintf(emax, sizeof emax, "%.17g", p + 0.3);
    const CliRun r = cli({"compare", "--model", "two-photon", "--delta", delta, "--g", "0.2", "--emin",
                       emin, "--emax", emax});
    EXPECT_EQ(r.code, 0) << r.err << r.out;
    const auto csv = parse_csv(r.out);
    const auto oracle = csv.reals("oracle");
    const auto status = csv.strings("status");
    bool found = false;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      if (std::isfinite(oracle[i]) && std::abs(oracle[i] - p) < 1e-6) {
        EXPECT_EQ(status[i], "exceptional_candidate");
        found = true;
      }
      EXPECT_NE(status[i], "oracle_only");
      EXPECT_NE(status[i], "cf_only");
    }
    EXPECT_TRUE(found);
    return;
  }
  FAIL() << "no pole crossing found";
}

TEST(Cli, CoarseGridMissesLevels) {
  // one sample per ~3 level spacings
  const CliRun r = cli(with({"compare"}, with(kAc1, {"--grid-step", "3"})));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: UNMATCHED_ROWS: ", 0), 0u) << r.err;
  const auto status = parse_csv(r.out).strings("status");
  EXPECT_NE(std::find(status.begin(), status.end(), "oracle_only"), status.end());
}

TEST(Cli, SeriesRowsAndTailRatio) {
  const auto levels = parse_csv(cli(with({"spectrum"}, kAc1)).out).reals("energy");
  ASSERT_FALSE(levels.empty());
  char e[64];
  std::snprintf(e, sizeof e, "%.17g", levels[1]);
  const CliRun r = cli({"series", "--model", "two-photon", "--delta", "0.5", "--g", "0.2", "--q", "1/4",
                     "--energy", e, "--order", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 401u);
  EXPECT_EQ(csv.rows[0][0], "0");
  EXPECT_EQ(csv.rows[0][1], "1");
  EXPECT_EQ(csv.meta.at("not_an_eigenvalue"), "false");
  const double tail = std::stod(csv.meta.at("tail_ratio"));
  EXPECT_NEAR(tail, 4 * 0.2 * 0.2, 0.01 * 4 * 0.2 * 0.2);
  const auto ratio = csv.reals("norm_ratio");
  EXPECT_NEAR(ratio[399], 0.16, 0.0016);
}

TEST(Cli, SeriesZeroSplittingHasNoPlusComponent) {
  const rabi::ModelParams m{rabi::ModelKind::TwoPhoton, 1.0, 0.0, 0.2, 0.0};
  const double e0 = rabi::oracle_spectrum(m, rabi::Sector::q(1), {-2.0, 3.0}).eigenvalues.front();
  char e[64];
  std::snprintf(e, sizeof e, "%.17g", e0);
  const CliRun r = cli({"series", "--model", "two-photon", "--delta", "0", "--g", "0.2", "--energy", e,
                     "--order", "120"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (double k : parse_csv(r.out).reals("K_plus")) EXPECT_EQ(k, 0.0);
}

TEST(Cli, SeriesOffSpectrumIsFlagged) {
  const CliRun r = cli({"series", "--model", "driven", "--delta", "0.4", "--g", "0.7", "--energy",
                     "0.123", "--order", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).meta.at("not_an_eigenvalue"), "true");
}

TEST(Cli, OutputIsDeterministic) {
  for (const char* cmd : {"spectrum", "compare", "oracle"}) {
    const auto args = with({cmd}, with(kAc1, {"--threads", "4"}));
    const CliRun a = cli(args);
    const CliRun b = cli(args);
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(Cli, JsonRoundTrips) {
  const CliRun r = cli(with({"spectrum"}, with(kAc1, {"--format", "json"})));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::ordered_json::parse(r.out);
  ASSERT_TRUE(doc.contains("meta"));
  ASSERT_TRUE(doc.contains("rows"));
  EXPECT_EQ(doc.dump(2) + "\n", r.out);
  const auto again = nlohmann::ordered_json::parse(doc.dump(2));
  EXPECT_EQ(again, doc);
  const auto csv = parse_csv(cli(with({"spectrum"}, kAc1)).out).reals("energy");
  ASSERT_EQ(doc["rows"].size(), csv.size());
  for (std::size_t i = 0; i < csv.size(); ++i)
    EXPECT_EQ(doc["rows"][i]["energy"].get<double>(), csv[i]);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto path = std::filesystem::temp_directory_path() / "rabicf_cli_test.ini";
  {
    std::ofstream f(path);
    f << "model=two-photon\nomega=1\ndelta=0.5\ng=0.3\nq=1/4\nemin=-0.5\nemax=8\n";
  }
  const CliRun r = cli({"spectrum", "--config", path.string(), "--g", "0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto from_file = parse_csv(r.out);
  EXPECT_EQ(from_file.meta.at("g"), "0.20000000000000001");
  EXPECT_EQ(from_file.meta.at("delta"), "0.5");
  EXPECT_EQ(r.out, cli(with({"spectrum"}, kAc1)).out);
  std::filesystem::remove(path);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "rabicf_cli_test.csv";
  const CliRun r = cli(with({"oracle"}, with(kAc1, {"--output", path.string()})));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), cli(with({"oracle"}, kAc1)).out);
  std::filesystem::remove(path);
}
