// Drives the built `catlink` binary end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("catlink_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CATLINK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string header_of(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::vector<std::vector<double>> numeric_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        row.push_back(std::nan(""));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

json manifest(const fs::path& dir, const std::string& command) {
  return json::parse(slurp(dir / ("manifest_" + command + ".json")));
}

double wigner_origin(const fs::path& csv) {
  // Long-format x,p,W rows; the origin is an exact lattice point.
  for (const auto& row : numeric_rows(csv)) {
    if (row[0] == 0.0 && row[1] == 0.0) return row[2];
  }
  ADD_FAILURE() << "no origin in " << csv;
  return std::nan("");
}

TEST(Cli, HelpAndUnknownSubcommand) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("teleport-everything"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST(Cli, WignerOriginSigns) {
  const auto dir = scratch("wigner");
  ASSERT_EQ(run("wigner --loss-db 5 --eta-sq 0.99 --grid-points 256 --out-dir " + dir.string()), 0);
  ASSERT_EQ(run("wigner --loss-db 5 --eta-sq 1 --grid-points 256 --out-dir " + dir.string()), 0);
  EXPECT_EQ(header_of(dir / "wigner_input.csv"), "x,p,w");
  EXPECT_LT(wigner_origin(dir / "wigner_input.csv"), 0.0);  // odd cat
  EXPECT_GE(wigner_origin(dir / "wigner_teleported_loss5.00_etasq0.9900.csv"), 0.0);
  EXPECT_LT(wigner_origin(dir / "wigner_teleported_loss5.00_etasq1.0000.csv"), 0.0);
  const auto m = manifest(dir, "wigner");
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["command"], "wigner");
  EXPECT_EQ(m["outputs"].size(), 2u);
}

TEST(Cli, UsageErrorsWriteNothing) {
  const auto dir = scratch("usage");
  EXPECT_EQ(run("fidelity-curve --models '' --out-dir " + dir.string()), 2);
  EXPECT_EQ(run("fidelity-curve --models fixed,lognormal --out-dir " + dir.string()), 2);
  EXPECT_EQ(run("sweep --r-range 3:0.5:3 --out-dir " + dir.string()), 2);
  EXPECT_EQ(run("channel-pdf --samples 100 --out-dir " + dir.string()), 2);
  EXPECT_EQ(run("wigner --eta-sq 1.5 --out-dir " + dir.string()), 2);
  EXPECT_EQ(run("wigner --bogus-flag --out-dir " + dir.string()), 2);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, TruncatedGridExitsThree) {
  const auto dir = scratch("trunc");
  EXPECT_EQ(run("wigner --half-width 2 --grid-points 128 --out-dir " + dir.string()), 3);
  EXPECT_EQ(manifest(dir, "wigner")["status"], "failed");
}

TEST(Cli, ChannelPdfDensitiesIntegrateToOne) {
  const auto dir = scratch("pdf");
  ASSERT_EQ(run("channel-pdf --sigmas 0.2,0.7,1.5 --samples 20000 --out-dir " + dir.string()), 0);
  for (const std::string stem :
       {"beam-wandering_sigma0.20", "beam-wandering_sigma0.70", "beam-wandering_sigma1.50",
        "elliptic_sigma0.70"}) {
    EXPECT_EQ(header_of(dir / (stem + "_samples.csv")), "T");
    const auto hist = dir / (stem + "_hist.csv");
    EXPECT_EQ(header_of(hist), "T,pdf");
    const auto rows = numeric_rows(hist);
    const double width = rows[1][0] - rows[0][0];
    double integral = 0.0;
    for (const auto& r : rows) integral += r[1] * width;
    EXPECT_NEAR(integral, 1.0, 0.01) << stem;
  }
  const auto rows = numeric_rows(dir / "beam-wandering_sigma0.70_pdf.csv");
  ASSERT_EQ(rows.size(), 1000u);
  double integral = 0.0;
  const double width = rows[1][0] - rows[0][0];
  for (const auto& r : rows) integral += r[1] * width;
  EXPECT_NEAR(integral, 1.0, 0.01);
  EXPECT_EQ(numeric_rows(dir / "beam-wandering_sigma0.70_samples.csv").size(), 20000u);
}

TEST(Cli, FidelityCurveFilesAndManifestReplay) {
  const auto dir = scratch("curve");
  const std::string flags = " --samples 10000 --losses 5,10 --models fixed,beam-wandering,elliptic";
  ASSERT_EQ(run("fidelity-curve" + flags + " --out-dir " + dir.string()), 0);
  const std::string expected = "mean_loss_db,mean_fidelity,stderr,mean_T,model";
  for (const char* f : {"fidelity_fixed.csv", "fidelity_beam-wandering.csv",
                        "fidelity_elliptic.csv", "fidelity_curves.csv"}) {
    EXPECT_EQ(header_of(dir / f), expected) << f;
  }
  for (const auto& row : numeric_rows(dir / "fidelity_curves.csv")) {
    EXPECT_GE(row[1], 0.0);
    EXPECT_LE(row[1], 1.0);
  }
  const auto m = manifest(dir, "fidelity-curve");
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["seed"], 20190101);
  EXPECT_EQ(m["config"]["samples"], 10000);

  // Feeding the manifest back in reproduces the run.
  const auto replay = scratch("curve_replay");
  ASSERT_EQ(run("fidelity-curve --config " + (dir / "manifest_fidelity-curve.json").string() +
                " --out-dir " + replay.string()),
            0);
  EXPECT_EQ(slurp(dir / "fidelity_curves.csv"), slurp(replay / "fidelity_curves.csv"));
}

TEST(Cli, OutputsIndependentOfWorkerCount) {
  const auto one = scratch("workers1");
  const auto four = scratch("workers4");
  const std::string flags = "fidelity-curve --samples 10000 --losses 6,12 --seed 7";
  ASSERT_EQ(run(flags + " --workers 1 --out-dir " + one.string()), 0);
  ASSERT_EQ(run(flags + " --workers 4 --out-dir " + four.string()), 0);
  EXPECT_EQ(slurp(one / "fidelity_curves.csv"), slurp(four / "fidelity_curves.csv"));
  ASSERT_EQ(run("channel-pdf --sigmas 0.5 --samples 10000 --workers 1 --out-dir " + one.string()), 0);
  ASSERT_EQ(run("channel-pdf --sigmas 0.5 --samples 10000 --workers 4 --out-dir " + four.string()), 0);
  EXPECT_EQ(slurp(one / "elliptic_sigma0.50_samples.csv"),
            slurp(four / "elliptic_sigma0.50_samples.csv"));
}

TEST(Cli, SeedChangesSamples) {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  ASSERT_EQ(run("channel-pdf --model beam-wandering --sigmas 0.5 --samples 10000 --seed 1 --out-dir " +
                a.string()),
            0);
  ASSERT_EQ(run("channel-pdf --model beam-wandering --sigmas 0.5 --samples 10000 --seed 2 --out-dir " +
                b.string()),
            0);
  EXPECT_NE(slurp(a / "beam-wandering_sigma0.50_samples.csv"),
            slurp(b / "beam-wandering_sigma0.50_samples.csv"));
  EXPECT_FALSE(fs::exists(a / "elliptic_sigma0.50_samples.csv"));
}

TEST(Cli, SingleTupleSweep) {
  const auto dir = scratch("sweep");
  ASSERT_EQ(run("sweep --samples 10000 --r-range 1.15 --alpha-sq-range 2.25 --phi-range pi "
                "--out-dir " + dir.string()),
            0);
  EXPECT_EQ(header_of(dir / "sweep_summary.csv"),
            "r,alpha_sq,phi,loss_db,fidelity_fixed,fidelity_beam_wandering,stderr_beam_wandering,"
            "fidelity_elliptic,stderr_elliptic,ordering_holds");
  EXPECT_EQ(numeric_rows(dir / "sweep_summary.csv").size(), 4u);
  EXPECT_EQ(manifest(dir, "sweep")["status"], "complete");
}

}  // namespace
