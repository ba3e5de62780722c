// Copyright 2026 The segcalib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "segcalib/cli.hpp"
#include "segcalib/cloud_io.hpp"
#include "segcalib/errors.hpp"
#include "segcalib/evaluation.hpp"
#include "segcalib/scoring.hpp"
#include "segcalib/transform_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <sys/wait.h>

namespace segcalib
{
namespace
{

namespace fs = std::filesystem;

struct CliResult
{
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "segcalib");
  std::vector<const char *> argv;
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    dir_ = new test::TempDir("cli");
    const CliResult r = run_cli({"synth", "--out-dir", (dir_->path() / "scene").string(), "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const TransformDoc calib = load_transform_doc(calib_path());
    gt_ = new Extrinsic(*calib.extrinsic);
    const Extrinsic off = perturb(
      *gt_, rotation_from_axis_angle_deg(Eigen::Vector3d(1.0, -2.0, 0.5), 3.0),
      Eigen::Vector3d(0.06, -0.05, 0.055));
    save_transform_doc(TransformDoc{off, std::nullopt}, path("init.json"));
    const Extrinsic away(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, -500.0));
    save_transform_doc(TransformDoc{away, std::nullopt}, path("away.json"));
  }
  static void TearDownTestSuite()
  {
    delete gt_;
    delete dir_;
  }

  static std::string path(const std::string & name) { return (dir_->path() / name).string(); }
  static std::string cloud_path() { return path("scene/cloud.pcd"); }
  static std::string masks_path() { return path("scene/masks.json"); }
  static std::string calib_path() { return path("scene/calib.json"); }

  static std::vector<std::string> frame_args(const std::string & extrinsic)
  {
    return {"--cloud", cloud_path(), "--masks", masks_path(), "--intrinsics", calib_path(),
            "--init", extrinsic};
  }

  static test::TempDir * dir_;
  static Extrinsic * gt_;
};

test::TempDir * CliTest::dir_ = nullptr;
Extrinsic * CliTest::gt_ = nullptr;

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string> & b)
{
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST(Cli, UsageErrors)
{
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"synth"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"synth", "--out-dir", "x", "--mask-format", "png"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST(Cli, InvalidSpecExitsOne)
{
  test::TempDir dir("spec");
  test::write_file(dir / "spec.json", R"({"n_planes": 7})");
  const CliResult r =
    run_cli({"synth", "--spec", (dir / "spec.json").string(), "--out-dir", (dir / "o").string()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(CliTest, SynthWritesElevenMasksAndCloud)
{
  EXPECT_TRUE(fs::exists(cloud_path()));
  EXPECT_EQ(load_masks(masks_path()).size(), 11u);
}

TEST_F(CliTest, SynthIsByteIdentical)
{
  for (const char * format : {"manifest", "pgm"}) {
    const std::string a = path(std::string("sa_") + format);
    const std::string b = path(std::string("sb_") + format);
    ASSERT_EQ(run_cli({"synth", "--out-dir", a, "--seed", "8", "--mask-format", format}).code, 0);
    ASSERT_EQ(run_cli({"synth", "--out-dir", b, "--seed", "8", "--mask-format", format}).code, 0);
    std::size_t files = 0;
    for (const auto & e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) {
        continue;
      }
      ++files;
      const fs::path other = fs::path(b) / fs::relative(e.path(), a);
      EXPECT_EQ(test::read_file(e.path()), test::read_file(other)) << other;
    }
    EXPECT_GE(files, 3u);
  }
}

TEST_F(CliTest, MissingIntrinsicsIsUsageError)
{
  const CliResult r =
    run_cli({"score", "--cloud", cloud_path(), "--masks", masks_path(), "--extrinsic", calib_path()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  const CliResult pairs = run_cli(concat(
    {"calibrate", "--out", path("o"), "--cloud", cloud_path()}, frame_args(path("init.json"))));
  EXPECT_EQ(pairs.code, cli::kExitUsage);
}

TEST_F(CliTest, ScoreGroundTruthBeatsPerturbation)
{
  const CliResult at_gt = run_cli(concat({"score"}, frame_args(calib_path())));
  const CliResult off = run_cli(concat({"score"}, frame_args(path("init.json"))));
  ASSERT_EQ(at_gt.code, 0) << at_gt.err;
  ASSERT_EQ(off.code, 0) << off.err;
  const auto mean_of = [](const std::string & text) {
    return std::stod(text.substr(5, text.find('\n') - 5));
  };
  EXPECT_GT(mean_of(at_gt.out), mean_of(off.out));
  EXPECT_GE(mean_of(at_gt.out), 0.85);
  EXPECT_EQ(run_cli(concat({"score"}, frame_args(calib_path()))).out, at_gt.out);
}

TEST_F(CliTest, ScoreWritesReportFile)
{
  const CliResult r = run_cli(concat({"score", "--out", path("score.txt")}, frame_args(calib_path())));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(test::read_file(path("score.txt")), r.out);
}

TEST_F(CliTest, ScoreNoOverlapExitsTwo)
{
  const CliResult r = run_cli(concat({"score"}, frame_args(path("away.json"))));
  EXPECT_EQ(r.code, cli::kExitNoOverlap);
  const CliResult c = run_cli(concat({"calibrate", "--out", path("never")}, frame_args(path("away.json"))));
  EXPECT_EQ(c.code, cli::kExitNoOverlap);
  EXPECT_NE(c.err.find("NoOverlap"), std::string::npos);
}

TEST_F(CliTest, EmptyMaskDirectoryExitsOne)
{
  fs::create_directories(path("empty_masks"));
  const CliResult r = run_cli(
    {"score", "--cloud", cloud_path(), "--masks", path("empty_masks"), "--intrinsics", calib_path(),
     "--extrinsic", calib_path()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
}

TEST_F(CliTest, MissingFileExitsOne)
{
  const CliResult r = run_cli(
    {"score", "--cloud", path("nope.pcd"), "--masks", masks_path(), "--intrinsics", calib_path(),
     "--extrinsic", calib_path()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
}

TEST_F(CliTest, OverlayIsByteIdenticalAndPointsInsideMasks)
{
  const auto args = concat({"overlay"}, frame_args(calib_path()));
  ASSERT_EQ(run_cli(concat(args, {"--out", path("a.ppm")})).code, 0);
  ASSERT_EQ(run_cli(concat(args, {"--out", path("b.ppm")})).code, 0);
  EXPECT_EQ(test::read_file(path("a.ppm")), test::read_file(path("b.ppm")));

  const CloudFile cf = load_cloud(cloud_path());
  const MaskSet masks = load_masks(masks_path());
  const Intrinsics k = *load_transform_doc(calib_path()).intrinsics;
  for (const auto & pp : project(cf.cloud, *gt_, k)) {
    const int label = cf.cloud.points[pp.index].label;
    if (label >= 0) {
      ASSERT_TRUE(rasterize_membership(masks[static_cast<std::size_t>(label)], pp.coord));
    }
  }
}

TEST_F(CliTest, CalibrateRecoversAndIsDeterministic)
{
  const auto args = concat({"calibrate"}, frame_args(path("init.json")));
  const CliResult a = run_cli(concat(args, {"--out", path("ca")}));
  ASSERT_EQ(a.code, 0) << a.err;
  const CliResult b = run_cli(concat(args, {"--out", path("cb")}));
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  for (const char * f : {"extrinsic.json", "score.txt", "trace.csv"}) {
    EXPECT_EQ(test::read_file(path("ca") + "/" + f), test::read_file(path("cb") + "/" + f)) << f;
  }
  const Extrinsic est = *load_transform_doc(path("ca/extrinsic.json")).extrinsic;
  const ErrorReport e = extrinsic_error(est, *gt_);
  EXPECT_LE(e.rot_l2, 0.75);
  EXPECT_LE(e.trans_l2, 0.08);
}

TEST_F(CliTest, ConfigFileSuppliesFrames)
{
  const std::string cfg_path = path("run.json");
  test::write_file(
    cfg_path, std::string(R"({"frames": [{"cloud": ")") + cloud_path() + R"(", "masks": ")" +
                masks_path() + R"("}], "intrinsics": ")" + calib_path() + R"(", "init": ")" +
                calib_path() + R"("})");
  const CliResult via_cfg = run_cli({"score", "--config", cfg_path});
  ASSERT_EQ(via_cfg.code, 0) << via_cfg.err;
  EXPECT_EQ(via_cfg.out, run_cli(concat({"score"}, frame_args(calib_path()))).out);
  test::write_file(path("bad.json"), R"({"frame": []})");
  EXPECT_EQ(run_cli({"score", "--config", path("bad.json")}).code, cli::kExitRuntime);
}

TEST_F(CliTest, TwoFramesAccepted)
{
  const CliResult r = run_cli(concat(
    {"score", "--cloud", cloud_path(), "--masks", masks_path()}, frame_args(calib_path())));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("frame 1"), std::string::npos);
}

TEST_F(CliTest, BinaryExitCodes)
{
  const std::string bin = SEGCALIB_CLI_PATH;
  const auto status = [](const std::string & cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(bin), cli::kExitUsage);
  EXPECT_EQ(status(bin + " score " + "--cloud " + cloud_path() + " --masks " + masks_path() +
                   " --intrinsics " + calib_path() + " --extrinsic " + path("away.json")),
            cli::kExitNoOverlap);
  EXPECT_EQ(status(bin + " score --cloud " + cloud_path() + " --masks " + masks_path() +
                   " --intrinsics " + calib_path() + " --extrinsic " + calib_path()),
            cli::kExitOk);
}

}  // namespace
}  // namespace segcalib
