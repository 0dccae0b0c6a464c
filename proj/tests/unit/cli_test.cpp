#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "mprof/mprof.hpp"
#include "oracle/generators.hpp"

namespace fs = std::filesystem;
using namespace mprof;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(MPROF_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("mprof_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    oracle::Rng rng(21);
    auto e = oracle::random_experiment(rng, 64, 64, 12, 2);
    save_mask(e.mask, dir / "mask.u32");
    save_image(e.channels[0], dir / "dna.f32");
    save_image(e.channels[1], dir / "rna.f32");
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }

  fs::path dir;
};

std::size_t line_count(const std::string& s) {
  return std::size_t(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_F(Cli, ExtractShapeOnly) {
  const auto r = run_cli("extract --mask " + p("mask.u32") + " --mask-names cells --features shape --out " +
                         p("f.csv"));
  ASSERT_EQ(r.code, 0);
  const auto t = read_table(p("f_cells.csv"));
  EXPECT_EQ(t.columns.size(), 44u);
  EXPECT_EQ(t.columns.front(), "cells_Shape_Area");
  EXPECT_EQ(t.rows.size(), 12u);
}

TEST_F(Cli, ExtractAllFamiliesMatchesLibrary) {
  const auto r = run_cli("extract --image " + p("dna.f32") + " " + p("rna.f32") +
                         " --channel-names DNA,RNA --mask " + p("mask.u32") +
                         " --mask-names cells --workers 2 --batch-size 5 --out " + p("f.csv"));
  ASSERT_EQ(r.code, 0);
  ExperimentSpec spec;
  spec.channels = {{"DNA", load_image(p("dna.f32"))}, {"RNA", load_image(p("rna.f32"))}};
  spec.object_sets = {{"cells", load_mask(p("mask.u32"))}};
  EXPECT_EQ(read_table(p("f_cells.csv")), run(spec).front());
}

TEST_F(Cli, ExtractIsByteStableAcrossWorkers) {
  const std::string base = "extract --image " + p("dna.f32") + " " + p("rna.f32") + " --mask " +
                           p("mask.u32") + " " + p("mask.u32") + " --mask-names a,b ";
  ASSERT_EQ(run_cli(base + "--workers 1 --out " + p("one.csv")).code, 0);
  ASSERT_EQ(run_cli(base + "--workers 3 --batch-size 2 --out " + p("three.csv")).code, 0);
  for (const char* set : {"a", "b"})
    EXPECT_EQ(detail::read_file(p(std::string("one_") + set + ".csv")),
              detail::read_file(p(std::string("three_") + set + ".csv")));
  const auto header = detail::read_file(p("one_a.csv")).substr(0, 40);
  EXPECT_EQ(header.rfind("object_set,label,a_Shape_Area", 0), 0u) << header;
}

TEST_F(Cli, ExtractSpecErrorsExitTwo) {
  EXPECT_EQ(run_cli("extract --image " + p("dna.f32") + " --mask " + p("mask.u32") + " --out " +
                    p("f.csv"))
                .code,
            2);  // coloc needs two channels
  EXPECT_EQ(run_cli("extract --mask " + p("mask.u32") + " --features shape,bogus --out " + p("f.csv"))
                .code,
            2);
  EXPECT_EQ(run_cli("extract --mask " + p("mask.u32") + " --mask-names 9x --features shape --out " +
                    p("f.csv"))
                .code,
            2);
  EXPECT_EQ(run_cli("extract --features shape --out " + p("f.csv")).code, 2);
  EXPECT_EQ(run_cli("extract --mask " + p("missing.u32") + " --features shape --out " + p("f.csv")).code,
            1);
  EXPECT_FALSE(fs::exists(p("f_Objects1.csv")));
}

TEST_F(Cli, ListFeatures) {
  auto r = run_cli("list-features");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(line_count(r.out), 103u);
  EXPECT_EQ(r.out.rfind("name,family,input_kind,params\n", 0), 0u);
  EXPECT_NE(r.out.find("<ObjectSet>_Texture_Contrast_<Channel>_d1_g8,texture,2,distance=1;gray_levels=8"),
            std::string::npos);
  EXPECT_NE(r.out.find("<ObjectSet>_Coloc_Pearson_<ChannelA>_<ChannelB>,coloc,3,"), std::string::npos);
  r = run_cli("list-features --features shape");
  EXPECT_EQ(line_count(r.out), 45u);
  r = run_cli("list-features --features shape --zernike-order 3");
  EXPECT_EQ(line_count(r.out), 1u + 14u + 6u);
  EXPECT_EQ(run_cli("list-features --features nope").code, 2);
}

TEST_F(Cli, Tessellate) {
  ASSERT_EQ(run_cli("tessellate --width 50 --height 40 --radius 6 --out " + p("hex.u32")).code, 0);
  HexGridParams hp;
  hp.width = 50;
  hp.height = 40;
  hp.radius = 6;
  EXPECT_EQ(load_mask(p("hex.u32")), hex_tessellation(hp));

  LabelMask tissue(40, 50, 0);
  for (std::size_t r = 0; r < 40; ++r)
    for (std::size_t c = 0; c < 25; ++c) tissue(r, c) = 1;
  save_mask(tissue, p("tissue.u32"));
  ASSERT_EQ(run_cli("tessellate --radius 6 --min-coverage 0.5 --tissue-mask " + p("tissue.u32") +
                    " --out " + p("hex2.u32"))
                .code,
            0);
  EXPECT_EQ(load_mask(p("hex2.u32")), filter_by_coverage(hex_tessellation(hp), tissue, 0.5));
  EXPECT_EQ(run_cli("tessellate --radius 6 --out " + p("x.u32")).code, 2);
  EXPECT_EQ(run_cli("tessellate --width 5 --height 5 --radius 0 --out " + p("x.u32")).code, 2);
}

TEST_F(Cli, NormalizeAndCompare) {
  ASSERT_EQ(run_cli("extract --image " + p("dna.f32") + " " + p("rna.f32") + " --mask " +
                    p("mask.u32") + " --out " + p("f.csv"))
                .code,
            0);
  const auto in = p("f_Objects1.csv");
  ASSERT_EQ(run_cli("normalize --in " + in + " --out " + p("n.csv")).code, 0);
  const auto expected = normalize(read_table(in));
  EXPECT_EQ(read_table(p("n.csv")), expected);

  const auto r = run_cli("compare --a " + in + " --b " + in + " --out " + p("cmp.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "fraction_r2_gt_0.9=1\n");
  const auto report = detail::read_file(p("cmp.csv"));
  EXPECT_EQ(report.rfind("feature,slope,intercept,r2,n\n", 0), 0u);
  EXPECT_NE(report.find("fraction_r2_gt_0.9=1\n"), std::string::npos);
  EXPECT_EQ(run_cli("normalize --in " + p("absent.csv") + " --out " + p("n2.csv")).code, 1);
  EXPECT_EQ(run_cli("normalize --in " + in + " --out " + p("n2.csv") + " --corr-threshold 2").code, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);
}
