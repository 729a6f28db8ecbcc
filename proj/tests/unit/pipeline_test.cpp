#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sidnism/pipeline.hpp"
#include "sidnism/png_io.hpp"
#include "synthetic.hpp"

namespace sidnism::pipeline {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            (std::string("sidnism_pipeline_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_ / "in");
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_input(const std::string& name, std::uint64_t seed, std::size_t size = 16) {
    const fs::path p = root_ / "in" / name;
    save_png(testing::make_low_light_scene(seed, size).source, p);
    return p;
  }

  RunConfig quick_config(int iterations = 10) {
    RunConfig cfg;
    cfg.inputs = {root_ / "in"};
    cfg.output_dir = root_ / "out";
    cfg.sid.iterations = iterations;
    cfg.jobs = 1;
    return cfg;
  }

  fs::path root_;
};

TEST(ConfigTest, JsonOverridesDefaults) {
  RunConfig cfg;
  apply_json(cfg, R"({"inputs": ["a.png", "dir"], "output_dir": "o", "curve": "gamma", "gamma": 1.8,
                      "sid": {"iterations": 42, "mode": "cnn", "lambda_rc": 0.02},
                      "dump_intermediates": true, "reference_dir": "refs", "jobs": 3})");
  EXPECT_EQ(cfg.inputs.size(), 2u);
  EXPECT_EQ(cfg.output_dir, fs::path("o"));
  EXPECT_EQ(cfg.curve, CurveMode::gamma);
  EXPECT_EQ(cfg.gamma, 1.8);
  EXPECT_EQ(cfg.sid.iterations, 42);
  EXPECT_EQ(cfg.sid.mode, sid::Mode::cnn);
  EXPECT_EQ(cfg.sid.lambda_rc, 0.02);
  EXPECT_EQ(cfg.sid.lambda_illum, 0.1);
  EXPECT_TRUE(cfg.dump_intermediates);
  EXPECT_EQ(cfg.reference_dir, fs::path("refs"));
  EXPECT_EQ(cfg.jobs, 3);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ConfigTest, BadDocumentsAreConfigErrors) {
  RunConfig cfg;
  EXPECT_THROW(apply_json(cfg, "{"), ConfigError);
  EXPECT_THROW(apply_json(cfg, "[]"), ConfigError);
  EXPECT_THROW(apply_json(cfg, R"({"colour": 1})"), ConfigError);
  EXPECT_THROW(apply_json(cfg, R"({"sid": {"iters": 1}})"), ConfigError);
  EXPECT_THROW(apply_json(cfg, R"({"curve": "sigmoid"})"), ConfigError);
  EXPECT_THROW(apply_json(cfg, R"({"sid": {"mode": "unet"}})"), ConfigError);
  EXPECT_THROW(apply_json(cfg, R"({"eta": "high"})"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST(ConfigTest, ValidateRejectsBadValues) {
  RunConfig cfg;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.inputs = {"x.png"};
  EXPECT_NO_THROW(cfg.validate());
  cfg.sid.lambda_noise = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.sid.lambda_noise = 0.01;
  cfg.curve = CurveMode::fixed_eta;
  cfg.eta = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(NamesTest, CollisionsGetSuffixes) {
  const std::vector<fs::path> files{"a/img.png", "b/img.png", "c/img.png", "img_1.png", "other.png"};
  EXPECT_EQ(unique_names(files), (std::vector<std::string>{"img", "img_1", "img_2", "img_1_1", "other"}));
}

TEST(ReportTest, RowFormatting) {
  ReportRow row;
  row.name = "x";
  row.height = 4;
  row.width = 5;
  row.eta = 2.5;
  row.threshold = 0.4;
  row.iterations = 7;
  row.final_loss = 0.125;
  row.metrics.ge = 1.0;
  row.metrics.gmi = 2.0;
  row.metrics.gmg = 3.0;
  EXPECT_EQ(format_report_row(row), "x,4,5,2.500000,0.400000,7,0.125000,1.000000,,2.000000,3.000000,,");
}

TEST_F(PipelineTest, IdentityCurveAfterOneStepIsQuarterGray) {
  RunConfig cfg = quick_config(1);
  cfg.curve = CurveMode::gamma;
  cfg.gamma = 1.0;
  const EnhanceResult r = enhance_image(testing::make_low_light_scene(1, 12).source, cfg);
  for (double v : r.enhanced.data()) EXPECT_NEAR(v, 0.25, 2e-3);
  EXPECT_FALSE(r.curve.has_value());
}

TEST_F(PipelineTest, GrayInputIsAccepted) {
  RunConfig cfg = quick_config(2);
  const EnhanceResult r = enhance_image(testing::random_image(2, 10, 10, 1, 0.0, 0.3), cfg);
  EXPECT_EQ(r.enhanced.channels(), 3u);
  ASSERT_TRUE(r.curve.has_value());
  EXPECT_GE(r.curve->eta, 1.0);
}

TEST_F(PipelineTest, WritesArtifactsAndReport) {
  write_input("b.png", 1);
  write_input("a.png", 2);
  RunConfig cfg = quick_config();
  cfg.dump_intermediates = true;
  std::ostringstream log;
  const RunSummary s = run_enhance(cfg, log);
  EXPECT_EQ(s.exit_code(), 0);
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[0].name, "a");
  for (const char* f : {"a_enhanced.png", "a_R.png", "a_L.png", "a_N.png", "a_loss.csv", "b_enhanced.png"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  EXPECT_EQ(load_png(cfg.output_dir / "a_L.png").channels(), 1u);
  const std::string report = slurp(cfg.output_dir / "report.csv");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 3);
  EXPECT_EQ(report.substr(0, kReportHeader.size()), kReportHeader);
  EXPECT_NE(log.str().find("eta"), std::string::npos);
}

TEST_F(PipelineTest, RepeatedRunsAreByteIdentical) {
  write_input("x.png", 3);
  write_input("y.png", 4);
  RunConfig cfg = quick_config();
  cfg.jobs = 2;
  std::ostringstream log;
  run_enhance(cfg, log);
  const std::string report = slurp(cfg.output_dir / "report.csv");
  const std::string image = slurp(cfg.output_dir / "y_enhanced.png");
  fs::remove_all(cfg.output_dir);
  run_enhance(cfg, log);
  EXPECT_EQ(slurp(cfg.output_dir / "report.csv"), report);
  EXPECT_EQ(slurp(cfg.output_dir / "y_enhanced.png"), image);
}

TEST_F(PipelineTest, ReferenceMetricsFilled) {
  const fs::path in = write_input("r.png", 5);
  fs::create_directories(root_ / "ref");
  fs::copy_file(in, root_ / "ref" / "r.png");
  RunConfig cfg = quick_config();
  cfg.reference_dir = root_ / "ref";
  std::ostringstream log;
  const RunSummary s = run_enhance(cfg, log);
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_TRUE(s.rows[0].metrics.psnr.has_value());
  EXPECT_TRUE(s.rows[0].metrics.ssim.has_value());
}

TEST_F(PipelineTest, BadImagesAreSkippedWithPartialFailure) {
  write_input("good.png", 6);
  std::ofstream(root_ / "in" / "bad.png") << "not an image";
  RunConfig cfg = quick_config();
  cfg.inputs.push_back(root_ / "in" / "missing.png");
  std::ostringstream log;
  const RunSummary s = run_enhance(cfg, log);
  EXPECT_EQ(s.rows.size(), 1u);
  EXPECT_EQ(s.failures.size(), 2u);
  EXPECT_EQ(s.exit_code(), 1);
  const std::string report = slurp(cfg.output_dir / "report.csv");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 2);
}

TEST_F(PipelineTest, EmptyInputDirectoryIsConfigError) {
  RunConfig cfg = quick_config();
  std::ostringstream log;
  EXPECT_THROW(run_enhance(cfg, log), ConfigError);
}

}  // namespace
}  // namespace sidnism::pipeline
