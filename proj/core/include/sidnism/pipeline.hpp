#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sidnism/decompose.hpp"
#include "sidnism/metrics.hpp"
#include "sidnism/nism.hpp"
#include "sidnism/sid_config.hpp"

namespace sidnism::pipeline {

enum class CurveMode { nism, gamma, fixed_eta };

std::string to_string(CurveMode mode);
CurveMode parse_curve(const std::string& text);

struct RunConfig {
  std::vector<std::filesystem::path> inputs;  ///< files or directories of PNGs
  std::filesystem::path output_dir = "out";
  sid::SidConfig sid;
  CurveMode curve = CurveMode::nism;
  double eta = 2.2;    ///< used by CurveMode::fixed_eta
  double gamma = 2.2;  ///< used by CurveMode::gamma
  bool dump_intermediates = false;
  std::optional<std::filesystem::path> reference_dir;
  int jobs = 0;  ///< worker threads; 0 = hardware concurrency

  /// Throws ConfigError when inconsistent.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Overlays the keys of a JSON document onto `cfg`. Unknown keys are errors.
void apply_json(RunConfig& cfg, std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Files named directly, plus *.png inside named directories (sorted).
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& inputs);

/// Output stems for a batch; repeated stems get "_1", "_2", ... suffixes.
std::vector<std::string> unique_names(const std::vector<std::filesystem::path>& files);

struct EnhanceResult {
  sid::DecompositionResult decomposition;
  std::optional<nism::NismParams> curve;  ///< absent for the gamma curve
  Image enhanced_illumination;
  Image enhanced;
};

/// decompose -> illumination curve -> R_low * L_hat. Gray input is
/// replicated to three channels.
EnhanceResult enhance_image(const Image& input, const RunConfig& cfg);

struct ReportRow {
  std::string name;
  std::size_t height = 0;
  std::size_t width = 0;
  std::optional<double> eta;
  std::optional<double> threshold;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  metrics::MetricsReport metrics;
};

inline constexpr std::string_view kReportHeader =
    "name,height,width,eta,T,iters,final_loss,ge,ce,gmi,gmg,psnr,ssim";
std::string format_report_row(const ReportRow& row);

struct RunSummary {
  std::vector<ReportRow> rows;  ///< successful images, input order
  std::vector<std::string> failures;
  int exit_code() const { return failures.empty() ? 0 : 1; }
};

/// Processes every input, writes the per-image artifacts and report.csv.
RunSummary run_enhance(const RunConfig& cfg, std::ostream& log);

}  // namespace sidnism::pipeline
