#include "sidnism/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "sidnism/png_io.hpp"

namespace sidnism::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(CurveMode mode) {
  switch (mode) {
    case CurveMode::gamma: return "gamma";
    case CurveMode::fixed_eta: return "fixed-eta";
    default: return "nism";
  }
}

CurveMode parse_curve(const std::string& text) {
  if (text == "nism") return CurveMode::nism;
  if (text == "gamma") return CurveMode::gamma;
  if (text == "fixed-eta") return CurveMode::fixed_eta;
  throw ConfigError("unknown curve '" + text + "' (expected nism, gamma or fixed-eta)");
}

void RunConfig::validate() const {
  if (inputs.empty()) throw ConfigError("no input images given");
  if (output_dir.empty()) throw ConfigError("output directory is empty");
  if (curve == CurveMode::fixed_eta && !(eta >= 1.0)) throw ConfigError("eta must be >= 1");
  if (curve == CurveMode::gamma && !(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  try {
    sid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

template <typename T>
void take(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

void apply_sid(sid::SidConfig& cfg, const json& obj) {
  static const std::vector<std::string> known = {
      "lambda_rc", "lambda_illum", "lambda_reflect", "lambda_noise", "alpha", "beta", "epsilon",
      "iterations", "lr", "mode", "seed", "channels", "depth"};
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown key 'sid." + key + "' in config");
    }
  }
  take(obj, "lambda_rc", cfg.lambda_rc);
  take(obj, "lambda_illum", cfg.lambda_illum);
  take(obj, "lambda_reflect", cfg.lambda_reflect);
  take(obj, "lambda_noise", cfg.lambda_noise);
  take(obj, "alpha", cfg.alpha);
  take(obj, "beta", cfg.beta);
  take(obj, "epsilon", cfg.epsilon);
  take(obj, "iterations", cfg.iterations);
  take(obj, "lr", cfg.lr);
  take(obj, "seed", cfg.seed);
  take(obj, "channels", cfg.channels);
  take(obj, "depth", cfg.depth);
  if (obj.contains("mode")) cfg.mode = sid::parse_mode(obj.at("mode").get<std::string>());
}

std::string optional_field(const std::optional<double>& v, const char* spec = "{:.6f}") {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string{};
}

Image as_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  Image out(img.height(), img.width(), 3);
  for (std::size_t i = 0; i < img.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) out.data()[3 * i + c] = img.data()[i];
  }
  return out;
}

Image noise_view(const Image& noise) {
  Image out = noise;
  for (double& v : out.data()) v = (v + 1.0) / 2.0;
  return out;
}

struct Outcome {
  std::optional<ReportRow> row;
  std::string error;
  std::string log_line;
};

Outcome process_one(const fs::path& input, const std::string& name, const RunConfig& cfg) {
  Outcome outcome;
  try {
    const Image source = load_png(input);
    EnhanceResult r = enhance_image(source, cfg);
    const fs::path out = cfg.output_dir;
    save_png(r.enhanced, out / (name + "_enhanced.png"));
    if (cfg.dump_intermediates) {
      save_png(r.decomposition.reflectance_low, out / (name + "_R.png"));
      save_png(r.decomposition.illumination_low, out / (name + "_L.png"));
      save_png(noise_view(r.decomposition.noise_low), out / (name + "_N.png"));
      std::ofstream csv(out / (name + "_loss.csv"));
      sid::write_loss_csv(r.decomposition.loss_history, csv);
      if (!csv) throw std::runtime_error("cannot write loss history for " + name);
    }

    ReportRow row;
    row.name = name;
    row.height = source.height();
    row.width = source.width();
    if (r.curve) {
      row.eta = r.curve->eta;
      if (cfg.curve == CurveMode::nism) row.threshold = r.curve->threshold;
    }
    row.iterations = r.decomposition.loss_history.size();
    row.final_loss = r.decomposition.loss_history.empty() ? 0.0 : r.decomposition.loss_history.back().total;

    std::string notes;
    std::optional<Image> reference;
    if (cfg.reference_dir) {
      const fs::path ref_path = *cfg.reference_dir / input.filename();
      if (fs::exists(ref_path)) {
        Image ref = as_rgb(load_png(ref_path));
        if (ref.same_shape(r.enhanced)) {
          reference = std::move(ref);
        } else {
          notes += " (reference size differs; psnr/ssim skipped)";
        }
      } else {
        notes += " (no reference image)";
      }
    }
    row.metrics = metrics::build_report(r.enhanced, reference ? &*reference : nullptr);
    for (const std::string& w : r.decomposition.warnings) notes += " [warning: " + w + "]";
    if (r.curve && r.curve->degenerate) notes += " [warning: degenerate illumination, eta = 1]";

    outcome.log_line = fmt::format("{}: eta={} T={} iters={} final_loss={:.6f}{}", name,
                                   optional_field(row.eta, "{:.4f}"), optional_field(row.threshold, "{:.4f}"),
                                   row.iterations, row.final_loss, notes);
    if (r.decomposition.aborted) {
      outcome.error = name + ": optimization aborted on a non-finite loss";
    } else {
      outcome.row = std::move(row);
    }
  } catch (const std::exception& e) {
    outcome.error = name + ": " + e.what();
  }
  return outcome;
}

}  // namespace

void apply_json(RunConfig& cfg, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"inputs", "output_dir", "sid", "curve", "eta", "gamma",
                                                 "dump_intermediates", "reference_dir", "jobs"};
  try {
    for (const auto& [key, _] : doc.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError("unknown key '" + key + "' in config");
      }
    }
    if (doc.contains("inputs")) {
      cfg.inputs.clear();
      for (const auto& p : doc.at("inputs")) cfg.inputs.emplace_back(p.get<std::string>());
    }
    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("sid")) apply_sid(cfg.sid, doc.at("sid"));
    if (doc.contains("curve")) cfg.curve = parse_curve(doc.at("curve").get<std::string>());
    take(doc, "eta", cfg.eta);
    take(doc, "gamma", cfg.gamma);
    take(doc, "dump_intermediates", cfg.dump_intermediates);
    take(doc, "jobs", cfg.jobs);
    if (doc.contains("reference_dir")) cfg.reference_dir = doc.at("reference_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg;
  apply_json(cfg, buffer.str());
  return cfg;
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const fs::path& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (entry.is_regular_file() && ext == ".png") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

std::vector<std::string> unique_names(const std::vector<fs::path>& files) {
  std::vector<std::string> names;
  std::set<std::string> used;
  for (const fs::path& f : files) {
    const std::string stem = f.stem().string();
    std::string name = stem;
    for (int k = 1; used.contains(name); ++k) name = stem + "_" + std::to_string(k);
    used.insert(name);
    names.push_back(name);
  }
  return names;
}

EnhanceResult enhance_image(const Image& input, const RunConfig& cfg) {
  EnhanceResult r;
  r.decomposition = sid::decompose(as_rgb(input), cfg.sid);
  const Image& illum = r.decomposition.illumination_low;
  switch (cfg.curve) {
    case CurveMode::nism:
      r.curve = nism::estimate_eta(illum);
      r.enhanced_illumination = nism::apply_nism(illum, r.curve->eta);
      break;
    case CurveMode::fixed_eta:
      r.curve = nism::NismParams{};
      r.curve->eta = cfg.eta;
      r.enhanced_illumination = nism::apply_nism(illum, cfg.eta);
      break;
    case CurveMode::gamma:
      r.enhanced_illumination = nism::apply_gamma(illum, cfg.gamma);
      break;
  }
  r.enhanced = nism::recompose(r.decomposition.reflectance_low, r.enhanced_illumination);
  return r;
}

std::string format_report_row(const ReportRow& row) {
  const metrics::MetricsReport& m = row.metrics;
  return fmt::format("{},{},{},{},{},{},{:.6f},{:.6f},{},{:.6f},{:.6f},{},{}", row.name, row.height, row.width,
                     optional_field(row.eta), optional_field(row.threshold), row.iterations, row.final_loss,
                     m.ge, optional_field(m.ce), m.gmi, m.gmg, optional_field(m.psnr), optional_field(m.ssim));
}

RunSummary run_enhance(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::vector<fs::path> files = expand_inputs(cfg.inputs);
  if (files.empty()) throw ConfigError("no PNG images found in the given inputs");
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());

  const std::vector<std::string> names = unique_names(files);
  std::vector<Outcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      outcomes[i] = process_one(files[i], names[i], cfg);
      const std::lock_guard lock(log_mutex);
      if (!outcomes[i].log_line.empty()) log << outcomes[i].log_line << '\n';
      if (!outcomes[i].error.empty()) log << "error: " << outcomes[i].error << '\n';
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t width =
      std::min<std::size_t>(files.size(), cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < width; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  RunSummary summary;
  std::ofstream report(cfg.output_dir / "report.csv");
  report << kReportHeader << '\n';
  for (Outcome& o : outcomes) {
    if (o.row) {
      report << format_report_row(*o.row) << '\n';
      summary.rows.push_back(std::move(*o.row));
    } else {
      summary.failures.push_back(o.error);
    }
  }
  if (!report) throw std::runtime_error("cannot write report.csv");
  return summary;
}

}  // namespace sidnism::pipeline
