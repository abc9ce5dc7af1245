#include <glob.h>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coverimpact.h"
#include "kvconfig.hpp"

namespace fs = std::filesystem;
using cvi_cli::KvConfig;

namespace {

struct CliFailure {
  int exit_code;
  std::string code;
  std::string detail;
};

[[noreturn]] void fail_cli(cvi_status status) {
  throw CliFailure{static_cast<int>(status), cvi_status_name(status), cvi_last_error()};
}

[[noreturn]] void fail_config(const std::string& detail) {
  throw CliFailure{static_cast<int>(CVI_ERR_CONFIG), "config", detail};
}

void check(cvi_status status) {
  if (status != CVI_OK) fail_cli(status);
}

template <typename T, void (*FreeFn)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (ptr) FreeFn(ptr);
  }
  T** out() {
    if (ptr) {
      FreeFn(ptr);
      ptr = nullptr;
    }
    return &ptr;
  }
  operator T*() const { return ptr; }
};

using ImageHandle = Handle<cvi_image, cvi_image_free>;
using MaskHandle = Handle<cvi_mask, cvi_mask_free>;
using SeriesHandle = Handle<cvi_series, cvi_series_free>;
using CptHandle = Handle<cvi_cpt_result, cvi_cpt_result_free>;
using ImpactHandle = Handle<cvi_impact_result, cvi_impact_result_free>;

struct CString {
  char* ptr = nullptr;
  ~CString() { cvi_string_free(ptr); }
  char** out() { return &ptr; }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

// Flag > config file > default.
struct Options {
  KvConfig config;
  CLI::App* cmd = nullptr;

  std::string resolve(const std::string& flag, const std::string& key,
                      const std::string& fallback) const {
    if (cmd->count(flag) > 0) {
      return cmd->get_option(flag)->as<std::string>();
    }
    if (auto v = config.get(key)) return *v;
    return fallback;
  }

  std::optional<std::string> resolve_optional(const std::string& flag,
                                              const std::string& key) const {
    if (cmd->count(flag) > 0) return cmd->get_option(flag)->as<std::string>();
    return config.get(key);
  }
};

long long parse_int(const std::string& text, const std::string& what) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail_config("invalid integer for " + what + ": '" + text + "'");
  }
  return value;
}

unsigned long long parse_uint(const std::string& text, const std::string& what) {
  unsigned long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail_config("invalid unsigned integer for " + what + ": '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail_config("invalid number for " + what + ": '" + text + "'");
  }
  return value;
}

void parse_triple(const std::string& text, uint8_t out[3], const std::string& what) {
  std::stringstream ss(text);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 3) fail_config(what + " needs exactly three comma-separated bytes: '" + text + "'");
    const long long v = parse_int(part, what);
    if (v < 0 || v > 255) fail_config(what + " channel out of [0,255]: '" + text + "'");
    out[i++] = static_cast<uint8_t>(v);
  }
  if (i != 3) fail_config(what + " needs exactly three comma-separated bytes: '" + text + "'");
}

cvi_hsv_range parse_range(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    fail_config(what + " must look like 'l1,l2,l3:u1,u2,u3': '" + text + "'");
  }
  cvi_hsv_range range;
  parse_triple(text.substr(0, colon), range.lower, what + " lower");
  parse_triple(text.substr(colon + 1), range.upper, what + " upper");
  return range;
}

std::vector<std::string> glob_files(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == GLOB_NOMATCH) {
    globfree(&g);
    return {};
  }
  if (rc != 0) {
    globfree(&g);
    throw CliFailure{static_cast<int>(CVI_ERR_IO), "io", "glob failed for pattern '" + pattern + "'"};
  }
  std::vector<std::string> out(g.gl_pathv, g.gl_pathv + g.gl_pathc);
  globfree(&g);
  return out;
}

std::int64_t extract_epoch(const std::regex& re, const std::string& path) {
  const std::string name = fs::path(path).filename().string();
  std::smatch m;
  if (!std::regex_search(name, m, re) || m.size() < 2 || !m[1].matched) {
    throw CliFailure{static_cast<int>(CVI_ERR_PARAM), "param",
                     "epoch pattern does not match filename '" + path + "'"};
  }
  const std::string tok = m[1].str();
  std::int64_t epoch = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), epoch);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw CliFailure{static_cast<int>(CVI_ERR_PARAM), "param",
                     "epoch capture '" + tok + "' is not an integer in '" + path + "'"};
  }
  return epoch;
}

fs::path ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw CliFailure{static_cast<int>(CVI_ERR_IO), "io",
                     "cannot create output directory '" + dir + "': " + ec.message()};
  }
  return fs::path(dir);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw CliFailure{static_cast<int>(CVI_ERR_IO), "io", "cannot open for writing: " + path.string()};
  }
  out << text;
  if (!out.good()) {
    throw CliFailure{static_cast<int>(CVI_ERR_IO), "io", "write failed: " + path.string()};
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CliFailure{static_cast<int>(CVI_ERR_IO), "io", "cannot open file: " + path};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- subcommands ----------------------------------------------------------

int cmd_segment(const Options& opt) {
  const std::string pattern = [&] {
    const auto p = opt.resolve_optional("--pattern", "images.pattern");
    if (!p) fail_config("segment needs an image pattern (--pattern or images.pattern)");
    return *p;
  }();
  const std::string regex_text = opt.resolve("--epoch-regex", "images.epoch_regex", R"((\d+))");
  const std::string out_dir = opt.resolve("--out", "out.dir", "out");

  cvi_hsv_range range;
  parse_triple(opt.resolve("--hsv-lower", "hsv.lower", "55,75,30"), range.lower, "hsv lower");
  parse_triple(opt.resolve("--hsv-upper", "hsv.upper", "205,255,255"), range.upper, "hsv upper");
  const auto sigma_text = opt.resolve_optional("--sigma", "blur.sigma");

  std::regex re;
  try {
    re = std::regex(regex_text);
  } catch (const std::regex_error& e) {
    fail_config("invalid epoch regex '" + regex_text + "': " + e.what());
  }
  if (re.mark_count() < 1) {
    fail_config("epoch regex '" + regex_text + "' needs one capture group");
  }

  const std::vector<std::string> files = glob_files(pattern);
  if (files.empty()) {
    throw CliFailure{static_cast<int>(CVI_ERR_PARAM), "param",
                     "no images match pattern '" + pattern + "'"};
  }

  const fs::path out = ensure_out_dir(out_dir);
  std::vector<std::int64_t> epochs;
  std::vector<double> values;
  for (const std::string& file : files) {
    const std::int64_t epoch = extract_epoch(re, file);

    ImageHandle img;
    check(cvi_image_decode_file(file.c_str(), epoch, img.out()));
    if (sigma_text) {
      ImageHandle blurred;
      check(cvi_image_blur(img, parse_double(*sigma_text, "blur sigma"), blurred.out()));
      std::swap(img.ptr, blurred.ptr);
    }

    MaskHandle mask;
    check(cvi_image_hsv_mask(img, &range, mask.out()));
    const double coverage = cvi_mask_coverage(mask);

    const fs::path mask_path = out / (std::to_string(epoch) + ".mask.png");
    check(cvi_mask_write_png(mask, mask_path.string().c_str()));

    epochs.push_back(epoch);
    values.push_back(coverage);
    std::printf("epoch %lld: coverage %.6f -> %s\n", static_cast<long long>(epoch),
                coverage, mask_path.string().c_str());
  }

  SeriesHandle series;
  check(cvi_series_create(epochs.data(), values.data(), epochs.size(), series.out()));
  const fs::path csv_path = out / "series.csv";
  check(cvi_series_write_csv(series, csv_path.string().c_str()));
  std::printf("wrote %s (%zu epochs)\n", csv_path.string().c_str(), epochs.size());
  return 0;
}

int cmd_calibrate(const Options& opt, const std::string& image_path,
                  const std::vector<std::string>& range_flags) {
  const std::string out_dir = opt.resolve("--out", "out.dir", "out");

  std::vector<std::string> range_texts = range_flags;
  if (range_texts.empty()) {
    if (const auto cfg_ranges = opt.config.get("calibrate.ranges")) {
      std::stringstream ss(*cfg_ranges);
      std::string part;
      while (std::getline(ss, part, ';')) {
        if (!part.empty()) range_texts.push_back(part);
      }
    }
  }
  if (range_texts.empty()) {
    fail_config("calibrate needs at least one range (--range or calibrate.ranges)");
  }

  std::vector<cvi_hsv_range> ranges;
  ranges.reserve(range_texts.size());
  for (const std::string& text : range_texts) {
    ranges.push_back(parse_range(text, "candidate range"));
  }

  ImageHandle img;
  check(cvi_image_decode_file(image_path.c_str(), 0, img.out()));
  if (const auto sigma_text = opt.resolve_optional("--sigma", "blur.sigma")) {
    ImageHandle blurred;
    check(cvi_image_blur(img, parse_double(*sigma_text, "blur sigma"), blurred.out()));
    std::swap(img.ptr, blurred.ptr);
  }

  const fs::path out = ensure_out_dir(out_dir);
  const std::string stem = fs::path(image_path).stem().string();
  CString table;
  check(cvi_calibration_grid_run(img, ranges.data(), ranges.size(),
                                 out.string().c_str(), stem.c_str(), table.out()));
  write_text_file(out / "calibration.txt", table.str());
  std::fputs(table.str().c_str(), stdout);
  std::printf("wrote %s and %zu mask previews\n", (out / "calibration.txt").string().c_str(),
              ranges.size());
  return 0;
}

cvi_cpt_config resolve_cpt_config(const Options& opt) {
  cvi_cpt_config cfg;
  cvi_cpt_config_defaults(&cfg);

  const std::string stat = opt.resolve("--statistic", "changepoint.statistic",
                                       "mean_and_variance");
  if (stat == "mean") {
    cfg.statistic = CVI_STAT_MEAN;
  } else if (stat == "variance") {
    cfg.statistic = CVI_STAT_VARIANCE;
  } else if (stat == "mean_and_variance") {
    cfg.statistic = CVI_STAT_MEAN_AND_VARIANCE;
  } else {
    fail_config("unknown statistic '" + stat + "'");
  }

  const std::string threshold = opt.resolve("--threshold", "changepoint.threshold", "sic");
  if (threshold == "sic") {
    cfg.use_sic = 1;
  } else {
    cfg.use_sic = 0;
    cfg.threshold_c = parse_double(threshold, "threshold");
  }
  cfg.min_seg_len = static_cast<int32_t>(
      parse_int(opt.resolve("--min-seg-len", "changepoint.min_seg_len", "2"), "min segment length"));
  return cfg;
}

int cmd_changepoint(const Options& opt, const std::string& series_path,
                    std::optional<int> manual_tau) {
  const std::string out_dir = opt.resolve("--out", "out.dir", "out");

  SeriesHandle series;
  check(cvi_series_read_csv(series_path.c_str(), series.out()));
  const size_t n = cvi_series_size(series);
  const fs::path out = ensure_out_dir(out_dir);
  const fs::path json_path = out / "changepoint.json";

  if (manual_tau) {
    if (*manual_tau < 1 || static_cast<size_t>(*manual_tau) > n - 1) {
      throw CliFailure{static_cast<int>(CVI_ERR_PARAM), "param",
                       "manual tau must lie in [1, n-1]"};
    }
    nlohmann::json doc;
    doc["tau_hat"] = *manual_tau;
    doc["lambda"] = nullptr;
    doc["threshold"] = nullptr;
    doc["rejected"] = true;
    doc["per_tau_ml"] = nullptr;
    write_text_file(json_path, doc.dump(2) + "\n");
    std::printf("changepoint: manual override tau=%d (epoch %lld)\n", *manual_tau,
                static_cast<long long>(cvi_series_epoch(series, *manual_tau - 1)));
    std::printf("wrote %s\n", json_path.string().c_str());
    return 0;
  }

  const cvi_cpt_config cfg = resolve_cpt_config(opt);
  CptHandle result;
  check(cvi_changepoint_detect(series, &cfg, result.out()));

  CString json;
  check(cvi_cpt_result_json(result, json.out()));
  write_text_file(json_path, json.str());

  if (cvi_cpt_result_rejected(result)) {
    const int tau = cvi_cpt_result_tau(result);
    std::printf("changepoint: rejected H0 at tau=%d (epoch %lld): lambda=%.6g > c=%.6g\n",
                tau, static_cast<long long>(cvi_series_epoch(series, tau - 1)),
                cvi_cpt_result_lambda(result), cvi_cpt_result_threshold(result));
  } else {
    std::printf("changepoint: no change detected: lambda=%.6g <= c=%.6g\n",
                cvi_cpt_result_lambda(result), cvi_cpt_result_threshold(result));
  }
  std::printf("wrote %s\n", json_path.string().c_str());
  return 0;
}

cvi_impact_config resolve_impact_config(const Options& opt) {
  cvi_impact_config cfg;
  cvi_impact_config_defaults(&cfg);

  const std::string component = opt.resolve("--component", "impact.component",
                                            "local_linear_trend");
  if (component == "local_level") {
    cfg.component = CVI_COMPONENT_LOCAL_LEVEL;
  } else if (component == "local_linear_trend") {
    cfg.component = CVI_COMPONENT_LOCAL_LINEAR_TREND;
  } else {
    fail_config("unknown component '" + component + "'");
  }
  cfg.prior_shape = parse_double(opt.resolve("--prior-shape", "impact.prior_shape", "0.01"),
                                 "prior shape");
  cfg.prior_scale_factor = parse_double(
      opt.resolve("--prior-scale-factor", "impact.prior_scale_factor", "0.01"),
      "prior scale factor");
  cfg.n_iter =
      static_cast<int32_t>(parse_int(opt.resolve("--n-iter", "impact.n_iter", "2000"), "n_iter"));
  cfg.burn_in = static_cast<int32_t>(
      parse_int(opt.resolve("--burn-in", "impact.burn_in", "500"), "burn_in"));
  cfg.seed = parse_uint(opt.resolve("--seed", "impact.seed", "0"), "seed");
  cfg.credible_level = parse_double(
      opt.resolve("--credible-level", "impact.credible_level", "0.95"), "credible level");
  return cfg;
}

int cmd_impact(const Options& opt, const std::string& series_path,
               std::optional<int> index_flag, const std::string& changepoint_path) {
  const std::string out_dir = opt.resolve("--out", "out.dir", "out");

  SeriesHandle series;
  check(cvi_series_read_csv(series_path.c_str(), series.out()));

  cvi_impact_config cfg = resolve_impact_config(opt);
  if (index_flag) {
    cfg.intervention_index = *index_flag;
  } else if (!changepoint_path.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text_file(changepoint_path));
    } catch (const nlohmann::json::exception& e) {
      throw CliFailure{static_cast<int>(CVI_ERR_DECODE), "decode",
                       changepoint_path + ": invalid changepoint JSON: " + e.what()};
    }
    if (!doc.contains("tau_hat") || doc["tau_hat"].is_null()) {
      throw CliFailure{static_cast<int>(CVI_ERR_PARAM), "param",
                       changepoint_path + ": no changepoint was detected (tau_hat is null)"};
    }
    cfg.intervention_index = doc["tau_hat"].get<int32_t>();
  } else if (const auto key = opt.config.get("impact.index")) {
    cfg.intervention_index = static_cast<int32_t>(parse_int(*key, "impact.index"));
  } else {
    fail_config("impact needs an intervention index (--index, --changepoint, or impact.index)");
  }

  ImpactHandle result;
  check(cvi_impact_run(series, &cfg, result.out()));

  const fs::path out = ensure_out_dir(out_dir);
  CString json;
  check(cvi_impact_result_json(result, json.out()));
  write_text_file(out / "impact.json", json.str());
  CString csv;
  check(cvi_impact_result_csv(result, csv.out()));
  write_text_file(out / "impact.csv", csv.str());

  std::printf("impact: intervention index %d (epoch %lld)\n", cfg.intervention_index,
              static_cast<long long>(cvi_series_epoch(series, cfg.intervention_index - 1)));
  std::printf("impact: average pointwise effect %.6f\n", cvi_impact_average_effect(result));
  std::printf("impact: cumulative effect %.6f\n", cvi_impact_cumulative_effect(result));
  std::printf("impact: relative effect %.6f\n", cvi_impact_relative_effect(result));
  std::printf("impact: tail probability %.6f\n", cvi_impact_tail_probability(result));
  std::printf("wrote %s\n", (out / "impact.json").string().c_str());
  std::printf("wrote %s\n", (out / "impact.csv").string().c_str());
  return 0;
}

int cmd_report(const Options& opt, const std::string& impact_path,
               const std::string& series_path) {
  const std::string out_dir = opt.resolve("--out", "out.dir", "out");

  SeriesHandle series;
  check(cvi_series_read_csv(series_path.c_str(), series.out()));
  ImpactHandle impact;
  check(cvi_impact_result_from_json(read_text_file(impact_path).c_str(),
                                    impact_path.c_str(), impact.out()));

  CString svg;
  check(cvi_report_svg(impact, series, svg.out()));
  const fs::path out = ensure_out_dir(out_dir);
  write_text_file(out / "report.svg", svg.str());
  std::printf("wrote %s\n", (out / "report.svg").string().c_str());
  return 0;
}

struct SynthFlags {
  bool series_mode = false;
  bool images_mode = false;
  int n = 35;
  double level0 = 0.8;
  double pre_slope = 0.0;
  double post_slope = 0.0;
  int change_at = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::int64_t start_epoch = 0;
  double fraction = -1.0;
  std::string size = "64x64";
  std::string forest_range = "55,75,30:205,255,255";
  std::string background_range = "10,40,40:45,70,200";
  std::int64_t epoch = 0;
};

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) fail_config("size must look like WxH: '" + text + "'");
  const long long w = parse_int(text.substr(0, x), "width");
  const long long h = parse_int(text.substr(x + 1), "height");
  if (w < 1 || h < 1) fail_config("size must be at least 1x1");
  return {static_cast<int>(w), static_cast<int>(h)};
}

int cmd_synth(const Options& opt, const SynthFlags& flags) {
  const std::string out_dir = opt.resolve("--out", "out.dir", "out");
  const fs::path out = ensure_out_dir(out_dir);

  cvi_synth_series_spec series_spec;
  series_spec.n = flags.n;
  series_spec.level0 = flags.level0;
  series_spec.pre_slope = flags.pre_slope;
  series_spec.post_slope = flags.post_slope;
  series_spec.change_at = flags.change_at;
  series_spec.noise_sd = flags.noise;
  series_spec.seed = flags.seed;
  series_spec.start_epoch = flags.start_epoch;

  if (flags.series_mode) {
    SeriesHandle series;
    check(cvi_synth_series(&series_spec, series.out()));
    const fs::path csv_path = out / "series.csv";
    check(cvi_series_write_csv(series, csv_path.string().c_str()));
    std::printf("wrote %s (%d epochs)\n", csv_path.string().c_str(), flags.n);
    return 0;
  }

  const auto [width, height] = parse_size(flags.size);
  cvi_synth_image_spec image_spec;
  image_spec.width = width;
  image_spec.height = height;
  image_spec.forest_range = parse_range(flags.forest_range, "forest range");
  image_spec.background_range = parse_range(flags.background_range, "background range");
  image_spec.seed = flags.seed;

  if (flags.images_mode) {
    SeriesHandle target;
    check(cvi_synth_series(&series_spec, target.out()));

    std::vector<std::int64_t> epochs;
    std::vector<double> truths;
    for (size_t i = 0; i < cvi_series_size(target); ++i) {
      const std::int64_t epoch = cvi_series_epoch(target, i);
      image_spec.target_fraction = cvi_series_value(target, i);
      image_spec.seed = flags.seed + i;  // one stream per epoch image

      double realized = 0.0;
      ImageHandle img;
      check(cvi_synth_image(&image_spec, epoch, img.out(), &realized));
      const fs::path png_path = out / (std::to_string(epoch) + ".png");
      check(cvi_image_write_png(img, png_path.string().c_str()));
      epochs.push_back(epoch);
      truths.push_back(realized);
    }

    SeriesHandle truth;
    check(cvi_series_create(epochs.data(), truths.data(), epochs.size(), truth.out()));
    const fs::path truth_path = out / "truth.csv";
    check(cvi_series_write_csv(truth, truth_path.string().c_str()));
    std::printf("wrote %zu images and %s\n", epochs.size(), truth_path.string().c_str());
    return 0;
  }

  if (flags.fraction < 0.0) {
    fail_config("synth needs --series, --images, or --fraction");
  }
  image_spec.target_fraction = flags.fraction;
  double realized = 0.0;
  ImageHandle img;
  check(cvi_synth_image(&image_spec, flags.epoch, img.out(), &realized));
  const fs::path png_path = out / (std::to_string(flags.epoch) + ".png");
  check(cvi_image_write_png(img, png_path.string().c_str()));
  std::printf("wrote %s (fraction %.6f)\n", png_path.string().c_str(), realized);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverage time-series intervention analysis"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file")->expected(1);

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", "output directory");
    return cmd;
  };

  // segment
  CLI::App* segment = add_common(app.add_subcommand("segment",
      "segment images into masks and build the coverage series"));
  segment->add_option("--pattern", "image glob pattern");
  segment->add_option("--epoch-regex", "regex with one integer capture group");
  segment->add_option("--hsv-lower", "lower HSV bound h,s,v");
  segment->add_option("--hsv-upper", "upper HSV bound h,s,v");
  segment->add_option("--sigma", "Gaussian blur sigma (off when absent)");

  // calibrate
  CLI::App* calibrate = add_common(app.add_subcommand("calibrate",
      "preview candidate HSV ranges against one image"));
  std::string calibrate_image;
  std::vector<std::string> calibrate_ranges;
  calibrate->add_option("image", calibrate_image, "image file")->required();
  calibrate->add_option("--range", calibrate_ranges, "candidate range l1,l2,l3:u1,u2,u3");
  calibrate->add_option("--sigma", "Gaussian blur sigma (off when absent)");

  // changepoint
  CLI::App* changepoint = add_common(app.add_subcommand("changepoint",
      "likelihood-ratio single changepoint test"));
  std::string cpt_series_path;
  int manual_tau = 0;
  changepoint->add_option("series", cpt_series_path, "series.csv")->required();
  changepoint->add_option("--statistic", "mean | variance | mean_and_variance");
  changepoint->add_option("--threshold", "positive number or 'sic'");
  changepoint->add_option("--min-seg-len", "minimum segment length");
  CLI::Option* tau_opt =
      changepoint->add_option("--tau", manual_tau, "skip the test, use this index");

  // impact
  CLI::App* impact = add_common(app.add_subcommand("impact",
      "counterfactual forecast and effect posterior"));
  std::string impact_series_path;
  std::string impact_changepoint_path;
  int impact_index = 0;
  impact->add_option("series", impact_series_path, "series.csv")->required();
  CLI::Option* index_opt = impact->add_option("--index", impact_index, "intervention index");
  impact->add_option("--changepoint", impact_changepoint_path, "changepoint.json to read the index from");
  impact->add_option("--component", "local_level | local_linear_trend");
  impact->add_option("--n-iter", "MCMC iterations");
  impact->add_option("--burn-in", "MCMC burn-in");
  impact->add_option("--seed", "MCMC seed");
  impact->add_option("--credible-level", "credible level in (0,1)");
  impact->add_option("--prior-shape", "inverse-gamma prior shape");
  impact->add_option("--prior-scale-factor", "prior scale = factor * var(pre)");

  // report
  CLI::App* report = add_common(app.add_subcommand("report",
      "render the three-panel SVG report"));
  std::string report_impact_path;
  std::string report_series_path;
  report->add_option("impact", report_impact_path, "impact.json")->required();
  report->add_option("series", report_series_path, "series.csv")->required();

  // synth
  CLI::App* synth = add_common(app.add_subcommand("synth",
      "write synthetic fixture images or series"));
  SynthFlags sf;
  synth->add_flag("--series", sf.series_mode, "write a synthetic series.csv");
  synth->add_flag("--images", sf.images_mode, "write one image per epoch plus truth.csv");
  synth->add_option("--n", sf.n, "series length");
  synth->add_option("--level0", sf.level0, "starting level");
  synth->add_option("--pre-slope", sf.pre_slope, "per-epoch drift before the change");
  synth->add_option("--post-slope", sf.post_slope, "per-epoch drift after the change");
  synth->add_option("--change-at", sf.change_at, "1-based change index (0 = none)");
  synth->add_option("--noise", sf.noise, "Gaussian noise sd");
  synth->add_option("--seed", sf.seed, "RNG seed");
  synth->add_option("--start-epoch", sf.start_epoch, "epoch label of the first point");
  synth->add_option("--fraction", sf.fraction, "single image: target coverage fraction");
  synth->add_option("--size", sf.size, "image size WxH");
  synth->add_option("--forest-range", sf.forest_range, "forest HSV box l:u");
  synth->add_option("--background-range", sf.background_range, "background HSV box l:u");
  synth->add_option("--epoch", sf.epoch, "epoch label for a single image");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);  // --help
      throw CliFailure{2, "usage", e.what()};
    }

    Options opt;
    if (!config_path.empty()) {
      try {
        opt.config = KvConfig::load(config_path);
      } catch (const std::exception& e) {
        fail_config(e.what());
      }
    }

    if (segment->parsed()) {
      opt.cmd = segment;
      return cmd_segment(opt);
    }
    if (calibrate->parsed()) {
      opt.cmd = calibrate;
      return cmd_calibrate(opt, calibrate_image, calibrate_ranges);
    }
    if (changepoint->parsed()) {
      opt.cmd = changepoint;
      std::optional<int> tau;
      if (tau_opt->count() > 0) tau = manual_tau;
      return cmd_changepoint(opt, cpt_series_path, tau);
    }
    if (impact->parsed()) {
      opt.cmd = impact;
      std::optional<int> index;
      if (index_opt->count() > 0) index = impact_index;
      return cmd_impact(opt, impact_series_path, index, impact_changepoint_path);
    }
    if (report->parsed()) {
      opt.cmd = report;
      return cmd_report(opt, report_impact_path, report_series_path);
    }
    if (synth->parsed()) {
      opt.cmd = synth;
      return cmd_synth(opt, sf);
    }
    throw CliFailure{2, "usage", "no subcommand given"};
  } catch (const CliFailure& f) {
    std::fprintf(stderr, "error: %s: %s\n", f.code.c_str(), f.detail.c_str());
    return f.exit_code == 0 ? 1 : f.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return static_cast<int>(CVI_ERR_INTERNAL);
  }
}
