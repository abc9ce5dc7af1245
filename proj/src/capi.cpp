#include "coverimpact.h"

#include <cstring>
#include <string>
#include <utility>

#include "changepoint.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "impact.hpp"
#include "png_io.hpp"
#include "series.hpp"
#include "svg_report.hpp"
#include "synth.hpp"

using namespace coverimpact;

struct cvi_image {
  RasterImage img;
};
struct cvi_mask {
  BinaryMask mask;
};
struct cvi_series {
  CoverageSeries series;
};
struct cvi_cpt_result {
  ChangepointResult result;
};
struct cvi_impact_result {
  ImpactReport report;
};

namespace {

thread_local std::string g_last_error;

cvi_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Param: return CVI_ERR_PARAM;
    case ErrorCode::Io: return CVI_ERR_IO;
    case ErrorCode::Decode: return CVI_ERR_DECODE;
    case ErrorCode::Csv: return CVI_ERR_CSV;
    case ErrorCode::Config: return CVI_ERR_CONFIG;
    case ErrorCode::Degenerate: return CVI_ERR_DEGENERATE;
    case ErrorCode::Conditioning: return CVI_ERR_CONDITIONING;
    case ErrorCode::Mismatch: return CVI_ERR_MISMATCH;
    case ErrorCode::Internal: return CVI_ERR_INTERNAL;
  }
  return CVI_ERR_INTERNAL;
}

template <typename Fn>
cvi_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return CVI_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CVI_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return CVI_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) fail(ErrorCode::Param, what);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

HsvRange to_range(const cvi_hsv_range& r) {
  HsvRange out;
  for (int c = 0; c < 3; ++c) {
    out.lower[c] = r.lower[c];
    out.upper[c] = r.upper[c];
  }
  return out;
}

}  // namespace

extern "C" {

const char* cvi_status_name(cvi_status status) {
  switch (status) {
    case CVI_OK: return "ok";
    case CVI_ERR_PARAM: return "param";
    case CVI_ERR_IO: return "io";
    case CVI_ERR_DECODE: return "decode";
    case CVI_ERR_CSV: return "csv";
    case CVI_ERR_CONFIG: return "config";
    case CVI_ERR_DEGENERATE: return "degenerate";
    case CVI_ERR_CONDITIONING: return "conditioning";
    case CVI_ERR_MISMATCH: return "mismatch";
    case CVI_ERR_INTERNAL: return "internal";
  }
  return "internal";
}

const char* cvi_last_error(void) { return g_last_error.c_str(); }

void cvi_string_free(char* s) { delete[] s; }

/* ---- images & masks ---------------------------------------------------- */

cvi_status cvi_image_decode_file(const char* path, int64_t epoch, cvi_image** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new cvi_image{decode_png_file(path, epoch)};
  });
}

cvi_status cvi_image_decode(const uint8_t* bytes, size_t size, int64_t epoch,
                            const char* origin, cvi_image** out) {
  return guarded([&] {
    require(bytes && out, "null argument");
    *out = new cvi_image{
        decode_png({bytes, size}, epoch, origin ? origin : "<memory>")};
  });
}

cvi_status cvi_image_from_rgb(const uint8_t* rgb, int32_t width, int32_t height,
                              int64_t epoch, cvi_image** out) {
  return guarded([&] {
    require(rgb && out, "null argument");
    RasterImage img;
    img.width = width;
    img.height = height;
    img.epoch = epoch;
    require(width >= 1 && height >= 1, "image dimensions must be at least 1x1");
    img.pixels.assign(rgb, rgb + static_cast<std::size_t>(width) * height * 3);
    validate(img);
    *out = new cvi_image{std::move(img)};
  });
}

void cvi_image_free(cvi_image* img) { delete img; }

int32_t cvi_image_width(const cvi_image* img) { return img ? img->img.width : 0; }
int32_t cvi_image_height(const cvi_image* img) { return img ? img->img.height : 0; }
int64_t cvi_image_epoch(const cvi_image* img) { return img ? img->img.epoch : 0; }
const uint8_t* cvi_image_pixels(const cvi_image* img) {
  return img ? img->img.pixels.data() : nullptr;
}

cvi_status cvi_image_write_png(const cvi_image* img, const char* path) {
  return guarded([&] {
    require(img && path, "null argument");
    write_png(img->img, path);
  });
}

cvi_status cvi_image_blur(const cvi_image* img, double sigma, cvi_image** out) {
  return guarded([&] {
    require(img && out, "null argument");
    *out = new cvi_image{gaussian_blur(img->img, sigma)};
  });
}

cvi_status cvi_image_hsv_mask(const cvi_image* img, const cvi_hsv_range* range,
                              cvi_mask** out) {
  return guarded([&] {
    require(img && range && out, "null argument");
    const HsvRange r = to_range(*range);
    validate(r);
    *out = new cvi_mask{apply_hsv_mask(rgb_to_hsv(img->img), r)};
  });
}

void cvi_mask_free(cvi_mask* mask) { delete mask; }
int32_t cvi_mask_width(const cvi_mask* mask) { return mask ? mask->mask.width : 0; }
int32_t cvi_mask_height(const cvi_mask* mask) { return mask ? mask->mask.height : 0; }
const uint8_t* cvi_mask_bits(const cvi_mask* mask) {
  return mask ? mask->mask.bits.data() : nullptr;
}

double cvi_mask_coverage(const cvi_mask* mask) {
  if (!mask) return 0.0;
  return coverage_fraction(mask->mask);
}

cvi_status cvi_mask_write_png(const cvi_mask* mask, const char* path) {
  return guarded([&] {
    require(mask && path, "null argument");
    write_png(mask->mask, path);
  });
}

cvi_status cvi_calibration_grid_run(const cvi_image* img, const cvi_hsv_range* ranges,
                                    size_t n_ranges, const char* out_dir,
                                    const char* stem, char** table_out) {
  return guarded([&] {
    require(img && ranges && out_dir && stem && table_out, "null argument");
    std::vector<HsvRange> candidates;
    candidates.reserve(n_ranges);
    for (size_t i = 0; i < n_ranges; ++i) candidates.push_back(to_range(ranges[i]));
    *table_out = copy_string(write_calibration_grid(img->img, candidates, out_dir, stem));
  });
}

/* ---- coverage series ---------------------------------------------------- */

cvi_status cvi_series_create(const int64_t* epochs, const double* values, size_t n,
                             cvi_series** out) {
  return guarded([&] {
    require(epochs && values && out, "null argument");
    std::vector<std::pair<std::int64_t, double>> points;
    points.reserve(n);
    for (size_t i = 0; i < n; ++i) points.emplace_back(epochs[i], values[i]);
    *out = new cvi_series{make_series(std::move(points))};
  });
}

void cvi_series_free(cvi_series* series) { delete series; }

size_t cvi_series_size(const cvi_series* series) {
  return series ? series->series.size() : 0;
}

int64_t cvi_series_epoch(const cvi_series* series, size_t i) {
  if (!series || i >= series->series.size()) return 0;
  return series->series.epochs[i];
}

double cvi_series_value(const cvi_series* series, size_t i) {
  if (!series || i >= series->series.size()) return 0.0;
  return series->series.values[i];
}

cvi_status cvi_series_read_csv(const char* path, cvi_series** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new cvi_series{read_series_csv(path)};
  });
}

cvi_status cvi_series_write_csv(const cvi_series* series, const char* path) {
  return guarded([&] {
    require(series && path, "null argument");
    write_series_csv(series->series, path);
  });
}

/* ---- changepoint detection ---------------------------------------------- */

void cvi_cpt_config_defaults(cvi_cpt_config* cfg) {
  if (!cfg) return;
  cfg->statistic = CVI_STAT_MEAN_AND_VARIANCE;
  cfg->use_sic = 1;
  cfg->threshold_c = 0.0;
  cfg->min_seg_len = 2;
}

cvi_status cvi_changepoint_detect(const cvi_series* series, const cvi_cpt_config* cfg,
                                  cvi_cpt_result** out) {
  return guarded([&] {
    require(series && cfg && out, "null argument");
    CptConfig config;
    switch (cfg->statistic) {
      case CVI_STAT_MEAN: config.statistic = CptStatistic::Mean; break;
      case CVI_STAT_VARIANCE: config.statistic = CptStatistic::Variance; break;
      case CVI_STAT_MEAN_AND_VARIANCE:
        config.statistic = CptStatistic::MeanAndVariance;
        break;
      default: fail(ErrorCode::Param, "unknown changepoint statistic code");
    }
    if (!cfg->use_sic) config.threshold_c = cfg->threshold_c;
    config.min_seg_len = cfg->min_seg_len;
    *out = new cvi_cpt_result{detect_single(series->series, config)};
  });
}

void cvi_cpt_result_free(cvi_cpt_result* result) { delete result; }

int cvi_cpt_result_rejected(const cvi_cpt_result* result) {
  return result && result->result.rejected ? 1 : 0;
}

int32_t cvi_cpt_result_tau(const cvi_cpt_result* result) {
  if (!result || !result->result.tau_hat) return 0;
  return *result->result.tau_hat;
}

double cvi_cpt_result_lambda(const cvi_cpt_result* result) {
  return result ? result->result.lambda : 0.0;
}

double cvi_cpt_result_threshold(const cvi_cpt_result* result) {
  return result ? result->result.threshold : 0.0;
}

cvi_status cvi_cpt_result_json(const cvi_cpt_result* result, char** out) {
  return guarded([&] {
    require(result && out, "null argument");
    *out = copy_string(changepoint_to_json(result->result));
  });
}

/* ---- counterfactual impact ---------------------------------------------- */

void cvi_impact_config_defaults(cvi_impact_config* cfg) {
  if (!cfg) return;
  cfg->intervention_index = 0;
  cfg->component = CVI_COMPONENT_LOCAL_LINEAR_TREND;
  cfg->prior_shape = 0.01;
  cfg->prior_scale_factor = 0.01;
  cfg->n_iter = 2000;
  cfg->burn_in = 500;
  cfg->seed = 0;
  cfg->credible_level = 0.95;
}

cvi_status cvi_impact_run(const cvi_series* series, const cvi_impact_config* cfg,
                          cvi_impact_result** out) {
  return guarded([&] {
    require(series && cfg && out, "null argument");
    ImpactConfig config;
    config.intervention_index = cfg->intervention_index;
    switch (cfg->component) {
      case CVI_COMPONENT_LOCAL_LEVEL: config.component = ComponentKind::LocalLevel; break;
      case CVI_COMPONENT_LOCAL_LINEAR_TREND:
        config.component = ComponentKind::LocalLinearTrend;
        break;
      default: fail(ErrorCode::Param, "unknown component code");
    }
    config.prior_shape = cfg->prior_shape;
    config.prior_scale_factor = cfg->prior_scale_factor;
    config.n_iter = cfg->n_iter;
    config.burn_in = cfg->burn_in;
    config.seed = cfg->seed;
    config.credible_level = cfg->credible_level;
    *out = new cvi_impact_result{run_impact(series->series, config)};
  });
}

void cvi_impact_result_free(cvi_impact_result* result) { delete result; }

double cvi_impact_average_effect(const cvi_impact_result* result) {
  return result ? result->report.summary.average_effect : 0.0;
}
double cvi_impact_cumulative_effect(const cvi_impact_result* result) {
  return result ? result->report.summary.cumulative_effect : 0.0;
}
double cvi_impact_relative_effect(const cvi_impact_result* result) {
  return result ? result->report.summary.relative_effect : 0.0;
}
double cvi_impact_tail_probability(const cvi_impact_result* result) {
  return result ? result->report.summary.tail_probability : 0.0;
}

cvi_status cvi_impact_result_json(const cvi_impact_result* result, char** out) {
  return guarded([&] {
    require(result && out, "null argument");
    *out = copy_string(impact_to_json(result->report));
  });
}

cvi_status cvi_impact_result_csv(const cvi_impact_result* result, char** out) {
  return guarded([&] {
    require(result && out, "null argument");
    *out = copy_string(impact_to_csv(result->report));
  });
}

cvi_status cvi_impact_result_from_json(const char* json, const char* origin,
                                       cvi_impact_result** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new cvi_impact_result{
        impact_from_json(json, origin ? origin : "<memory>")};
  });
}

cvi_status cvi_report_svg(const cvi_impact_result* result, const cvi_series* series,
                          char** svg_out) {
  return guarded([&] {
    require(result && series && svg_out, "null argument");
    *svg_out = copy_string(render_report_svg(result->report, series->series));
  });
}

/* ---- synthetic fixtures -------------------------------------------------- */

cvi_status cvi_synth_image(const cvi_synth_image_spec* spec, int64_t epoch,
                           cvi_image** out, double* true_fraction) {
  return guarded([&] {
    require(spec && out, "null argument");
    SynthImageSpec s;
    s.width = spec->width;
    s.height = spec->height;
    s.target_fraction = spec->target_fraction;
    s.forest_range = to_range(spec->forest_range);
    s.background_range = to_range(spec->background_range);
    s.seed = spec->seed;
    auto [img, realized] = gen_image(s, epoch);
    if (true_fraction) *true_fraction = realized;
    *out = new cvi_image{std::move(img)};
  });
}

cvi_status cvi_synth_series(const cvi_synth_series_spec* spec, cvi_series** out) {
  return guarded([&] {
    require(spec && out, "null argument");
    SynthSeriesSpec s;
    s.n = spec->n;
    s.level0 = spec->level0;
    s.pre_slope = spec->pre_slope;
    s.post_slope = spec->post_slope;
    if (spec->change_at != 0) s.change_at = spec->change_at;
    s.noise_sd = spec->noise_sd;
    s.seed = spec->seed;
    s.start_epoch = spec->start_epoch;
    *out = new cvi_series{gen_series(s)};
  });
}

} /* extern "C" */
