/*
 * coverimpact - intervention-effect estimation for image-derived coverage
 * time series.
 *
 * C interface to the shared library. All functions return cvi_status;
 * outputs are passed back through pointers and objects are opaque handles
 * released with the matching *_free call. On failure cvi_last_error()
 * returns a thread-local detail message for the most recent call.
 */
#ifndef COVERIMPACT_H
#define COVERIMPACT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cvi_status {
  CVI_OK = 0,
  CVI_ERR_PARAM = 1,
  CVI_ERR_IO = 2,
  CVI_ERR_DECODE = 3,
  CVI_ERR_CSV = 4,
  CVI_ERR_CONFIG = 5,
  CVI_ERR_DEGENERATE = 6,
  CVI_ERR_CONDITIONING = 7,
  CVI_ERR_MISMATCH = 8,
  CVI_ERR_INTERNAL = 9
} cvi_status;

/* Short lower-case name for a status ("param", "io", ...). */
const char* cvi_status_name(cvi_status status);

/* Detail message of the last failing call on this thread; empty if none. */
const char* cvi_last_error(void);

/* Frees strings returned through char** outputs. */
void cvi_string_free(char* s);

typedef struct cvi_image cvi_image;
typedef struct cvi_mask cvi_mask;
typedef struct cvi_series cvi_series;
typedef struct cvi_cpt_result cvi_cpt_result;
typedef struct cvi_impact_result cvi_impact_result;

/* Inclusive HSV box; H on the full 0-255 byte scale. */
typedef struct cvi_hsv_range {
  uint8_t lower[3];
  uint8_t upper[3];
} cvi_hsv_range;

/* ---- images & masks ---------------------------------------------------- */

cvi_status cvi_image_decode_file(const char* path, int64_t epoch, cvi_image** out);
cvi_status cvi_image_decode(const uint8_t* bytes, size_t size, int64_t epoch,
                            const char* origin, cvi_image** out);
cvi_status cvi_image_from_rgb(const uint8_t* rgb, int32_t width, int32_t height,
                              int64_t epoch, cvi_image** out);
void cvi_image_free(cvi_image* img);

int32_t cvi_image_width(const cvi_image* img);
int32_t cvi_image_height(const cvi_image* img);
int64_t cvi_image_epoch(const cvi_image* img);
/* Row-major interleaved RGB, 3 bytes per pixel; owned by the image. */
const uint8_t* cvi_image_pixels(const cvi_image* img);

cvi_status cvi_image_write_png(const cvi_image* img, const char* path);
cvi_status cvi_image_blur(const cvi_image* img, double sigma, cvi_image** out);

/* HSV-box classification of every pixel. */
cvi_status cvi_image_hsv_mask(const cvi_image* img, const cvi_hsv_range* range,
                              cvi_mask** out);
void cvi_mask_free(cvi_mask* mask);
int32_t cvi_mask_width(const cvi_mask* mask);
int32_t cvi_mask_height(const cvi_mask* mask);
/* Row-major bytes, 255 = covered, 0 = background. */
const uint8_t* cvi_mask_bits(const cvi_mask* mask);
/* Covered pixels / total pixels. */
double cvi_mask_coverage(const cvi_mask* mask);
cvi_status cvi_mask_write_png(const cvi_mask* mask, const char* path);

/* Writes <stem>.mask.<index>.png per candidate range into out_dir and
 * returns the summary table (index, range, fraction per row). */
cvi_status cvi_calibration_grid_run(const cvi_image* img, const cvi_hsv_range* ranges,
                                    size_t n_ranges, const char* out_dir,
                                    const char* stem, char** table_out);

/* ---- coverage series ---------------------------------------------------- */

cvi_status cvi_series_create(const int64_t* epochs, const double* values, size_t n,
                             cvi_series** out);
void cvi_series_free(cvi_series* series);
size_t cvi_series_size(const cvi_series* series);
int64_t cvi_series_epoch(const cvi_series* series, size_t i);
double cvi_series_value(const cvi_series* series, size_t i);

/* CSV format: header "epoch,coverage", 6-decimal values, sorted by epoch. */
cvi_status cvi_series_read_csv(const char* path, cvi_series** out);
cvi_status cvi_series_write_csv(const cvi_series* series, const char* path);

/* ---- changepoint detection ---------------------------------------------- */

typedef enum cvi_cpt_statistic {
  CVI_STAT_MEAN = 0,
  CVI_STAT_VARIANCE = 1,
  CVI_STAT_MEAN_AND_VARIANCE = 2
} cvi_cpt_statistic;

typedef struct cvi_cpt_config {
  int statistic;      /* cvi_cpt_statistic */
  int use_sic;        /* nonzero: threshold_c ignored, SIC default p*ln(n) */
  double threshold_c; /* used when use_sic is zero; must be > 0 */
  int32_t min_seg_len;
} cvi_cpt_config;

void cvi_cpt_config_defaults(cvi_cpt_config* cfg);

cvi_status cvi_changepoint_detect(const cvi_series* series, const cvi_cpt_config* cfg,
                                  cvi_cpt_result** out);
void cvi_cpt_result_free(cvi_cpt_result* result);
int cvi_cpt_result_rejected(const cvi_cpt_result* result);
/* 1-based estimated index; 0 when the null is not rejected. */
int32_t cvi_cpt_result_tau(const cvi_cpt_result* result);
double cvi_cpt_result_lambda(const cvi_cpt_result* result);
double cvi_cpt_result_threshold(const cvi_cpt_result* result);
/* JSON document with tau_hat, lambda, threshold, rejected, per_tau_ml. */
cvi_status cvi_cpt_result_json(const cvi_cpt_result* result, char** out);

/* ---- counterfactual impact ---------------------------------------------- */

typedef enum cvi_component {
  CVI_COMPONENT_LOCAL_LEVEL = 0,
  CVI_COMPONENT_LOCAL_LINEAR_TREND = 1
} cvi_component;

typedef struct cvi_impact_config {
  int32_t intervention_index; /* 1-based; pre-period is 1..index */
  int component;              /* cvi_component */
  double prior_shape;
  double prior_scale_factor; /* inverse-gamma scale = factor * var(pre) */
  int32_t n_iter;
  int32_t burn_in;
  uint64_t seed;
  double credible_level;
} cvi_impact_config;

void cvi_impact_config_defaults(cvi_impact_config* cfg);

cvi_status cvi_impact_run(const cvi_series* series, const cvi_impact_config* cfg,
                          cvi_impact_result** out);
void cvi_impact_result_free(cvi_impact_result* result);

double cvi_impact_average_effect(const cvi_impact_result* result);
double cvi_impact_cumulative_effect(const cvi_impact_result* result);
double cvi_impact_relative_effect(const cvi_impact_result* result);
double cvi_impact_tail_probability(const cvi_impact_result* result);

cvi_status cvi_impact_result_json(const cvi_impact_result* result, char** out);
cvi_status cvi_impact_result_csv(const cvi_impact_result* result, char** out);
cvi_status cvi_impact_result_from_json(const char* json, const char* origin,
                                       cvi_impact_result** out);

/* Three-panel SVG report; the series must cover pre and post periods. */
cvi_status cvi_report_svg(const cvi_impact_result* result, const cvi_series* series,
                          char** svg_out);

/* ---- synthetic fixtures -------------------------------------------------- */

typedef struct cvi_synth_image_spec {
  int32_t width;
  int32_t height;
  double target_fraction;
  cvi_hsv_range forest_range;
  cvi_hsv_range background_range;
  uint64_t seed;
} cvi_synth_image_spec;

/* Exactly round(target*w*h) pixels carry forest-range colors; true_fraction
 * (optional out) receives the realized fraction. */
cvi_status cvi_synth_image(const cvi_synth_image_spec* spec, int64_t epoch,
                           cvi_image** out, double* true_fraction);

typedef struct cvi_synth_series_spec {
  int32_t n;
  double level0;
  double pre_slope;
  double post_slope;
  int32_t change_at; /* 1-based last pre index; 0 = no change */
  double noise_sd;
  uint64_t seed;
  int64_t start_epoch;
} cvi_synth_series_spec;

cvi_status cvi_synth_series(const cvi_synth_series_spec* spec, cvi_series** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COVERIMPACT_H */
