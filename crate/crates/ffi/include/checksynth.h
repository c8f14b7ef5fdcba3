#ifndef CHECKSYNTH_H
#define CHECKSYNTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsLayout {
  CS_LAYOUT_OVERALL = 0,
  CS_LAYOUT_CLASS_WISE = 1,
} CsLayout;

typedef enum CsMetric {
  CS_METRIC_MAP = 0,
  CS_METRIC_AP_SMALL = 1,
  CS_METRIC_AP_MEDIUM = 2,
  CS_METRIC_AP_LARGE = 3,
  CS_METRIC_AR_SMALL = 4,
  CS_METRIC_AR_MEDIUM = 5,
  CS_METRIC_AR_LARGE = 6,
} CsMetric;

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_IO = 3,
  CS_STATUS_PARSE = 4,
  CS_STATUS_INVALID_DATA = 5,
  // The metric has no ground truth to be computed from.
  CS_STATUS_UNDEFINED = 6,
  CS_STATUS_PANIC = 7,
} CsStatus;

// Ground-truth annotations.
typedef struct CsDataset CsDataset;

// Metrics computed by `cs_evaluate`.
typedef struct CsEvalResult CsEvalResult;

// A list of scored detections.
typedef struct CsPredictions CsPredictions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL. The
// pointer stays valid until the next failing call on the same thread.
const char *cs_last_error(void);

// Library version as a static NUL-terminated string.
const char *cs_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void cs_string_free(char *s);

// IoU of two `[x, y, w, h]` boxes.
//
// # Safety
// `a` and `b` must point to four doubles; `out` to one.
enum CsStatus cs_iou(const double *a, const double *b, double *out);

// Legal-line wording of an amount in cents. Free the result with
// `cs_string_free`.
//
// # Safety
// `out` must be a valid pointer.
enum CsStatus cs_amount_to_words(uint64_t cents, char **out);

// Dark-stroke dilation of an 8-bit grayscale raster, row-major without
// padding. `out` receives `width * height` bytes and may alias `pixels`.
//
// # Safety
// `pixels` and `out` must each hold `width * height` bytes.
enum CsStatus cs_dilate_gray(const uint8_t *pixels,
                             uint32_t width,
                             uint32_t height,
                             uint32_t radius,
                             uint32_t iterations,
                             uint8_t *out);

// Reads and validates a COCO annotation file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CsStatus cs_dataset_read(const char *path, struct CsDataset **out);

// # Safety
// `ds` must be NULL or a live handle from `cs_dataset_read`.
void cs_dataset_free(struct CsDataset *ds);

// # Safety
// `ds` must be NULL or a live handle.
size_t cs_dataset_num_images(const struct CsDataset *ds);

// # Safety
// `ds` must be NULL or a live handle.
size_t cs_dataset_num_annotations(const struct CsDataset *ds);

// An empty prediction list.
struct CsPredictions *cs_predictions_new(void);

// Reads a COCO results file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CsStatus cs_predictions_read(const char *path, struct CsPredictions **out);

// Appends one detection. `bbox` points to `[x, y, w, h]`.
//
// # Safety
// `preds` must be a live handle and `bbox` point to four doubles.
enum CsStatus cs_predictions_push(struct CsPredictions *preds,
                                  uint64_t image_id,
                                  uint64_t category_id,
                                  const double *bbox,
                                  double score);

// # Safety
// `preds` must be NULL or a live handle.
size_t cs_predictions_len(const struct CsPredictions *preds);

// # Safety
// `preds` must be NULL or a live handle.
void cs_predictions_free(struct CsPredictions *preds);

// Scores `preds` against `gt` with the default configuration: AP over
// IoU 0.50:0.05:0.95, size metrics at IoU 0.5, 100 detections per image.
//
// # Safety
// Handles must be live; `out` must be a valid pointer.
enum CsStatus cs_evaluate(const struct CsDataset *gt,
                          const struct CsPredictions *preds,
                          struct CsEvalResult **out);

// One scalar metric in `[0, 1]`. Returns `CS_STATUS_UNDEFINED` and leaves
// `out` untouched when the metric has no ground truth.
//
// # Safety
// `result` must be a live handle and `out` a valid pointer.
enum CsStatus cs_eval_metric(const struct CsEvalResult *result, enum CsMetric metric, double *out);

// Per-class AP for `category_id`.
//
// # Safety
// `result` must be a live handle and `out` a valid pointer.
enum CsStatus cs_eval_class_ap(const struct CsEvalResult *result,
                               uint64_t category_id,
                               double *out);

// Plain-text table of the result. Free with `cs_string_free`.
//
// # Safety
// `result` must be a live handle; `label` NULL or a NUL-terminated
// string; `out` a valid pointer.
enum CsStatus cs_eval_report(const struct CsEvalResult *result,
                             enum CsLayout layout,
                             const char *label,
                             char **out);

// # Safety
// `result` must be NULL or a live handle.
void cs_eval_result_free(struct CsEvalResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHECKSYNTH_H */
