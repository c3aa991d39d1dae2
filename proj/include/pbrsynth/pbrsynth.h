// Copyright 2026 The pbrsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface of the pbrsynth synthetic data pipeline.
 *
 * Every function that can fail returns a pbrs_status. On failure a
 * description is available from pbrs_last_error() on the calling thread
 * until the next failing call on that thread. Objects are opaque handles
 * released with their matching _free function; passing NULL to a _free
 * function is allowed. Strings returned by accessors are owned by the
 * handle and stay valid until it is freed.
 *
 * Stage functions return PBRS_OK when the stage ran, even if individual
 * units of work failed; the summary reports per-unit failures.
 */
#ifndef PBRSYNTH_PBRSYNTH_H_
#define PBRSYNTH_PBRSYNTH_H_

#include <stdint.h>

#if defined(_WIN32)
#define PBRS_API __declspec(dllexport)
#else
#define PBRS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pbrs_status {
  PBRS_OK = 0,
  PBRS_ERR_INVALID_ARGUMENT = 1,
  PBRS_ERR_FILE_UNREADABLE = 2,
  PBRS_ERR_PARSE = 3,
  PBRS_ERR_NON_TRIANGLE_FACE = 4,
  PBRS_ERR_EMPTY_GEOMETRY = 5,
  PBRS_ERR_DEGENERATE = 6,
  PBRS_ERR_RESOLUTION_MISMATCH = 7,
  PBRS_ERR_IO = 8,
  PBRS_ERR_CONFIG = 9,
  PBRS_ERR_UNKNOWN_ID = 10,
  PBRS_ERR_INTERNAL = 99
} pbrs_status;

typedef struct pbrs_config pbrs_config;
typedef struct pbrs_summary pbrs_summary;
typedef struct pbrs_eval_report pbrs_eval_report;

/* Receives one progress or warning line; may be called from worker threads,
 * but never concurrently. */
typedef void (*pbrs_log_fn)(const char* line, void* user_data);

PBRS_API const char* pbrs_version(void);
PBRS_API const char* pbrs_status_name(pbrs_status status);
PBRS_API const char* pbrs_last_error(void);

/* Configuration. Overrides apply to every later stage call. */
PBRS_API pbrs_status pbrs_config_load(const char* path, pbrs_config** out);
PBRS_API pbrs_status pbrs_config_set_seed(pbrs_config* config, uint64_t seed);
PBRS_API pbrs_status pbrs_config_set_jobs(pbrs_config* config, int jobs);
/* "low", "medium", "high" or "all". */
PBRS_API pbrs_status pbrs_config_set_tier(pbrs_config* config, const char* tier);
PBRS_API pbrs_status pbrs_config_set_output(pbrs_config* config, const char* directory);
PBRS_API pbrs_status pbrs_config_set_hdr(pbrs_config* config, int enabled);
PBRS_API pbrs_status pbrs_config_set_log(pbrs_config* config, pbrs_log_fn fn, void* user_data);
PBRS_API pbrs_status pbrs_config_get_output(const pbrs_config* config, const char** directory);
PBRS_API pbrs_status pbrs_config_get_seed(const pbrs_config* config, uint64_t* seed);
PBRS_API void pbrs_config_free(pbrs_config* config);

/* Full pipeline into the configured output directory: compose, camera
 * sampling, rendering and annotation, plus arrangements.json and
 * cameras.json. */
PBRS_API pbrs_status pbrs_run_pipeline(const pbrs_config* config, pbrs_summary** out);

/* Individual stages reading and writing the intermediate JSON files. */
PBRS_API pbrs_status pbrs_compose(const pbrs_config* config, const char* arrangements_out, pbrs_summary** out);
PBRS_API pbrs_status pbrs_sample_cameras(const pbrs_config* config, const char* arrangements_in,
                                         const char* cameras_out, pbrs_summary** out);
PBRS_API pbrs_status pbrs_render(const pbrs_config* config, const char* arrangements_in, const char* cameras_in,
                                 const char* dataset_dir, pbrs_summary** out);
PBRS_API pbrs_status pbrs_annotate(const pbrs_config* config, const char* arrangements_in, const char* cameras_in,
                                   const char* dataset_dir, pbrs_summary** out);
/* background_dir may be NULL to use the configured directory. */
PBRS_API pbrs_status pbrs_baseline(const pbrs_config* config, const char* arrangements_in, const char* cameras_in,
                                   const char* background_dir, const char* dataset_dir, pbrs_summary** out);

/* Unit counts summed over the stages of a summary. Any pointer may be NULL. */
PBRS_API pbrs_status pbrs_summary_counts(const pbrs_summary* summary, int64_t* total, int64_t* succeeded,
                                         int64_t* failed, int64_t* skipped);
PBRS_API const char* pbrs_summary_json(const pbrs_summary* summary);
PBRS_API void pbrs_summary_free(pbrs_summary* summary);

/* mAP of JSON-lines detections against annotations.json or JSON-lines
 * ground truth. max_dets <= 0 disables the per-image, per-class cap. */
PBRS_API pbrs_status pbrs_evaluate(const char* detections_path, const char* ground_truth_path, double iou_threshold,
                                   int max_dets, pbrs_eval_report** out);
PBRS_API double pbrs_eval_report_map(const pbrs_eval_report* report);
/* Number of distinct unknown image ids plus unknown class ids. */
PBRS_API int64_t pbrs_eval_report_unknown_ids(const pbrs_eval_report* report);
PBRS_API const char* pbrs_eval_report_json(const pbrs_eval_report* report);
PBRS_API const char* pbrs_eval_report_table(const pbrs_eval_report* report);
PBRS_API void pbrs_eval_report_free(pbrs_eval_report* report);

#ifdef __cplusplus
}
#endif

#endif /* PBRSYNTH_PBRSYNTH_H_ */
