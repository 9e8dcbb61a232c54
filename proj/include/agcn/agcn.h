/*
   Copyright 2026 The AGCN Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef AGCN_AGCN_H
#define AGCN_AGCN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define AGCN_API __declspec(dllexport)
#else
#  define AGCN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The nonzero values double as the CLI exit codes. */
typedef enum agcn_status {
    AGCN_OK = 0,
    AGCN_E_USAGE = 1,     /* bad argument or option */
    AGCN_E_DATA = 2,      /* unreadable, malformed or inconsistent input */
    AGCN_E_NUMERICAL = 3, /* divergence, non-convergence, undefined statistic */
    AGCN_E_INTERNAL = 4
} agcn_status;

typedef struct agcn_dataset agcn_dataset;
typedef struct agcn_report agcn_report;

typedef enum agcn_command {
    AGCN_CMD_TRAIN = 0,
    AGCN_CMD_GRID_SEARCH = 1,
    AGCN_CMD_DEPTH_STUDY = 2,
    AGCN_CMD_AUGMENT_EVAL = 3
} agcn_command;

typedef enum agcn_model_kind { AGCN_MODEL_GCN = 0, AGCN_MODEL_AGCN = 1 } agcn_model_kind;

typedef enum agcn_diffusion {
    AGCN_DIFFUSION_DEFAULT = 0, /* per-layer for GCN, input-once for AGCN */
    AGCN_DIFFUSION_INPUT_ONCE = 1,
    AGCN_DIFFUSION_PER_LAYER = 2
} agcn_diffusion;

/* Bit flags for agcn_options.augment. */
enum {
    AGCN_AUGMENT_CO = 1u,
    AGCN_AUGMENT_SELF = 2u,
    AGCN_AUGMENT_UNION = 4u,
    AGCN_AUGMENT_INTERSECTION = 8u
};

typedef struct agcn_options {
    agcn_command command;
    agcn_model_kind model;
    agcn_diffusion diffusion;
    double beta;
    size_t hidden;
    size_t layers;
    double dropout;
    double weight_decay;
    int trace_normalize;
    int mean_loss; /* average the loss over labeled nodes instead of summing */
    double learning_rate;
    size_t epochs;
    size_t patience;
    size_t runs;
    uint64_t seed;
    const double* beta_grid; /* NULL selects 0, 0.1, ..., 5 */
    size_t beta_grid_len;
    double train_fraction; /* > 0 resamples splits every run */
    size_t val_size;
    size_t test_size;
    size_t threads;
    const size_t* depths; /* NULL selects 2..6 */
    size_t depths_len;
    unsigned augment;
    size_t additions_per_class; /* 0 picks a default per run */
    double walk_lambda;
} agcn_options;

typedef struct agcn_dataset_info {
    size_t num_nodes;
    size_t num_edges;
    size_t num_features;
    size_t num_classes;
    size_t train_size;
    size_t val_size;
    size_t test_size;
    double label_rate;
} agcn_dataset_info;

/* Message of the last failed call on this thread. Never NULL. */
AGCN_API const char* agcn_last_error(void);
AGCN_API const char* agcn_version(void);

AGCN_API void agcn_options_init(agcn_options* opts);

AGCN_API agcn_status agcn_dataset_load(const char* dir, agcn_dataset** out);
AGCN_API agcn_status agcn_dataset_save(const agcn_dataset* ds, const char* dir);
AGCN_API void agcn_dataset_free(agcn_dataset* ds);
AGCN_API agcn_status agcn_dataset_info_get(const agcn_dataset* ds, agcn_dataset_info* info);
AGCN_API agcn_status agcn_dataset_row_normalize(agcn_dataset* ds);

/* Builds a dataset from row-major features (n x f) and a k-NN graph.
   labels may be NULL (all unknown); otherwise values in [-1, num_classes). */
AGCN_API agcn_status agcn_dataset_from_features(const float* features, size_t n, size_t f, size_t k,
                                                const int32_t* labels, size_t num_classes, const char* name,
                                                agcn_dataset** out);

/* Replaces the splits with a stratified sample of round(fraction * n) training nodes. */
AGCN_API agcn_status agcn_dataset_resample(agcn_dataset* ds, double train_fraction, size_t val_size,
                                           size_t test_size, uint64_t seed);

AGCN_API agcn_status agcn_run(const agcn_dataset* ds, const agcn_options* opts, agcn_report** out);

/* Reruns the experiment embedded in a report's JSON (or its "config" object). */
AGCN_API agcn_status agcn_replay(const char* report_json, agcn_report** out);

/* One-way ANOVA over `count` groups; values[i] holds sizes[i] accuracies. */
AGCN_API agcn_status agcn_anova(const double* const* values, const size_t* sizes, const char* const* names,
                                size_t count, agcn_report** out);

/* Trains one model with opts->seed and writes first-layer activations as CSV. */
AGCN_API agcn_status agcn_export_embeddings(const agcn_dataset* ds, const agcn_options* opts, const char* path);

/* Strings stay valid until the next call on the same report or its release. */
AGCN_API agcn_status agcn_report_json(agcn_report* report, const char** json);
AGCN_API agcn_status agcn_report_csv(agcn_report* report, const char** csv);
/* Writes <prefix>.json, <prefix>.csv, histories and tables. */
AGCN_API agcn_status agcn_report_write(agcn_report* report, const char* prefix);
AGCN_API void agcn_report_free(agcn_report* report);

#ifdef __cplusplus
}
#endif

#endif /* AGCN_AGCN_H */
