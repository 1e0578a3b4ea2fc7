#ifndef DYGCN_H
#define DYGCN_H

#include <stddef.h>

/**
 * Result of every fallible call.
 */
typedef enum DygcnStatus {
  DYGCN_STATUS_OK = 0,
  DYGCN_STATUS_NULL_POINTER = 1,
  DYGCN_STATUS_INVALID_ARGUMENT = 2,
  DYGCN_STATUS_IO = 3,
  DYGCN_STATUS_PARSE = 4,
  DYGCN_STATUS_SHAPE = 5,
  DYGCN_STATUS_GRAPH = 6,
  DYGCN_STATUS_NUMERIC = 7,
  DYGCN_STATUS_PANIC = 8,
} DygcnStatus;

/**
 * Row-major `N × d` embedding matrix.
 */
typedef struct DygcnEmbeddings DygcnEmbeddings;

/**
 * Trained base GCN plus update parameters.
 */
typedef struct DygcnModel DygcnModel;

/**
 * Ordered snapshots over one node universe.
 */
typedef struct DygcnSequence DygcnSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dygcn_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dygcn_version(void);

/**
 * Empty sequence over `n_slots` node slots.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum DygcnStatus dygcn_sequence_new(size_t n_slots, struct DygcnSequence **out);

/**
 * Loads a temporal event file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum DygcnStatus dygcn_sequence_load_events(const char *path, struct DygcnSequence **out);

/**
 * Appends a snapshot given as `n_edges` node pairs stored flat in
 * `pairs` (`2 * n_edges` entries). Its time index is the current length.
 *
 * # Safety
 * `seq` must come from this library; `pairs` must hold `2 * n_edges`
 * readable entries (it may be null when `n_edges` is 0).
 */
enum DygcnStatus dygcn_sequence_push_snapshot(struct DygcnSequence *seq,
                                              const size_t *pairs,
                                              size_t n_edges);

/**
 * Number of snapshots, 0 for a null handle.
 *
 * # Safety
 * `seq` must be null or come from this library.
 */
size_t dygcn_sequence_len(const struct DygcnSequence *seq);

/**
 * Number of node slots, 0 for a null handle.
 *
 * # Safety
 * `seq` must be null or come from this library.
 */
size_t dygcn_sequence_n_slots(const struct DygcnSequence *seq);

/**
 * # Safety
 * `seq` must be null or come from this library and not be used afterwards.
 */
void dygcn_sequence_free(struct DygcnSequence *seq);

/**
 * Copies `rows * cols` row-major values into a new matrix.
 *
 * # Safety
 * `data` must hold `rows * cols` readable doubles; `out` must be writable.
 */
enum DygcnStatus dygcn_embeddings_new(size_t rows,
                                      size_t cols,
                                      const double *data,
                                      struct DygcnEmbeddings **out);

/**
 * # Safety
 * `emb` must be null or come from this library.
 */
size_t dygcn_embeddings_rows(const struct DygcnEmbeddings *emb);

/**
 * # Safety
 * `emb` must be null or come from this library.
 */
size_t dygcn_embeddings_cols(const struct DygcnEmbeddings *emb);

/**
 * Row-major values, valid until the handle is modified or freed.
 *
 * # Safety
 * `emb` must be null or come from this library.
 */
const double *dygcn_embeddings_data(const struct DygcnEmbeddings *emb);

/**
 * # Safety
 * `emb` must be null or come from this library and not be used afterwards.
 */
void dygcn_embeddings_free(struct DygcnEmbeddings *emb);

/**
 * Loads the output directory of `dygcn train`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum DygcnStatus dygcn_model_load(const char *dir, struct DygcnModel **out);

/**
 * Embedding width, 0 for a null handle.
 *
 * # Safety
 * `model` must be null or come from this library.
 */
size_t dygcn_model_dim(const struct DygcnModel *model);

/**
 * # Safety
 * `model` must be null or come from this library and not be used afterwards.
 */
void dygcn_model_free(struct DygcnModel *model);

/**
 * Full base-GCN embedding of snapshot `t`.
 *
 * # Safety
 * Handles must come from this library; `out` must be writable.
 */
enum DygcnStatus dygcn_model_embed(const struct DygcnModel *model,
                                   const struct DygcnSequence *seq,
                                   size_t t,
                                   struct DygcnEmbeddings **out);

/**
 * Advances `emb` in place from snapshot `t` to `t + 1`. When
 * `updated_rows` is non-null it receives the number of rewritten rows
 * (every row for the spectral variant).
 *
 * # Safety
 * Handles must come from this library; `updated_rows` must be null or
 * writable.
 */
enum DygcnStatus dygcn_model_step(const struct DygcnModel *model,
                                  const struct DygcnSequence *seq,
                                  size_t t,
                                  struct DygcnEmbeddings *emb,
                                  size_t *updated_rows);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYGCN_H */
