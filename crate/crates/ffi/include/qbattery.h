#ifndef QBATTERY_H
#define QBATTERY_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_NULL_POINTER = 1,
  QB_STATUS_INVALID_ARGUMENT = 2,
  QB_STATUS_DIMENSION_MISMATCH = 3,
  QB_STATUS_NOT_UNITARY = 4,
  QB_STATUS_INCOMPLETE_CHANNEL = 5,
  QB_STATUS_BAND_TOO_WIDE = 6,
  QB_STATUS_BUFFER_TOO_SMALL = 7,
  QB_STATUS_PANIC = 8,
  QB_STATUS_INTERNAL = 9,
} QbStatus;

typedef enum QbVerdict {
  QB_VERDICT_UNIVERSALLY_CHARGING = 0,
  QB_VERDICT_UNIVERSALLY_DISCHARGING = 1,
  QB_VERDICT_NEITHER = 2,
  QB_VERDICT_TRIVIAL = 3,
} QbVerdict;

// CPTP channel in Kraus form (opaque).
typedef struct QbChannel QbChannel;

// Energy ladder (opaque).
typedef struct QbLadder QbLadder;

// Unitary operator (opaque).
typedef struct QbUnitary QbUnitary;

typedef struct QbClassification {
  enum QbVerdict verdict;
  double min_eig;
  double max_eig;
} QbClassification;

typedef struct QbHaarEstimate {
  double mean;
  double std_error;
  size_t samples;
} QbHaarEstimate;

typedef struct QbFlowIndex {
  double raw_value;
  int64_t rounded;
  double residual;
  size_t band;
  bool unitarity_warning;
} QbFlowIndex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qb_version(void);

// Message of the last failed call on this thread (empty after a success). The pointer stays
// valid until the next call into the library on the same thread.
const char *qb_last_error(void);

// Ladder with explicit strictly increasing energies.
//
// # Safety
// `energies` must point to `n` readable doubles; `out` must be writable.
enum QbStatus qb_ladder_finite(const double *energies, size_t n, struct QbLadder **out);

// Ladder `0, d, 2d, ...` with `n` levels.
//
// # Safety
// `out` must be writable.
enum QbStatus qb_ladder_uniform(size_t n, double spacing, struct QbLadder **out);

// Double-sided window with labels `-half_width..=half_width` and energies `label * spacing`.
//
// # Safety
// `out` must be writable.
enum QbStatus qb_ladder_double_sided(size_t half_width, double spacing, struct QbLadder **out);

// # Safety
// `ladder` must be a live handle; `out` must be writable.
enum QbStatus qb_ladder_dim(const struct QbLadder *ladder, size_t *out);

// # Safety
// `ladder` must be null or a handle not yet freed.
void qb_ladder_free(struct QbLadder *ladder);

// Battery-qubit unitary obtained by time-evolving the two-segment drive.
//
// # Safety
// `ladder` must be a live handle; `out` must be writable.
enum QbStatus qb_protocol_unitary(const struct QbLadder *ladder, struct QbUnitary **out);

// Permutation-with-phases form of the drive unitary.
//
// # Safety
// `ladder` must be a live handle; `out` must be writable.
enum QbStatus qb_closed_form_unitary(const struct QbLadder *ladder, struct QbUnitary **out);

// Haar-random `d x d` unitary drawn from `seed`.
//
// # Safety
// `out` must be writable.
enum QbStatus qb_haar_unitary(size_t d, uint64_t seed, struct QbUnitary **out);

// # Safety
// `u` must be a live handle; `out` must be writable.
enum QbStatus qb_unitary_dim(const struct QbUnitary *u, size_t *out);

// Copies the entries in row-major order into `re` and `im`, each of length `len >= dim^2`.
//
// # Safety
// `u` must be a live handle; `re` and `im` must point to `len` writable doubles.
enum QbStatus qb_unitary_entries(const struct QbUnitary *u, double *re, double *im, size_t len);

// # Safety
// `u` must be null or a handle not yet freed.
void qb_unitary_free(struct QbUnitary *u);

// Battery channel induced by a battery-qubit unitary with the qubit prepared in
// `cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>`.
//
// # Safety
// `u` must be a live handle; `out` must be writable.
enum QbStatus qb_induced_channel(const struct QbUnitary *u,
                                 double theta,
                                 double phi,
                                 struct QbChannel **out);

// # Safety
// `u` must be a live handle; `out` must be writable.
enum QbStatus qb_channel_from_unitary(const struct QbUnitary *u, struct QbChannel **out);

// # Safety
// `ch` must be a live handle; `out` must be writable.
enum QbStatus qb_channel_kraus_count(const struct QbChannel *ch, size_t *out);

// # Safety
// `ch` must be null or a handle not yet freed.
void qb_channel_free(struct QbChannel *ch);

// Spectral classification of the channel's charging observable on `ladder`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum QbStatus qb_classify(const struct QbChannel *ch,
                          const struct QbLadder *ladder,
                          struct QbClassification *out);

// Exact Haar average of the energy change.
//
// # Safety
// Handles must be live; `out` must be writable.
enum QbStatus qb_haar_exact(const struct QbChannel *ch, const struct QbLadder *ladder, double *out);

// Monte Carlo Haar average starting from the energy eigenstate `initial_level`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum QbStatus qb_haar_mc(const struct QbChannel *ch,
                         const struct QbLadder *ladder,
                         size_t initial_level,
                         size_t samples,
                         uint64_t seed,
                         struct QbHaarEstimate *out);

// Flow index of `T^power (x) I_internal_dim` on a window of half width `half_width`.
//
// # Safety
// `out` must be writable.
enum QbStatus qb_flow_index_shift(size_t half_width,
                                  size_t internal_dim,
                                  int64_t power,
                                  int64_t cut,
                                  struct QbFlowIndex *out);

// Flow index of the battery-qubit drive on a double-sided window.
//
// # Safety
// `out` must be writable.
enum QbStatus qb_flow_index_composite(size_t half_width,
                                      double spacing,
                                      int64_t cut,
                                      struct QbFlowIndex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBATTERY_H */
