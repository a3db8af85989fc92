#ifndef SEQSHARE_H
#define SEQSHARE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SEQSHARE_SCENARIO_OS1 0

#define SEQSHARE_SCENARIO_OS2 1

#define SEQSHARE_SCENARIO_TS1 2

#define SEQSHARE_SCENARIO_TS2 3

#define SEQSHARE_POINTER_UNSHARP 0

#define SEQSHARE_POINTER_OPTIMAL 1

#define SEQSHARE_POINTER_SQUARE 2

// Scenario, dimension, pointer and isotropic weight.
typedef struct SeqshareConfig SeqshareConfig;

// Pointer model (F as a function of G).
typedef struct SeqsharePointer SeqsharePointer;

typedef int32_t SeqshareStatus;

#define SEQSHARE_OK 0

#define SEQSHARE_INVALID_ARGUMENT 1

// Valid query whose answer is "no solution" (e.g. observer cannot witness).
#define SEQSHARE_INFEASIBLE 2

#define SEQSHARE_NOT_FOUND 3

#define SEQSHARE_NUMERIC_FAILURE 4

#define SEQSHARE_NULL_POINTER 5

#define SEQSHARE_IO 6

#define SEQSHARE_PANIC 7

#define SEQSHARE_UNSUPPORTED 8

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call into this library on the same thread.
const char *seqshare_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *seqshare_version(void);

// # Safety
// `out_pointer` must be valid for writes.
SeqshareStatus seqshare_pointer_new(uint32_t kind, struct SeqsharePointer **out_pointer);

// Custom pointer from tabulated `(g[i], f[i])` points.
//
// # Safety
// `g` and `f` must point to `len` readable doubles; `out_pointer` must be
// valid for writes.
SeqshareStatus seqshare_pointer_from_points(const double *g,
                                            const double *f,
                                            size_t len,
                                            struct SeqsharePointer **out_pointer);

// Custom pointer from a CSV file with header `G,F`.
//
// # Safety
// `path` must be a NUL-terminated string; `out_pointer` valid for writes.
SeqshareStatus seqshare_pointer_from_csv(const char *path, struct SeqsharePointer **out_pointer);

// # Safety
// `pointer` must come from a `seqshare_pointer_*` constructor or be null.
void seqshare_pointer_free(struct SeqsharePointer *pointer);

// Quality factor `F(G)` in dimension `d`.
//
// # Safety
// `pointer` must be a live handle; `out_f` valid for writes.
SeqshareStatus seqshare_pointer_quality(const struct SeqsharePointer *pointer,
                                        uint64_t d,
                                        double g,
                                        double *out_f);

// The configuration keeps its own copy of the pointer model.
//
// # Safety
// `pointer` must be a live handle; `out_config` valid for writes.
SeqshareStatus seqshare_config_new(uint32_t scenario,
                                   uint64_t d,
                                   const struct SeqsharePointer *pointer,
                                   double p,
                                   struct SeqshareConfig **out_config);

// # Safety
// `config` must come from [`seqshare_config_new`] or be null.
void seqshare_config_free(struct SeqshareConfig *config);

// Critical precision of the first observer. `SEQSHARE_INFEASIBLE` when
// no precision lets it witness entanglement.
//
// # Safety
// `config` must be a live handle; `out_g` valid for writes.
SeqshareStatus seqshare_critical_g1(const struct SeqshareConfig *config, double tol, double *out_g);

// Critical precision of observer `n` when every predecessor measures at
// its own critical precision.
//
// # Safety
// `config` must be a live handle; `out_g` valid for writes.
SeqshareStatus seqshare_critical_gn(const struct SeqshareConfig *config,
                                    size_t n,
                                    double tol,
                                    double *out_g);

// # Safety
// `config` must be a live handle; `out_n` valid for writes.
SeqshareStatus seqshare_max_observers(const struct SeqshareConfig *config,
                                      double tol,
                                      size_t *out_n);

// Smallest `d <= d_hi` with at least `target_n` observers;
// `SEQSHARE_NOT_FOUND` past the cap.
//
// # Safety
// `pointer` must be a live handle; `out_d` valid for writes.
SeqshareStatus seqshare_min_dimension(uint32_t scenario,
                                      const struct SeqsharePointer *pointer,
                                      size_t target_n,
                                      uint64_t d_hi,
                                      double tol,
                                      uint64_t *out_d);

// Writes `p1` always and `p2` when it exists; `SEQSHARE_INFEASIBLE` when
// a second observer cannot witness for any weight.
//
// # Safety
// `config` must be a live handle; out pointers valid for writes.
SeqshareStatus seqshare_isotropic_thresholds(const struct SeqshareConfig *config,
                                             double tol,
                                             double *out_p1,
                                             double *out_p2);

// # Safety
// `config` must be a live handle; out pointers valid for writes.
SeqshareStatus seqshare_equal_precision_bounds(const struct SeqshareConfig *config,
                                               double tol,
                                               double *out_lower,
                                               double *out_upper);

// Closed-form uncertainty of observer `len + 1` whose predecessors have
// quality factors `f_list[0..len]`.
//
// # Safety
// `f_list` must point to `len` readable doubles; `out_u` valid for writes.
SeqshareStatus seqshare_uncertainty(uint32_t scenario,
                                    uint64_t d,
                                    double g_n,
                                    const double *f_list,
                                    size_t len,
                                    double p,
                                    double *out_u);

// Same quantity as [`seqshare_uncertainty`] from explicit density
// matrices (`d <= 11`, at most 4 observers). Predecessor `k` measures with
// precision `g_prev[k]` and quality `f_prev[k]`.
//
// # Safety
// `g_prev` and `f_prev` must point to `len` readable doubles; `out_u`
// valid for writes.
SeqshareStatus seqshare_oracle_uncertainty(uint32_t scenario,
                                           uint64_t d,
                                           double p,
                                           double g_n,
                                           const double *g_prev,
                                           const double *f_prev,
                                           size_t len,
                                           double *out_u);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEQSHARE_H */
