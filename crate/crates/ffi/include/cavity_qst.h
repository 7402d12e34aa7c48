#ifndef CAVITY_QST_H
#define CAVITY_QST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum CqStatus {
  CQ_STATUS_OK = 0,
  CQ_STATUS_NULL_POINTER = 1,
  CQ_STATUS_INVALID_ARGUMENT = 2,
  CQ_STATUS_BUFFER_TOO_SMALL = 3,
  CQ_STATUS_COMPUTE_FAILED = 4,
  CQ_STATUS_PANIC = 5,
} CqStatus;

typedef enum CqCriticalKind {
  CQ_CRITICAL_KIND_EXACT_CROSSING = 0,
  CQ_CRITICAL_KIND_AVOIDED_MINIMUM = 1,
} CqCriticalKind;

// Opaque handle holding one diagonalized Hamiltonian.
typedef struct CqSystem CqSystem;

// Hamiltonian parameters, mirrored field by field.
typedef struct CqParams {
  uint32_t n_bosons;
  double omega0;
  double omega;
  double anharm;
  double hop;
  double coupling;
} CqParams;

// Located critical coupling.
typedef struct CqCritical {
  double g_c;
  double gap_at_gc;
  enum CqCriticalKind kind;
  double bracket_lo;
  double bracket_hi;
  uint32_t iterations;
} CqCritical;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Diagonalizes the Hamiltonian for `params` and stores a new handle in `*out`.
//
// # Safety
// `params` must point to a valid `CqParams`; `out` must be writable.
enum CqStatus cq_system_new(const struct CqParams *params, struct CqSystem **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `sys` must come from `cq_system_new` and not be freed twice.
void cq_system_free(struct CqSystem *sys);

// Hilbert-space dimension `(N_B + 1)(N_B + 2)/2`.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum CqStatus cq_system_dim(const struct CqSystem *sys, size_t *out);

// Eigenvalues in ascending order.
//
// # Safety
// `sys` must be a live handle; `buf` must hold `len` doubles.
enum CqStatus cq_system_energies(const struct CqSystem *sys,
                                 double *buf,
                                 size_t len,
                                 size_t *written);

// `E1 - E0`.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum CqStatus cq_system_gap(const struct CqSystem *sys, double *out);

// Population imbalance `P1 - P2` at `steps + 1` equally spaced times in
// `[0, tmax]`, starting from site `(v0, p0)`.
//
// # Safety
// `sys` must be a live handle; `buf` must hold `len` doubles.
enum CqStatus cq_system_imbalance(const struct CqSystem *sys,
                                  uint32_t v0,
                                  uint32_t p0,
                                  double tmax,
                                  size_t steps,
                                  double *buf,
                                  size_t len,
                                  size_t *written);

// Infinite-time averaged site probabilities in row-major site order.
// `eps_deg <= 0` selects the default degeneracy tolerance.
//
// # Safety
// `sys` must be a live handle; `buf` must hold `len` doubles.
enum CqStatus cq_system_limiting(const struct CqSystem *sys,
                                 uint32_t v0,
                                 uint32_t p0,
                                 double eps_deg,
                                 double *buf,
                                 size_t len,
                                 size_t *written);

// Critical coupling for `params` (its `coupling` field is ignored). Pass
// `g_lo >= g_hi` to use the default bracket.
//
// # Safety
// `params` must be valid; `out` must be writable.
enum CqStatus cq_find_critical(const struct CqParams *params,
                               double g_lo,
                               double g_hi,
                               struct CqCritical *out);

// Effective hopping between the two localized configurations.
//
// # Safety
// `out` must be writable.
enum CqStatus cq_effective_hopping(uint32_t n_bosons, double hop, double anharm, double *out);

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *cq_last_error_message(void);

// Library version as a static nul-terminated string.
const char *cq_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITY_QST_H */
