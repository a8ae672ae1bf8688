#ifndef NONLOCAL_LWR_H
#define NONLOCAL_LWR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlStatus {
  NL_STATUS_OK = 0,
  NL_STATUS_NULL_POINTER = 1,
  NL_STATUS_INVALID_UTF8 = 2,
  /*
   Invalid configuration, kernel, grid or initial data.
   */
  NL_STATUS_CONFIG = 3,
  /*
   The requested step exceeds the stability bound, or none exists.
   */
  NL_STATUS_CFL = 4,
  NL_STATUS_INVALID_ARGUMENT = 5,
  /*
   The output buffer is shorter than required; nothing was written.
   */
  NL_STATUS_BUFFER_TOO_SMALL = 6,
  NL_STATUS_PANIC = 7,
  NL_STATUS_OTHER = 8,
} NlStatus;

/*
 Opaque simulation handle.
 */
typedef struct NlSimulation NlSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Last error message on this thread, or null. Valid until the next call
 into this library from the same thread.
 */
const char *nl_last_error(void);

/*
 Builds a simulation at `t = 0` from a TOML run configuration.

 # Safety
 `config_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NlStatus nl_simulation_new(const char *config_toml, struct NlSimulation **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `sim` must come from [`nl_simulation_new`] and not be used afterwards.
 */
void nl_simulation_free(struct NlSimulation *sim);

/*
 Advances by one full time step.

 # Safety
 `sim` must be a live handle.
 */
enum NlStatus nl_simulation_step(struct NlSimulation *sim);

/*
 Advances to exactly `t`, shortening the last step. Earlier times are a no-op.

 # Safety
 `sim` must be a live handle.
 */
enum NlStatus nl_simulation_run_to(struct NlSimulation *sim, double t);

/*
 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NlStatus nl_simulation_time(const struct NlSimulation *sim, double *out);

/*
 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NlStatus nl_simulation_tau(const struct NlSimulation *sim, double *out);

/*
 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NlStatus nl_simulation_n_cells(const struct NlSimulation *sim, size_t *out);

/*
 Copies the cell averages into `buf`, which must hold `n_cells` values.

 # Safety
 `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum NlStatus nl_simulation_density(const struct NlSimulation *sim, double *buf, size_t len);

/*
 Total number of invariant violations recorded so far.

 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NlStatus nl_simulation_invariant_failures(const struct NlSimulation *sim, size_t *out);

/*
 Cell weights `gamma_k` of a kernel given as a TOML table
 (`family`, `eta`, optional `w0`, `coefficients`). The number of weights
 is written to `n_out`; with a null or short `buf` only the count is
 written and `BufferTooSmall` is returned.

 # Safety
 `kernel_toml` must be NUL-terminated, `n_out` valid, and `buf` valid
 for `len` writes when non-null.
 */
enum NlStatus nl_kernel_weights(const char *kernel_toml,
                                double h,
                                double *buf,
                                size_t len,
                                size_t *n_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONLOCAL_LWR_H */
