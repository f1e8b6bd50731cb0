#ifndef LATTICE_TELEPORT_H
#define LATTICE_TELEPORT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LtMode {
  LT_MODE_THREE_SITE = 0,
  LT_MODE_EVEN_N = 1,
  LT_MODE_SINGLE_ANCILLA = 2,
} LtMode;

typedef enum LtStatus {
  LT_STATUS_OK = 0,
  LT_STATUS_NULL_POINTER = 1,
  LT_STATUS_INVALID_ARGUMENT = 2,
  LT_STATUS_VERIFICATION_FAILED = 3,
  LT_STATUS_INTERNAL = 4,
  LT_STATUS_PANIC = 5,
} LtStatus;

/**
 * Opaque teleportation report.
 */
typedef struct LtReport LtReport;

/**
 * Opaque lattice state.
 */
typedef struct LtState LtState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library; valid until the next failing call on the same thread.
 */
const char *lt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lt_version(void);

/**
 * Teleports `alpha|0⟩ + beta|1⟩` from site 1 to site `num_sites`.
 */
enum LtStatus lt_teleport(uint32_t num_sites,
                          enum LtMode mode,
                          double alpha_re,
                          double alpha_im,
                          double beta_re,
                          double beta_im,
                          struct LtReport **out);

double lt_report_fidelity(const struct LtReport *report);

double lt_report_purity(const struct LtReport *report);

double lt_report_leakage(const struct LtReport *report);

size_t lt_report_gate_count(const struct LtReport *report);

/**
 * Serializes the report; free the string with [`lt_string_free`].
 */
enum LtStatus lt_report_to_json(const struct LtReport *report, char **out);

void lt_report_free(struct LtReport *report);

void lt_string_free(char *s);

/**
 * Runs the oracle suite up to `max_sites` (4..=12). Returns
 * `VerificationFailed` with the failing check names as the error message
 * when any check fails; `failed_checks` receives their number either way.
 */
enum LtStatus lt_verify(uint32_t max_sites, uint32_t *failed_checks);

/**
 * Lattice register `[A1.., S1..SN]` in its all-zero state.
 */
enum LtStatus lt_state_new(uint32_t num_sites, uint32_t num_ancillas, struct LtState **out);

void lt_state_free(struct LtState *state);

size_t lt_state_dim(const struct LtState *state);

/**
 * Hadamard on levels (0,1) of a site or (0,2) of an ancilla.
 */
enum LtStatus lt_state_hadamard(struct LtState *state, const char *particle);

enum LtStatus lt_state_shift(struct LtState *state, double phase);

/**
 * Sweep of `ancilla` over `num_sites` 1-based site indices, in order.
 */
enum LtStatus lt_state_sweep(struct LtState *state,
                             const char *ancilla,
                             const uint32_t *sites,
                             size_t num_sites,
                             double phase);

/**
 * Loads `alpha|0⟩ + beta|1⟩` into `particle`, all else in |0⟩.
 */
enum LtStatus lt_state_load_qubit(struct LtState *state,
                                  const char *particle,
                                  double alpha_re,
                                  double alpha_im,
                                  double beta_re,
                                  double beta_im);

/**
 * Fidelity of `particle`'s reduced state with `alpha|0⟩ + beta|1⟩`.
 */
enum LtStatus lt_state_qubit_fidelity(const struct LtState *state,
                                      const char *particle,
                                      double alpha_re,
                                      double alpha_im,
                                      double beta_re,
                                      double beta_im,
                                      double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LATTICE_TELEPORT_H */
